#include "tkm/render.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "tkm/errors.hpp"

namespace tkm {

std::array<std::uint8_t, 3> hue_to_rgb(double hue) {
  hue -= std::floor(hue);
  const double h6 = hue * 6.0;
  const int sector = static_cast<int>(h6) % 6;
  const double f = h6 - std::floor(h6);
  const auto up = static_cast<std::uint8_t>(std::lround(255.0 * f));
  const auto down = static_cast<std::uint8_t>(255 - up);
  switch (sector) {
    case 0: return {255, up, 0};
    case 1: return {down, 255, 0};
    case 2: return {0, 255, up};
    case 3: return {0, down, 255};
    case 4: return {up, 0, 255};
    default: return {255, 0, down};
  }
}

Image render_phases(const NodePhases& phases, double time, const RenderStyle& style) {
  if (!phases.cloud || phases.cloud->dim != 2)
    throw UnsupportedRender("phase heatmaps need a two-dimensional cloud");
  if (style.width < 1 || style.height < 1 || style.radius < 0)
    throw std::invalid_argument("render_phases: bad image geometry");
  Image img{style.width, style.height,
            std::vector<std::uint8_t>(static_cast<std::size_t>(style.width) * static_cast<std::size_t>(style.height) * 3, 255)};
  const auto& cloud = *phases.cloud;
  const int r = style.radius;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto x = cloud.point(i);
    const double value = phases.values[i] + (style.add_time_offset ? time : 0.0);
    const auto color = hue_to_rgb(wrap_coordinate(value) / kTwoPi);
    const int cx = static_cast<int>(std::floor(x[0] / kTwoPi * style.width));
    // axis 2 points up
    const int cy = style.height - 1 - static_cast<int>(std::floor(x[1] / kTwoPi * style.height));
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx * dx + dy * dy > r * r) continue;
        const int px = ((cx + dx) % style.width + style.width) % style.width;
        const int py = ((cy + dy) % style.height + style.height) % style.height;
        auto* p = &img.rgb[(static_cast<std::size_t>(py) * static_cast<std::size_t>(style.width) + static_cast<std::size_t>(px)) * 3];
        p[0] = color[0];
        p[1] = color[1];
        p[2] = color[2];
      }
    }
  }
  return img;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw std::runtime_error("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng error while writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    auto* row = const_cast<png_bytep>(image.rgb.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width) * 3);
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void render_phase_heatmap(const NodePhases& phases, double time, const std::filesystem::path& path,
                          const RenderStyle& style) {
  write_png(render_phases(phases, time, style), path);
}

}  // namespace tkm
