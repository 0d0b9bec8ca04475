#pragma once

// Phase heatmaps for planar clouds: each node is a small disk at its torus
// position colored by the hue of its wrapped phase.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "tkm/phase_field.hpp"

namespace tkm {

struct RenderStyle {
  int width = 400;
  int height = 400;
  int radius = 3;
  /// Color by u + t instead of u.
  bool add_time_offset = false;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

/// Fully saturated color wheel, hue in [0, 1).
std::array<std::uint8_t, 3> hue_to_rgb(double hue);

/// Throws UnsupportedRender unless the cloud is two-dimensional.
Image render_phases(const NodePhases& phases, double time, const RenderStyle& style = {});
void write_png(const Image& image, const std::filesystem::path& path);
void render_phase_heatmap(const NodePhases& phases, double time, const std::filesystem::path& path,
                          const RenderStyle& style = {});

}  // namespace tkm
