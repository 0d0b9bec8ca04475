#include "tkm/torus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tkm {

double wrap_coordinate(double y) {
  if (!std::isfinite(y)) {
    throw std::invalid_argument("wrap: non-finite coordinate " + std::to_string(y));
  }
  double r = std::fmod(y, kTwoPi);
  if (r < 0.0) {
    r += kTwoPi;
  }
  // -tiny + 2pi can round up to 2pi
  if (r >= kTwoPi) {
    r = 0.0;
  }
  return r;
}

TorusPoint::TorusPoint(std::span<const double> coords) : coords_(coords.size()) {
  if (coords.empty()) {
    throw std::invalid_argument("TorusPoint: dimension must be at least 1");
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    coords_[i] = wrap_coordinate(coords[i]);
  }
}

TorusPoint wrap(std::span<const double> y) { return TorusPoint(y); }

double Displacement::norm() const noexcept {
  double s = 0.0;
  for (double v : vec) s += v * v;
  return std::sqrt(s);
}

bool WindingVector::is_zero() const noexcept {
  for (int v : k) {
    if (v != 0) return false;
  }
  return true;
}

double WindingVector::tilt(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t l = 0; l < k.size(); ++l) s += k[l] * x[l];
  return s;
}

namespace {
void check_same_dim(const TorusPoint& x, const TorusPoint& y) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument("torus: dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                                std::to_string(y.dim()) + ")");
  }
}
}  // namespace

Displacement min_image_displacement(const TorusPoint& x, const TorusPoint& y) {
  check_same_dim(x, y);
  Displacement d;
  d.vec.resize(static_cast<std::size_t>(x.dim()));
  for (int l = 0; l < x.dim(); ++l) {
    d.vec[static_cast<std::size_t>(l)] = min_image_delta(x[l], y[l]);
  }
  return d;
}

double torus_distance(const TorusPoint& x, const TorusPoint& y) {
  check_same_dim(x, y);
  return std::sqrt(torus_distance_sq(x.coords(), y.coords()));
}

double torus_distance_sq(std::span<const double> x, std::span<const double> y) noexcept {
  double s = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    const double delta = min_image_delta(x[l], y[l]);
    s += delta * delta;
  }
  return s;
}

double winding_offset(const WindingVector& k, std::span<const int> cell) {
  long long s = 0;
  const std::size_t dim = std::min(k.k.size(), cell.size());
  for (std::size_t l = 0; l < dim; ++l) {
    s += static_cast<long long>(k.k[l]) * cell[l];
  }
  return kTwoPi * static_cast<double>(s);
}

}  // namespace tkm
