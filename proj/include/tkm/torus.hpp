#pragma once

// Flat torus (R / 2piZ)^d: wrapping, min-image displacements and the
// bookkeeping of pseudo-periodic value offsets between periodic copies.

#include <numbers>
#include <span>
#include <vector>

namespace tkm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPi = std::numbers::pi;

/// A point of the torus; every coordinate lies in [0, 2pi).
class TorusPoint {
 public:
  TorusPoint() = default;
  /// Wraps each coordinate. Throws std::invalid_argument on non-finite input.
  explicit TorusPoint(std::span<const double> coords);

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  double operator[](int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Shortest representative of y - x over all periodic copies of y. Each
/// component lies in (-pi, pi]; an exact antipodal tie resolves to +pi.
struct Displacement {
  std::vector<double> vec;

  double norm() const noexcept;
};

/// Integer winding numbers k_l of a pseudo-periodic field:
/// f(x + 2pi e_l) = f(x) + 2pi k_l.
struct WindingVector {
  std::vector<int> k;

  WindingVector() = default;
  explicit WindingVector(std::vector<int> values) : k(std::move(values)) {}
  static WindingVector zero(int dim) { return WindingVector(std::vector<int>(static_cast<std::size_t>(dim), 0)); }

  int dim() const noexcept { return static_cast<int>(k.size()); }
  bool is_zero() const noexcept;
  /// Value of the tilt sum_l k_l x_l at a (lifted) position.
  double tilt(std::span<const double> x) const;

  friend bool operator==(const WindingVector&, const WindingVector&) = default;
};

/// y mod 2pi component-wise, into [0, 2pi).
double wrap_coordinate(double y);
TorusPoint wrap(std::span<const double> y);

/// Scalar min-image difference b - a for coordinates in [0, 2pi).
inline double min_image_delta(double a, double b) noexcept {
  double delta = b - a;
  if (delta > kPi) {
    delta -= kTwoPi;
  } else if (delta <= -kPi) {
    delta += kTwoPi;
  }
  return delta;
}

Displacement min_image_displacement(const TorusPoint& x, const TorusPoint& y);
double torus_distance(const TorusPoint& x, const TorusPoint& y);

/// Squared torus distance for raw wrapped coordinate spans (no checks).
double torus_distance_sq(std::span<const double> x, std::span<const double> y) noexcept;

/// 2pi * sum_l k_l m_l: the value offset of the copy shifted by `cell`.
double winding_offset(const WindingVector& k, std::span<const int> cell);

}  // namespace tkm
