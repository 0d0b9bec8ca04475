#pragma once

// Radially symmetric coupling kernels supported in the closed unit ball,
// normalized to unit mass on R^d, and their radial moments.

#include <span>
#include <string>

namespace tkm {

enum class KernelShape { indicator, bump };

/// Volume sigma_d of the unit ball in R^d.
double unit_ball_volume(int dim);
/// Surface measure of the unit sphere S^{d-1}, equal to d * sigma_d.
double unit_sphere_area(int dim);

class Kernel {
 public:
  /// 1/sigma_d on the closed unit ball.
  static Kernel indicator(int dim);
  /// c * exp(-1 / (1 - r^2)) for r < 1, c fixed by unit mass.
  static Kernel bump(int dim);
  /// "indicator" or "bump"; throws std::invalid_argument otherwise.
  static Kernel by_name(const std::string& name, int dim);

  double profile(double r) const noexcept;
  double operator()(std::span<const double> z) const noexcept;

  int dim() const noexcept { return dim_; }
  KernelShape shape() const noexcept { return shape_; }
  const std::string& name() const noexcept { return name_; }
  /// Multiplicative constant applied to the unnormalized shape.
  double normalization() const noexcept { return scale_; }
  /// Numerical mass S_{d-1} * int_0^1 r^{d-1} profile(r) dr.
  double mass() const;

 private:
  Kernel(KernelShape shape, int dim);

  KernelShape shape_;
  int dim_;
  double scale_ = 1.0;
  std::string name_;
};

/// sigma_d and kappa_i = (1 / sigma_d) int |z|^i K(z) dz for i = 1, 2.
struct KernelMoments {
  double sigma_d = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;

  /// Diffusion coefficient kappa2 / (2d) of the limiting heat equation.
  double diffusion(int dim) const noexcept { return kappa2 / (2.0 * dim); }
};

KernelMoments moments(const Kernel& kernel);

/// Radial integral S_{d-1} int_0^1 r^{p + d - 1} profile(r) dr, adaptive
/// Gauss-Kronrod to 1e-12 relative. Throws NumericError when the error
/// estimate stays above tolerance.
double radial_moment(const Kernel& kernel, int power);

}  // namespace tkm
