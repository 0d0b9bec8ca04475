#pragma once

// Closed-form spectral solution of u_t = D Laplacian(u), D = kappa2 / (2d), for
// pseudo-periodic data: u = k.x + periodic part, each Fourier mode of the
// periodic part decaying as exp(-D |m|^2 t).

#include <span>
#include <vector>

#include "tkm/kernel.hpp"
#include "tkm/phase_field.hpp"
#include "tkm/spectral.hpp"

namespace tkm {

class HeatSolution {
 public:
  /// When `zero_mean` is set the constant mode is removed from the periodic part.
  HeatSolution(const GridField& u0, const KernelMoments& moments, bool zero_mean = false);

  double diffusion() const noexcept { return diffusion_; }
  const WindingVector& winding() const noexcept { return winding_; }
  const FourierSeries& periodic_part() const noexcept { return series_; }
  /// Top-third spectral energy fraction exceeded 1e-6.
  bool aliasing_warning() const noexcept { return aliasing_fraction_ > 1e-6; }
  double aliasing_fraction() const noexcept { return aliasing_fraction_; }

  double tilt(std::span<const double> x) const;
  /// tilt(x) + periodic part at wrap(x); x may be any lifted point.
  double eval(double t, std::span<const double> x) const;
  GridField on_grid(double t) const;
  /// Values at every node of a cloud.
  std::vector<double> at_nodes(double t, const PointCloud& cloud) const;

 private:
  Grid grid_;
  WindingVector winding_;
  double diffusion_ = 0.0;
  FourierSeries series_;
  double aliasing_fraction_ = 0.0;
};

}  // namespace tkm
