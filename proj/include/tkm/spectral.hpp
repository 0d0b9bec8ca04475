#pragma once

// Trigonometric interpolation of periodic grid data: forward DFT on the
// M^d grid and point evaluation of the resulting Fourier series, optionally
// with each mode damped by exp(-D |m|^2 t).

#include <complex>
#include <span>
#include <vector>

#include "tkm/phase_field.hpp"

namespace tkm {

class FourierSeries {
 public:
  struct Mode {
    std::vector<int> freq;
    std::complex<double> coeff;
  };

  FourierSeries() = default;
  /// `periodic` holds M^d samples in Grid order. Modes whose magnitude is at
  /// most prune_rel * (largest magnitude) are dropped; prune_rel = 0 keeps all.
  FourierSeries(const Grid& grid, std::span<const double> periodic, double prune_rel = 1e-15);

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<Mode>& modes() const noexcept { return modes_; }

  double operator()(std::span<const double> x) const { return evaluate(x, 0.0, 0.0); }
  /// sum_m c_m exp(-diffusion |m|^2 t) exp(i m.x), real part.
  double evaluate(std::span<const double> x, double t, double diffusion) const;
  /// The same series sampled back on the grid.
  std::vector<double> sample_on_grid(double t, double diffusion) const;
  /// Fraction of spectral energy in modes with max_l |m_l| > M/3.
  double top_third_energy_fraction() const;

 private:
  Grid grid_;
  std::vector<Mode> modes_;
  std::vector<int> max_freq_;
};

/// Forward DFT coefficients c_k = M^{-d} sum_x f(x) exp(-i k.x) in FFTW order.
std::vector<std::complex<double>> forward_dft(const Grid& grid, std::span<const double> values);

}  // namespace tkm
