#pragma once

// Method-of-lines discretization of the nonlocal equation
//   u_t(x) = 1/(sigma_d eps^{d+2}) int sin(u(y) - u(x)) K((y - x)/eps) dy
// on a uniform periodic grid, plus the checks built on it: consistency with
// (kappa2/(2d)) Laplacian, the linear comparison evolution and grid Lipschitz
// constants.

#include <functional>
#include <span>
#include <vector>

#include "tkm/kernel.hpp"
#include "tkm/kuramoto.hpp"
#include "tkm/phase_field.hpp"

namespace tkm {

/// Lebesgue measure of the box [lo, hi] intersected with the centered ball of
/// the given radius (any dimension; adaptive Gauss-Kronrod across the kinks).
double box_ball_overlap(std::span<const double> lo, std::span<const double> hi, double radius);

/// raw: cell weights (mass of K(./eps) over the cell around o h, the centre
/// value times h^d for smooth kernels and the exact cut-cell measure for the
/// indicator) divided by sigma_d eps^{d+2}.
/// second_moment: the same weights rescaled by one common factor so that
/// sum_o w_o |o h|^2 equals kappa2 exactly.
enum class StencilNormalization { second_moment, raw };

/// Smallest power of two M with 2pi/M <= eps/8.
int integral_grid_size(double epsilon);

class NonlocalOperator {
 public:
  struct Entry {
    std::vector<int> offset;
    double weight;
  };

  /// Throws std::invalid_argument unless h <= eps/8 and dims agree.
  NonlocalOperator(const Grid& grid, double epsilon, const Kernel& kernel,
                   StencilNormalization normalization = StencilNormalization::second_moment);

  const Grid& grid() const noexcept { return grid_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::vector<Entry>& stencil() const noexcept { return entries_; }
  const KernelMoments& moments() const noexcept { return moments_; }
  /// sum_o w_o |o h|^2 before any rescaling.
  double raw_second_moment() const noexcept { return raw_second_moment_; }
  double rescale_factor() const noexcept { return rescale_; }

  /// Decomposed evaluation on wrapped indices (winding offsets drop out of sin).
  void apply(std::span<const double> u, std::span<double> out) const;
  /// Linear operator psi(x) sum_o w_o (u(x+o) - u(x)) with explicit winding offsets.
  void apply_linear(std::span<const double> psi, const WindingVector& winding, std::span<const double> u,
                    std::span<double> out) const;

 private:
  Grid grid_;
  double epsilon_;
  KernelMoments moments_;
  std::vector<Entry> entries_;
  double raw_second_moment_ = 0.0;
  double rescale_ = 1.0;
  // flattened per-entry data for the shifted-array sweep
  std::vector<int> flat_offsets_;
  // scratch for apply
  mutable std::vector<double> sin_;
  mutable std::vector<double> cos_;
  mutable std::vector<double> acc_s_;
  mutable std::vector<double> acc_c_;
};

std::vector<double> nonlocal_rhs(const NonlocalOperator& op, const GridField& u);
/// Reference path: each neighbor value continued with 2pi k . cell, then sin.
std::vector<double> nonlocal_rhs_explicit(const NonlocalOperator& op, const GridField& u);

/// Throws std::invalid_argument when dt > c_stab eps^2.
void integrate(const NonlocalOperator& op, const GridField& u0, double dt, double t_end, std::size_t stride,
               const Observer& observer, double c_stab = 0.1);
struct GridSnapshot {
  double time = 0.0;
  GridField field;
};
std::vector<GridSnapshot> integrate(const NonlocalOperator& op, const GridField& u0, double dt, double t_end,
                                    std::size_t stride = 1, double c_stab = 0.1);

/// sup over the grid of |nonlocal_rhs(v) - (kappa2/(2d)) Laplacian(v)|; `ic` must carry a Laplacian.
double operator_consistency_error(const NonlocalOperator& op, const InitialCondition& ic);

/// Evolves v and w under the linear operator with multiplier psi and reports
/// whether v >= w - 1e-9 held at every step.
bool linear_comparison_test(const NonlocalOperator& op, std::span<const double> psi, const GridField& v0,
                            const GridField& w0, double dt, double t_end);

/// Max over grid points of the Euclidean norm of forward difference quotients
/// (neighbors across the boundary are continued with the winding offset).
double grid_lipschitz(const GridField& u);

/// One application of u -> u0 + int_0^t RHS(u(s)) ds. `guess` holds the
/// iterate at equally spaced times 0, tau/m, ..., tau (m >= 1); the integral is
/// the cumulative trapezoid rule. Returns the image at the same times.
std::vector<std::vector<double>> fixed_point_map(const NonlocalOperator& op, const GridField& u0,
                                                 const std::vector<std::vector<double>>& guess, double tau);

}  // namespace tkm
