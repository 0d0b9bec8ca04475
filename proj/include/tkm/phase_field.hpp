#pragma once

// Phase configurations stored as lifted real values plus a winding vector,
// on point clouds (NodePhases) and on uniform periodic grids (GridField).

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tkm/rgg.hpp"
#include "tkm/torus.hpp"

namespace tkm {

/// Uniform grid of M points per axis on [0, 2pi)^d, x_i = i * 2pi / M.
struct Grid {
  int dim = 1;
  int points_per_axis = 0;

  double spacing() const noexcept { return kTwoPi / points_per_axis; }
  std::size_t size() const noexcept;
  /// Coordinates of the flat index (axis 0 varies fastest).
  void coordinates(std::size_t flat, std::span<double> out) const noexcept;
  std::size_t flat_index(std::span<const long long> idx) const noexcept;  // idx already in [0, M)

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// A closed-form pseudo-periodic initial condition on R^d.
struct InitialCondition {
  std::string name;
  int dim = 1;
  WindingVector winding;
  std::function<double(std::span<const double>)> value;
  /// Optional closed-form Laplacian, used by operator consistency checks.
  std::function<double(std::span<const double>)> laplacian;
};

/// k x_axis (axis is 1-based).
InitialCondition twist_ic(int dim, int k, int axis);
/// k x . (1, ..., 1).
InitialCondition diagonal_twist_ic(int dim, int k);
/// amp sin(x_axis), periodic.
InitialCondition sine_ic(int dim, int axis, double amp = 1.0);
/// k x_twist_axis + amp sin(x_sine_axis).
InitialCondition twist_plus_sine_ic(int dim, int k, int twist_axis, double amp, int sine_axis);
InitialCondition constant_ic(int dim, double c);

/// Lifted node values; `winding` fixes how values continue to periodic copies.
struct NodePhases {
  std::shared_ptr<const PointCloud> cloud;
  std::vector<double> values;
  WindingVector winding;

  std::size_t size() const noexcept { return values.size(); }
  /// Value at the copy x_i + 2pi * cell: values[i] + 2pi k . cell.
  double value_at_copy(std::size_t i, std::span<const int> cell) const;
};

/// Lifted grid samples with pseudo-periodic continuation.
struct GridField {
  Grid grid;
  std::vector<double> values;
  WindingVector winding;

  /// Value at an arbitrary integer index (continued pseudo-periodically).
  double at(std::span<const long long> idx) const;
};

NodePhases twisted_state(int k, int axis, std::shared_ptr<const PointCloud> cloud);
GridField twisted_state(int k, int axis, const Grid& grid);

/// Samples f(x + 2pi e_l) - f(x) at 8 pseudo-random x per axis and compares
/// with 2pi k_l (tolerance 1e-8); throws std::invalid_argument naming the
/// measured offset on mismatch.
void check_declared_winding(const InitialCondition& ic);

NodePhases eval_initial(const InitialCondition& ic, std::shared_ptr<const PointCloud> cloud);
GridField eval_initial(const InitialCondition& ic, const Grid& grid);

NodePhases mean_shift_to_zero(NodePhases phases);
GridField mean_shift_to_zero(GridField field);

/// none: plain sup of |a - b|. quotient: sup after the best constant offset,
/// i.e. (max(a - b) - min(a - b)) / 2.
enum class ShiftMode { none, quotient };

double sup_difference(std::span<const double> a, std::span<const double> b, ShiftMode mode);
/// Throws std::invalid_argument when windings or sizes differ.
double sup_lift_distance(const NodePhases& a, const NodePhases& b, ShiftMode mode = ShiftMode::none);
/// Against an evaluator of the comparison field at node positions.
double sup_lift_distance(const NodePhases& a, const WindingVector& b_winding,
                         const std::function<double(std::span<const double>)>& b, ShiftMode mode = ShiftMode::none);

/// "i,x_1..x_d,lifted_value,wrapped_value" preceded by '#' metadata lines.
void write_phase_csv(std::ostream& out, const NodePhases& phases, double time, ShiftMode mode = ShiftMode::none);
void write_grid_csv(std::ostream& out, const GridField& field, double time);

/// Parsed snapshot (node positions and lifted values).
struct PhaseSnapshot {
  int dim = 1;
  double time = 0.0;
  WindingVector winding;
  std::vector<double> coords;
  std::vector<double> lifted;
};
PhaseSnapshot read_phase_csv(std::istream& in);

}  // namespace tkm
