#pragma once

// Random geometric graphs on the flat torus: uniform point clouds, exact
// epsilon-neighborhoods through a periodic cell list, and degree statistics.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tkm/kernel.hpp"
#include "tkm/torus.hpp"

namespace tkm {

/// n points of the d-torus stored row-major (point i occupies coords[i*d .. i*d+d)).
struct PointCloud {
  int dim = 1;
  std::uint64_t seed = 0;
  std::vector<double> coords;

  std::size_t size() const noexcept { return coords.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t i) const noexcept {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  TorusPoint torus_point(std::size_t i) const { return TorusPoint(point(i)); }
};

/// i.i.d. uniform points on [0, 2pi)^d from std::mt19937_64(seed); the
/// 53-bit mantissa mapping makes the output identical across platforms.
PointCloud sample_uniform(std::size_t n, int dim, std::uint64_t seed);

/// Deterministic lattice with `per_axis` points per axis at spacing 2pi/per_axis,
/// offset by `shift` (same shift on every axis).
PointCloud lattice_cloud(std::size_t per_axis, int dim, double shift = 0.0);

/// Same point set renumbered in spatial order (lexicographic over a coarse
/// cell grid, then by first coordinate). In d = 1 this is a plain sort.
PointCloud spatially_sorted(const PointCloud& cloud);

/// Periodic cell grid with cell side >= radius.
class CellList {
 public:
  CellList(const PointCloud& cloud, double radius);

  int cells_per_axis() const noexcept { return per_axis_; }
  /// Distinct cells whose points can lie within `radius` of a point in `cell`.
  std::vector<std::size_t> neighbor_cells(std::size_t cell) const;
  std::size_t cell_of(std::span<const double> x) const noexcept;
  std::span<const std::uint32_t> members(std::size_t cell) const noexcept {
    return {members_.data() + starts_[cell], starts_[cell + 1] - starts_[cell]};
  }
  std::size_t cell_count() const noexcept { return starts_.size() - 1; }

 private:
  int dim_;
  int per_axis_;
  std::vector<std::size_t> starts_;
  std::vector<std::uint32_t> members_;
};

/// Compressed neighbor lists. For node i the entries [offsets[i], offsets[i+1])
/// hold neighbor indices in increasing order, the min-image displacement
/// x_j^i - x_i (dim doubles each) and the weight K(displacement / eps).
struct NeighborGraph {
  int dim = 1;
  double epsilon = 0.0;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> neighbors;
  std::vector<double> displacements;
  std::vector<double> weights;

  std::size_t size() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t edge_count() const noexcept { return neighbors.size(); }
  std::size_t degree(std::size_t i) const noexcept { return offsets[i + 1] - offsets[i]; }
  std::span<const std::uint32_t> neighbors_of(std::size_t i) const noexcept {
    return {neighbors.data() + offsets[i], degree(i)};
  }
  std::span<const double> weights_of(std::size_t i) const noexcept { return {weights.data() + offsets[i], degree(i)}; }
  std::span<const double> displacement(std::size_t edge) const noexcept {
    return {displacements.data() + edge * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::vector<int> degrees() const;
};

/// Edges (i, j), i != j, with torus distance strictly below epsilon.
/// Throws std::invalid_argument unless 0 < epsilon < 1 and GraphBuildError
/// naming the first isolated node.
NeighborGraph build_graph(const PointCloud& cloud, double epsilon, const Kernel& kernel);

/// Neighbor counts N_i via the cell list; isolated nodes are allowed here.
std::vector<int> neighbor_counts(const PointCloud& cloud, double epsilon);

/// Expected degree sigma_d eps^d n / (2pi)^d.
double expected_degree(std::size_t n, int dim, double epsilon);

struct DegreeStats {
  std::size_t n = 0;
  int dim = 1;
  double epsilon = 0.0;
  int min = 0;
  int max = 0;
  double mean = 0.0;
  double expected = 0.0;
  double max_abs_deviation = 0.0;

  /// 2n exp(-2 lambda^2 / (mu + lambda/3)), the union-bounded tail for
  /// sup_i |N_i - mu| > lambda in the form used for the degree bound.
  double bernstein_tail(double lambda) const;
  /// lambda solving bernstein_tail(lambda) = p (closed form).
  double bernstein_lambda(double p) const;
  /// Textbook Bernstein constant: 2n exp(-(lambda^2/2) / (mu + lambda/3)).
  double bernstein_tail_textbook(double lambda) const;
  double bernstein_lambda_textbook(double p) const;
};

/// Throws std::invalid_argument for fewer than two nodes.
DegreeStats degree_stats(std::span<const int> degrees, int dim, double epsilon);
DegreeStats degree_stats(const NeighborGraph& graph);

/// eps^{d+2} n / log n, the quantity that must diverge in the scaling regime.
double condition_one_diagnostic(std::size_t n, int dim, double epsilon);

/// eps(n) = c n^{-1/(d+3)} with c chosen so that eps(2000) = 0.25 in d = 2.
double compliant_epsilon(std::size_t n, int dim);
/// eps(n) = (C log n / n)^{1/(d+2)}, the borderline rate.
double borderline_epsilon(std::size_t n, int dim, double constant = 1.0);

/// CSV "i,j,dx_1..dx_d,weight", one row per directed edge.
void write_graph_csv(std::ostream& out, const NeighborGraph& graph);

}  // namespace tkm
