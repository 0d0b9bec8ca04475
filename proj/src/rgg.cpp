#include "tkm/rgg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "tkm/errors.hpp"
#include "tkm/io.hpp"

namespace tkm {

PointCloud sample_uniform(std::size_t n, int dim, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
  if (dim < 1) throw std::invalid_argument("sample_uniform: dimension must be >= 1");
  PointCloud cloud;
  cloud.dim = dim;
  cloud.seed = seed;
  cloud.coords.resize(n * static_cast<std::size_t>(dim));
  std::mt19937_64 engine(seed);
  for (double& c : cloud.coords) {
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    c = wrap_coordinate(unit * kTwoPi);
  }
  return cloud;
}

PointCloud lattice_cloud(std::size_t per_axis, int dim, double shift) {
  if (per_axis < 1 || dim < 1) throw std::invalid_argument("lattice_cloud: empty lattice");
  PointCloud cloud;
  cloud.dim = dim;
  std::size_t n = 1;
  for (int l = 0; l < dim; ++l) n *= per_axis;
  cloud.coords.resize(n * static_cast<std::size_t>(dim));
  const double spacing = kTwoPi / static_cast<double>(per_axis);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (int l = 0; l < dim; ++l) {
      const std::size_t idx = rest % per_axis;
      rest /= per_axis;
      cloud.coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(l)] =
          wrap_coordinate(static_cast<double>(idx) * spacing + shift);
    }
  }
  return cloud;
}

PointCloud spatially_sorted(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  const int dim = cloud.dim;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> cell(n, 0);
  if (dim > 1) {
    const auto per_axis = static_cast<std::size_t>(
        std::max(1.0, std::floor(0.5 * std::pow(static_cast<double>(n), 1.0 / dim))));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t key = 0;
      for (int l = dim - 1; l >= 0; --l) {
        auto c = static_cast<std::size_t>(cloud.point(i)[static_cast<std::size_t>(l)] / kTwoPi *
                                          static_cast<double>(per_axis));
        key = key * per_axis + std::min(c, per_axis - 1);
      }
      cell[i] = key;
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cell[a] != cell[b]) return cell[a] < cell[b];
    return cloud.point(a)[0] < cloud.point(b)[0];
  });
  PointCloud sorted;
  sorted.dim = dim;
  sorted.seed = cloud.seed;
  sorted.coords.resize(cloud.coords.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = cloud.point(order[i]);
    std::copy(src.begin(), src.end(), sorted.coords.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(dim)));
  }
  return sorted;
}

CellList::CellList(const PointCloud& cloud, double radius) : dim_(cloud.dim) {
  per_axis_ = std::max(1, static_cast<int>(std::floor(kTwoPi / radius)));
  std::size_t cells = 1;
  for (int l = 0; l < dim_; ++l) cells *= static_cast<std::size_t>(per_axis_);
  const std::size_t n = cloud.size();
  std::vector<std::size_t> owner(n);
  starts_.assign(cells + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    owner[i] = cell_of(cloud.point(i));
    ++starts_[owner[i] + 1];
  }
  std::partial_sum(starts_.begin(), starts_.end(), starts_.begin());
  members_.resize(n);
  std::vector<std::size_t> fill(starts_.begin(), starts_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    members_[fill[owner[i]]++] = static_cast<std::uint32_t>(i);
  }
}

std::size_t CellList::cell_of(std::span<const double> x) const noexcept {
  std::size_t key = 0;
  const auto g = static_cast<std::size_t>(per_axis_);
  for (int l = dim_ - 1; l >= 0; --l) {
    auto c = static_cast<std::size_t>(x[static_cast<std::size_t>(l)] / kTwoPi * static_cast<double>(g));
    key = key * g + std::min(c, g - 1);
  }
  return key;
}

std::vector<std::size_t> CellList::neighbor_cells(std::size_t cell) const {
  const int g = per_axis_;
  std::vector<int> base(static_cast<std::size_t>(dim_));
  std::size_t rest = cell;
  for (int l = 0; l < dim_; ++l) {
    base[static_cast<std::size_t>(l)] = static_cast<int>(rest % static_cast<std::size_t>(g));
    rest /= static_cast<std::size_t>(g);
  }
  std::size_t combos = 1;
  for (int l = 0; l < dim_; ++l) combos *= 3;
  std::vector<std::size_t> out;
  out.reserve(combos);
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t code = c;
    std::size_t key = 0;
    std::size_t stride = 1;
    for (int l = 0; l < dim_; ++l) {
      const int shift = static_cast<int>(code % 3) - 1;
      code /= 3;
      const int idx = ((base[static_cast<std::size_t>(l)] + shift) % g + g) % g;
      key += static_cast<std::size_t>(idx) * stride;
      stride *= static_cast<std::size_t>(g);
    }
    out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> NeighborGraph::degrees() const {
  std::vector<int> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = static_cast<int>(degree(i));
  return out;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("neighbor graph: epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
}

// Collects the sorted neighbor indices of node i into `out`.
void collect_neighbors(const PointCloud& cloud, const CellList& cells, std::size_t i, double eps_sq,
                       std::vector<std::uint32_t>& out) {
  out.clear();
  const auto xi = cloud.point(i);
  for (std::size_t c : cells.neighbor_cells(cells.cell_of(xi))) {
    for (std::uint32_t j : cells.members(c)) {
      if (j == i) continue;
      if (torus_distance_sq(xi, cloud.point(j)) < eps_sq) out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<int> neighbor_counts(const PointCloud& cloud, double epsilon) {
  check_epsilon(epsilon);
  const CellList cells(cloud, epsilon);
  const std::size_t n = cloud.size();
  const double eps_sq = epsilon * epsilon;
  std::vector<int> counts(n, 0);
#pragma omp parallel
  {
    std::vector<std::uint32_t> scratch;
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      collect_neighbors(cloud, cells, i, eps_sq, scratch);
      counts[i] = static_cast<int>(scratch.size());
    }
  }
  return counts;
}

NeighborGraph build_graph(const PointCloud& cloud, double epsilon, const Kernel& kernel) {
  check_epsilon(epsilon);
  if (kernel.dim() != cloud.dim) {
    throw std::invalid_argument("build_graph: kernel dimension does not match the point cloud");
  }
  const std::vector<int> counts = neighbor_counts(cloud, epsilon);
  const std::size_t n = cloud.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] == 0) {
      throw GraphBuildError(i, "node " + std::to_string(i) + " has no neighbor within epsilon=" +
                                   format_double(epsilon));
    }
  }

  const auto dim = static_cast<std::size_t>(cloud.dim);
  NeighborGraph g;
  g.dim = cloud.dim;
  g.epsilon = epsilon;
  g.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + static_cast<std::size_t>(counts[i]);
  const std::size_t edges = g.offsets[n];
  g.neighbors.resize(edges);
  g.displacements.resize(edges * dim);
  g.weights.resize(edges);

  const CellList cells(cloud, epsilon);
  const double eps_sq = epsilon * epsilon;
#pragma omp parallel
  {
    std::vector<std::uint32_t> scratch;
    std::vector<double> scaled(dim);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      collect_neighbors(cloud, cells, i, eps_sq, scratch);
      const auto xi = cloud.point(i);
      std::size_t e = g.offsets[i];
      for (std::uint32_t j : scratch) {
        const auto xj = cloud.point(j);
        double* disp = g.displacements.data() + e * dim;
        for (std::size_t l = 0; l < dim; ++l) {
          disp[l] = min_image_delta(xi[l], xj[l]);
          scaled[l] = disp[l] / epsilon;
        }
        g.neighbors[e] = j;
        g.weights[e] = kernel(scaled);
        ++e;
      }
    }
  }
  return g;
}

double expected_degree(std::size_t n, int dim, double epsilon) {
  return unit_ball_volume(dim) * std::pow(epsilon, dim) * static_cast<double>(n) / std::pow(kTwoPi, dim);
}

double DegreeStats::bernstein_tail(double lambda) const {
  return 2.0 * static_cast<double>(n) * std::exp(-2.0 * lambda * lambda / (expected + lambda / 3.0));
}

double DegreeStats::bernstein_lambda(double p) const {
  const double log_ratio = std::log(2.0 * static_cast<double>(n) / p);
  if (log_ratio <= 0.0) return 0.0;
  // 2 lambda^2 - (L/3) lambda - L mu = 0
  const double b = log_ratio / 3.0;
  return (b + std::sqrt(b * b + 8.0 * log_ratio * expected)) / 4.0;
}

double DegreeStats::bernstein_tail_textbook(double lambda) const {
  return 2.0 * static_cast<double>(n) * std::exp(-0.5 * lambda * lambda / (expected + lambda / 3.0));
}

double DegreeStats::bernstein_lambda_textbook(double p) const {
  const double log_ratio = std::log(2.0 * static_cast<double>(n) / p);
  if (log_ratio <= 0.0) return 0.0;
  // lambda^2 - (2L/3) lambda - 2 L mu = 0
  const double b = 2.0 * log_ratio / 3.0;
  return (b + std::sqrt(b * b + 8.0 * log_ratio * expected)) / 2.0;
}

DegreeStats degree_stats(std::span<const int> degrees, int dim, double epsilon) {
  if (degrees.size() < 2) throw std::invalid_argument("degree_stats: need at least two nodes");
  DegreeStats s;
  s.n = degrees.size();
  s.dim = dim;
  s.epsilon = epsilon;
  s.expected = expected_degree(s.n, dim, epsilon);
  s.min = *std::min_element(degrees.begin(), degrees.end());
  s.max = *std::max_element(degrees.begin(), degrees.end());
  double total = 0.0;
  for (int v : degrees) {
    total += v;
    s.max_abs_deviation = std::max(s.max_abs_deviation, std::abs(v - s.expected));
  }
  s.mean = total / static_cast<double>(s.n);
  return s;
}

DegreeStats degree_stats(const NeighborGraph& graph) {
  const std::vector<int> d = graph.degrees();
  return degree_stats(d, graph.dim, graph.epsilon);
}

double condition_one_diagnostic(std::size_t n, int dim, double epsilon) {
  const double nn = static_cast<double>(n);
  return std::pow(epsilon, dim + 2) * nn / std::log(nn);
}

double compliant_epsilon(std::size_t n, int dim) {
  static const double c = 0.25 * std::pow(2000.0, 1.0 / 5.0);
  return c * std::pow(static_cast<double>(n), -1.0 / (dim + 3));
}

double borderline_epsilon(std::size_t n, int dim, double constant) {
  const double nn = static_cast<double>(n);
  return std::pow(constant * std::log(nn) / nn, 1.0 / (dim + 2));
}

void write_graph_csv(std::ostream& out, const NeighborGraph& graph) {
  out << "i,j";
  for (int l = 1; l <= graph.dim; ++l) out << ",dx_" << l;
  out << ",weight\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (std::size_t e = graph.offsets[i]; e < graph.offsets[i + 1]; ++e) {
      out << i << ',' << graph.neighbors[e];
      for (double v : graph.displacement(e)) out << ',' << format_double(v);
      out << ',' << format_double(graph.weights[e]) << '\n';
    }
  }
}

}  // namespace tkm
