#include "tkm/integral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace tkm {

namespace {

int positive_mod(long long a, int m) {
  const long long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

long long floor_div(long long a, long long m) {
  long long q = a / m;
  if ((a % m != 0) && ((a < 0) != (m < 0))) --q;
  return q;
}

// Start index (in lines) of the axis-0 line reached from `line` by shifting
// axes 1..d-1 by `offset`.
std::size_t shifted_line(std::size_t line, std::span<const int> offset, int m, int dim) {
  std::size_t src = 0;
  std::size_t stride = 1;
  std::size_t rest = line;
  for (int l = 1; l < dim; ++l) {
    const auto q = static_cast<long long>(rest % static_cast<std::size_t>(m));
    rest /= static_cast<std::size_t>(m);
    src += static_cast<std::size_t>(positive_mod(q + offset[static_cast<std::size_t>(l)], m)) * stride;
    stride *= static_cast<std::size_t>(m);
  }
  return src;
}

double overlap_rec(const double* lo, const double* hi, int dim, double radius) {
  if (radius <= 0.0) return 0.0;
  if (dim == 1) return std::max(0.0, std::min(hi[0], radius) - std::max(lo[0], -radius));
  // outside / inside shortcuts on the box corners
  double near_sq = 0.0;
  double far_sq = 0.0;
  for (int l = 0; l < dim; ++l) {
    const double n = lo[l] > 0.0 ? lo[l] : (hi[l] < 0.0 ? -hi[l] : 0.0);
    const double f = std::max(std::abs(lo[l]), std::abs(hi[l]));
    near_sq += n * n;
    far_sq += f * f;
  }
  const double r2 = radius * radius;
  if (near_sq >= r2) return 0.0;
  if (far_sq <= r2) {
    double v = 1.0;
    for (int l = 0; l < dim; ++l) v *= hi[l] - lo[l];
    return v;
  }
  const double a = std::max(lo[0], -radius);
  const double b = std::min(hi[0], radius);
  if (a >= b) return 0.0;
  // the inner measure, as a function of x, has kinks where the slice radius
  // passes a corner distance of the remaining box
  std::vector<double> cuts{a, b};
  const int rest = dim - 1;
  for (int mask = 0; mask < (1 << (2 * rest)); ++mask) {
    double q = 0.0;
    bool used = false;
    for (int l = 0; l < rest; ++l) {
      const int pick = (mask >> (2 * l)) & 3;
      if (pick == 1) q += lo[l + 1] * lo[l + 1], used = true;
      if (pick == 2) q += hi[l + 1] * hi[l + 1], used = true;
    }
    if (!used || q >= r2) continue;
    const double x = std::sqrt(r2 - q);
    for (double c : {x, -x})
      if (c > a && c < b) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // x = R sin(theta) removes the square-root endpoint behaviour at |x| = R
  auto slice = [&](double theta) {
    return overlap_rec(lo + 1, hi + 1, rest, radius * std::cos(theta)) * radius * std::cos(theta);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double t0 = std::asin(std::clamp(cuts[k] / radius, -1.0, 1.0));
    const double t1 = std::asin(std::clamp(cuts[k + 1] / radius, -1.0, 1.0));
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(slice, t0, t1, 8, 1e-13);
  }
  return total;
}

}  // namespace

double box_ball_overlap(std::span<const double> lo, std::span<const double> hi, double radius) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box_ball_overlap: bad box");
  return overlap_rec(lo.data(), hi.data(), static_cast<int>(lo.size()), radius);
}

int integral_grid_size(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("integral_grid_size: eps must be positive");
  int m = 1;
  while (kTwoPi / m > epsilon / 8.0) {
    if (m > (1 << 24)) throw std::invalid_argument("integral_grid_size: eps too small");
    m *= 2;
  }
  return m;
}

NonlocalOperator::NonlocalOperator(const Grid& grid, double epsilon, const Kernel& kernel,
                                   StencilNormalization normalization)
    : grid_(grid), epsilon_(epsilon), moments_(tkm::moments(kernel)) {
  const int d = grid.dim;
  if (kernel.dim() != d) throw std::invalid_argument("NonlocalOperator: kernel and grid dimensions differ");
  if (!(epsilon > 0.0)) throw std::invalid_argument("NonlocalOperator: eps must be positive");
  const double h = grid.spacing();
  if (h > epsilon / 8.0 * (1.0 + 1e-12))
    throw std::invalid_argument("NonlocalOperator: grid spacing " + std::to_string(h) + " exceeds eps/8 = " +
                                std::to_string(epsilon / 8.0));
  // cells reaching into the ball: |o| h - h/2 < eps
  const int r = static_cast<int>(std::ceil(epsilon / h + 0.5));
  if (2 * r + 1 > grid.points_per_axis) throw std::invalid_argument("NonlocalOperator: stencil wider than the grid");
  const double base = 1.0 / (unit_ball_volume(d) * std::pow(epsilon, d + 2));
  const bool cut_cells = kernel.shape() == KernelShape::indicator;
  const double cell_volume = std::pow(h, d);
  const double height = kernel.profile(0.0);
  std::vector<int> o(static_cast<std::size_t>(d), -r);
  std::vector<double> z(static_cast<std::size_t>(d));
  std::vector<double> lo(static_cast<std::size_t>(d));
  std::vector<double> hi(static_cast<std::size_t>(d));
  while (true) {
    bool origin = true;
    double norm_sq = 0.0;
    for (std::size_t l = 0; l < o.size(); ++l) {
      z[l] = o[l] * h / epsilon;
      lo[l] = (o[l] - 0.5) * h;
      hi[l] = (o[l] + 0.5) * h;
      norm_sq += (o[l] * h) * (o[l] * h);
      origin = origin && o[l] == 0;
    }
    if (!origin) {
      const double mass = cut_cells ? height * box_ball_overlap(lo, hi, epsilon) : kernel(z) * cell_volume;
      const double w = mass * base;
      if (w > 0.0) {
        entries_.push_back({o, w});
        raw_second_moment_ += w * norm_sq;
      }
    }
    std::size_t l = 0;
    while (l < o.size() && o[l] == r) o[l++] = -r;
    if (l == o.size()) break;
    ++o[l];
  }
  if (normalization == StencilNormalization::second_moment) {
    rescale_ = moments_.kappa2 / raw_second_moment_;
    for (auto& e : entries_) e.weight *= rescale_;
  }
  for (const auto& e : entries_) flat_offsets_.insert(flat_offsets_.end(), e.offset.begin(), e.offset.end());
}

void NonlocalOperator::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t total = grid_.size();
  if (u.size() != total || out.size() != total) throw std::invalid_argument("NonlocalOperator::apply: size mismatch");
  const int m = grid_.points_per_axis;
  const auto mm = static_cast<std::size_t>(m);
  const int d = grid_.dim;
  sin_.resize(total);
  cos_.resize(total);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < total; ++i) {
    sin_[i] = std::sin(u[i]);
    cos_[i] = std::cos(u[i]);
  }
  const std::size_t lines = total / mm;
  const auto du = static_cast<std::size_t>(d);
#pragma omp parallel
  {
    std::vector<double> s(mm);
    std::vector<double> c(mm);
#pragma omp for schedule(static)
    for (std::size_t line = 0; line < lines; ++line) {
      std::fill(s.begin(), s.end(), 0.0);
      std::fill(c.begin(), c.end(), 0.0);
      for (std::size_t e = 0; e < entries_.size(); ++e) {
        std::span<const int> off(flat_offsets_.data() + e * du, du);
        const double w = entries_[e].weight;
        const std::size_t src = shifted_line(line, off, m, d) * mm;
        const auto o0 = static_cast<std::size_t>(positive_mod(off[0], m));
        const double* ss = sin_.data() + src;
        const double* cs = cos_.data() + src;
        const std::size_t split = mm - o0;
        for (std::size_t j = 0; j < split; ++j) {
          s[j] += w * ss[j + o0];
          c[j] += w * cs[j + o0];
        }
        for (std::size_t j = split; j < mm; ++j) {
          s[j] += w * ss[j + o0 - mm];
          c[j] += w * cs[j + o0 - mm];
        }
      }
      const std::size_t base = line * mm;
      for (std::size_t j = 0; j < mm; ++j) out[base + j] = cos_[base + j] * s[j] - sin_[base + j] * c[j];
    }
  }
}

void NonlocalOperator::apply_linear(std::span<const double> psi, const WindingVector& winding,
                                    std::span<const double> u, std::span<double> out) const {
  const std::size_t total = grid_.size();
  if (u.size() != total || out.size() != total || psi.size() != total)
    throw std::invalid_argument("NonlocalOperator::apply_linear: size mismatch");
  GridField field{grid_, std::vector<double>(u.begin(), u.end()), winding};
  const auto d = static_cast<std::size_t>(grid_.dim);
  const auto m = static_cast<long long>(grid_.points_per_axis);
#pragma omp parallel
  {
    std::vector<long long> idx(d);
    std::vector<long long> shifted(d);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rest = i;
      for (std::size_t l = 0; l < d; ++l) {
        idx[l] = static_cast<long long>(rest % static_cast<std::size_t>(m));
        rest /= static_cast<std::size_t>(m);
      }
      double sum = 0.0;
      for (const auto& e : entries_) {
        for (std::size_t l = 0; l < d; ++l) shifted[l] = idx[l] + e.offset[l];
        sum += e.weight * (field.at(shifted) - u[i]);
      }
      out[i] = psi[i] * sum;
    }
  }
}

std::vector<double> nonlocal_rhs(const NonlocalOperator& op, const GridField& u) {
  if (!(u.grid == op.grid())) throw std::invalid_argument("nonlocal_rhs: field grid differs from operator grid");
  std::vector<double> out(u.values.size());
  op.apply(u.values, out);
  return out;
}

std::vector<double> nonlocal_rhs_explicit(const NonlocalOperator& op, const GridField& u) {
  if (!(u.grid == op.grid())) throw std::invalid_argument("nonlocal_rhs_explicit: field grid differs");
  const std::size_t total = u.values.size();
  const auto d = static_cast<std::size_t>(u.grid.dim);
  const long long m = u.grid.points_per_axis;
  std::vector<double> out(total);
  std::vector<long long> idx(d);
  std::vector<long long> wrapped(d);
  std::vector<int> cell(d);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (std::size_t l = 0; l < d; ++l) {
      idx[l] = static_cast<long long>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
    }
    double sum = 0.0;
    for (const auto& e : op.stencil()) {
      for (std::size_t l = 0; l < d; ++l) {
        const long long a = idx[l] + e.offset[l];
        cell[l] = static_cast<int>(floor_div(a, m));
        wrapped[l] = a - static_cast<long long>(cell[l]) * m;
      }
      const double neighbor = u.values[u.grid.flat_index(wrapped)] + winding_offset(u.winding, cell);
      sum += e.weight * std::sin(neighbor - u.values[i]);
    }
    out[i] = sum;
  }
  return out;
}

void integrate(const NonlocalOperator& op, const GridField& u0, double dt, double t_end, std::size_t stride,
               const Observer& observer, double c_stab) {
  const double eps = op.epsilon();
  if (dt > c_stab * eps * eps * (1.0 + 1e-12))
    throw std::invalid_argument("integrate: dt " + std::to_string(dt) + " exceeds c_stab*eps^2 = " +
                                std::to_string(c_stab * eps * eps));
  if (!(u0.grid == op.grid())) throw std::invalid_argument("integrate: field grid differs from operator grid");
  rk4_integrate([&](std::span<const double> u, std::span<double> out) { op.apply(u, out); }, u0.values, dt, t_end,
                stride, observer);
}

std::vector<GridSnapshot> integrate(const NonlocalOperator& op, const GridField& u0, double dt, double t_end,
                                    std::size_t stride, double c_stab) {
  std::vector<GridSnapshot> out;
  integrate(
      op, u0, dt, t_end, stride,
      [&](double t, std::span<const double> u) {
        out.push_back({t, GridField{u0.grid, std::vector<double>(u.begin(), u.end()), u0.winding}});
      },
      c_stab);
  return out;
}

double operator_consistency_error(const NonlocalOperator& op, const InitialCondition& ic) {
  if (!ic.laplacian) throw std::invalid_argument("operator_consistency_error: initial condition has no Laplacian");
  const GridField v = eval_initial(ic, op.grid());
  const auto lhs = nonlocal_rhs(op, v);
  const double coeff = op.moments().diffusion(op.grid().dim);
  std::vector<double> x(static_cast<std::size_t>(op.grid().dim));
  double err = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    op.grid().coordinates(i, x);
    err = std::max(err, std::abs(lhs[i] - coeff * ic.laplacian(x)));
  }
  return err;
}

bool linear_comparison_test(const NonlocalOperator& op, std::span<const double> psi, const GridField& v0,
                            const GridField& w0, double dt, double t_end) {
  if (!(v0.grid == op.grid()) || !(w0.grid == op.grid()))
    throw std::invalid_argument("linear_comparison_test: grid mismatch");
  if (v0.winding.k != w0.winding.k) throw std::invalid_argument("linear_comparison_test: winding mismatch");
  const std::size_t n = v0.values.size();
  // v and w evolve independently under the same linear flow; integrate them jointly.
  std::vector<double> joint(2 * n);
  std::copy(v0.values.begin(), v0.values.end(), joint.begin());
  std::copy(w0.values.begin(), w0.values.end(), joint.begin() + static_cast<std::ptrdiff_t>(n));
  bool ordered = true;
  auto f = [&](std::span<const double> u, std::span<double> out) {
    op.apply_linear(psi, v0.winding, u.subspan(0, n), out.subspan(0, n));
    op.apply_linear(psi, w0.winding, u.subspan(n, n), out.subspan(n, n));
  };
  rk4_integrate(f, joint, dt, t_end, 1, [&](double, std::span<const double> u) {
    for (std::size_t i = 0; i < n; ++i) ordered = ordered && u[i] >= u[n + i] - 1e-9;
  });
  return ordered;
}

double grid_lipschitz(const GridField& u) {
  const auto d = static_cast<std::size_t>(u.grid.dim);
  const auto m = static_cast<std::size_t>(u.grid.points_per_axis);
  const double h = u.grid.spacing();
  std::vector<long long> idx(d);
  double best = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    std::size_t rest = i;
    for (std::size_t l = 0; l < d; ++l) {
      idx[l] = static_cast<long long>(rest % m);
      rest /= m;
    }
    double norm_sq = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      ++idx[l];
      const double q = (u.at(idx) - u.values[i]) / h;
      --idx[l];
      norm_sq += q * q;
    }
    best = std::max(best, std::sqrt(norm_sq));
  }
  return best;
}

std::vector<std::vector<double>> fixed_point_map(const NonlocalOperator& op, const GridField& u0,
                                                 const std::vector<std::vector<double>>& guess, double tau) {
  if (guess.size() < 2) throw std::invalid_argument("fixed_point_map: need at least two time samples");
  const std::size_t n = u0.values.size();
  const double step = tau / static_cast<double>(guess.size() - 1);
  std::vector<std::vector<double>> image(guess.size(), u0.values);
  std::vector<double> prev(n);
  std::vector<double> cur(n);
  op.apply(guess[0], prev);
  for (std::size_t k = 1; k < guess.size(); ++k) {
    op.apply(guess[k], cur);
    for (std::size_t i = 0; i < n; ++i) image[k][i] = image[k - 1][i] + 0.5 * step * (prev[i] + cur[i]);
    std::swap(prev, cur);
  }
  return image;
}

}  // namespace tkm
