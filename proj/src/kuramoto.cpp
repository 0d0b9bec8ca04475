#include "tkm/kuramoto.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tkm/errors.hpp"

namespace tkm {

KuramotoSystem::KuramotoSystem(std::shared_ptr<const NeighborGraph> graph) : graph_(std::move(graph)) {
  if (!graph_) throw std::invalid_argument("KuramotoSystem: null graph");
  const auto& g = *graph_;
  const std::size_t n = g.size();
  const double eps2 = g.epsilon * g.epsilon;
  scale_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.degree(i) == 0) throw GraphBuildError(i, "node has no neighbors");
    scale_[i] = 1.0 / (eps2 * static_cast<double>(g.degree(i)));
  }
  uniform_ = !g.weights.empty() &&
             std::all_of(g.weights.begin(), g.weights.end(), [&](double w) { return w == g.weights.front(); });
  if (uniform_) {
    uniform_weight_ = g.weights.front();
    run_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto nb = g.neighbors_of(i);
      std::size_t k = 0;
      while (k < nb.size()) {
        std::size_t e = k + 1;
        while (e < nb.size() && nb[e] == nb[e - 1] + 1) ++e;
        runs_.push_back({nb[k], nb[e - 1] + 1});
        k = e;
      }
      run_offsets_[i + 1] = runs_.size();
    }
    prefix_sin_.resize(n + 1);
    prefix_cos_.resize(n + 1);
  }
  sin_.resize(n);
  cos_.resize(n);
}

void KuramotoSystem::rhs(std::span<const double> u, std::span<double> out) const {
  const auto& g = *graph_;
  const std::size_t n = g.size();
  if (u.size() != n || out.size() != n) throw std::invalid_argument("KuramotoSystem::rhs: size mismatch");
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    sin_[i] = std::sin(u[i]);
    cos_[i] = std::cos(u[i]);
  }
  if (uniform_) {
    // extended-precision prefix sums turn every run into two lookups
    long double ps = 0.0L;
    long double pc = 0.0L;
    prefix_sin_[0] = 0.0L;
    prefix_cos_[0] = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      ps += sin_[i];
      pc += cos_[i];
      prefix_sin_[i + 1] = ps;
      prefix_cos_[i + 1] = pc;
    }
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      long double s = 0.0L;
      long double c = 0.0L;
      for (std::size_t r = run_offsets_[i]; r < run_offsets_[i + 1]; ++r) {
        s += prefix_sin_[runs_[r].end] - prefix_sin_[runs_[r].begin];
        c += prefix_cos_[runs_[r].end] - prefix_cos_[runs_[r].begin];
      }
      const double sum = static_cast<double>(static_cast<long double>(cos_[i]) * s - static_cast<long double>(sin_[i]) * c);
      out[i] = scale_[i] * uniform_weight_ * sum;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = g.neighbors_of(i);
    auto w = g.weights_of(i);
    double s[4] = {0, 0, 0, 0};
    double c[4] = {0, 0, 0, 0};
    std::size_t k = 0;
    for (; k + 4 <= nb.size(); k += 4) {
      for (std::size_t a = 0; a < 4; ++a) {
        s[a] += w[k + a] * sin_[nb[k + a]];
        c[a] += w[k + a] * cos_[nb[k + a]];
      }
    }
    for (; k < nb.size(); ++k) {
      s[0] += w[k] * sin_[nb[k]];
      c[0] += w[k] * cos_[nb[k]];
    }
    const double ss = (s[0] + s[1]) + (s[2] + s[3]);
    const double cc = (c[0] + c[1]) + (c[2] + c[3]);
    out[i] = scale_[i] * (cos_[i] * ss - sin_[i] * cc);
  }
}

void KuramotoSystem::rhs_direct(std::span<const double> u, std::span<double> out) const {
  const auto& g = *graph_;
  const std::size_t n = g.size();
  if (u.size() != n || out.size() != n) throw std::invalid_argument("KuramotoSystem::rhs_direct: size mismatch");
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = g.neighbors_of(i);
    auto w = g.weights_of(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) sum += w[k] * std::sin(u[nb[k]] - u[i]);
    out[i] = scale_[i] * sum;
  }
}

void KuramotoSystem::rhs_wrapped(std::span<const double> u, std::span<double> out) const {
  std::vector<double> wrapped(u.begin(), u.end());
  for (auto& v : wrapped) v = wrap_coordinate(v);
  rhs_direct(wrapped, out);
}

void KuramotoSystem::rhs_extended(const PointCloud& cloud, const WindingVector& winding, std::span<const double> u,
                                  std::span<double> out) const {
  const auto& g = *graph_;
  const std::size_t n = g.size();
  const auto d = static_cast<std::size_t>(g.dim);
  if (cloud.size() != n || u.size() != n || out.size() != n || winding.k.size() != d)
    throw std::invalid_argument("KuramotoSystem::rhs_extended: size mismatch");
  std::vector<int> cell(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = g.neighbors_of(i);
    auto w = g.weights_of(i);
    auto xi = cloud.point(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      auto disp = g.displacement(g.offsets[i] + k);
      auto xj = cloud.point(nb[k]);
      for (std::size_t l = 0; l < d; ++l) cell[l] = static_cast<int>(std::lround((xi[l] + disp[l] - xj[l]) / kTwoPi));
      const double extended = u[nb[k]] + winding_offset(winding, cell);
      sum += w[k] * std::sin(extended - u[i]);
    }
    out[i] = scale_[i] * sum;
  }
}

double default_dt(double epsilon) { return std::min(1e-3, 0.1 * epsilon * epsilon); }

void rk4_integrate(const std::function<void(std::span<const double>, std::span<double>)>& f, std::vector<double> u,
                   double dt, double t_end, std::size_t stride, const Observer& observer) {
  if (!(dt > 0.0) || !(t_end >= 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("rk4_integrate: need dt > 0 and finite t_end >= 0");
  if (stride == 0) stride = 1;
  const std::size_t n = u.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto step = [&](double h) {
    f(u, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    f(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    f(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
    f(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };
  auto check = [&](std::size_t index) {
    for (double v : u)
      if (!std::isfinite(v)) throw IntegrationDiverged(index, "non-finite value after step " + std::to_string(index));
  };
  if (observer) observer(0.0, u);
  // full steps, with a tolerance so t_end = m * dt up to rounding takes no sliver step
  const double ratio = t_end / dt;
  auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  for (std::size_t s = 1; s <= full; ++s) {
    step(dt);
    check(s);
    const bool last = s == full;
    const double t = last && std::abs(ratio - static_cast<double>(full)) <= 1e-9 ? t_end : static_cast<double>(s) * dt;
    if (observer && (s % stride == 0 || (last && t == t_end))) observer(t, u);
  }
  const double rest = t_end - static_cast<double>(full) * dt;
  if (rest > 1e-9 * dt) {
    step(rest);
    check(full + 1);
    if (observer) observer(t_end, u);
  }
}

void integrate(const KuramotoSystem& system, const NodePhases& initial, const IntegratorConfig& cfg,
               const Observer& observer) {
  const double eps = system.epsilon();
  if (cfg.dt > cfg.c_stab * eps * eps * (1.0 + 1e-12))
    throw std::invalid_argument("integrate: dt " + std::to_string(cfg.dt) + " exceeds the stability cap c_stab*eps^2 = " +
                                std::to_string(cfg.c_stab * eps * eps));
  if (initial.values.size() != system.size()) throw std::invalid_argument("integrate: phase count differs from graph");
  rk4_integrate([&](std::span<const double> u, std::span<double> out) { system.rhs(u, out); }, initial.values, cfg.dt,
                cfg.t_end, cfg.snapshot_stride, observer);
}

std::vector<KuramotoSnapshot> integrate(const KuramotoSystem& system, const NodePhases& initial,
                                        const IntegratorConfig& cfg) {
  std::vector<KuramotoSnapshot> out;
  integrate(system, initial, cfg, [&](double t, std::span<const double> u) {
    NodePhases p{initial.cloud, std::vector<double>(u.begin(), u.end()), initial.winding};
    out.push_back({t, std::move(p)});
  });
  return out;
}

}  // namespace tkm
