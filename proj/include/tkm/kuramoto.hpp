#pragma once

// Degree-normalized Kuramoto system on a neighbor graph:
//   du_i/dt = 1/(eps^2 N_i) sum_{j in N(i)} sin(u_j - u_i) K((x_j^i - x_i)/eps)
// integrated with fixed-step classical RK4.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "tkm/phase_field.hpp"
#include "tkm/rgg.hpp"

namespace tkm {

class KuramotoSystem {
 public:
  explicit KuramotoSystem(std::shared_ptr<const NeighborGraph> graph);

  const NeighborGraph& graph() const noexcept { return *graph_; }
  std::size_t size() const noexcept { return graph_->size(); }
  double epsilon() const noexcept { return graph_->epsilon; }
  /// True when every edge weight is identical and the sums use index runs.
  bool uses_runs() const noexcept { return uniform_; }

  /// Production path: sin(u_j - u_i) = sin u_j cos u_i - cos u_j sin u_i, so
  /// each evaluation costs O(n) trig calls plus the neighbor sums.
  void rhs(std::span<const double> u, std::span<double> out) const;
  /// Reference: per-edge sin of lifted differences.
  void rhs_direct(std::span<const double> u, std::span<double> out) const;
  /// Reference: per-edge sin of differences of wrapped phases.
  void rhs_wrapped(std::span<const double> u, std::span<double> out) const;
  /// Reference: each neighbor read at its periodic copy next to x_i, with the
  /// value continued by the winding offset 2pi k . m.
  void rhs_extended(const PointCloud& cloud, const WindingVector& winding, std::span<const double> u,
                    std::span<double> out) const;

 private:
  struct Run {
    std::uint32_t begin;
    std::uint32_t end;
  };

  std::shared_ptr<const NeighborGraph> graph_;
  std::vector<double> scale_;  // 1 / (eps^2 N_i)
  bool uniform_ = false;
  double uniform_weight_ = 0.0;
  std::vector<std::size_t> run_offsets_;
  std::vector<Run> runs_;
  // scratch for the production path
  mutable std::vector<double> sin_;
  mutable std::vector<double> cos_;
  mutable std::vector<long double> prefix_sin_;
  mutable std::vector<long double> prefix_cos_;
};

/// min(1e-3, 0.1 eps^2).
double default_dt(double epsilon);

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  /// Observer is called every `snapshot_stride` full steps and at t_end.
  std::size_t snapshot_stride = 1;
  /// dt must not exceed c_stab * eps^2.
  double c_stab = 0.1;
};

using Observer = std::function<void(double t, std::span<const double> u)>;

/// Classical RK4 on an abstract right-hand side. Calls observer at t = 0, at
/// every stride multiple and at t_end (one final partial step when t_end is
/// not a multiple of dt). Throws IntegrationDiverged on non-finite values.
void rk4_integrate(const std::function<void(std::span<const double>, std::span<double>)>& f, std::vector<double> u,
                   double dt, double t_end, std::size_t stride, const Observer& observer);

/// Throws std::invalid_argument when cfg.dt exceeds the stability cap.
void integrate(const KuramotoSystem& system, const NodePhases& initial, const IntegratorConfig& cfg,
               const Observer& observer);

struct KuramotoSnapshot {
  double time = 0.0;
  NodePhases phases;
};
std::vector<KuramotoSnapshot> integrate(const KuramotoSystem& system, const NodePhases& initial,
                                        const IntegratorConfig& cfg);

}  // namespace tkm
