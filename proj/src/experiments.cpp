#include "tkm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tkm/errors.hpp"
#include "tkm/heat.hpp"
#include "tkm/integral.hpp"
#include "tkm/io.hpp"
#include "tkm/kernel.hpp"
#include "tkm/kuramoto.hpp"
#include "tkm/render.hpp"
#include "tkm/spectral.hpp"

namespace tkm {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTriangleSlack = 1e-6;
// Integral snapshots are re-interpolated at nodes; modes this far below the
// largest one contribute at most M^d * 1e-12 relative and are dropped.
constexpr double kInterpolantPrune = 1e-12;

struct Task {
  std::size_t n_index;
  std::size_t n;
  double eps;
  std::uint64_t seed;
};

std::vector<Task> make_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  for (std::size_t a = 0; a < cfg.n_list.size(); ++a)
    for (auto s : cfg.seeds) tasks.push_back({a, cfg.n_list[a], epsilon_for(cfg, a), s});
  return tasks;
}

// Runs fn(i) for i in [0, count) on a small pool; results are written by index
// so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string num(double v) { return format_double(v); }

std::string winding_text(const WindingVector& w) {
  std::string s = "(";
  for (std::size_t l = 0; l < w.k.size(); ++l) s += (l ? " " : "") + std::to_string(w.k[l]);
  return s + ")";
}

int heat_grid_default(int dim) { return dim == 1 ? 256 : (dim == 2 ? 128 : 32); }

int integral_grid(const ExperimentConfig& cfg, double eps) {
  if (cfg.grid_M > 0) return cfg.grid_M;
  return std::max(heat_grid_default(cfg.dim), integral_grid_size(eps));
}

// Integral-equation trajectory for one eps, shared by every seed.
struct IntegralTrack {
  std::vector<double> times;
  std::vector<FourierSeries> periodic;  // solution minus tilt, per snapshot
  std::vector<double> grid_error;       // sup over the grid vs heat, per snapshot
};

double tilt_at(const WindingVector& w, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t l = 0; l < w.k.size(); ++l) s += w.k[l] * x[l];
  return s;
}

IntegralTrack solve_integral(const ExperimentConfig& cfg, double eps, const InitialCondition& ic, const Kernel& kernel,
                             const HeatSolution& heat) {
  const Grid grid{cfg.dim, integral_grid(cfg, eps)};
  const NonlocalOperator op(grid, eps, kernel);
  const GridField u0 = eval_initial(ic, grid);
  const TimeGrid tg = time_grid(cfg, eps);
  IntegralTrack track;
  std::vector<double> periodic(grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dim));
  integrate(
      op, u0, tg.dt, cfg.T, tg.stride,
      [&](double t, std::span<const double> u) {
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
          grid.coordinates(i, x);
          err = std::max(err, std::abs(u[i] - heat.eval(t, x)));
          periodic[i] = u[i] - tilt_at(u0.winding, x);
        }
        track.times.push_back(t);
        track.grid_error.push_back(err);
        track.periodic.emplace_back(grid, periodic, kInterpolantPrune);
      },
      cfg.c_stab);
  return track;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct RunOptions {
  bool integral = false;
  bool track_target = false;
  bool write_frames = false;
};

RunResult simulate(const ExperimentConfig& cfg, const Task& task, const InitialCondition& ic,
                   const InitialCondition& target, const Kernel& kernel, const HeatSolution& heat,
                   const IntegralTrack* track, const RunOptions& opt) {
  RunResult r;
  r.n = task.n;
  r.eps = task.eps;
  r.seed = task.seed;
  r.cond1_diag = condition_one_diagnostic(task.n, cfg.dim, task.eps);
  r.winding = ic.winding;
  if (!opt.integral) {
    r.sup_kur_int = kNaN;
    r.sup_int_heat = kNaN;
    r.sup_int_heat_nodes = kNaN;
  }
  auto cloud = std::make_shared<const PointCloud>(spatially_sorted(sample_uniform(task.n, cfg.dim, task.seed)));
  auto graph = std::make_shared<const NeighborGraph>(build_graph(*cloud, task.eps, kernel));
  const KuramotoSystem system(graph);
  const NodePhases u0 = eval_initial(ic, cloud);
  const double mean0 = mean_of(u0.values);
  const TimeGrid tg = time_grid(cfg, task.eps);

  std::vector<long long> render_steps;
  for (double rt : cfg.render_times) render_steps.push_back(std::llround(rt / tg.dt));

  std::size_t snapshot = 0;
  std::vector<double> int_nodes(task.n);
  auto observe = [&](double t, std::span<const double> u) {
    const long long step = std::llround(t / tg.dt);
    const bool final_time = t == cfg.T;
    const bool is_snapshot = step % static_cast<long long>(tg.stride) == 0 || final_time;
    const bool is_render =
        opt.write_frames && std::find(render_steps.begin(), render_steps.end(), step) != render_steps.end();
    if (!is_snapshot && !is_render) return;
    if (is_render) {
      NodePhases p{cloud, std::vector<double>(u.begin(), u.end()), u0.winding};
      const std::string stem = "n" + std::to_string(task.n) + "_seed" + std::to_string(task.seed) + "_t" + num(t);
      std::ostringstream csv;
      write_phase_csv(csv, p, t);
      write_text_file(fs::path(cfg.outdir) / "phases" / (stem + ".csv"), csv.str());
      if (cfg.dim == 2) {
        RenderStyle style;
        style.add_time_offset = cfg.add_time_offset;
        render_phase_heatmap(p, t, fs::path(cfg.outdir) / "frames" / (stem + ".png"), style);
      }
    }
    if (!is_snapshot) return;
    const auto heat_nodes = heat.at_nodes(t, *cloud);
    double kh = 0.0;
    for (std::size_t i = 0; i < task.n; ++i) kh = std::max(kh, std::abs(u[i] - heat_nodes[i]));
    r.sup_kur_heat = std::max(r.sup_kur_heat, kh);
    if (opt.integral) {
      if (snapshot >= track->times.size() || std::abs(track->times[snapshot] - t) > 1e-9)
        throw std::logic_error("integral and Kuramoto snapshot times diverged");
      const auto& series = track->periodic[snapshot];
      double ki = 0.0;
      double ih = 0.0;
      for (std::size_t i = 0; i < task.n; ++i) {
        auto x = cloud->point(i);
        int_nodes[i] = tilt_at(u0.winding, x) + series(x);
        ki = std::max(ki, std::abs(u[i] - int_nodes[i]));
        ih = std::max(ih, std::abs(int_nodes[i] - heat_nodes[i]));
      }
      r.sup_kur_int = std::max(r.sup_kur_int, ki);
      r.sup_int_heat_nodes = std::max(r.sup_int_heat_nodes, ih);
      r.sup_int_heat = std::max(r.sup_int_heat, track->grid_error[snapshot]);
    }
    r.mean_drift = std::max(r.mean_drift, std::abs(mean_of(u) - mean0));
    if (opt.track_target) {
      r.times.push_back(t);
      r.target_distance.push_back(sup_lift_distance(NodePhases{cloud, std::vector<double>(u.begin(), u.end()), u0.winding},
                                                    target.winding, target.value, ShiftMode::quotient));
    }
    ++snapshot;
  };
  IntegratorConfig icfg;
  icfg.dt = tg.dt;
  icfg.t_end = cfg.T;
  icfg.snapshot_stride = 1;
  icfg.c_stab = cfg.c_stab;
  integrate(system, u0, icfg, observe);
  if (opt.integral) r.triangle_ok = r.sup_kur_heat <= r.sup_kur_int + r.sup_int_heat_nodes + kTriangleSlack;
  return r;
}

RunResult failed_run(const Task& task, int dim, const std::string& what) {
  RunResult r;
  r.n = task.n;
  r.eps = task.eps;
  r.seed = task.seed;
  r.ok = false;
  r.error = what;
  r.cond1_diag = condition_one_diagnostic(task.n, dim, task.eps);
  r.sup_kur_heat = r.sup_kur_int = r.sup_int_heat = r.sup_int_heat_nodes = r.mean_drift = kNaN;
  r.triangle_ok = false;
  return r;
}

json manifest_json(const std::string& command, const ExperimentConfig& cfg, const ConfigSource& source,
                   const std::string& status, const ExperimentReport* report) {
  json m;
  m["command"] = command;
  m["config_path"] = source.path;
  m["overrides"] = source.overrides;
  m["status"] = status;
  m["version"] = TKM_VERSION;
  m["config_echo"] = echo_config(cfg);
  json settings = json::object();
  std::istringstream echo(echo_config(cfg));
  for (std::string line; std::getline(echo, line);) {
    const auto eq = line.find('=');
    settings[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  m["config"] = settings;
  if (report) {
    json runs = json::array();
    for (const auto& r : report->runs) {
      json j;
      j["key"] = r.key();
      j["ok"] = r.ok;
      if (!r.ok) j["error"] = r.error;
      j["wall_seconds"] = r.wall_seconds;
      runs.push_back(j);
    }
    m["runs"] = runs;
    m["warnings"] = report->warnings;
  }
  return m;
}

void write_manifest(const std::string& command, const ExperimentConfig& cfg, const ConfigSource& source,
                    const std::string& status, const ExperimentReport* report) {
  write_text_file(fs::path(cfg.outdir) / "manifest.json",
                  manifest_json(command, cfg, source, status, report).dump(2) + "\n");
}

template <typename F>
RunResult timed(const Task& task, int dim, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = failed_run(task, dim, e.what());
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ExperimentReport run_dynamics(const std::string& command, const ExperimentConfig& cfg, bool write,
                              const ConfigSource& source, const RunOptions& base) {
  validate(cfg);
  if (write) write_manifest(command, cfg, source, "running", nullptr);
  ExperimentReport report;
  report.command = command;
  const Kernel kernel = Kernel::by_name(cfg.kernel, cfg.dim);
  const InitialCondition ic = make_initial_condition(cfg);
  const InitialCondition target = target_state(cfg);
  const Grid heat_grid{cfg.dim, cfg.grid_M > 0 ? cfg.grid_M : heat_grid_default(cfg.dim)};
  const HeatSolution heat(eval_initial(ic, heat_grid), moments(kernel));
  if (heat.aliasing_warning())
    report.warnings.push_back("heat grid M=" + std::to_string(heat_grid.points_per_axis) +
                              " leaves top-third spectral energy fraction " + num(heat.aliasing_fraction()));
  const auto tasks = make_tasks(cfg);

  RunOptions opt = base;
  opt.integral = base.integral && cfg.integral;
  std::vector<double> eps_values;
  for (const auto& t : tasks)
    if (std::find(eps_values.begin(), eps_values.end(), t.eps) == eps_values.end()) eps_values.push_back(t.eps);
  std::vector<std::unique_ptr<IntegralTrack>> tracks(eps_values.size());
  std::vector<std::string> track_errors(eps_values.size());
  if (opt.integral) {
    parallel_for(eps_values.size(), cfg.threads, [&](std::size_t e) {
      try {
        tracks[e] = std::make_unique<IntegralTrack>(solve_integral(cfg, eps_values[e], ic, kernel, heat));
      } catch (const std::exception& ex) {
        track_errors[e] = std::string("integral solver: ") + ex.what();
      }
    });
  }
  report.runs.resize(tasks.size());
  parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
    const auto& task = tasks[i];
    const auto e = static_cast<std::size_t>(
        std::find(eps_values.begin(), eps_values.end(), task.eps) - eps_values.begin());
    report.runs[i] = timed(task, cfg.dim, [&] {
      if (opt.integral && !tracks[e]) throw std::runtime_error(track_errors[e]);
      return simulate(cfg, task, ic, target, kernel, heat, opt.integral ? tracks[e].get() : nullptr, opt);
    });
  });
  if (write) {
    write_text_file(fs::path(cfg.outdir) / "errors.csv", errors_csv(report));
    if (opt.track_target) write_text_file(fs::path(cfg.outdir) / "persistence.csv", persistence_csv(report));
    write_manifest(command, cfg, source, "complete", &report);
  }
  return report;
}

}  // namespace

std::string RunResult::key() const {
  return "n=" + std::to_string(n) + ",eps=" + format_double(eps) + ",seed=" + std::to_string(seed);
}

double RunResult::max_target_distance() const {
  double m = 0.0;
  for (double d : target_distance) m = std::max(m, d);
  return m;
}

const RunResult* ExperimentReport::first_failure() const {
  for (const auto& r : runs)
    if (!r.ok) return &r;
  return nullptr;
}

InitialCondition make_initial_condition(const ExperimentConfig& cfg) {
  if (cfg.ic == "sine") return sine_ic(cfg.dim, cfg.ic_sine_axis, cfg.ic_amp);
  if (cfg.ic == "twist") return twist_ic(cfg.dim, cfg.ic_k, cfg.ic_ell);
  if (cfg.ic == "diag") return diagonal_twist_ic(cfg.dim, cfg.ic_k);
  if (cfg.ic == "twist_sine") return twist_plus_sine_ic(cfg.dim, cfg.ic_k, cfg.ic_ell, cfg.ic_amp, cfg.ic_sine_axis);
  if (cfg.ic == "constant") return constant_ic(cfg.dim, cfg.ic_amp);
  throw ConfigError("ic", "config key 'ic': unknown initial condition '" + cfg.ic + "'");
}

InitialCondition target_state(const ExperimentConfig& cfg) {
  if (cfg.ic == "twist" || cfg.ic == "twist_sine") return twist_ic(cfg.dim, cfg.ic_k, cfg.ic_ell);
  if (cfg.ic == "diag") return diagonal_twist_ic(cfg.dim, cfg.ic_k);
  return constant_ic(cfg.dim, 0.0);
}

TimeGrid time_grid(const ExperimentConfig& cfg, double eps) {
  const double dt0 = cfg.dt > 0.0 ? cfg.dt : default_dt(eps);
  if (cfg.T <= 0.0) return {dt0, 1};
  const double spacing = cfg.T / cfg.snapshots;
  const auto steps = static_cast<std::size_t>(std::ceil(spacing / dt0 - 1e-9));
  return {spacing / static_cast<double>(steps), steps};
}

ExperimentReport run_convergence(const ExperimentConfig& cfg, bool write, const ConfigSource& source) {
  RunOptions opt;
  opt.integral = true;
  return run_dynamics("converge", cfg, write, source, opt);
}

ExperimentReport run_twisted_persistence(const ExperimentConfig& cfg, bool write, const ConfigSource& source) {
  RunOptions opt;
  opt.integral = true;
  opt.track_target = true;
  opt.write_frames = write && (cfg.render || !cfg.render_times.empty());
  return run_dynamics("persist", cfg, write, source, opt);
}

ExperimentReport run_degree_concentration(const ExperimentConfig& cfg, bool write, const ConfigSource& source) {
  validate(cfg);
  if (write) write_manifest("degrees", cfg, source, "running", nullptr);
  ExperimentReport report;
  report.command = "degrees";
  const auto tasks = make_tasks(cfg);
  report.runs.resize(tasks.size());
  parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
    const auto& task = tasks[i];
    report.runs[i] = timed(task, cfg.dim, [&] {
      RunResult r;
      r.n = task.n;
      r.eps = task.eps;
      r.seed = task.seed;
      r.cond1_diag = condition_one_diagnostic(task.n, cfg.dim, task.eps);
      const auto counts = neighbor_counts(sample_uniform(task.n, cfg.dim, task.seed), task.eps);
      r.isolated = static_cast<std::size_t>(std::count(counts.begin(), counts.end(), 0));
      r.degrees = degree_stats(counts, cfg.dim, task.eps);
      r.lambda = r.degrees->bernstein_lambda(0.01);
      r.lambda_textbook = r.degrees->bernstein_lambda_textbook(0.01);
      return r;
    });
  });
  if (write) {
    write_text_file(fs::path(cfg.outdir) / "degrees.csv", degrees_csv(report));
    write_manifest("degrees", cfg, source, "complete", &report);
  }
  return report;
}

std::string errors_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "n,eps,seed,sup_kur_heat,sup_kur_int,sup_int_heat,cond1_diag,mean_drift,in_regime,triangle_ok,status\n";
  for (const auto& r : report.runs) {
    out << r.n << ',' << num(r.eps) << ',' << r.seed << ',' << num(r.sup_kur_heat) << ',' << num(r.sup_kur_int) << ','
        << num(r.sup_int_heat) << ',' << num(r.cond1_diag) << ',' << num(r.mean_drift) << ',' << (r.in_regime() ? 1 : 0)
        << ',' << (r.triangle_ok ? 1 : 0) << ',' << (r.ok ? "ok" : "failed") << '\n';
  }
  return out.str();
}

std::string degrees_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "n,eps,seed,min,max,mean,expected,max_abs_deviation,lambda_001,below_lambda,lambda_textbook_001,"
         "below_lambda_textbook,isolated,status\n";
  for (const auto& r : report.runs) {
    out << r.n << ',' << num(r.eps) << ',' << r.seed << ',';
    if (r.degrees) {
      const auto& s = *r.degrees;
      out << s.min << ',' << s.max << ',' << num(s.mean) << ',' << num(s.expected) << ',' << num(s.max_abs_deviation)
          << ',' << num(r.lambda) << ',' << (s.max_abs_deviation < r.lambda ? 1 : 0) << ',' << num(r.lambda_textbook)
          << ',' << (s.max_abs_deviation < r.lambda_textbook ? 1 : 0) << ',' << r.isolated << ",ok\n";
    } else {
      out << "nan,nan,nan,nan,nan,nan,0,nan,0,nan,failed\n";
    }
  }
  return out.str();
}

std::string persistence_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "n,eps,seed,winding,t,distance\n";
  for (const auto& r : report.runs)
    for (std::size_t s = 0; s < r.times.size(); ++s)
      out << r.n << ',' << num(r.eps) << ',' << r.seed << ',' << winding_text(r.winding) << ',' << num(r.times[s]) << ','
          << num(r.target_distance[s]) << '\n';
  return out.str();
}

}  // namespace tkm
