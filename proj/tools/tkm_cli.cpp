// tkm: command-line front end for the torus Kuramoto suite.
//
// Exit codes: 0 success, 1 configuration error (the offending key is named),
// 2 runtime failure (the failing run is named).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tkm/config.hpp"
#include "tkm/errors.hpp"
#include "tkm/experiments.hpp"
#include "tkm/heat.hpp"
#include "tkm/integral.hpp"
#include "tkm/io.hpp"
#include "tkm/kernel.hpp"
#include "tkm/kuramoto.hpp"
#include "tkm/render.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::vector<std::uint64_t> seeds;
  std::string outdir;
};

void add_common(CLI::App* app, CommonArgs& args) {
  app->add_option("-c,--config", args.config, "config file (key = value lines)");
  app->add_option("-s,--set", args.overrides, "override, key=value (repeatable)");
  app->add_option("--seed", args.seeds, "seed list, replaces the config's seeds");
  app->add_option("-o,--outdir", args.outdir, "output directory");
}

// Precedence: built-in defaults < TKM_OUTDIR < config file < --set < --seed/--outdir.
tkm::ExperimentConfig resolve(const CommonArgs& args, tkm::ConfigSource& source) {
  tkm::ExperimentConfig cfg;
  if (const char* env = std::getenv("TKM_OUTDIR"); env && *env) cfg.outdir = env;
  if (!args.config.empty()) {
    std::string text;
    try {
      text = tkm::read_text_file(args.config);
    } catch (const std::exception& e) {
      throw tkm::ConfigError("config", "cannot read config file '" + args.config + "'");
    }
    tkm::apply_config_text(cfg, text);
  }
  for (const auto& o : args.overrides) tkm::apply_override(cfg, o);
  if (!args.seeds.empty()) cfg.seeds = args.seeds;
  if (!args.outdir.empty()) cfg.outdir = args.outdir;
  source.path = args.config;
  source.overrides = args.overrides;
  tkm::validate(cfg);
  return cfg;
}

int finish(const tkm::ExperimentReport& report) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  if (const auto* f = report.first_failure()) {
    std::cerr << "run " << f->key() << " failed: " << f->error << '\n';
    return 2;
  }
  return 0;
}

void print_summary(const tkm::ExperimentReport& report) {
  for (const auto& r : report.runs) {
    std::cout << r.key();
    if (r.degrees) {
      std::cout << " max_dev=" << tkm::format_double(r.degrees->max_abs_deviation)
                << " lambda=" << tkm::format_double(r.lambda) << " mean=" << tkm::format_double(r.degrees->mean);
    } else {
      std::cout << " sup_kur_heat=" << tkm::format_double(r.sup_kur_heat);
      if (!r.target_distance.empty()) std::cout << " max_dist=" << tkm::format_double(r.max_target_distance());
    }
    std::cout << (r.ok ? "" : " FAILED") << '\n';
  }
}

int cmd_kuramoto(const tkm::ExperimentConfig& cfg, const tkm::ConfigSource& source) {
  const double eps = tkm::epsilon_for(cfg, 0);
  const auto kernel = tkm::Kernel::by_name(cfg.kernel, cfg.dim);
  const auto ic = tkm::make_initial_condition(cfg);
  const auto tg = tkm::time_grid(cfg, eps);
  nlohmann::json manifest;
  manifest["command"] = "kuramoto";
  manifest["status"] = "running";
  manifest["version"] = TKM_VERSION;
  manifest["config_echo"] = tkm::echo_config(cfg);
  manifest["config_path"] = source.path;
  manifest["overrides"] = source.overrides;
  const fs::path out(cfg.outdir);
  tkm::write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  for (auto seed : cfg.seeds) {
    const std::size_t n = cfg.n_list.front();
    std::string key = "n=" + std::to_string(n) + ",eps=" + tkm::format_double(eps) + ",seed=" + std::to_string(seed);
    try {
      auto cloud = std::make_shared<const tkm::PointCloud>(tkm::sample_uniform(n, cfg.dim, seed));
      auto graph = std::make_shared<const tkm::NeighborGraph>(tkm::build_graph(*cloud, eps, kernel));
      tkm::KuramotoSystem system(graph);
      const auto u0 = tkm::eval_initial(ic, cloud);
      tkm::IntegratorConfig icfg{tg.dt, cfg.T, tg.stride, cfg.c_stab};
      std::size_t index = 0;
      tkm::integrate(system, u0, icfg, [&](double t, std::span<const double> u) {
        tkm::NodePhases p{cloud, std::vector<double>(u.begin(), u.end()), u0.winding};
        std::ostringstream csv;
        tkm::write_phase_csv(csv, p, t);
        char name[64];
        std::snprintf(name, sizeof name, "seed%llu_%04zu.csv", static_cast<unsigned long long>(seed), index++);
        tkm::write_text_file(out / "trajectory" / name, csv.str());
      });
    } catch (const tkm::ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      std::cerr << "run " << key << " failed: " << e.what() << '\n';
      return 2;
    }
  }
  manifest["status"] = "complete";
  manifest["seed"] = cfg.seeds;
  manifest["n"] = cfg.n_list.front();
  manifest["dim"] = cfg.dim;
  manifest["eps"] = eps;
  manifest["kernel"] = cfg.kernel;
  manifest["dt"] = tg.dt;
  manifest["t_end"] = cfg.T;
  tkm::write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

int cmd_heat(const tkm::ExperimentConfig& cfg) {
  const auto kernel = tkm::Kernel::by_name(cfg.kernel, cfg.dim);
  const tkm::Grid grid{cfg.dim, cfg.grid_M > 0 ? cfg.grid_M : (cfg.dim == 1 ? 256 : 128)};
  const tkm::HeatSolution sol(tkm::eval_initial(tkm::make_initial_condition(cfg), grid), tkm::moments(kernel));
  if (sol.aliasing_warning())
    std::cerr << "warning: top-third spectral energy fraction " << tkm::format_double(sol.aliasing_fraction()) << '\n';
  std::ostringstream csv;
  tkm::write_grid_csv(csv, sol.on_grid(cfg.T), cfg.T);
  tkm::write_text_file(fs::path(cfg.outdir) / "heat.csv", csv.str());
  std::cout << "diffusion=" << tkm::format_double(sol.diffusion()) << " T=" << tkm::format_double(cfg.T) << '\n';
  return 0;
}

int cmd_integral(const tkm::ExperimentConfig& cfg) {
  const auto kernel = tkm::Kernel::by_name(cfg.kernel, cfg.dim);
  const auto ic = tkm::make_initial_condition(cfg);
  const fs::path out(cfg.outdir);
  for (std::size_t a = 0; a < cfg.n_list.size(); ++a) {
    const double eps = tkm::epsilon_for(cfg, a);
    if (a > 0 && eps == tkm::epsilon_for(cfg, a - 1)) continue;
    const std::string key = "eps=" + tkm::format_double(eps);
    try {
      const tkm::Grid grid{cfg.dim, cfg.grid_M > 0 ? cfg.grid_M : tkm::integral_grid_size(eps)};
      const tkm::NonlocalOperator op(grid, eps, kernel);
      const auto tg = tkm::time_grid(cfg, eps);
      const auto u0 = tkm::eval_initial(ic, grid);
      tkm::GridField last = u0;
      double t_last = 0.0;
      tkm::integrate(op, u0, tg.dt, cfg.T, tg.stride, [&](double t, std::span<const double> u) {
        last.values.assign(u.begin(), u.end());
        t_last = t;
      }, cfg.c_stab);
      std::ostringstream csv;
      tkm::write_grid_csv(csv, last, t_last);
      tkm::write_text_file(out / ("integral_eps" + tkm::format_double(eps) + ".csv"), csv.str());
      std::cout << key << " M=" << grid.points_per_axis << " stencil=" << op.stencil().size();
      if (ic.laplacian) std::cout << " consistency=" << tkm::format_double(tkm::operator_consistency_error(op, ic));
      std::cout << '\n';
    } catch (const std::exception& e) {
      std::cerr << "run " << key << " failed: " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kuramoto dynamics on random geometric graphs of the flat torus"};
  app.set_version_flag("--version", std::string(TKM_VERSION));
  app.require_subcommand(1);

  CommonArgs common;
  auto* converge = app.add_subcommand("converge", "three-way convergence study");
  auto* persist = app.add_subcommand("persist", "twisted-state persistence study");
  auto* degrees = app.add_subcommand("degrees", "degree concentration study");
  auto* heat = app.add_subcommand("heat", "spectral heat solution at time T");
  auto* integral = app.add_subcommand("integral", "nonlocal integral equation up to time T");
  auto* kuramoto = app.add_subcommand("kuramoto", "single Kuramoto trajectory");
  for (auto* sub : {converge, persist, degrees, heat, integral, kuramoto}) add_common(sub, common);

  auto* render = app.add_subcommand("render", "render a phase snapshot CSV to PNG");
  std::string input;
  std::string output;
  bool time_offset = false;
  int size = 400;
  render->add_option("-i,--input", input, "phase snapshot CSV")->required();
  render->add_option("-o,--output", output, "PNG path")->required();
  render->add_flag("--add-time-offset", time_offset, "color by u + t");
  render->add_option("--size", size, "image side in pixels");

  auto* moments = app.add_subcommand("moments", "kernel normalization and moments");
  std::string kernel_name = "indicator";
  int dim = 2;
  moments->add_option("-k,--kernel", kernel_name, "indicator | bump");
  moments->add_option("-d,--dim", dim, "dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    tkm::ConfigSource source;
    if (converge->parsed()) {
      auto report = tkm::run_convergence(resolve(common, source), true, source);
      print_summary(report);
      return finish(report);
    }
    if (persist->parsed()) {
      auto report = tkm::run_twisted_persistence(resolve(common, source), true, source);
      print_summary(report);
      return finish(report);
    }
    if (degrees->parsed()) {
      auto report = tkm::run_degree_concentration(resolve(common, source), true, source);
      print_summary(report);
      return finish(report);
    }
    if (heat->parsed()) return cmd_heat(resolve(common, source));
    if (integral->parsed()) return cmd_integral(resolve(common, source));
    if (kuramoto->parsed()) return cmd_kuramoto(resolve(common, source), source);
    if (render->parsed()) {
      std::ifstream in(input);
      if (!in) throw std::runtime_error("cannot open " + input);
      const auto snap = tkm::read_phase_csv(in);
      auto cloud = std::make_shared<tkm::PointCloud>();
      cloud->dim = snap.dim;
      cloud->coords = snap.coords;
      tkm::NodePhases phases{cloud, snap.lifted, snap.winding};
      tkm::RenderStyle style;
      style.width = style.height = size;
      style.add_time_offset = time_offset;
      tkm::render_phase_heatmap(phases, snap.time, output, style);
      return 0;
    }
    if (moments->parsed()) {
      const auto k = tkm::Kernel::by_name(kernel_name, dim);
      const auto m = tkm::moments(k);
      std::cout << "kernel=" << k.name() << " dim=" << dim << '\n'
                << "sigma_d=" << tkm::format_double(m.sigma_d) << '\n'
                << "kappa1=" << tkm::format_double(m.kappa1) << '\n'
                << "kappa2=" << tkm::format_double(m.kappa2) << '\n'
                << "diffusion=" << tkm::format_double(m.diffusion(dim)) << '\n';
      return 0;
    }
  } catch (const tkm::ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
