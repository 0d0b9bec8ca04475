#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "tkm/experiments.hpp"
#include "tkm/kuramoto.hpp"

using namespace tkm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tkm_test_experiments_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_d1() {
  auto cfg = parse_config(
      "dim = 1\n"
      "ic = sine\n"
      "n_list = 300, 600\n"
      "eps_list = 0.6, 0.5\n"
      "seeds = 1, 2\n"
      "T = 0.2\n"
      "snapshots = 20\n"
      "threads = 2\n");
  return cfg;
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("time grid") {
  ExperimentConfig cfg;
  cfg.T = 1.0;
  auto tg = time_grid(cfg, 0.2);
  CHECK(tg.dt == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(tg.stride == 5);
  tg = time_grid(cfg, 0.05);
  CHECK(tg.dt == doctest::Approx(2.5e-4).epsilon(1e-12));
  CHECK(tg.stride == 20);
  cfg.dt = 3e-4;
  tg = time_grid(cfg, 0.2);
  CHECK(tg.stride == 17);
  CHECK(tg.dt * 17 == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(default_dt(0.05) == doctest::Approx(2.5e-4));
}

TEST_CASE("initial conditions and targets from the config") {
  auto cfg = parse_config("dim = 2\nic = twist_sine\nic_k = 2\nic_ell = 1\nic_amp = 0.1\nic_sine_axis = 2\n");
  const auto ic = make_initial_condition(cfg);
  CHECK(ic.winding.k == std::vector<int>{2, 0});
  const auto target = target_state(cfg);
  const std::vector<double> x{1.0, 0.5};
  CHECK(target.value(x) == doctest::Approx(2.0));
  CHECK(ic.value(x) == doctest::Approx(2.0 + 0.1 * std::sin(0.5)));
  cfg.ic = "sine";
  CHECK(target_state(cfg).winding.is_zero());
}

TEST_CASE("small convergence study") {
  const auto dir = scratch("converge");
  auto cfg = small_d1();
  cfg.outdir = dir.string();
  const auto report = run_convergence(cfg, true, {"inline.cfg", {"T=0.2"}});
  REQUIRE(report.runs.size() == 4);
  CHECK(report.first_failure() == nullptr);
  for (const auto& r : report.runs) {
    CAPTURE(r.key());
    CHECK(r.ok);
    CHECK(r.triangle_ok);
    CHECK(r.sup_kur_heat <= r.sup_kur_int + r.sup_int_heat_nodes + 1e-6);
    CHECK(std::isfinite(r.sup_kur_heat));
    CHECK(r.sup_kur_heat > 0.0);
    CHECK(r.sup_int_heat < 0.05);
    CHECK(r.cond1_diag == doctest::Approx(std::pow(r.eps, 3) * r.n / std::log(static_cast<double>(r.n))));
    // degree normalization is not symmetric, so the mean moves a little
    CHECK(r.mean_drift < 1e-2);
  }
  // runs sharing eps share the integral-vs-heat grid error
  CHECK(report.runs[0].sup_int_heat == report.runs[1].sup_int_heat);

  const auto csv = slurp(dir / "errors.csv");
  CHECK(csv == errors_csv(report));
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("n,eps,seed,sup_kur_heat,sup_kur_int,sup_int_heat,cond1_diag,mean_drift", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    const auto f = csv_fields(line);
    CHECK(f.size() == 11);
    CHECK(f.back() == "ok");
    ++rows;
  }
  CHECK(rows == 4);

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == "complete");
  CHECK(manifest["command"] == "converge");
  CHECK(manifest["config_path"] == "inline.cfg");
  CHECK(manifest["overrides"][0] == "T=0.2");
  CHECK(manifest["config"]["n_list"] == "300,600");
  CHECK(manifest["runs"].size() == 4);
  CHECK(parse_config(manifest["config_echo"].get<std::string>()) == cfg);
  CHECK_FALSE(manifest["version"].get<std::string>().empty());
  fs::remove_all(dir);
}

TEST_CASE("identical config gives byte-identical errors.csv") {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  auto cfg = small_d1();
  cfg.outdir = a.string();
  run_convergence(cfg);
  cfg.outdir = b.string();
  cfg.threads = 1;
  run_convergence(cfg);
  CHECK(slurp(a / "errors.csv") == slurp(b / "errors.csv"));
  CHECK_FALSE(slurp(a / "errors.csv").empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("a failing run is recorded and the batch continues") {
  auto cfg = parse_config(
      "dim = 1\n"
      "n_list = 20, 300\n"
      "eps_list = 0.01, 0.6\n"
      "T = 0.1\n"
      "snapshots = 10\n"
      "integral = off\n");
  const auto report = run_convergence(cfg, false);
  REQUIRE(report.runs.size() == 2);
  CHECK_FALSE(report.runs[0].ok);
  CHECK(report.runs[0].error.find("no neighbor") != std::string::npos);
  CHECK(report.first_failure() == &report.runs[0]);
  CHECK(report.runs[1].ok);
  CHECK(std::isnan(report.runs[1].sup_kur_int));
  const auto csv = errors_csv(report);
  CHECK(csv.find(",failed\n") != std::string::npos);
}

TEST_CASE("runs outside the compliant regime are flagged") {
  auto cfg = parse_config("dim = 1\nn_list = 300\neps_list = 0.2\nT = 0.05\nsnapshots = 5\nintegral = off\n");
  const auto report = run_convergence(cfg, false);
  REQUIRE(report.runs.size() == 1);
  CHECK(report.runs[0].cond1_diag < 1.0);
  CHECK_FALSE(report.runs[0].in_regime());
  std::istringstream lines(errors_csv(report));
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(csv_fields(line)[8] == "0");
}

TEST_CASE("persistence of the synchronized state") {
  auto cfg = parse_config("dim = 2\nic = constant\nic_amp = 0\nn_list = 500\neps_list = 0.5\nT = 0.5\nsnapshots = 10\n"
                          "integral = off\n");
  const auto report = run_twisted_persistence(cfg, false);
  REQUIRE(report.runs.size() == 1);
  const auto& r = report.runs[0];
  CHECK(r.ok);
  CHECK(r.times.size() == 11);
  for (double d : r.target_distance) CHECK(d == 0.0);
}

TEST_CASE("relaxation: a perturbed twist moves toward the twisted state") {
  auto cfg = parse_config(
      "dim = 2\n"
      "ic = twist_sine\n"
      "ic_k = 1\n"
      "ic_ell = 1\n"
      "ic_amp = 0.1\n"
      "ic_sine_axis = 2\n"
      "n_list = 2000\n"
      "eps_list = 0.25\n"
      "T = 4\n"
      "snapshots = 8\n"
      "integral = off\n");
  const auto report = run_twisted_persistence(cfg, false);
  REQUIRE(report.runs.size() == 1);
  const auto& r = report.runs[0];
  REQUIRE(r.ok);
  CHECK(r.winding.k == std::vector<int>{1, 0});
  CHECK(r.target_distance.front() == doctest::Approx(0.1).epsilon(0.02));
  MESSAGE("distance at t=0 " << r.target_distance.front() << ", at t=" << cfg.T << " " << r.target_distance.back());
  CHECK(r.target_distance.back() < r.target_distance.front());
}

TEST_CASE("persistence writes frames and phase snapshots at the render times") {
  const auto dir = scratch("persist");
  auto cfg = parse_config(
      "dim = 2\n"
      "ic = twist\n"
      "n_list = 2000\n"
      "eps_list = 0.25\n"
      "T = 1\n"
      "snapshots = 4\n"
      "integral = off\n"
      "render = on\n"
      "add_time_offset = on\n"
      "render_times = 0, 0.5\n");
  cfg.outdir = dir.string();
  const auto report = run_twisted_persistence(cfg);
  REQUIRE(report.runs.size() == 1);
  const auto& r = report.runs[0];
  REQUIRE(r.ok);
  CHECK(r.times.size() == 5);
  CHECK(r.target_distance.front() == 0.0);
  CHECK(r.winding.k == std::vector<int>{1, 0});
  CHECK(slurp(dir / "persistence.csv") == persistence_csv(report));
  CHECK(fs::exists(dir / "frames" / "n2000_seed1_t0.png"));
  CHECK(fs::exists(dir / "frames" / "n2000_seed1_t0.5.png"));
  CHECK(fs::exists(dir / "phases" / "n2000_seed1_t0.5.csv"));
  std::ifstream phases(dir / "phases" / "n2000_seed1_t0.5.csv");
  const auto snap = read_phase_csv(phases);
  CHECK(snap.time == 0.5);
  CHECK(snap.lifted.size() == 2000);
  CHECK(snap.winding.k == std::vector<int>{1, 0});
  fs::remove_all(dir);
}

TEST_CASE("degree concentration") {
  const auto dir = scratch("degrees");
  auto cfg = parse_config("dim = 2\nn_list = 50, 2000\neps_list = 0.9, 0.25\nseeds = 1, 2, 3\n");
  cfg.outdir = dir.string();
  const auto report = run_degree_concentration(cfg);
  REQUIRE(report.runs.size() == 6);
  for (const auto& r : report.runs) {
    REQUIRE(r.degrees);
    CHECK(r.degrees->expected == doctest::Approx(expected_degree(r.n, 2, r.eps)));
    CHECK(r.lambda > 0.0);
  }
  const auto& big = report.runs[3];
  CHECK(big.degrees->mean == doctest::Approx(big.degrees->expected).epsilon(0.15));
  const auto csv = slurp(dir / "degrees.csv");
  CHECK(csv == degrees_csv(report));
  CHECK(csv.rfind("n,eps,seed,min,max,mean,expected,max_abs_deviation,lambda_001", 0) == 0);
  fs::remove_all(dir);
}
