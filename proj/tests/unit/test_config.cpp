#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "doctest.h"
#include "tkm/config.hpp"
#include "tkm/errors.hpp"
#include "tkm/rgg.hpp"

using namespace tkm;

namespace {

std::string error_key(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("defaults") {
  const ExperimentConfig cfg;
  CHECK(cfg.dim == 1);
  CHECK(cfg.kernel == "indicator");
  CHECK(cfg.n_list == std::vector<std::size_t>{2000});
  CHECK(cfg.snapshots == 200);
  CHECK(cfg.c_stab == 0.1);
  CHECK_NOTHROW(validate(cfg));
  CHECK(parse_config("") == cfg);
  CHECK(config_keys().size() == 22);
}

TEST_CASE("parsing") {
  const auto cfg = parse_config(
      "# comment\n"
      "dim = 2\n"
      "  kernel=bump  \n"
      "\n"
      "n_list = 100, 200,400\n"
      "eps_list = 0.5\n"
      "seeds = 3,4\n"
      "render = on\n"
      "integral = off\n"
      "render_times = 0, 0.5\n"
      "T = 0.5\n");
  CHECK(cfg.dim == 2);
  CHECK(cfg.kernel == "bump");
  CHECK(cfg.n_list == std::vector<std::size_t>{100, 200, 400});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(cfg.render);
  CHECK_FALSE(cfg.integral);
  CHECK(cfg.render_times == std::vector<double>{0.0, 0.5});
  CHECK(epsilon_for(cfg, 2) == 0.5);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("echo round trip") {
  ExperimentConfig cfg;
  CHECK(parse_config(echo_config(cfg)) == cfg);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    cfg.dim = 1 + trial % 3;
    cfg.kernel = trial % 2 ? "bump" : "indicator";
    cfg.ic_amp = u(rng) * 3.0;
    cfg.eps_list = {u(rng), u(rng) / 7.0};
    cfg.n_list = {static_cast<std::size_t>(10 + trial), 1000};
    cfg.T = u(rng) * 100.0;
    cfg.dt = u(rng) * 1e-3;
    cfg.c_stab = 1.0 / 3.0;
    cfg.seeds = {rng(), 0, 18446744073709551615ULL};
    cfg.render = trial % 3 == 0;
    cfg.render_times = {0.0, cfg.T * u(rng), cfg.T};
    cfg.outdir = "out/run_" + std::to_string(trial);
    const auto text = echo_config(cfg);
    CHECK(parse_config(text) == cfg);
    CHECK(echo_config(parse_config(text)) == text);
  }
}

TEST_CASE("unknown keys and bad values name the key") {
  CHECK(error_key([] { parse_config("dimension = 2\n"); }) == "dimension");
  CHECK(error_key([] { parse_config("dim = two\n"); }) == "dim");
  CHECK(error_key([] { parse_config("T = 1.0x\n"); }) == "T");
  CHECK(error_key([] { parse_config("render = maybe\n"); }) == "render");
  CHECK(error_key([] { parse_config("n_list = 10, -3\n"); }) == "n_list");
  CHECK(error_key([] { parse_config("just text\n"); }) == "just text");
  CHECK_THROWS_WITH_AS(parse_config("foo = 1"), doctest::Contains("foo"), ConfigError);
}

TEST_CASE("overrides apply last") {
  auto cfg = parse_config("dim = 2\nT = 11\n");
  apply_override(cfg, "T=3");
  apply_override(cfg, " seeds = 7 ");
  CHECK(cfg.T == 3.0);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{7});
  CHECK(cfg.dim == 2);
  CHECK_THROWS_AS(apply_override(cfg, "T"), ConfigError);
  apply_config_text(cfg, "dim = 1\n");
  CHECK(cfg.dim == 1);
  CHECK(cfg.T == 3.0);
}

TEST_CASE("validation") {
  auto bad = [](const std::string& text) {
    return error_key([&] { validate(parse_config(text)); });
  };
  CHECK(bad("dim = 4") == "dim");
  CHECK(bad("kernel = gauss") == "kernel");
  CHECK(bad("ic = spiral") == "ic");
  CHECK(bad("ic_ell = 2") == "ic_ell");
  CHECK(bad("n_list = 1") == "n_list");
  CHECK(bad("n_list = 10,20,30\neps_list = 0.1,0.2") == "eps_list");
  CHECK(bad("eps_list = 1.5") == "eps_list");
  CHECK(bad("eps_rule = wide") == "eps_rule");
  CHECK(bad("T = -1") == "T");
  CHECK(bad("c_stab = 0") == "c_stab");
  CHECK(bad("seeds = ") == "seeds");
  CHECK(bad("snapshots = 0") == "snapshots");
  CHECK(bad("render_times = 2\nT = 1") == "render_times");
  CHECK(bad("dim = 2\nic_ell = 2") == "<none>");
}

TEST_CASE("eps rules") {
  auto cfg = parse_config("n_list = 2000, 8000");
  CHECK(epsilon_for(cfg, 0) == compliant_epsilon(2000, 1));
  CHECK(epsilon_for(cfg, 1) == compliant_epsilon(8000, 1));
  apply_override(cfg, "eps_rule=borderline");
  CHECK(epsilon_for(cfg, 1) == borderline_epsilon(8000, 1));
  apply_override(cfg, "eps_list=0.3,0.2");
  CHECK(epsilon_for(cfg, 1) == 0.2);
}

TEST_CASE("shipped configs load and validate") {
  const std::filesystem::path dir = std::filesystem::path(TKM_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    ++count;
    CAPTURE(entry.path().string());
    const auto cfg = load_config(entry.path().string());
    CHECK_NOTHROW(validate(cfg));
  }
  CHECK(count >= 8);
  const auto row1 = load_config((dir / "fig1_row1.cfg").string());
  CHECK(row1.dim == 2);
  CHECK(row1.eps_list == std::vector<double>{0.25});
  CHECK(row1.render_times == std::vector<double>{0, 5, 11});
  CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), ConfigError);
}
