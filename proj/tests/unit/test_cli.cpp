#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tkm_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result run(const std::string& args, const std::string& env = "") {
  const auto dir = fs::temp_directory_path() / "tkm_test_cli_io";
  fs::create_directories(dir);
  const std::string cmd = env + " " + std::string(TKM_CLI_PATH) + " " + args + " > " + (dir / "out").string() +
                          " 2> " + (dir / "err").string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "out");
  r.err = slurp(dir / "err");
  return r;
}

}  // namespace

TEST_CASE("moments") {
  const auto r = run("moments -k indicator -d 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("kappa2=0.1591549430918953") != std::string::npos);
  CHECK(r.out.find("sigma_d=3.14159265358979") != std::string::npos);
  const auto b = run("moments --kernel bump --dim 1");
  CHECK(b.code == 0);
  CHECK(b.out.find("kernel=bump") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("converge --bogus-flag").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("config errors exit with 1 and name the key") {
  const auto dir = scratch("cfgerr");
  auto r = run("converge -o " + dir.string() + " --set colour=red");
  CHECK(r.code == 1);
  CHECK(r.err.find("colour") != std::string::npos);
  r = run("degrees -o " + dir.string() + " --set dim=7");
  CHECK(r.code == 1);
  CHECK(r.err.find("[dim]") != std::string::npos);
  r = run("converge -c " + (dir / "nope.cfg").string());
  CHECK(r.code == 1);
  CHECK(r.err.find("nope.cfg") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("a failing run exits with 2 and names the run") {
  const auto dir = scratch("fail");
  const auto r = run("converge -o " + dir.string() +
                     " -s n_list=20 -s eps_list=0.01 -s T=0.01 -s snapshots=1 -s integral=off");
  CHECK(r.code == 2);
  CHECK(r.err.find("run n=20,eps=0.01,seed=1 failed") != std::string::npos);
  // the manifest records the failure
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["status"] == "complete");
  CHECK(m["runs"][0]["ok"] == false);
  fs::remove_all(dir);
}

TEST_CASE("config file, overrides and seed precedence") {
  const auto dir = scratch("prec");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "dim = 2\nn_list = 400\neps_list = 0.5\nseeds = 1, 2\noutdir = " << (dir / "from_file").string() << "\n";
  }
  auto r = run("degrees -c " + (dir / "run.cfg").string() + " --set eps_list=0.6 --seed 9");
  CHECK(r.code == 0);
  CHECK(r.out.find("n=400,eps=0.6,seed=9") != std::string::npos);
  CHECK(r.out.find("seed=1") == std::string::npos);
  CHECK(fs::exists(dir / "from_file" / "degrees.csv"));
  const auto m = nlohmann::json::parse(slurp(dir / "from_file" / "manifest.json"));
  CHECK(m["config"]["eps_list"] == "0.6");
  CHECK(m["overrides"][0] == "eps_list=0.6");

  r = run("degrees -c " + (dir / "run.cfg").string() + " -o " + (dir / "cli").string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "cli" / "degrees.csv"));
  fs::remove_all(dir);
}

TEST_CASE("TKM_OUTDIR sets the default output directory") {
  const auto dir = scratch("env");
  auto r = run("degrees -s dim=2 -s n_list=300 -s eps_list=0.5", "TKM_OUTDIR=" + (dir / "env_out").string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "env_out" / "degrees.csv"));
  // a config file outdir wins over the environment
  {
    std::ofstream cfg(dir / "c.cfg");
    cfg << "dim = 2\nn_list = 300\neps_list = 0.5\noutdir = " << (dir / "cfg_out").string() << "\n";
  }
  r = run("degrees -c " + (dir / "c.cfg").string(), "TKM_OUTDIR=" + (dir / "env_out2").string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "cfg_out" / "degrees.csv"));
  CHECK_FALSE(fs::exists(dir / "env_out2"));
  fs::remove_all(dir);
}

TEST_CASE("solver subcommands") {
  const auto dir = scratch("solvers");
  const std::string base = " -s dim=1 -s n_list=300 -s eps_list=0.5 -s T=0.1 -s snapshots=2 -o " + dir.string();
  auto r = run("heat" + base);
  CHECK(r.code == 0);
  CHECK(r.out.find("diffusion=") != std::string::npos);
  r = run("integral" + base);
  CHECK(r.code == 0);
  CHECK(r.out.find("consistency=") != std::string::npos);
  r = run("kuramoto" + base);
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "trajectory" / "seed1_0000.csv"));
  CHECK(nlohmann::json::parse(slurp(dir / "manifest.json"))["status"] == "complete");
  fs::remove_all(dir);
}

TEST_CASE("persist then render a snapshot") {
  const auto dir = scratch("render");
  auto r = run("persist -s dim=2 -s ic=twist -s n_list=600 -s eps_list=0.4 -s T=0.2 -s snapshots=2 -s integral=off "
               "-s render=on -s render_times=0.2 -o " + dir.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("max_dist=") != std::string::npos);
  const auto csv = dir / "phases" / "n600_seed1_t0.2.csv";
  REQUIRE(fs::exists(csv));
  CHECK(fs::exists(dir / "frames" / "n600_seed1_t0.2.png"));
  r = run("render -i " + csv.string() + " -o " + (dir / "again.png").string() + " --size 128 --add-time-offset");
  CHECK(r.code == 0);
  CHECK(fs::file_size(dir / "again.png") > 100);
  // one-dimensional snapshots cannot be rendered
  run("kuramoto -s dim=1 -s n_list=200 -s eps_list=0.5 -s T=0.01 -s snapshots=1 -o " + (dir / "k1").string());
  r = run("render -i " + (dir / "k1" / "trajectory" / "seed1_0000.csv").string() + " -o " + (dir / "x.png").string());
  CHECK(r.code == 2);
  fs::remove_all(dir);
}
