#include "tkm/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "tkm/errors.hpp"
#include "tkm/io.hpp"
#include "tkm/rgg.hpp"

namespace tkm {

namespace {

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(std::string(key), "config key '" + std::string(key) + "': expected an integer, got '" + s + "'");
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(key), "config key '" + std::string(key) + "': expected a number, got '" + s + "'");
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ConfigError(std::string(key), "config key '" + std::string(key) + "': expected on/off, got '" + s + "'");
}

std::vector<std::string> list_items(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  for (auto& f : split_fields(text, ',')) out.push_back(f);
  return out;
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view text, F&& one) {
  std::vector<T> out;
  for (const auto& item : list_items(text)) out.push_back(one(item));
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += fmt(values[i]);
  }
  return out;
}

std::string on_off(bool b) { return b ? "on" : "off"; }

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dim",    "kernel",   "ic",   "ic_k",   "ic_ell", "ic_amp",          "ic_sine_axis", "n_list",
      "eps_list", "eps_rule", "T", "dt",     "c_stab", "seeds",           "grid_M",       "outdir",
      "render", "add_time_offset", "snapshots", "render_times", "integral", "threads"};
  return keys;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key_view, std::string_view value) {
  const std::string key = trim(key_view);
  const std::string v = trim(value);
  auto as_size = [&](const std::string& s) { return parse_integer<std::size_t>(key, s); };
  auto as_seed = [&](const std::string& s) { return parse_integer<std::uint64_t>(key, s); };
  auto as_real = [&](const std::string& s) { return parse_real(key, s); };
  if (key == "dim") cfg.dim = parse_integer<int>(key, v);
  else if (key == "kernel") cfg.kernel = v;
  else if (key == "ic") cfg.ic = v;
  else if (key == "ic_k") cfg.ic_k = parse_integer<int>(key, v);
  else if (key == "ic_ell") cfg.ic_ell = parse_integer<int>(key, v);
  else if (key == "ic_amp") cfg.ic_amp = parse_real(key, v);
  else if (key == "ic_sine_axis") cfg.ic_sine_axis = parse_integer<int>(key, v);
  else if (key == "n_list") cfg.n_list = parse_list<std::size_t>(v, as_size);
  else if (key == "eps_list") cfg.eps_list = parse_list<double>(v, as_real);
  else if (key == "eps_rule") cfg.eps_rule = v;
  else if (key == "T") cfg.T = parse_real(key, v);
  else if (key == "dt") cfg.dt = parse_real(key, v);
  else if (key == "c_stab") cfg.c_stab = parse_real(key, v);
  else if (key == "seeds") cfg.seeds = parse_list<std::uint64_t>(v, as_seed);
  else if (key == "grid_M") cfg.grid_M = parse_integer<int>(key, v);
  else if (key == "outdir") cfg.outdir = v;
  else if (key == "render") cfg.render = parse_bool(key, v);
  else if (key == "add_time_offset") cfg.add_time_offset = parse_bool(key, v);
  else if (key == "snapshots") cfg.snapshots = parse_integer<int>(key, v);
  else if (key == "render_times") cfg.render_times = parse_list<double>(v, as_real);
  else if (key == "integral") cfg.integral = parse_bool(key, v);
  else if (key == "threads") cfg.threads = parse_integer<int>(key, v);
  else throw ConfigError(key, "unknown config key '" + key + "'");
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(trim(assignment), "override '" + std::string(assignment) + "' is not of the form key=value");
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    apply_override(cfg, t);
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("config", "cannot read config file '" + path + "': " + e.what());
  }
  return parse_config(text);
}

std::string echo_config(const ExperimentConfig& cfg) {
  auto num = [](double d) { return format_double(d); };
  auto whole = [](auto v) { return std::to_string(v); };
  std::ostringstream out;
  out << "dim = " << cfg.dim << '\n'
      << "kernel = " << cfg.kernel << '\n'
      << "ic = " << cfg.ic << '\n'
      << "ic_k = " << cfg.ic_k << '\n'
      << "ic_ell = " << cfg.ic_ell << '\n'
      << "ic_amp = " << num(cfg.ic_amp) << '\n'
      << "ic_sine_axis = " << cfg.ic_sine_axis << '\n'
      << "n_list = " << join(cfg.n_list, whole) << '\n'
      << "eps_list = " << join(cfg.eps_list, num) << '\n'
      << "eps_rule = " << cfg.eps_rule << '\n'
      << "T = " << num(cfg.T) << '\n'
      << "dt = " << num(cfg.dt) << '\n'
      << "c_stab = " << num(cfg.c_stab) << '\n'
      << "seeds = " << join(cfg.seeds, whole) << '\n'
      << "grid_M = " << cfg.grid_M << '\n'
      << "outdir = " << cfg.outdir << '\n'
      << "render = " << on_off(cfg.render) << '\n'
      << "add_time_offset = " << on_off(cfg.add_time_offset) << '\n'
      << "snapshots = " << cfg.snapshots << '\n'
      << "render_times = " << join(cfg.render_times, num) << '\n'
      << "integral = " << on_off(cfg.integral) << '\n'
      << "threads = " << cfg.threads << '\n';
  return out.str();
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("dim", "config key 'dim': must be 1, 2 or 3");
  if (cfg.kernel != "indicator" && cfg.kernel != "bump")
    throw ConfigError("kernel", "config key 'kernel': unknown kernel '" + cfg.kernel + "'");
  if (cfg.ic != "sine" && cfg.ic != "twist" && cfg.ic != "diag" && cfg.ic != "twist_sine" && cfg.ic != "constant")
    throw ConfigError("ic", "config key 'ic': unknown initial condition '" + cfg.ic + "'");
  if (cfg.ic_ell < 1 || cfg.ic_ell > cfg.dim) throw ConfigError("ic_ell", "config key 'ic_ell': axis outside 1..dim");
  if (cfg.ic_sine_axis < 1 || cfg.ic_sine_axis > cfg.dim)
    throw ConfigError("ic_sine_axis", "config key 'ic_sine_axis': axis outside 1..dim");
  if (cfg.n_list.empty()) throw ConfigError("n_list", "config key 'n_list': empty");
  for (auto n : cfg.n_list)
    if (n < 2) throw ConfigError("n_list", "config key 'n_list': every n must be at least 2");
  if (!cfg.eps_list.empty() && cfg.eps_list.size() != 1 && cfg.eps_list.size() != cfg.n_list.size())
    throw ConfigError("eps_list", "config key 'eps_list': needs one entry or one per n_list entry");
  for (double e : cfg.eps_list)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("eps_list", "config key 'eps_list': eps must lie in (0, 1)");
  if (cfg.eps_list.empty() && cfg.eps_rule != "compliant" && cfg.eps_rule != "borderline")
    throw ConfigError("eps_rule", "config key 'eps_rule': expected compliant or borderline");
  if (!(cfg.T >= 0.0) || !std::isfinite(cfg.T)) throw ConfigError("T", "config key 'T': must be finite and >= 0");
  if (!(cfg.dt >= 0.0)) throw ConfigError("dt", "config key 'dt': must be >= 0");
  if (!(cfg.c_stab > 0.0)) throw ConfigError("c_stab", "config key 'c_stab': must be positive");
  if (cfg.seeds.empty()) throw ConfigError("seeds", "config key 'seeds': empty");
  if (cfg.grid_M < 0) throw ConfigError("grid_M", "config key 'grid_M': must be >= 0");
  if (cfg.snapshots < 1) throw ConfigError("snapshots", "config key 'snapshots': must be >= 1");
  if (cfg.threads < 0) throw ConfigError("threads", "config key 'threads': must be >= 0");
  for (double t : cfg.render_times)
    if (t < 0.0 || t > cfg.T) throw ConfigError("render_times", "config key 'render_times': times must lie in [0, T]");
}

double epsilon_for(const ExperimentConfig& cfg, std::size_t index) {
  if (!cfg.eps_list.empty()) return cfg.eps_list.size() == 1 ? cfg.eps_list[0] : cfg.eps_list.at(index);
  const std::size_t n = cfg.n_list.at(index);
  if (cfg.eps_rule == "borderline") return borderline_epsilon(n, cfg.dim);
  return compliant_epsilon(n, cfg.dim);
}

}  // namespace tkm
