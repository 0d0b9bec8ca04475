#include "tkm/phase_field.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tkm/io.hpp"

namespace tkm {

std::size_t Grid::size() const noexcept {
  std::size_t n = 1;
  for (int l = 0; l < dim; ++l) n *= static_cast<std::size_t>(points_per_axis);
  return n;
}

void Grid::coordinates(std::size_t flat, std::span<double> out) const noexcept {
  const auto m = static_cast<std::size_t>(points_per_axis);
  const double h = spacing();
  for (int l = 0; l < dim; ++l) {
    out[static_cast<std::size_t>(l)] = static_cast<double>(flat % m) * h;
    flat /= m;
  }
}

std::size_t Grid::flat_index(std::span<const long long> idx) const noexcept {
  std::size_t flat = 0;
  for (int l = dim - 1; l >= 0; --l) {
    flat = flat * static_cast<std::size_t>(points_per_axis) + static_cast<std::size_t>(idx[static_cast<std::size_t>(l)]);
  }
  return flat;
}

namespace {

void check_axis(int dim, int axis) {
  if (axis < 1 || axis > dim) {
    throw std::invalid_argument("axis " + std::to_string(axis) + " outside 1.." + std::to_string(dim));
  }
}

WindingVector axis_winding(int dim, int k, int axis) {
  WindingVector w = WindingVector::zero(dim);
  w.k[static_cast<std::size_t>(axis - 1)] = k;
  return w;
}

}  // namespace

InitialCondition twist_ic(int dim, int k, int axis) {
  check_axis(dim, axis);
  InitialCondition ic;
  ic.name = "twist";
  ic.dim = dim;
  ic.winding = axis_winding(dim, k, axis);
  const auto a = static_cast<std::size_t>(axis - 1);
  ic.value = [k, a](std::span<const double> x) { return k * x[a]; };
  ic.laplacian = [](std::span<const double>) { return 0.0; };
  return ic;
}

InitialCondition diagonal_twist_ic(int dim, int k) {
  InitialCondition ic;
  ic.name = "diag";
  ic.dim = dim;
  ic.winding = WindingVector(std::vector<int>(static_cast<std::size_t>(dim), k));
  ic.value = [k](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return k * s;
  };
  ic.laplacian = [](std::span<const double>) { return 0.0; };
  return ic;
}

InitialCondition sine_ic(int dim, int axis, double amp) {
  check_axis(dim, axis);
  InitialCondition ic;
  ic.name = "sine";
  ic.dim = dim;
  ic.winding = WindingVector::zero(dim);
  const auto a = static_cast<std::size_t>(axis - 1);
  ic.value = [amp, a](std::span<const double> x) { return amp * std::sin(x[a]); };
  ic.laplacian = [amp, a](std::span<const double> x) { return -amp * std::sin(x[a]); };
  return ic;
}

InitialCondition twist_plus_sine_ic(int dim, int k, int twist_axis, double amp, int sine_axis) {
  check_axis(dim, twist_axis);
  check_axis(dim, sine_axis);
  InitialCondition ic;
  ic.name = "twist_sine";
  ic.dim = dim;
  ic.winding = axis_winding(dim, k, twist_axis);
  const auto t = static_cast<std::size_t>(twist_axis - 1);
  const auto s = static_cast<std::size_t>(sine_axis - 1);
  ic.value = [k, t, amp, s](std::span<const double> x) { return k * x[t] + amp * std::sin(x[s]); };
  ic.laplacian = [amp, s](std::span<const double> x) { return -amp * std::sin(x[s]); };
  return ic;
}

InitialCondition constant_ic(int dim, double c) {
  InitialCondition ic;
  ic.name = "constant";
  ic.dim = dim;
  ic.winding = WindingVector::zero(dim);
  ic.value = [c](std::span<const double>) { return c; };
  ic.laplacian = [](std::span<const double>) { return 0.0; };
  return ic;
}

double NodePhases::value_at_copy(std::size_t i, std::span<const int> cell) const {
  return values[i] + winding_offset(winding, cell);
}

double GridField::at(std::span<const long long> idx) const {
  const long long m = grid.points_per_axis;
  std::size_t flat = 0;
  long long turns = 0;
  for (int l = grid.dim - 1; l >= 0; --l) {
    const long long i = idx[static_cast<std::size_t>(l)];
    long long q = i / m;
    long long r = i % m;
    if (r < 0) {
      r += m;
      --q;
    }
    flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(r);
    turns += q * winding.k[static_cast<std::size_t>(l)];
  }
  return values[flat] + kTwoPi * static_cast<double>(turns);
}

NodePhases twisted_state(int k, int axis, std::shared_ptr<const PointCloud> cloud) {
  auto ic = twist_ic(cloud->dim, k, axis);
  return eval_initial(ic, std::move(cloud));
}

GridField twisted_state(int k, int axis, const Grid& grid) { return eval_initial(twist_ic(grid.dim, k, axis), grid); }

void check_declared_winding(const InitialCondition& ic) {
  if (ic.winding.dim() != ic.dim) {
    throw std::invalid_argument("initial condition '" + ic.name + "': winding vector has wrong dimension");
  }
  std::mt19937_64 engine(0x5eedULL);
  std::vector<double> x(static_cast<std::size_t>(ic.dim));
  std::vector<double> shifted(x.size());
  for (int axis = 0; axis < ic.dim; ++axis) {
    const double expected = kTwoPi * ic.winding.k[static_cast<std::size_t>(axis)];
    for (int sample = 0; sample < 8; ++sample) {
      for (double& v : x) v = static_cast<double>(engine() >> 11) * 0x1.0p-53 * kTwoPi;
      shifted = x;
      shifted[static_cast<std::size_t>(axis)] += kTwoPi;
      const double measured = ic.value(shifted) - ic.value(x);
      if (std::abs(measured - expected) > 1e-8) {
        throw std::invalid_argument("initial condition '" + ic.name + "': declared winding k_" +
                                    std::to_string(axis + 1) + "=" +
                                    std::to_string(ic.winding.k[static_cast<std::size_t>(axis)]) +
                                    " but measured offset " + format_double(measured) + " along axis " +
                                    std::to_string(axis + 1));
      }
    }
  }
}

NodePhases eval_initial(const InitialCondition& ic, std::shared_ptr<const PointCloud> cloud) {
  if (cloud->dim != ic.dim) throw std::invalid_argument("eval_initial: dimension mismatch");
  check_declared_winding(ic);
  NodePhases p;
  p.winding = ic.winding;
  p.values.resize(cloud->size());
  for (std::size_t i = 0; i < cloud->size(); ++i) p.values[i] = ic.value(cloud->point(i));
  p.cloud = std::move(cloud);
  return p;
}

GridField eval_initial(const InitialCondition& ic, const Grid& grid) {
  if (grid.dim != ic.dim) throw std::invalid_argument("eval_initial: dimension mismatch");
  check_declared_winding(ic);
  GridField f;
  f.grid = grid;
  f.winding = ic.winding;
  f.values.resize(grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dim));
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    grid.coordinates(i, x);
    f.values[i] = ic.value(x);
  }
  return f;
}

namespace {
double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}
}  // namespace

NodePhases mean_shift_to_zero(NodePhases phases) {
  const double m = mean_of(phases.values);
  for (double& v : phases.values) v -= m;
  return phases;
}

GridField mean_shift_to_zero(GridField field) {
  const double m = mean_of(field.values);
  for (double& v : field.values) v -= m;
  return field;
}

double sup_difference(std::span<const double> a, std::span<const double> b, ShiftMode mode) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_difference: size mismatch");
  if (a.empty()) return 0.0;
  if (mode == ShiftMode::none) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
  }
  double lo = a[0] - b[0];
  double hi = lo;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return 0.5 * (hi - lo);
}

double sup_lift_distance(const NodePhases& a, const NodePhases& b, ShiftMode mode) {
  if (!(a.winding == b.winding)) {
    throw std::invalid_argument("sup_lift_distance: winding vectors differ, lifts are not comparable");
  }
  return sup_difference(a.values, b.values, mode);
}

double sup_lift_distance(const NodePhases& a, const WindingVector& b_winding,
                         const std::function<double(std::span<const double>)>& b, ShiftMode mode) {
  if (!(a.winding == b_winding)) {
    throw std::invalid_argument("sup_lift_distance: winding vectors differ, lifts are not comparable");
  }
  std::vector<double> other(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) other[i] = b(a.cloud->point(i));
  return sup_difference(a.values, other, mode);
}

namespace {
void write_winding(std::ostream& out, const WindingVector& w) {
  out << "# winding=";
  for (std::size_t l = 0; l < w.k.size(); ++l) out << (l ? "," : "") << w.k[l];
  out << '\n';
}

void write_header(std::ostream& out, int dim) {
  out << 'i';
  for (int l = 1; l <= dim; ++l) out << ",x_" << l;
  out << ",lifted_value,wrapped_value\n";
}
}  // namespace

void write_phase_csv(std::ostream& out, const NodePhases& phases, double time, ShiftMode mode) {
  const int dim = phases.cloud->dim;
  out << "# t=" << format_double(time) << '\n';
  write_winding(out, phases.winding);
  out << "# mean_shift=" << (mode == ShiftMode::quotient ? 1 : 0) << '\n';
  write_header(out, dim);
  for (std::size_t i = 0; i < phases.size(); ++i) {
    out << i;
    for (double c : phases.cloud->point(i)) out << ',' << format_double(c);
    out << ',' << format_double(phases.values[i]) << ',' << format_double(wrap_coordinate(phases.values[i])) << '\n';
  }
}

void write_grid_csv(std::ostream& out, const GridField& field, double time) {
  out << "# t=" << format_double(time) << '\n';
  write_winding(out, field.winding);
  out << "# mean_shift=0\n";
  out << "# grid_M=" << field.grid.points_per_axis << '\n';
  write_header(out, field.grid.dim);
  std::vector<double> x(static_cast<std::size_t>(field.grid.dim));
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    field.grid.coordinates(i, x);
    out << i;
    for (double c : x) out << ',' << format_double(c);
    out << ',' << format_double(field.values[i]) << ',' << format_double(wrap_coordinate(field.values[i])) << '\n';
  }
}

PhaseSnapshot read_phase_csv(std::istream& in) {
  PhaseSnapshot snap;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("t=", 0) == 0) {
        snap.time = std::stod(body.substr(2));
      } else if (body.rfind("winding=", 0) == 0) {
        snap.winding.k.clear();
        for (const auto& f : split_fields(body.substr(8), ',')) snap.winding.k.push_back(std::stoi(f));
      }
      continue;
    }
    const auto fields = split_fields(line, ',');
    if (!header_seen) {
      if (fields.size() < 4 || fields[0] != "i") throw std::runtime_error("phase csv: malformed header");
      snap.dim = static_cast<int>(fields.size()) - 3;
      header_seen = true;
      continue;
    }
    if (fields.size() != static_cast<std::size_t>(snap.dim) + 3) throw std::runtime_error("phase csv: bad row");
    for (int l = 0; l < snap.dim; ++l) snap.coords.push_back(std::stod(fields[static_cast<std::size_t>(l) + 1]));
    snap.lifted.push_back(std::stod(fields[static_cast<std::size_t>(snap.dim) + 1]));
  }
  if (!header_seen) throw std::runtime_error("phase csv: no header");
  return snap;
}

}  // namespace tkm
