#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "tkm/phase_field.hpp"

using namespace tkm;

namespace {

std::shared_ptr<const PointCloud> cloud_of(int dim, std::vector<double> coords) {
  auto c = std::make_shared<PointCloud>();
  c->dim = dim;
  c->coords = std::move(coords);
  return c;
}

}  // namespace

TEST_CASE("twisted state examples") {
  const auto p = twisted_state(2, 1, cloud_of(2, {kPi, 0.3}));
  CHECK(p.values[0] == doctest::Approx(kTwoPi));
  CHECK(p.winding == WindingVector({2, 0}));
  const auto z = twisted_state(0, 2, std::make_shared<const PointCloud>(sample_uniform(50, 2, 1)));
  for (double v : z.values) CHECK(v == 0.0);
  CHECK(z.winding.is_zero());
  const auto cloud = std::make_shared<const PointCloud>(sample_uniform(100, 2, 3));
  const auto row2 = twisted_state(1, 2, cloud);
  for (std::size_t i = 0; i < cloud->size(); ++i) CHECK(row2.values[i] == cloud->point(i)[1]);
  CHECK(row2.winding == WindingVector({0, 1}));
  CHECK_THROWS_AS(twisted_state(1, 3, cloud), std::invalid_argument);
  CHECK_THROWS_AS(twisted_state(1, 0, cloud), std::invalid_argument);
}

TEST_CASE("eval_initial checks the declared winding") {
  auto ic = sine_ic(2, 1, 0.5);
  const Grid g{2, 16};
  CHECK_NOTHROW(eval_initial(ic, g));
  ic.winding = WindingVector({1, 0});
  CHECK_THROWS_AS(eval_initial(ic, g), std::invalid_argument);
  auto twist = twist_ic(1, 3, 1);
  twist.winding = WindingVector({2});
  try {
    check_declared_winding(twist);
    FAIL("expected mismatch");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("18.8") != std::string::npos);
  }
  CHECK_NOTHROW(check_declared_winding(diagonal_twist_ic(3, -2)));
  CHECK_NOTHROW(check_declared_winding(twist_plus_sine_ic(2, 1, 1, 0.1, 2)));
}

TEST_CASE("grid pseudo-periodic continuation") {
  const Grid g{2, 8};
  const auto f = eval_initial(twist_plus_sine_ic(2, 2, 1, 0.3, 2), g);
  std::vector<long long> idx{3, 5};
  const double base = f.at(idx);
  idx[0] += 8;
  CHECK(f.at(idx) == doctest::Approx(base + 2 * kTwoPi).epsilon(1e-14));
  idx[0] -= 24;
  CHECK(f.at(idx) == doctest::Approx(base - 4 * kTwoPi).epsilon(1e-14));
  idx = {3, 13};
  CHECK(f.at(idx) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("values at periodic copies follow the winding") {
  const auto ic = twist_plus_sine_ic(2, 1, 2, 0.4, 1);
  const auto cloud = std::make_shared<const PointCloud>(sample_uniform(40, 2, 8));
  const auto p = eval_initial(ic, cloud);
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    for (int a = -2; a <= 2; ++a) {
      for (int b = -2; b <= 2; ++b) {
        const std::vector<int> cell{a, b};
        const std::vector<double> y{cloud->point(i)[0] + kTwoPi * a, cloud->point(i)[1] + kTwoPi * b};
        CHECK(p.value_at_copy(i, cell) == doctest::Approx(ic.value(y)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("sup lift distance examples") {
  const auto cloud = std::make_shared<const PointCloud>(sample_uniform(30, 1, 2));
  const auto a = eval_initial(sine_ic(1, 1), cloud);
  CHECK(sup_lift_distance(a, a) == 0.0);
  auto b = a;
  for (auto& v : b.values) v += 0.7;
  CHECK(sup_lift_distance(a, b) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(sup_lift_distance(a, b, ShiftMode::quotient) < 1e-14);
  auto c = a;
  c.winding = WindingVector({1});
  CHECK_THROWS_AS(sup_lift_distance(a, c), std::invalid_argument);
  const std::vector<double> x{0.0, 1.0, 3.0};
  const std::vector<double> y{0.5, 1.0, 2.0};
  // differences -0.5, 0, 1: best offset 0.25, residual 0.75
  CHECK(sup_difference(x, y, ShiftMode::quotient) == doctest::Approx(0.75));
  CHECK(sup_difference(x, y, ShiftMode::none) == doctest::Approx(1.0));
}

TEST_CASE("sup lift distance is a pseudometric") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto cloud = std::make_shared<const PointCloud>(sample_uniform(64, 2, 4));
  const auto base = twisted_state(1, 1, cloud);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = base, b = base, c = base;
    for (std::size_t i = 0; i < base.size(); ++i) {
      a.values[i] += noise(rng);
      b.values[i] += noise(rng);
      c.values[i] += noise(rng);
    }
    for (auto mode : {ShiftMode::none, ShiftMode::quotient}) {
      const double ab = sup_lift_distance(a, b, mode);
      CHECK(ab == doctest::Approx(sup_lift_distance(b, a, mode)).epsilon(1e-15));
      CHECK(sup_lift_distance(a, c, mode) <= ab + sup_lift_distance(b, c, mode) + 1e-12);
      CHECK(ab >= 0.0);
    }
  }
}

TEST_CASE("mean shift") {
  const auto cloud = std::make_shared<const PointCloud>(sample_uniform(30, 1, 2));
  const auto p = mean_shift_to_zero(eval_initial(twist_plus_sine_ic(1, 1, 1, 1.0, 1), cloud));
  double s = 0.0;
  for (double v : p.values) s += v;
  CHECK(std::abs(s) < 1e-12);
  CHECK(p.winding == WindingVector({1}));
}

TEST_CASE("phase CSV round trip") {
  const auto cloud = std::make_shared<const PointCloud>(sample_uniform(25, 2, 6));
  const auto p = eval_initial(twist_plus_sine_ic(2, 2, 1, 0.2, 2), cloud);
  std::ostringstream out;
  write_phase_csv(out, p, 1.25);
  const std::string text = out.str();
  CHECK(text.find("i,x_1,x_2,lifted_value,wrapped_value") != std::string::npos);
  CHECK(text.find("# winding=") != std::string::npos);
  std::istringstream in(text);
  const auto snap = read_phase_csv(in);
  CHECK(snap.dim == 2);
  CHECK(snap.time == 1.25);
  CHECK(snap.winding == p.winding);
  CHECK(snap.coords == cloud->coords);
  CHECK(snap.lifted == p.values);
}

TEST_CASE("grid CSV") {
  const auto f = eval_initial(sine_ic(1, 1), Grid{1, 4});
  std::ostringstream out;
  write_grid_csv(out, f, 0.0);
  CHECK(out.str().find("# grid_M=4") != std::string::npos);
}
