#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "tkm/kernel.hpp"

using namespace tkm;

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-15));
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
}

TEST_CASE("indicator kernel values") {
  const std::vector<double> half{0.5};
  CHECK(Kernel::indicator(1)(half) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> origin{0.0, 0.0};
  CHECK(Kernel::indicator(2)(origin) == doctest::Approx(1.0 / M_PI));
  const std::vector<double> outside{1.1, 0.0};
  CHECK(Kernel::indicator(2)(outside) == 0.0);
  const std::vector<double> inside{0.3, 0.4};
  CHECK(Kernel::indicator(2)(inside) == doctest::Approx(1.0 / M_PI));
  const std::vector<double> far{2.0, 0.0, 0.0};
  CHECK(Kernel::indicator(3)(far) == 0.0);
  CHECK(Kernel::bump(3)(far) == 0.0);
  CHECK_THROWS_AS(Kernel::indicator(0), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::by_name("gauss", 2), std::invalid_argument);
}

TEST_CASE("kernels are radial") {
  for (const auto& k : {Kernel::indicator(3), Kernel::bump(3)}) {
    const std::vector<double> a{0.1, 0.2, 0.6};
    const std::vector<double> b{0.6, -0.1, 0.2};
    const std::vector<double> c{-0.2, 0.6, -0.1};
    CHECK(k(a) == k(b));
    CHECK(k(a) == k(c));
  }
}

TEST_CASE("normalization to unit mass") {
  for (int d = 1; d <= 3; ++d) {
    CHECK(std::abs(Kernel::indicator(d).mass() - 1.0) < 1e-10);
    CHECK(std::abs(Kernel::bump(d).mass() - 1.0) < 1e-10);
  }
}

TEST_CASE("indicator moments against dense midpoint oracle") {
  // frozen values from a 2e6-point midpoint rule on [-1, 1] for d = 1
  const auto m1 = moments(Kernel::indicator(1));
  CHECK(std::abs(m1.kappa2 - 0.16666666666662502) < 1e-10);
  CHECK(std::abs(m1.kappa1 - 0.25) < 1e-10);
  const auto m2 = moments(Kernel::indicator(2));
  CHECK(std::abs(m2.kappa2 - 0.15915494309189535) < 1e-10);
  CHECK(m2.sigma_d == doctest::Approx(M_PI));
}

TEST_CASE("indicator moments match the closed form") {
  for (int d = 1; d <= 3; ++d) {
    const auto m = moments(Kernel::indicator(d));
    const double s = unit_ball_volume(d);
    CHECK(std::abs(m.kappa1 - d / ((d + 1.0) * s)) < 1e-9);
    CHECK(std::abs(m.kappa2 - d / ((d + 2.0) * s)) < 1e-9);
  }
}

TEST_CASE("bump kernel constants against high-precision quadrature") {
  // 30-digit adaptive quadrature, frozen
  struct Row {
    int d;
    double c, k1, k2;
  };
  const Row rows[] = {{1, 2.252283621043581, 0.16722699885498766, 0.079056818131899115},
                      {2, 2.1435657757922366, 0.1504814829777524, 0.083177939419347394},
                      {3, 2.2671167396083265, 0.13195823120055763, 0.079996119545378331}};
  for (const auto& r : rows) {
    const auto k = Kernel::bump(r.d);
    CHECK(std::abs(k.normalization() - r.c) < 1e-9);
    const auto m = moments(k);
    CHECK(std::abs(m.kappa1 - r.k1) < 1e-10);
    CHECK(std::abs(m.kappa2 - r.k2) < 1e-10);
    CHECK(m.kappa1 > 0.0);
    CHECK(m.kappa2 > 0.0);
  }
}

TEST_CASE("diffusion coefficient") {
  const auto m = moments(Kernel::indicator(1));
  CHECK(m.diffusion(1) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}
