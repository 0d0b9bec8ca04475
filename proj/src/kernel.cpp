#include "tkm/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <string>
#include <numbers>
#include <stdexcept>

#include "tkm/errors.hpp"

namespace tkm {

namespace {

constexpr double kQuadTol = 1e-12;

double bump_shape(double r) noexcept {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

double raw_shape(KernelShape shape, double r) noexcept {
  switch (shape) {
    case KernelShape::indicator:
      return r <= 1.0 ? 1.0 : 0.0;
    case KernelShape::bump:
      return bump_shape(r);
  }
  return 0.0;
}

double integrate_unit_interval(const auto& f) {
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 30, kQuadTol, &error, &l1);
  if (!std::isfinite(value) || error > 1e-10 * std::max(1.0, l1)) {
    throw NumericError("kernel quadrature did not converge (error estimate " + std::to_string(error) + ")");
  }
  return value;
}

}  // namespace

double unit_ball_volume(int dim) {
  if (dim < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
  const double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

Kernel::Kernel(KernelShape shape, int dim) : shape_(shape), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("kernel: dimension must be >= 1, got " + std::to_string(dim));
  switch (shape) {
    case KernelShape::indicator:
      name_ = "indicator";
      scale_ = 1.0 / unit_ball_volume(dim);
      break;
    case KernelShape::bump: {
      name_ = "bump";
      const double area = unit_sphere_area(dim);
      const double raw = integrate_unit_interval([dim](double r) { return std::pow(r, dim - 1) * bump_shape(r); });
      scale_ = 1.0 / (area * raw);
      break;
    }
  }
}

Kernel Kernel::indicator(int dim) { return Kernel(KernelShape::indicator, dim); }
Kernel Kernel::bump(int dim) { return Kernel(KernelShape::bump, dim); }

Kernel Kernel::by_name(const std::string& name, int dim) {
  if (name == "indicator") return indicator(dim);
  if (name == "bump") return bump(dim);
  throw std::invalid_argument("unknown kernel '" + name + "' (expected indicator or bump)");
}

double Kernel::profile(double r) const noexcept { return scale_ * raw_shape(shape_, r); }

double Kernel::operator()(std::span<const double> z) const noexcept {
  double s = 0.0;
  for (double v : z) s += v * v;
  // the indicator boundary |z| = 1 is tested on the square to avoid sqrt rounding
  if (s > 1.0) return 0.0;
  return profile(std::sqrt(s));
}

double radial_moment(const Kernel& kernel, int power) {
  const int dim = kernel.dim();
  const double area = unit_sphere_area(dim);
  const double value = integrate_unit_interval(
      [&kernel, dim, power](double r) { return std::pow(r, power + dim - 1) * kernel.profile(r); });
  return area * value;
}

double Kernel::mass() const { return radial_moment(*this, 0); }

KernelMoments moments(const Kernel& kernel) {
  KernelMoments m;
  m.sigma_d = unit_ball_volume(kernel.dim());
  m.kappa1 = radial_moment(kernel, 1) / m.sigma_d;
  m.kappa2 = radial_moment(kernel, 2) / m.sigma_d;
  return m;
}

}  // namespace tkm
