#include "tkm/heat.hpp"

#include <stdexcept>

namespace tkm {

namespace {

double linear_tilt(const WindingVector& k, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t l = 0; l < k.k.size(); ++l) s += k.k[l] * x[l];
  return s;
}

}  // namespace

HeatSolution::HeatSolution(const GridField& u0, const KernelMoments& moments, bool zero_mean)
    : grid_(u0.grid), winding_(u0.winding) {
  const int d = u0.grid.dim;
  if (u0.values.size() != grid_.size()) throw std::invalid_argument("HeatSolution: grid field has wrong size");
  if (static_cast<int>(winding_.k.size()) != d) throw std::invalid_argument("HeatSolution: winding dimension mismatch");
  diffusion_ = moments.diffusion(d);
  std::vector<double> periodic(u0.values);
  std::vector<double> x(static_cast<std::size_t>(d));
  double mean = 0.0;
  for (std::size_t i = 0; i < periodic.size(); ++i) {
    grid_.coordinates(i, x);
    periodic[i] -= linear_tilt(winding_, x);
    mean += periodic[i];
  }
  if (zero_mean) {
    mean /= static_cast<double>(periodic.size());
    for (auto& v : periodic) v -= mean;
  }
  series_ = FourierSeries(grid_, periodic);
  aliasing_fraction_ = series_.top_third_energy_fraction();
}

double HeatSolution::tilt(std::span<const double> x) const { return linear_tilt(winding_, x); }

double HeatSolution::eval(double t, std::span<const double> x) const {
  if (t < 0.0) throw std::invalid_argument("HeatSolution::eval: negative time");
  std::vector<double> w(x.begin(), x.end());
  for (auto& c : w) c = wrap_coordinate(c);
  return tilt(x) + series_.evaluate(w, t, diffusion_);
}

GridField HeatSolution::on_grid(double t) const {
  if (t < 0.0) throw std::invalid_argument("HeatSolution::on_grid: negative time");
  GridField out{grid_, series_.sample_on_grid(t, diffusion_), winding_};
  std::vector<double> x(static_cast<std::size_t>(grid_.dim));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    grid_.coordinates(i, x);
    out.values[i] += tilt(x);
  }
  return out;
}

std::vector<double> HeatSolution::at_nodes(double t, const PointCloud& cloud) const {
  std::vector<double> out(cloud.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto x = cloud.point(i);
    out[i] = tilt(x) + series_.evaluate(x, t, diffusion_);
  }
  return out;
}

}  // namespace tkm
