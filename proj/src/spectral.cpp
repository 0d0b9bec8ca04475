#include "tkm/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace tkm {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Symmetric frequencies represented by FFT index k: the Nyquist index of an
// even M is split evenly between +M/2 and -M/2 so the series is real.
std::vector<std::pair<int, double>> frequencies_of(int k, int m) {
  if (2 * k < m) return {{k, 1.0}};
  if (2 * k > m) return {{k - m, 1.0}};
  return {{m / 2, 0.5}, {-m / 2, 0.5}};
}

}  // namespace

std::vector<std::complex<double>> forward_dft(const Grid& grid, std::span<const double> values) {
  const std::size_t total = grid.size();
  if (values.size() != total) throw std::invalid_argument("forward_dft: sample count does not match the grid");
  std::vector<std::complex<double>> data(values.begin(), values.end());
  std::vector<int> dims(static_cast<std::size_t>(grid.dim), grid.points_per_axis);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    // FFTW expects row-major dims with the last axis fastest; Grid order has
    // axis 0 fastest, which is the same array with the axes reversed.
    plan = fftw_plan_dft(grid.dim, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(total);
  for (auto& c : data) c *= scale;
  return data;
}

FourierSeries::FourierSeries(const Grid& grid, std::span<const double> periodic, double prune_rel)
    : grid_(grid), max_freq_(static_cast<std::size_t>(grid.dim), 0) {
  const auto coeffs = forward_dft(grid, periodic);
  double largest = 0.0;
  for (const auto& c : coeffs) largest = std::max(largest, std::abs(c));
  const double cutoff = prune_rel * largest;
  const int m = grid.points_per_axis;
  const auto dim = static_cast<std::size_t>(grid.dim);
  std::vector<int> idx(dim);
  for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
    const auto c = coeffs[flat];
    if (std::abs(c) <= cutoff) continue;
    std::size_t rest = flat;
    for (std::size_t l = 0; l < dim; ++l) {
      idx[l] = static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
    }
    // cartesian product of per-axis representatives
    std::vector<Mode> partial{Mode{{}, c}};
    for (std::size_t l = 0; l < dim; ++l) {
      std::vector<Mode> next;
      for (const auto& [f, w] : frequencies_of(idx[l], m)) {
        for (const auto& p : partial) {
          Mode q = p;
          q.freq.push_back(f);
          q.coeff *= w;
          next.push_back(std::move(q));
        }
      }
      partial = std::move(next);
    }
    for (auto& p : partial) {
      for (std::size_t l = 0; l < dim; ++l) max_freq_[l] = std::max(max_freq_[l], std::abs(p.freq[l]));
      modes_.push_back(std::move(p));
    }
  }
}

double FourierSeries::evaluate(std::span<const double> x, double t, double diffusion) const {
  const auto dim = static_cast<std::size_t>(grid_.dim);
  // per-axis tables exp(i m x_l) for m in [-max, max]
  std::vector<std::vector<std::complex<double>>> tables(dim);
  for (std::size_t l = 0; l < dim; ++l) {
    const int mm = max_freq_[l];
    auto& tab = tables[l];
    tab.assign(static_cast<std::size_t>(2 * mm + 1), {1.0, 0.0});
    const std::complex<double> step(std::cos(x[l]), std::sin(x[l]));
    std::complex<double> acc(1.0, 0.0);
    for (int f = 1; f <= mm; ++f) {
      acc *= step;
      // re-anchor periodically to bound recurrence drift
      if (f % 64 == 0) acc = std::polar(1.0, f * x[l]);
      tab[static_cast<std::size_t>(mm + f)] = acc;
      tab[static_cast<std::size_t>(mm - f)] = std::conj(acc);
    }
  }
  double sum = 0.0;
  for (const auto& mode : modes_) {
    std::complex<double> term = mode.coeff;
    int norm_sq = 0;
    for (std::size_t l = 0; l < dim; ++l) {
      term *= tables[l][static_cast<std::size_t>(max_freq_[l] + mode.freq[l])];
      norm_sq += mode.freq[l] * mode.freq[l];
    }
    double re = term.real();
    if (t > 0.0 && diffusion != 0.0 && norm_sq != 0) re *= std::exp(-diffusion * norm_sq * t);
    sum += re;
  }
  return sum;
}

std::vector<double> FourierSeries::sample_on_grid(double t, double diffusion) const {
  std::vector<double> out(grid_.size());
  std::vector<double> x(static_cast<std::size_t>(grid_.dim));
  for (std::size_t i = 0; i < out.size(); ++i) {
    grid_.coordinates(i, x);
    out[i] = evaluate(x, t, diffusion);
  }
  return out;
}

double FourierSeries::top_third_energy_fraction() const {
  double total = 0.0;
  double top = 0.0;
  const int limit = grid_.points_per_axis / 3;
  for (const auto& mode : modes_) {
    const double e = std::norm(mode.coeff);
    total += e;
    bool high = false;
    for (int f : mode.freq) high = high || std::abs(f) > limit;
    if (high) top += e;
  }
  return total > 0.0 ? top / total : 0.0;
}

}  // namespace tkm
