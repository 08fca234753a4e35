#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "chebdea/error.hpp"
#include "chebdea/second_stage.hpp"

namespace chebdea {

namespace {

// Type-7 sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_kde_args(std::span<const double> sample, double bandwidth) {
  if (sample.empty()) throw DomainError("kernel density needs a nonempty sample");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw DomainError("kernel bandwidth must be positive and finite");
  }
}

double kernel_sum(std::span<const double> sample, double at, double bandwidth) {
  double sum = 0.0;
  for (double x : sample) {
    const double u = (at - x) / bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return sum * std::numbers::inv_sqrtpi / std::numbers::sqrt2 /
         (static_cast<double>(sample.size()) * bandwidth);
}

}  // namespace

double silverman_bandwidth(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("bandwidth of an empty sample");
  const std::size_t n = sample.size();
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());

  double sd = 0.0;
  if (n > 1) {
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) spread = std::abs(sorted.front());
  if (!(spread > 0.0)) spread = 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> gaussian_kde_serial(std::span<const double> sample,
                                        std::span<const double> grid, double bandwidth) {
  check_kde_args(sample, bandwidth);
  std::vector<double> density(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) density[g] = kernel_sum(sample, grid[g], bandwidth);
  return density;
}

std::vector<double> gaussian_kde(std::span<const double> sample, std::span<const double> grid,
                                 double bandwidth, int threads) {
  check_kde_args(sample, bandwidth);
  std::vector<double> density(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(team)
  for (std::ptrdiff_t g = 0; g < n; ++g) {
    density[static_cast<std::size_t>(g)] = kernel_sum(sample, grid[static_cast<std::size_t>(g)], bandwidth);
  }
  return density;
}

DensityCurve density_curve(std::span<const double> sample, const DensityOptions& options,
                           int threads) {
  if (sample.empty()) throw DomainError("kernel density needs a nonempty sample");
  DensityCurve curve;
  curve.bandwidth = options.bandwidth ? *options.bandwidth : silverman_bandwidth(sample);
  const auto [min_it, max_it] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *min_it - options.tail_bandwidths * curve.bandwidth;
  const double hi = *max_it + options.tail_bandwidths * curve.bandwidth;
  const double wanted = std::ceil((hi - lo) / (options.max_step_in_bandwidths * curve.bandwidth)) + 1.0;
  const auto points = static_cast<std::size_t>(
      std::clamp(wanted, static_cast<double>(options.min_points), static_cast<double>(options.max_points)));
  curve.grid.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    curve.grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  curve.density = gaussian_kde(sample, curve.grid, curve.bandwidth, threads);
  return curve;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("trapezoid: x and y differ in length");
  double area = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) area += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
  return area;
}

}  // namespace chebdea
