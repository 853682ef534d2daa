#include "mlpsens/kde.hpp"

#include "mlpsens/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mlpsens {

namespace {

std::vector<double> finite_values(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) out.push_back(v);
  }
  if (out.size() < 2) {
    throw ValidationError("density estimation needs at least two finite values");
  }
  return out;
}

}  // namespace

double silverman_bandwidth(std::span<const double> values) {
  const std::vector<double> v = finite_values(values);
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) {
    throw DegenerateError("density estimation of identical values");
  }
  return 1.06 * sd * std::pow(n, -0.2);
}

double kde_density(std::span<const double> values, double bandwidth, double x) {
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth);
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    const double u = (x - v) / bandwidth;
    sum += std::exp(-0.5 * u * u);
    ++n;
  }
  return n == 0 ? 0.0 : norm * sum / static_cast<double>(n);
}

DensityCurve kde(std::span<const double> values, int grid_points) {
  return kde(values, silverman_bandwidth(values), grid_points);
}

DensityCurve kde(std::span<const double> values, double bandwidth,
                 int grid_points) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ValidationError("bandwidth must be finite and > 0");
  }
  if (grid_points < 2) throw ValidationError("grid_points must be >= 2");
  std::vector<double> v = finite_values(values);
  std::sort(v.begin(), v.end());

  DensityCurve curve;
  curve.bandwidth = bandwidth;
  const double lo = v.front() - 3.0 * bandwidth;
  const double hi = v.back() + 3.0 * bandwidth;
  const double step = (hi - lo) / (grid_points - 1);
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth *
                             static_cast<double>(v.size()));
  // Kernels further than 8h away contribute below 1e-14 relative and are skipped.
  const double reach = 8.0 * bandwidth;
  curve.x.resize(grid_points);
  curve.density.resize(grid_points);
  for (int g = 0; g < grid_points; ++g) {
    const double x = g + 1 == grid_points ? hi : lo + g * step;
    const auto first = std::lower_bound(v.begin(), v.end(), x - reach);
    const auto last = std::upper_bound(first, v.end(), x + reach);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) {
      const double u = (x - *it) / bandwidth;
      sum += std::exp(-0.5 * u * u);
    }
    curve.x[g] = x;
    curve.density[g] = norm * sum;
  }
  return curve;
}

double trapezoid(const DensityCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.x.size(); ++i) {
    area += 0.5 * (curve.density[i] + curve.density[i - 1]) *
            (curve.x[i] - curve.x[i - 1]);
  }
  return area;
}

}  // namespace mlpsens
