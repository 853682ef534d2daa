#pragma once

#include <span>
#include <vector>

namespace mlpsens {

inline constexpr int kDefaultGridPoints = 512;

struct DensityCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// 1.06 * sample sd * N^(-1/5).
double silverman_bandwidth(std::span<const double> values);

/// Gaussian KDE evaluated at a single point.
double kde_density(std::span<const double> values, double bandwidth, double x);

/// Gaussian KDE with Silverman's bandwidth on `grid_points` evenly spaced
/// points spanning [min - 3h, max + 3h]. Non-finite values are ignored.
/// Throws ValidationError with fewer than two finite values and
/// DegenerateError when they are all identical.
DensityCurve kde(std::span<const double> values,
                 int grid_points = kDefaultGridPoints);

/// Same, with an explicit bandwidth.
DensityCurve kde(std::span<const double> values, double bandwidth,
                 int grid_points);

/// Trapezoid-rule integral of the curve.
double trapezoid(const DensityCurve& curve);

}  // namespace mlpsens
