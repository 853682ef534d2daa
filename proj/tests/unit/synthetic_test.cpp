#include "mlpsens/dataset.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/rng.hpp"
#include "mlpsens/synthetic.hpp"
#include "mlpsens/trainer.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace mlpsens;

namespace {

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

std::vector<double> column(const Dataset& d, const std::string& name) {
  const Index c = *d.column_index(name);
  return {d.values.col(c).data(), d.values.col(c).data() + d.rows()};
}

}  // namespace

TEST(Rng, DeterministicStreams) {
  Rng a(5), b(5), c(5, RngPurpose::data);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(Rng(5).next(), c.next());
  Rng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(10, RngPurpose::noise);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal();
    s += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Simdata, ShapeAndRoles) {
  const Dataset d = generate_simdata();
  EXPECT_EQ(d.rows(), 1500);
  EXPECT_EQ(d.values.cols(), 4);
  EXPECT_EQ(d.input_names(), (std::vector<std::string>{"X1", "X2", "X3"}));
  EXPECT_EQ(d.output_names(), std::vector<std::string>{"Y"});
}

TEST(Simdata, InputMeansNearZero) {
  for (std::uint64_t seed : {1u, 150u, 9999u}) {
    const Dataset d = generate_simdata(1500, seed);
    for (Index c = 0; c < 3; ++c) EXPECT_NEAR(sample_mean(d.values.col(c)), 0.0, 0.1);
  }
}

TEST(Simdata, RegressionRecoversX2Coefficient) {
  const Dataset d = generate_simdata(1500, 150);
  const Index n = d.rows();
  Eigen::MatrixXd a(n, 4);
  a.col(0).setOnes();
  a.col(1) = d.values.col(0).array().square();
  a.col(2) = d.values.col(1);
  a.col(3) = d.values.col(2);
  const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(d.values.col(3));
  EXPECT_NEAR(beta(2), -0.5, 0.02);
  EXPECT_NEAR(beta(1), 1.0, 0.02);
  EXPECT_NEAR(beta(3), 0.0, 0.02);
  const Eigen::VectorXd resid = d.values.col(3) - a * beta;
  EXPECT_NEAR(sample_sd(resid), 0.1, 0.01);
}

TEST(Simdata, SeedBehaviour) {
  EXPECT_EQ(generate_simdata(1500, 3).values, generate_simdata(1500, 3).values);
  const Dataset a = generate_simdata(1500, 3), b = generate_simdata(1500, 4);
  EXPECT_NE(a.values, b.values);
  EXPECT_LT(ks_distance(column(a, "Y"), column(b, "Y")), 0.1);
}

TEST(Seasonal, ShapeAndTimestamps) {
  const Dataset d = generate_seasonal_demand(730, 150);
  EXPECT_EQ(d.rows(), 730);
  ASSERT_TRUE(d.timestamp);
  EXPECT_TRUE(d.timestamp->calendar);
  EXPECT_EQ(d.timestamp->values.size(), 730u);
  for (std::size_t i = 1; i < 730; ++i)
    EXPECT_DOUBLE_EQ(d.timestamp->values[i] - d.timestamp->values[i - 1], 86400.0);
  EXPECT_EQ(d.input_names(), (std::vector<std::string>{"TEMP", "WD"}));
  EXPECT_EQ(d.output_names(), std::vector<std::string>{"DEM"});
  const auto wd = column(d, "WD");
  EXPECT_GE(*std::min_element(wd.begin(), wd.end()), 0.4);
  EXPECT_LE(*std::max_element(wd.begin(), wd.end()), 1.05);
}

TEST(Seasonal, TemperatureFollowsSeasons) {
  const Dataset d = generate_seasonal_demand(365, 150);
  const auto temp = column(d, "TEMP");
  // Day 0 is 2 July. Winter half: roughly October..March (days 100..280).
  const auto min_it = std::min_element(temp.begin(), temp.end());
  const auto max_it = std::max_element(temp.begin(), temp.end());
  const auto min_day = min_it - temp.begin();
  const auto max_day = max_it - temp.begin();
  EXPECT_TRUE(min_day >= 100 && min_day <= 280) << min_day;
  EXPECT_TRUE(max_day < 100 || max_day > 280) << max_day;
}

TEST(Seasonal, TrainedTemperatureSensitivityFlipsSign) {
  const Dataset d = generate_seasonal_demand(730, 150);
  const std::vector<Index> s{2, 8, 1};
  const std::vector<ActivationKind> a{ActivationKind::make(Activation::sigmoid),
                                      ActivationKind::make(Activation::linear)};
  NetworkSpec net = init_weights(s, a, 1, 1.0, d.input_names(), d.output_names());
  const Scaler sc = fit_scaler(d, d.input_columns);
  net.input_standardization = InputStandardization{sc.means, sc.sds};
  // Standardize the target too so the step size is scale free.
  Dataset z = d;
  const Scaler ys = fit_scaler(d, d.output_columns);
  z = apply_scaler(z, ys);
  TrainConfig c;
  c.max_epochs = 3000;
  c.learning_rate = 0.05;
  const TrainResult r = train(net, z, c);
  const SensitivityTensor t = raw_sensitivities(r.network, d.inputs());

  std::vector<std::size_t> order(730);
  for (std::size_t i = 0; i < 730; ++i) order[i] = i;
  const auto temp = column(d, "TEMP");
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return temp[x] < temp[y]; });
  double cold = 0, hot = 0;
  for (std::size_t i = 0; i < 73; ++i) {
    cold += t(static_cast<Index>(order[i]), 0, 0);
    hot += t(static_cast<Index>(order[729 - i]), 0, 0);
  }
  EXPECT_LT(cold, 0.0);
  EXPECT_GT(hot, 0.0);

  int crossings = 0;
  for (Index n = 1; n < 730; ++n) crossings += (t(n, 0, 0) > 0) != (t(n - 1, 0, 0) > 0);
  EXPECT_GE(crossings, 2);
}
