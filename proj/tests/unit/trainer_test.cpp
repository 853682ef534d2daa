#include "mlpsens/error.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/trainer.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace mlpsens;

namespace {

ActivationKind act(Activation a) { return ActivationKind::make(a); }

struct Xy {
  Eigen::MatrixXd x, y;
};

Xy line_data(Index n = 100) {
  Xy d{Eigen::MatrixXd(n, 1), Eigen::MatrixXd(n, 1)};
  for (Index i = 0; i < n; ++i) {
    d.x(i, 0) = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    d.y(i, 0) = 2.0 * d.x(i, 0) + 1.0;
  }
  return d;
}

NetworkSpec linear_1_1(std::uint64_t seed) {
  const std::vector<Index> s{1, 1};
  const std::vector<ActivationKind> a{act(Activation::linear)};
  return init_weights(s, a, seed, 1.0);
}

// Relative-or-absolute agreement used by the gradient checks.
void expect_grad_close(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  EXPECT_LE(std::abs(analytic - numeric) / scale, 1e-4) << analytic << " vs " << numeric;
}

}  // namespace

TEST(Init, Deterministic) {
  const std::vector<Index> s{3, 10, 1};
  const std::vector<ActivationKind> a{act(Activation::sigmoid), act(Activation::linear)};
  const NetworkSpec n1 = init_weights(s, a, 99, 1.0);
  const NetworkSpec n2 = init_weights(s, a, 99, 1.0);
  EXPECT_EQ(flatten_weights(n1), flatten_weights(n2));
  EXPECT_NE(flatten_weights(n1), flatten_weights(init_weights(s, a, 100, 1.0)));
  EXPECT_EQ(flatten_weights(n1).size(), 51u);
}

TEST(Init, UniformFanInBounds) {
  const std::vector<Index> s{9, 16, 4};
  const std::vector<ActivationKind> a{act(Activation::tanh), act(Activation::linear)};
  const NetworkSpec net = init_weights(s, a, 5, 1.5);
  EXPECT_LE(net.layers[0].weights.cwiseAbs().maxCoeff(), 1.5 / 3.0);
  EXPECT_LE(net.layers[1].weights.cwiseAbs().maxCoeff(), 1.5 / 4.0);
  EXPECT_GT(net.layers[0].weights.cwiseAbs().maxCoeff(), 0.4);
}

TEST(Config, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(require_valid(c));
  c.learning_rate = 0;
  EXPECT_THROW(require_valid(c), ValidationError);
  c = {};
  c.max_epochs = 0;
  EXPECT_THROW(require_valid(c), ValidationError);
  c = {};
  c.l2_decay = -1;
  EXPECT_THROW(require_valid(c), ValidationError);
  c = {};
  c.init_scale = std::numeric_limits<double>::infinity();
  EXPECT_THROW(require_valid(c), ValidationError);
  EXPECT_EQ(parse_loss("cross-entropy"), Loss::cross_entropy);
  EXPECT_EQ(parse_loss("mse"), Loss::mse);
  EXPECT_THROW(parse_loss("hinge"), ValidationError);
}

TEST(Train, RecoversLine) {
  const Xy d = line_data();
  TrainConfig c;
  c.max_epochs = 500;
  c.learning_rate = 0.05;
  const TrainResult r = train(linear_1_1(1), d.x, d.y, c);
  EXPECT_LT(std::abs(r.network.layers[0].weights(1, 0) - 2.0), 0.01);
  EXPECT_LT(r.report.final_loss, 1e-4);
  EXPECT_EQ(r.report.epochs_run, 500);
  EXPECT_EQ(r.report.loss_history.size(), 500u);
}

TEST(Train, Xor) {
  Eigen::MatrixXd x(4, 2), y(4, 1);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  y << 0, 1, 1, 0;
  const std::vector<Index> s{2, 4, 1};
  const std::vector<ActivationKind> a{act(Activation::sigmoid), act(Activation::sigmoid)};
  TrainConfig c;
  c.max_epochs = 5000;
  c.learning_rate = 0.5;
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const NetworkSpec net = init_weights(s, a, seed, 4.0);
    solved += train(net, x, y, c).report.final_loss < 0.05;
  }
  EXPECT_GE(solved, 8);
}

TEST(Train, Diverges) {
  const Xy d = line_data();
  TrainConfig c;
  c.max_epochs = 1000;
  c.learning_rate = 1e3;
  try {
    train(linear_1_1(1), d.x, d.y, c);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.epoch(), 1);
    EXPECT_LE(e.epoch(), 1000);
  }
}

TEST(Train, Deterministic) {
  Rng rng(51);
  const Eigen::MatrixXd x = oracle::random_inputs(rng, 64, 3);
  const Eigen::MatrixXd y = x.rowwise().squaredNorm();
  const std::vector<Index> s{3, 6, 1};
  const std::vector<ActivationKind> a{act(Activation::tanh), act(Activation::linear)};
  TrainConfig c;
  c.max_epochs = 200;
  c.l2_decay = 1e-3;
  const NetworkSpec net = init_weights(s, a, 3, 1.0);
  const TrainResult r1 = train(net, x, y, c);
  const TrainResult r2 = train(net, x, y, c);
  EXPECT_EQ(flatten_weights(r1.network), flatten_weights(r2.network));
  EXPECT_EQ(r1.report.loss_history, r2.report.loss_history);
}

TEST(Train, MonotoneOnConvexProblem) {
  const Xy d = line_data();
  TrainConfig c;
  c.max_epochs = 300;
  c.learning_rate = 1e-3;
  const TrainResult r = train(linear_1_1(2), d.x, d.y, c);
  const auto& h = r.report.loss_history;
  for (std::size_t e = 2; e < h.size(); ++e) EXPECT_LE(h[e], h[e - 1] + 1e-12) << "epoch " << e;
  EXPECT_LT(r.report.final_loss, h.front());
}

TEST(Train, RejectsMismatchedTargets) {
  const Xy d = line_data();
  TrainConfig c;
  EXPECT_THROW(train(linear_1_1(1), d.x, Eigen::MatrixXd::Zero(100, 2), c), DimensionError);
  c.loss = Loss::cross_entropy;
  EXPECT_THROW(train(linear_1_1(1), d.x, d.y, c), ValidationError);
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(52);
  const double h = 1e-5;
  for (Loss loss : {Loss::mse, Loss::cross_entropy}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<Index> s{2, 3, 2};
      const std::vector<ActivationKind> a{
          act(oracle::smooth_kinds()[rng.next() % oracle::smooth_kinds().size()]),
          act(loss == Loss::mse ? Activation::sigmoid : Activation::softmax)};
      const NetworkSpec net = oracle::random_network(rng, s, a);
      const Eigen::MatrixXd x = oracle::random_inputs(rng, 8, 2);
      Eigen::MatrixXd t(8, 2);
      for (Index r = 0; r < 8; ++r) {
        if (loss == Loss::mse) {
          t(r, 0) = rng.uniform(-1, 1);
          t(r, 1) = rng.uniform(-1, 1);
        } else {
          const Index cls = static_cast<Index>(rng.next() % 2);
          t(r, cls) = 1.0;
          t(r, 1 - cls) = 0.0;
        }
      }
      const double decay = trial % 2 ? 0.01 : 0.0;
      const LossGradient g = loss_gradient(net, x, t, loss, decay);
      EXPECT_NEAR(g.loss, loss_value(net, x, t, loss, decay), 1e-14);
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (Index r = 0; r < net.layers[l].weights.rows(); ++r)
          for (Index c = 0; c < net.layers[l].weights.cols(); ++c) {
            NetworkSpec p = net, m = net;
            p.layers[l].weights(r, c) += h;
            m.layers[l].weights(r, c) -= h;
            const double fd =
                (loss_value(p, x, t, loss, decay) - loss_value(m, x, t, loss, decay)) / (2 * h);
            expect_grad_close(g.weights[l](r, c), fd);
          }
      }
    }
  }
}

TEST(Loss, Values) {
  const Xy d = line_data(3);
  const NetworkSpec net = network_from_flat(std::vector<Index>{1, 1}, std::vector<double>{0.0, 0.0},
                                            std::vector<ActivationKind>{act(Activation::linear)});
  // Targets -1, 1, 3 against predictions of 0.
  EXPECT_DOUBLE_EQ(loss_value(net, d.x, d.y, Loss::mse, 0.0), 11.0 / 3.0);
  // Decay applies to the slope but not the bias.
  NetworkSpec w = net;
  w.layers[0].weights(0, 0) = 5.0;
  w.layers[0].weights(1, 0) = 2.0;
  EXPECT_NEAR(loss_value(w, d.x, d.y, Loss::mse, 0.5) - loss_value(w, d.x, d.y, Loss::mse, 0.0), 2.0,
              1e-12);
}

TEST(Train, DatasetOverloadUsesStandardization) {
  Dataset data;
  data.column_names = {"A", "B"};
  data.values.resize(50, 2);
  for (Index i = 0; i < 50; ++i) {
    data.values(i, 0) = 100.0 + 10.0 * i;
    data.values(i, 1) = 0.01 * i;
  }
  data.input_columns = {0};
  data.output_columns = {1};
  NetworkSpec net = linear_1_1(4);
  net.input_standardization = InputStandardization{{345.0}, {144.3}};
  TrainConfig c;
  c.max_epochs = 400;
  c.learning_rate = 0.05;
  const TrainResult r = train(net, data, c);
  EXPECT_LT(r.report.final_loss, 1e-6);
  EXPECT_TRUE(r.network.input_standardization.has_value());
  const SensitivityTensor t = raw_sensitivities(r.network, data.inputs());
  EXPECT_NEAR(t(0, 0, 0), 0.001, 1e-5);
}
