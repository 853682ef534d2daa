#pragma once

#include "mlpsens/dataset.hpp"
#include "mlpsens/network.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mlpsens {

enum class Loss { mse, cross_entropy };

Loss parse_loss(std::string_view name);
std::string_view to_string(Loss loss) noexcept;

inline constexpr double kMomentum = 0.9;

struct TrainConfig {
  int max_epochs = 1000;
  double learning_rate = 0.01;
  /// Coefficient of the sum of squared connection weights added to the loss.
  /// Bias weights are not decayed.
  double l2_decay = 0.0;
  Loss loss = Loss::mse;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
};

void require_valid(const TrainConfig& config);

struct TrainReport {
  std::vector<double> loss_history;  // loss at the start of each epoch
  double final_loss = 0.0;           // loss of the returned network
  int epochs_run = 0;
};

struct TrainResult {
  NetworkSpec network;
  TrainReport report;
};

/// Weights drawn uniformly from [-s, s] with s = init_scale / sqrt(fan_in),
/// using the weight_init stream of `seed`.
NetworkSpec init_weights(std::span<const Index> structure,
                         std::span<const ActivationKind> activations,
                         std::uint64_t seed, double init_scale,
                         std::vector<std::string> input_names = {},
                         std::vector<std::string> output_names = {});

/// Mean squared error over all N x n_out entries, or mean categorical
/// cross-entropy (softmax output only), plus the decay penalty.
double loss_value(const NetworkSpec& network, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, Loss loss, double l2_decay);

struct LossGradient {
  double loss = 0.0;
  /// Same shape as each layer's weight matrix, bias row first.
  std::vector<Eigen::MatrixXd> weights;
};

/// Backpropagated gradient of loss_value with respect to every weight.
LossGradient loss_gradient(const NetworkSpec& network,
                           const Eigen::MatrixXd& inputs,
                           const Eigen::MatrixXd& targets, Loss loss,
                           double l2_decay);

/// Full-batch gradient descent with momentum. `inputs` are in the network's
/// own domain (already standardized when the network standardizes).
TrainResult train(const NetworkSpec& network, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, const TrainConfig& config);

/// Trains on a dataset's input/output columns, applying the network's input
/// standardization when it has one.
TrainResult train(const NetworkSpec& network, const Dataset& data,
                  const TrainConfig& config);

/// Raw inputs mapped into the network's domain.
Eigen::MatrixXd network_inputs(const NetworkSpec& network,
                               const Eigen::MatrixXd& raw);

}  // namespace mlpsens
