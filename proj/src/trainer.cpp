#include "mlpsens/trainer.hpp"

#include "mlpsens/activation.hpp"
#include "mlpsens/error.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/rng.hpp"

#include <cmath>

namespace mlpsens {

namespace {

void check_batch(const NetworkSpec& network, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets, Loss loss) {
  require_valid(network);
  if (inputs.rows() < 1 || inputs.rows() != targets.rows()) {
    throw DimensionError("inputs and targets need the same, non-zero row count");
  }
  if (inputs.cols() != network.input_width()) {
    throw DimensionError("inputs have " + std::to_string(inputs.cols()) +
                         " columns, network expects " +
                         std::to_string(network.input_width()));
  }
  if (targets.cols() != network.output_width()) {
    throw DimensionError("targets have " + std::to_string(targets.cols()) +
                         " columns, network has " +
                         std::to_string(network.output_width()) + " outputs");
  }
  if (loss == Loss::cross_entropy) {
    if (network.layers.back().activation.kind != Activation::softmax) {
      throw ValidationError("cross_entropy loss requires a softmax output layer");
    }
    for (Index r = 0; r < targets.rows(); ++r) {
      int ones = 0;
      for (Index c = 0; c < targets.cols(); ++c) {
        const double t = targets(r, c);
        if (t == 1.0) {
          ++ones;
        } else if (t != 0.0) {
          ones = -1;
          break;
        }
      }
      if (ones != 1) {
        throw ValidationError("cross_entropy targets must be one-hot (row " +
                              std::to_string(r + 1) + ")");
      }
    }
  }
}

double decay_penalty(const NetworkSpec& network, double l2_decay) {
  if (l2_decay == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& layer : network.layers) {
    sum += layer.weights.bottomRows(layer.fan_in()).squaredNorm();
  }
  return l2_decay * sum;
}

Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    const double lse = m + std::log((z.row(r).array() - m).exp().sum());
    out.row(r) = z.row(r).array() - lse;
  }
  return out;
}

double data_loss(const ForwardTrace& trace, const Eigen::MatrixXd& targets,
                 Loss loss) {
  const auto n = static_cast<double>(targets.rows());
  if (loss == Loss::mse) {
    return (trace.output() - targets).squaredNorm() /
           (n * static_cast<double>(targets.cols()));
  }
  return -(targets.array() * log_softmax_rows(trace.pre_activations.back()).array())
              .sum() /
         n;
}

}  // namespace

Loss parse_loss(std::string_view name) {
  if (name == "mse") return Loss::mse;
  if (name == "cross_entropy" || name == "cross-entropy") return Loss::cross_entropy;
  throw ValidationError("unknown loss \"" + std::string(name) +
                        "\" (expected mse or cross_entropy)");
}

std::string_view to_string(Loss loss) noexcept {
  return loss == Loss::mse ? "mse" : "cross_entropy";
}

void require_valid(const TrainConfig& config) {
  if (config.max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
  if (!std::isfinite(config.learning_rate) || config.learning_rate <= 0.0) {
    throw ValidationError("learning_rate must be finite and > 0");
  }
  if (!std::isfinite(config.init_scale) || config.init_scale <= 0.0) {
    throw ValidationError("init_scale must be finite and > 0");
  }
  if (!std::isfinite(config.l2_decay) || config.l2_decay < 0.0) {
    throw ValidationError("l2_decay must be finite and >= 0");
  }
}

NetworkSpec init_weights(std::span<const Index> structure,
                         std::span<const ActivationKind> activations,
                         std::uint64_t seed, double init_scale,
                         std::vector<std::string> input_names,
                         std::vector<std::string> output_names) {
  const std::vector<double> zeros(weight_count(structure), 0.0);
  NetworkSpec spec = network_from_flat(structure, zeros, activations,
                                       std::move(input_names),
                                       std::move(output_names));
  Rng rng(seed, RngPurpose::weight_init);
  for (auto& layer : spec.layers) {
    const double bound =
        init_scale / std::sqrt(static_cast<double>(layer.fan_in()));
    for (Index k = 0; k < layer.weights.size(); ++k) {
      layer.weights.data()[k] = rng.uniform(-bound, bound);
    }
  }
  return spec;
}

double loss_value(const NetworkSpec& network, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, Loss loss, double l2_decay) {
  check_batch(network, inputs, targets, loss);
  return data_loss(forward(network, inputs), targets, loss) +
         decay_penalty(network, l2_decay);
}

LossGradient loss_gradient(const NetworkSpec& network,
                           const Eigen::MatrixXd& inputs,
                           const Eigen::MatrixXd& targets, Loss loss,
                           double l2_decay) {
  check_batch(network, inputs, targets, loss);
  const ForwardTrace trace = forward(network, inputs);
  const auto n = static_cast<double>(inputs.rows());
  const std::size_t layers = network.layers.size();

  LossGradient grad;
  grad.loss = data_loss(trace, targets, loss) + decay_penalty(network, l2_decay);
  grad.weights.resize(layers);

  // Gradient with respect to the current layer's pre-activations.
  Eigen::MatrixXd g_z;
  if (loss == Loss::cross_entropy) {
    g_z = (trace.output() - targets) / n;
  } else {
    const Eigen::MatrixXd g_y =
        2.0 * (trace.output() - targets) /
        (n * static_cast<double>(targets.cols()));
    const auto& act = network.layers.back().activation;
    if (is_elementwise(act.kind)) {
      g_z = g_y.cwiseProduct(derivative_rows(act, trace.pre_activations.back()));
    } else {
      const Eigen::MatrixXd& y = trace.output();
      const Eigen::VectorXd dot = (g_y.cwiseProduct(y)).rowwise().sum();
      g_z = y.cwiseProduct(g_y - dot.replicate(1, y.cols()));
    }
  }

  for (std::size_t l = layers; l-- > 0;) {
    const LayerSpec& layer = network.layers[l];
    const Eigen::MatrixXd& prev = trace.activations[l];
    Eigen::MatrixXd& g_w = grad.weights[l];
    g_w.resize(layer.weights.rows(), layer.weights.cols());
    g_w.row(0) = g_z.colwise().sum();
    g_w.bottomRows(layer.fan_in()) = prev.transpose() * g_z;
    if (l2_decay != 0.0) {
      g_w.bottomRows(layer.fan_in()) +=
          2.0 * l2_decay * layer.weights.bottomRows(layer.fan_in());
    }
    if (l == 0) break;
    const Eigen::MatrixXd g_y =
        g_z * layer.weights.bottomRows(layer.fan_in()).transpose();
    // Only the output layer may be softmax.
    g_z = g_y.cwiseProduct(derivative_rows(network.layers[l - 1].activation,
                                           trace.pre_activations[l]));
  }
  return grad;
}

TrainResult train(const NetworkSpec& network, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, const TrainConfig& config) {
  require_valid(config);
  check_batch(network, inputs, targets, config.loss);
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw ValidationError("training data contains non-finite values");
  }

  TrainResult result{network, {}};
  NetworkSpec& net = result.network;
  std::vector<Eigen::MatrixXd> velocity;
  for (const auto& layer : net.layers) {
    velocity.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(),
                                             layer.weights.cols()));
  }

  auto& report = result.report;
  report.loss_history.reserve(static_cast<std::size_t>(config.max_epochs));
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const LossGradient g =
        loss_gradient(net, inputs, targets, config.loss, config.l2_decay);
    if (!std::isfinite(g.loss)) {
      throw DivergenceError(epoch, "training diverged at epoch " +
                                       std::to_string(epoch) +
                                       " (non-finite loss)");
    }
    report.loss_history.push_back(g.loss);
    report.epochs_run = epoch;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      velocity[l] = kMomentum * velocity[l] - config.learning_rate * g.weights[l];
      net.layers[l].weights += velocity[l];
    }
  }

  bool finite = true;
  for (const auto& layer : net.layers) finite = finite && layer.weights.allFinite();
  report.final_loss =
      finite ? loss_value(net, inputs, targets, config.loss, config.l2_decay)
             : std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(report.final_loss)) {
    throw DivergenceError(report.epochs_run,
                          "training diverged after epoch " +
                              std::to_string(report.epochs_run) +
                              " (non-finite loss)");
  }
  return result;
}

Eigen::MatrixXd network_inputs(const NetworkSpec& network,
                               const Eigen::MatrixXd& raw) {
  if (!network.input_standardization) return raw;
  return network.input_standardization->apply(raw);
}

TrainResult train(const NetworkSpec& network, const Dataset& data,
                  const TrainConfig& config) {
  require_valid(data);
  return train(network, network_inputs(network, data.inputs()), data.outputs(),
               config);
}

}  // namespace mlpsens
