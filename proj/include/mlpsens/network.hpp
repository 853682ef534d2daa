#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlpsens {

using Index = Eigen::Index;

enum class Activation {
  sigmoid,
  tanh,
  linear,
  relu,
  prelu,
  elu,
  step,
  arctan,
  softplus,
  softmax,
};

inline constexpr double kDefaultPreluSlope = 0.01;
inline constexpr double kDefaultEluScale = 1.0;

/// Activation function of a layer. `param` is the slope/scale `a` and is only
/// meaningful for prelu and elu.
struct ActivationKind {
  Activation kind = Activation::linear;
  double param = 0.0;

  /// Fills `param` with the kind's default when none is given.
  static ActivationKind make(Activation kind,
                             std::optional<double> param = std::nullopt);

  bool has_param() const noexcept {
    return kind == Activation::prelu || kind == Activation::elu;
  }
  friend bool operator==(const ActivationKind&, const ActivationKind&) = default;
};

std::string_view to_string(Activation kind) noexcept;
std::optional<Activation> parse_activation(std::string_view name) noexcept;

/// One weighted layer. Row 0 of `weights` holds the bias weights (the bias
/// input is fixed at 1.0); rows 1..fan_in hold the connection weights, so
/// column k is neuron k's incoming weight vector.
struct LayerSpec {
  Index width = 0;
  Eigen::MatrixXd weights;
  ActivationKind activation;

  Index fan_in() const noexcept { return weights.rows() - 1; }
  friend bool operator==(const LayerSpec& a, const LayerSpec& b) {
    return a.width == b.width && a.activation == b.activation &&
           a.weights.rows() == b.weights.rows() &&
           a.weights.cols() == b.weights.cols() && a.weights == b.weights;
  }
};

/// Per-input z-score transform applied before the first layer. Stored with a
/// model so that analysis sees the same input domain the model was fitted on.
struct InputStandardization {
  std::vector<double> means;
  std::vector<double> sds;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const;
  friend bool operator==(const InputStandardization&,
                         const InputStandardization&) = default;
};

/// Fully connected feed-forward network. The input layer is implicit
/// (identity activation, no weights); `layers` holds layers 2..L.
struct NetworkSpec {
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::vector<LayerSpec> layers;
  std::optional<InputStandardization> input_standardization;

  Index input_width() const noexcept {
    return static_cast<Index>(input_names.size());
  }
  Index output_width() const noexcept {
    return layers.empty() ? 0 : layers.back().width;
  }
  /// Widths n^1..n^L.
  std::vector<Index> structure() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Every invariant violation found in `spec`; empty means valid.
std::vector<std::string> validate_network(const NetworkSpec& spec);

/// Throws ValidationError listing all violations.
void require_valid(const NetworkSpec& spec);

/// Number of weights (bias included) for a width list.
std::size_t weight_count(std::span<const Index> structure);

/// Names "<prefix>1".."<prefix>n".
std::vector<std::string> default_names(std::string_view prefix, Index n);

/// Builds a network from a flat weight vector. Weights are consumed layer by
/// layer; within a layer, neuron by neuron (column-major), bias first.
NetworkSpec network_from_flat(std::span<const Index> structure,
                              std::span<const double> weights,
                              std::span<const ActivationKind> activations,
                              std::vector<std::string> input_names = {},
                              std::vector<std::string> output_names = {});

/// Inverse of network_from_flat.
std::vector<double> flatten_weights(const NetworkSpec& spec);

}  // namespace mlpsens
