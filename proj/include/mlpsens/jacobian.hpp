#pragma once

#include "mlpsens/network.hpp"

#include <string>
#include <vector>

namespace mlpsens {

/// Per-layer pre-activations and activations for a batch. Index 0 is the
/// input layer, where both equal the inputs.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> pre_activations;
  std::vector<Eigen::MatrixXd> activations;

  const Eigen::MatrixXd& output() const { return activations.back(); }
};

ForwardTrace forward(const NetworkSpec& network, const Eigen::MatrixXd& inputs);

/// Network outputs only.
Eigen::MatrixXd predict(const NetworkSpec& network, const Eigen::MatrixXd& inputs);

/// Weight matrix without the bias row: entry (i, k) is the weight from
/// neuron i of the previous layer to neuron k.
Eigen::MatrixXd reduced_weight_matrix(const LayerSpec& layer);

/// Raw sensitivities dy_k/dx_i for every sample, stored sample-major as
/// [sample][input][output].
class SensitivityTensor {
 public:
  SensitivityTensor() = default;
  SensitivityTensor(Index samples, std::vector<std::string> input_names,
                    std::vector<std::string> output_names);

  Index samples() const noexcept { return samples_; }
  Index inputs() const noexcept { return static_cast<Index>(input_names_.size()); }
  Index outputs() const noexcept { return static_cast<Index>(output_names_.size()); }
  const std::vector<std::string>& input_names() const noexcept { return input_names_; }
  const std::vector<std::string>& output_names() const noexcept { return output_names_; }

  double operator()(Index sample, Index input, Index output) const {
    return values_[offset(sample, input, output)];
  }
  double& operator()(Index sample, Index input, Index output) {
    return values_[offset(sample, input, output)];
  }

  /// n^1 x n^L Jacobian of one sample.
  Eigen::MatrixXd slice(Index sample) const;
  /// All samples' sensitivities of output `output` to input `input`.
  Eigen::VectorXd series(Index input, Index output) const;

  const std::vector<double>& data() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }

 private:
  std::size_t offset(Index s, Index i, Index k) const {
    return static_cast<std::size_t>((s * inputs() + i) * outputs() + k);
  }

  Index samples_ = 0;
  std::vector<std::string> input_names_;
  std::vector<std::string> output_names_;
  std::vector<double> values_;
};

struct SensitivityOptions {
  Index block_size = 256;
  unsigned threads = 1;
};

/// Analytic input-output Jacobian of every sample, accumulated layer by layer
/// as D <- D * W*^l * J^l starting from the identity.
SensitivityTensor sensitivities(const NetworkSpec& network,
                                const Eigen::MatrixXd& inputs,
                                const SensitivityOptions& options = {});

/// Sensitivities of the deployed model with respect to raw input values.
/// Applies the network's input standardization (if any) and scales by the
/// chain-rule factor 1 / sd; identical to `sensitivities` otherwise.
SensitivityTensor raw_sensitivities(const NetworkSpec& network,
                                    const Eigen::MatrixXd& raw_inputs,
                                    const SensitivityOptions& options = {});

/// Single-sample Jacobian, n^1 x n^L.
Eigen::MatrixXd jacobian_at(const NetworkSpec& network,
                            const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace mlpsens
