#include "mlpsens/jacobian.hpp"

#include "mlpsens/activation.hpp"
#include "mlpsens/error.hpp"

#include <algorithm>
#include <thread>

namespace mlpsens {

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_inputs(const NetworkSpec& network, const Eigen::MatrixXd& inputs) {
  require_valid(network);
  if (inputs.rows() < 1) {
    throw DimensionError("input batch has no rows");
  }
  if (inputs.cols() != network.input_width()) {
    throw DimensionError("input batch has " + std::to_string(inputs.cols()) +
                         " columns, network expects " +
                         std::to_string(network.input_width()));
  }
}

ForwardTrace forward_unchecked(const NetworkSpec& network,
                               const Eigen::MatrixXd& inputs) {
  ForwardTrace trace;
  trace.pre_activations.reserve(network.layers.size() + 1);
  trace.activations.reserve(network.layers.size() + 1);
  trace.pre_activations.push_back(inputs);
  trace.activations.push_back(inputs);
  for (const auto& layer : network.layers) {
    const Eigen::MatrixXd& prev = trace.activations.back();
    Eigen::MatrixXd z = prev * layer.weights.bottomRows(layer.fan_in());
    z.rowwise() += layer.weights.row(0);
    trace.activations.push_back(eval_rows(layer.activation, z));
    trace.pre_activations.push_back(std::move(z));
  }
  return trace;
}

// Fills tensor rows [first, first + count).
void accumulate_block(const NetworkSpec& network, const Eigen::MatrixXd& inputs,
                      Index first, Index count, SensitivityTensor& out) {
  const Index n_in = network.input_width();
  const ForwardTrace trace =
      forward_unchecked(network, inputs.middleRows(first, count));

  // Row block b of `d` is sample b's n_in x width Jacobian so far.
  RowMatrix d = RowMatrix::Zero(count * n_in, n_in);
  for (Index b = 0; b < count; ++b) {
    d.block(b * n_in, 0, n_in, n_in).setIdentity();
  }
  for (std::size_t l = 0; l < network.layers.size(); ++l) {
    const LayerSpec& layer = network.layers[l];
    RowMatrix next = d * reduced_weight_matrix(layer);
    const Eigen::MatrixXd& z = trace.pre_activations[l + 1];
    if (is_elementwise(layer.activation.kind)) {
      const Eigen::MatrixXd deriv = derivative_rows(layer.activation, z);
      for (Index b = 0; b < count; ++b) {
        next.middleRows(b * n_in, n_in).array().rowwise() *=
            deriv.row(b).array();
      }
    } else {
      const Eigen::MatrixXd& y = trace.activations[l + 1];
      for (Index b = 0; b < count; ++b) {
        const Eigen::MatrixXd jac = softmax_jacobian(y.row(b).transpose());
        next.middleRows(b * n_in, n_in) =
            (next.middleRows(b * n_in, n_in) * jac).eval();
      }
    }
    d = std::move(next);
  }

  const Index n_out = network.output_width();
  double* dst = out.data().data() + first * n_in * n_out;
  std::copy(d.data(), d.data() + d.size(), dst);
}

}  // namespace

ForwardTrace forward(const NetworkSpec& network, const Eigen::MatrixXd& inputs) {
  check_inputs(network, inputs);
  return forward_unchecked(network, inputs);
}

Eigen::MatrixXd predict(const NetworkSpec& network,
                        const Eigen::MatrixXd& inputs) {
  return forward(network, inputs).output();
}

Eigen::MatrixXd reduced_weight_matrix(const LayerSpec& layer) {
  return layer.weights.bottomRows(layer.fan_in());
}

SensitivityTensor::SensitivityTensor(Index samples,
                                     std::vector<std::string> input_names,
                                     std::vector<std::string> output_names)
    : samples_(samples),
      input_names_(std::move(input_names)),
      output_names_(std::move(output_names)),
      values_(static_cast<std::size_t>(samples * inputs() * outputs()), 0.0) {}

Eigen::MatrixXd SensitivityTensor::slice(Index sample) const {
  Eigen::MatrixXd m(inputs(), outputs());
  for (Index i = 0; i < inputs(); ++i) {
    for (Index k = 0; k < outputs(); ++k) m(i, k) = (*this)(sample, i, k);
  }
  return m;
}

Eigen::VectorXd SensitivityTensor::series(Index input, Index output) const {
  Eigen::VectorXd v(samples_);
  for (Index s = 0; s < samples_; ++s) v[s] = (*this)(s, input, output);
  return v;
}

SensitivityTensor sensitivities(const NetworkSpec& network,
                                const Eigen::MatrixXd& inputs,
                                const SensitivityOptions& options) {
  check_inputs(network, inputs);
  const Index n = inputs.rows();
  const Index block = std::max<Index>(1, options.block_size);
  const Index blocks = (n + block - 1) / block;
  SensitivityTensor tensor(n, network.input_names, network.output_names);

  auto run = [&](Index b) {
    const Index first = b * block;
    accumulate_block(network, inputs, first, std::min(block, n - first), tensor);
  };

  const unsigned workers = std::clamp<unsigned>(
      options.threads, 1u, static_cast<unsigned>(std::min<Index>(blocks, 64)));
  if (workers == 1) {
    for (Index b = 0; b < blocks; ++b) run(b);
    return tensor;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index b = w; b < blocks; b += workers) run(b);
    });
  }
  for (auto& t : pool) t.join();
  return tensor;
}

SensitivityTensor raw_sensitivities(const NetworkSpec& network,
                                    const Eigen::MatrixXd& raw_inputs,
                                    const SensitivityOptions& options) {
  if (!network.input_standardization) {
    return sensitivities(network, raw_inputs, options);
  }
  check_inputs(network, raw_inputs);
  const auto& st = *network.input_standardization;
  SensitivityTensor tensor =
      sensitivities(network, st.apply(raw_inputs), options);
  for (Index s = 0; s < tensor.samples(); ++s) {
    for (Index i = 0; i < tensor.inputs(); ++i) {
      const double scale = 1.0 / st.sds[static_cast<std::size_t>(i)];
      for (Index k = 0; k < tensor.outputs(); ++k) tensor(s, i, k) *= scale;
    }
  }
  return tensor;
}

Eigen::MatrixXd jacobian_at(const NetworkSpec& network,
                            const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::MatrixXd row = x.transpose();
  return sensitivities(network, row).slice(0);
}

}  // namespace mlpsens
