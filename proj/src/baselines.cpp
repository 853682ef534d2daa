#include "mlpsens/baselines.hpp"

#include "mlpsens/error.hpp"
#include "mlpsens/jacobian.hpp"

#include <cmath>

namespace mlpsens {

namespace {

void check_structure(const NetworkSpec& network, Index output_index) {
  require_valid(network);
  if (network.layers.size() != 2) {
    throw UnsupportedStructureError(
        "connection-weight importance needs exactly one hidden layer, network "
        "has " +
        std::to_string(network.layers.size() - 1));
  }
  if (output_index < 0 || output_index >= network.output_width()) {
    throw ValidationError("output index " + std::to_string(output_index) +
                          " out of range");
  }
}

}  // namespace

std::string_view to_string(ImportanceMethod method) noexcept {
  return method == ImportanceMethod::garson ? "garson" : "olden";
}

ImportanceTable garson(const NetworkSpec& network, Index output_index) {
  check_structure(network, output_index);
  const Eigen::MatrixXd in_w =
      reduced_weight_matrix(network.layers[0]).cwiseAbs();  // inputs x hidden
  const Eigen::VectorXd out_w =
      reduced_weight_matrix(network.layers[1]).col(output_index).cwiseAbs();

  Eigen::VectorXd importance = Eigen::VectorXd::Zero(in_w.rows());
  for (Index h = 0; h < in_w.cols(); ++h) {
    const double fan = in_w.col(h).sum();
    if (fan == 0.0) continue;
    importance += in_w.col(h) / fan * out_w[h];
  }
  const double total = importance.sum();
  if (!(total > 0.0)) {
    throw DegenerateError(
        "garson importance is undefined: every input-to-output weight path is "
        "zero");
  }
  importance /= total;

  ImportanceTable table{ImportanceMethod::garson,
                        network.output_names[output_index], {}};
  for (Index i = 0; i < importance.size(); ++i) {
    table.rows.push_back({network.input_names[i], importance[i]});
  }
  return table;
}

ImportanceTable olden(const NetworkSpec& network, Index output_index) {
  check_structure(network, output_index);
  const Eigen::VectorXd importance =
      reduced_weight_matrix(network.layers[0]) *
      reduced_weight_matrix(network.layers[1]).col(output_index);
  ImportanceTable table{ImportanceMethod::olden,
                        network.output_names[output_index], {}};
  for (Index i = 0; i < importance.size(); ++i) {
    table.rows.push_back({network.input_names[i], importance[i]});
  }
  return table;
}

}  // namespace mlpsens
