#pragma once

#include "mlpsens/network.hpp"

#include <string>
#include <vector>

namespace mlpsens {

// Connection-weight importance baselines. Both are only defined for networks
// with exactly one hidden layer and throw UnsupportedStructureError otherwise.
// Bias weights are ignored.

enum class ImportanceMethod { garson, olden };

struct ImportanceEntry {
  std::string input;
  double value = 0.0;
};

struct ImportanceTable {
  ImportanceMethod method = ImportanceMethod::garson;
  std::string output;
  std::vector<ImportanceEntry> rows;
};

std::string_view to_string(ImportanceMethod method) noexcept;

/// Relative importance in [0, 1], summing to 1. Each hidden neuron's share of
/// |input weight| is weighted by |output weight| before normalizing.
ImportanceTable garson(const NetworkSpec& network, Index output_index);

/// Signed, unscaled sum over hidden neurons of input weight * output weight.
ImportanceTable olden(const NetworkSpec& network, Index output_index);

}  // namespace mlpsens
