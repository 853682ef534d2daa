#pragma once

#include "mlpsens/jacobian.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlpsens {

enum class Metric { mean, sd, mean_sq };

/// Throws ValidationError for names other than mean, sd/std, mean_sq/meanSensSQ.
Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric) noexcept;

/// Mean, sample standard deviation and mean square of one input's
/// sensitivities. `has_nan` marks rows whose samples contained NaN; their
/// measures are NaN as well.
struct SensitivityMeasure {
  std::string input;
  double mean = 0.0;
  double sd = 0.0;
  double mean_sq = 0.0;
  bool has_nan = false;

  double metric(Metric m) const noexcept;
};

struct OutputMeasures {
  std::string output;
  std::vector<SensitivityMeasure> rows;  // one per input, declaration order
};

struct SensitivitySummary {
  std::vector<std::string> input_names;
  std::vector<OutputMeasures> outputs;
  /// Whole-model rows; empty until combine() runs.
  std::vector<SensitivityMeasure> combined;
  Index sample_count = 0;
  /// Set when sample_count < 2, in which case every sd is reported as 0.
  bool degenerate_sample = false;

  bool has_nan() const noexcept;
  const OutputMeasures& output(std::string_view name) const;
};

SensitivitySummary summarize(const SensitivityTensor& tensor);

/// Fills `combined` from the per-output rows:
///   avg = mean_k avg_k
///   sd  = sqrt(mean_k (sd_k^2 + (avg_k - avg)^2))
///   sq  = (sum_k sqrt(sq_k))^2 / n_out
SensitivitySummary combine(SensitivitySummary summary);

/// Input names by descending |metric|; ties keep declaration order. Uses the
/// given output's rows, else the combined rows, else the only output, else
/// combines on the fly.
std::vector<std::string> rank_inputs(const SensitivitySummary& summary,
                                     Metric by = Metric::mean_sq,
                                     std::optional<Index> output = std::nullopt);

}  // namespace mlpsens
