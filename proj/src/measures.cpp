#include "mlpsens/measures.hpp"

#include "mlpsens/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mlpsens {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SensitivityMeasure measure(std::string input, const Eigen::VectorXd& s) {
  SensitivityMeasure m;
  m.input = std::move(input);
  const auto n = static_cast<double>(s.size());
  if (s.hasNaN()) {
    m.mean = m.sd = m.mean_sq = kNaN;
    m.has_nan = true;
    return m;
  }
  m.mean = s.sum() / n;
  m.mean_sq = s.squaredNorm() / n;
  m.sd = s.size() < 2
             ? 0.0
             : std::sqrt((s.array() - m.mean).square().sum() / (n - 1.0));
  return m;
}

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "mean") return Metric::mean;
  if (name == "sd" || name == "std") return Metric::sd;
  if (name == "mean_sq" || name == "meanSensSQ") return Metric::mean_sq;
  throw ValidationError("unknown metric \"" + std::string(name) +
                        "\" (expected mean, sd or mean_sq)");
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::mean:
      return "mean";
    case Metric::sd:
      return "sd";
    case Metric::mean_sq:
      return "mean_sq";
  }
  return "unknown";
}

double SensitivityMeasure::metric(Metric m) const noexcept {
  switch (m) {
    case Metric::mean:
      return mean;
    case Metric::sd:
      return sd;
    case Metric::mean_sq:
      return mean_sq;
  }
  return kNaN;
}

bool SensitivitySummary::has_nan() const noexcept {
  for (const auto& o : outputs) {
    for (const auto& r : o.rows) {
      if (r.has_nan) return true;
    }
  }
  return false;
}

const OutputMeasures& SensitivitySummary::output(std::string_view name) const {
  for (const auto& o : outputs) {
    if (o.output == name) return o;
  }
  throw ValidationError("summary has no output \"" + std::string(name) + "\"");
}

SensitivitySummary summarize(const SensitivityTensor& tensor) {
  SensitivitySummary summary;
  summary.input_names = tensor.input_names();
  summary.sample_count = tensor.samples();
  summary.degenerate_sample = tensor.samples() < 2;
  for (Index k = 0; k < tensor.outputs(); ++k) {
    OutputMeasures out;
    out.output = tensor.output_names()[k];
    for (Index i = 0; i < tensor.inputs(); ++i) {
      out.rows.push_back(measure(tensor.input_names()[i], tensor.series(i, k)));
    }
    summary.outputs.push_back(std::move(out));
  }
  return summary;
}

SensitivitySummary combine(SensitivitySummary summary) {
  if (summary.outputs.empty()) {
    throw ValidationError("cannot combine a summary without outputs");
  }
  const std::size_t n_in = summary.input_names.size();
  for (const auto& o : summary.outputs) {
    if (o.rows.size() != n_in) {
      throw ValidationError("output \"" + o.output + "\" has " +
                            std::to_string(o.rows.size()) + " rows, expected " +
                            std::to_string(n_in));
    }
    for (std::size_t i = 0; i < n_in; ++i) {
      if (o.rows[i].input != summary.input_names[i]) {
        throw ValidationError("output \"" + o.output + "\" is missing input \"" +
                              summary.input_names[i] + "\"");
      }
    }
  }

  summary.combined.clear();
  if (summary.outputs.size() == 1) {
    // The formulas reduce to the per-output row; copy to keep it bit-exact.
    summary.combined = summary.outputs.front().rows;
    return summary;
  }
  const auto n_out = static_cast<double>(summary.outputs.size());
  for (std::size_t i = 0; i < n_in; ++i) {
    SensitivityMeasure c;
    c.input = summary.input_names[i];
    double sum_avg = 0.0;
    double sum_root_sq = 0.0;
    for (const auto& o : summary.outputs) {
      sum_avg += o.rows[i].mean;
      sum_root_sq += std::sqrt(o.rows[i].mean_sq);
      c.has_nan = c.has_nan || o.rows[i].has_nan;
    }
    c.mean = sum_avg / n_out;
    double spread = 0.0;
    for (const auto& o : summary.outputs) {
      const double dev = o.rows[i].mean - c.mean;
      spread += o.rows[i].sd * o.rows[i].sd + dev * dev;
    }
    c.sd = std::sqrt(spread / n_out);
    c.mean_sq = sum_root_sq * sum_root_sq / n_out;
    summary.combined.push_back(std::move(c));
  }
  return summary;
}

std::vector<std::string> rank_inputs(const SensitivitySummary& summary,
                                     Metric by, std::optional<Index> output) {
  if (summary.input_names.empty()) return {};

  std::vector<SensitivityMeasure> rows;
  if (output) {
    if (*output < 0 || *output >= static_cast<Index>(summary.outputs.size())) {
      throw ValidationError("output index " + std::to_string(*output) +
                            " out of range");
    }
    rows = summary.outputs[*output].rows;
  } else if (!summary.combined.empty()) {
    rows = summary.combined;
  } else if (summary.outputs.size() == 1) {
    rows = summary.outputs.front().rows;
  } else if (summary.outputs.empty()) {
    return {};
  } else {
    rows = combine(summary).combined;
  }

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const double v = std::abs(rows[i].metric(by));
    return std::isnan(v) ? -1.0 : v;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  std::vector<std::string> ranked;
  ranked.reserve(order.size());
  for (std::size_t i : order) ranked.push_back(rows[i].input);
  return ranked;
}

}  // namespace mlpsens
