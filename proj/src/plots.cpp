#include "mlpsens/plots.hpp"

#include "mlpsens/error.hpp"
#include "mlpsens/kde.hpp"
#include "mlpsens/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace mlpsens {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_output(const SensitivityTensor& tensor, Index output_index) {
  if (output_index < 0 || output_index >= tensor.outputs()) {
    throw ValidationError("output index " + std::to_string(output_index) +
                          " out of range");
  }
}

// Density of one input's sensitivities. Constant samples get a narrow
// fallback kernel so they show as a spike at the constant.
DensityCurve density_of(const Eigen::VectorXd& s, int grid_points) {
  std::vector<double> v(s.data(), s.data() + s.size());
  try {
    return kde(v, grid_points);
  } catch (const DegenerateError&) {
    double c = 0.0;
    for (double x : v) {
      if (std::isfinite(x)) c = x;
    }
    return kde(v, 1e-3 * std::max(1.0, std::abs(c)), grid_points);
  }
}

// Linear interpolation of the curve; x lies inside the grid by construction.
double interpolate(const DensityCurve& curve, double x) {
  const auto it = std::lower_bound(curve.x.begin(), curve.x.end(), x);
  if (it == curve.x.begin()) return curve.density.front();
  if (it == curve.x.end()) return curve.density.back();
  const auto hi = static_cast<std::size_t>(it - curve.x.begin());
  const double t = (x - curve.x[hi - 1]) / (curve.x[hi] - curve.x[hi - 1]);
  return curve.density[hi - 1] + t * (curve.density[hi] - curve.density[hi - 1]);
}

std::string output_title(const SensitivityTensor& tensor, Index k) {
  return tensor.output_names()[k];
}

}  // namespace

std::string_view to_string(PlotKind kind) noexcept {
  switch (kind) {
    case PlotKind::label_scatter:
      return "label_scatter";
    case PlotKind::importance_bar:
      return "importance_bar";
    case PlotKind::density:
      return "density";
    case PlotKind::time_series:
      return "time_series";
    case PlotKind::feature_violin:
      return "feature_violin";
  }
  return "unknown";
}

std::string_view to_string(SeriesStyle style) noexcept {
  switch (style) {
    case SeriesStyle::labeled_points:
      return "labeled_points";
    case SeriesStyle::bars:
      return "bars";
    case SeriesStyle::line:
      return "line";
    case SeriesStyle::outline:
      return "outline";
    case SeriesStyle::points:
      return "points";
  }
  return "unknown";
}

std::vector<std::string> PlotData::facets() const {
  std::vector<std::string> keys;
  for (const auto& s : series) {
    if (s.facet.empty()) continue;
    if (std::find(keys.begin(), keys.end(), s.facet) == keys.end()) {
      keys.push_back(s.facet);
    }
  }
  return keys;
}

bool PlotData::empty() const noexcept {
  return std::all_of(series.begin(), series.end(),
                     [](const PlotSeries& s) { return s.points.empty(); });
}

std::vector<std::string> validate_plot(const PlotData& plot) {
  std::vector<std::string> out;
  std::set<std::string> names;
  for (const auto& s : plot.series) {
    if (!names.insert(s.name).second) {
      out.push_back("duplicate series name \"" + s.name + "\"");
    }
    for (const auto& p : s.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y) ||
          (p.color && !std::isfinite(*p.color))) {
        out.push_back("series \"" + s.name + "\" has a non-finite coordinate");
        break;
      }
    }
  }
  return out;
}

std::string plot_to_json(const PlotData& plot) {
  ordered_json doc;
  doc["kind"] = to_string(plot.kind);
  doc["title"] = plot.title;
  doc["x_label"] = plot.x_label;
  doc["y_label"] = plot.y_label;
  doc["x_is_time"] = plot.x_is_time;
  if (!plot.x_categories.empty()) doc["x_categories"] = plot.x_categories;
  if (!plot.color_label.empty()) doc["color_label"] = plot.color_label;
  doc["series"] = ordered_json::array();
  for (const auto& s : plot.series) {
    ordered_json js;
    js["name"] = s.name;
    js["style"] = to_string(s.style);
    if (!s.facet.empty()) js["facet"] = s.facet;
    ordered_json pts = ordered_json::array();
    for (const auto& p : s.points) {
      ordered_json jp = {{"x", p.x}, {"y", p.y}};
      if (p.color) jp["color"] = *p.color;
      if (!p.label.empty()) jp["label"] = p.label;
      pts.push_back(jp);
    }
    js["points"] = pts;
    doc["series"].push_back(js);
  }
  if (!plot.notices.empty()) doc["notices"] = plot.notices;
  return doc.dump(2) + "\n";
}

SensitivityPlots sensitivity_plots(const SensitivitySummary& summary,
                                   const SensitivityTensor* tensor,
                                   Index output_index) {
  if (output_index < 0 ||
      output_index >= static_cast<Index>(summary.outputs.size())) {
    throw ValidationError("output index " + std::to_string(output_index) +
                          " out of range");
  }
  const OutputMeasures& out = summary.outputs[output_index];
  SensitivityPlots result;

  PlotData label;
  label.kind = PlotKind::label_scatter;
  label.title = "Sensitivity of " + out.output + ": mean vs sd";
  label.x_label = "mean";
  label.y_label = "sd";
  PlotSeries pts{"inputs", SeriesStyle::labeled_points, {}, {}};
  for (const auto& r : out.rows) {
    if (r.has_nan) continue;
    pts.points.push_back({r.mean, r.sd, std::nullopt, r.input});
  }
  label.series.push_back(std::move(pts));
  result.plots.push_back(std::move(label));

  PlotData bar;
  bar.kind = PlotKind::importance_bar;
  bar.title = "Sensitivity of " + out.output + ": mean square";
  bar.x_label = "input";
  bar.y_label = "mean square sensitivity";
  PlotSeries bars{"mean_sq", SeriesStyle::bars, {}, {}};
  std::vector<const SensitivityMeasure*> ordered;
  for (const auto& name : rank_inputs(summary, Metric::mean_sq, output_index)) {
    for (const auto& r : out.rows) {
      if (r.input == name && !r.has_nan) ordered.push_back(&r);
    }
  }
  for (const auto* r : ordered) {
    const auto x = static_cast<double>(bar.x_categories.size());
    bars.points.push_back({x, r->mean_sq, std::nullopt, r->input});
    bar.x_categories.push_back(r->input);
  }
  bar.series.push_back(std::move(bars));
  result.plots.push_back(std::move(bar));

  if (tensor == nullptr) {
    result.notices.emplace_back(
        "raw sensitivities not supplied: density plot omitted");
    return result;
  }
  check_output(*tensor, output_index);

  PlotData density;
  density.kind = PlotKind::density;
  density.title = "Sensitivity of " + out.output + ": distribution";
  density.x_label = "sensitivity";
  density.y_label = "density";
  for (Index i = 0; i < tensor->inputs(); ++i) {
    PlotSeries s{tensor->input_names()[i], SeriesStyle::line, {}, {}};
    const Eigen::VectorXd values = tensor->series(i, output_index);
    if (values.hasNaN()) {
      density.notices.push_back("input " + s.name +
                                " has NaN sensitivities; non-finite values skipped");
    }
    std::size_t finite = 0;
    for (Index r = 0; r < values.size(); ++r) finite += std::isfinite(values[r]);
    if (finite < 2) {
      density.notices.push_back("input " + s.name +
                                " has fewer than two finite sensitivities");
      continue;
    }
    const DensityCurve curve = density_of(values, kDefaultGridPoints);
    for (std::size_t g = 0; g < curve.x.size(); ++g) {
      s.points.push_back({curve.x[g], curve.density[g], std::nullopt, {}});
    }
    density.series.push_back(std::move(s));
  }
  result.plots.push_back(std::move(density));
  return result;
}

PlotData time_plot(const SensitivityTensor& tensor,
                   std::span<const double> timestamps, bool calendar_time,
                   bool facet, Index output_index) {
  check_output(tensor, output_index);
  if (static_cast<Index>(timestamps.size()) != tensor.samples()) {
    throw DimensionError("time plot has " + std::to_string(timestamps.size()) +
                         " timestamps for " + std::to_string(tensor.samples()) +
                         " samples");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i] >= timestamps[i - 1])) {
      throw ValidationError("timestamps must be non-decreasing (row " +
                            std::to_string(i + 1) + ")");
    }
  }

  PlotData plot;
  plot.kind = PlotKind::time_series;
  plot.title = "Sensitivity of " + output_title(tensor, output_index) + " over time";
  plot.x_label = "time";
  plot.y_label = "sensitivity";
  plot.x_is_time = calendar_time;
  for (Index i = 0; i < tensor.inputs(); ++i) {
    const std::string& name = tensor.input_names()[i];
    PlotSeries s{name, SeriesStyle::line, {}, facet ? name : std::string()};
    for (Index n = 0; n < tensor.samples(); ++n) {
      const double v = tensor(n, i, output_index);
      if (std::isfinite(v)) s.points.push_back({timestamps[n], v, std::nullopt, {}});
    }
    plot.series.push_back(std::move(s));
  }
  return plot;
}

PlotData feature_plot(const SensitivityTensor& tensor,
                      const Eigen::MatrixXd& input_values, Index output_index) {
  check_output(tensor, output_index);
  if (input_values.rows() != tensor.samples() ||
      input_values.cols() != tensor.inputs()) {
    throw DimensionError("feature plot needs a " + std::to_string(tensor.samples()) +
                         " x " + std::to_string(tensor.inputs()) +
                         " matrix of input values");
  }

  PlotData plot;
  plot.kind = PlotKind::feature_violin;
  plot.title = "Sensitivity of " + output_title(tensor, output_index) +
               " by input value";
  plot.x_label = "";
  plot.y_label = "sensitivity";
  plot.color_label = "input value";
  Rng jitter(kJitterSeed, RngPurpose::jitter);

  for (Index i = 0; i < tensor.inputs(); ++i) {
    const std::string& name = tensor.input_names()[i];
    const Eigen::VectorXd s = tensor.series(i, output_index);
    PlotSeries outline{name + " violin", SeriesStyle::outline, {}, name};
    PlotSeries points{name + " points", SeriesStyle::points, {}, name};

    std::size_t finite = 0;
    for (Index r = 0; r < s.size(); ++r) finite += std::isfinite(s[r]);
    if (finite == 0) {
      plot.notices.push_back("input " + name + " has no finite sensitivities");
      continue;
    }

    std::vector<double> v;
    for (Index r = 0; r < s.size(); ++r) {
      if (std::isfinite(s[r])) v.push_back(s[r]);
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const bool constant = *lo == *hi;

    DensityCurve curve;
    double peak = 0.0;
    if (constant) {
      constexpr double kSliver = 0.02;
      outline.points = {{-kSliver, *lo, std::nullopt, {}},
                        {kSliver, *lo, std::nullopt, {}},
                        {kSliver, *hi, std::nullopt, {}},
                        {-kSliver, *hi, std::nullopt, {}}};
    } else {
      curve = kde(v, kDefaultGridPoints);
      peak = *std::max_element(curve.density.begin(), curve.density.end());
      // Right half upwards, then left half downwards: a closed outline.
      for (std::size_t g = 0; g < curve.x.size(); ++g) {
        outline.points.push_back(
            {kViolinHalfWidth * curve.density[g] / peak, curve.x[g], std::nullopt, {}});
      }
      for (std::size_t g = curve.x.size(); g-- > 0;) {
        outline.points.push_back(
            {-kViolinHalfWidth * curve.density[g] / peak, curve.x[g], std::nullopt, {}});
      }
    }

    for (Index r = 0; r < s.size(); ++r) {
      const double u = jitter.uniform(-1.0, 1.0);
      if (!std::isfinite(s[r])) continue;
      const double half =
          constant ? 0.0
                   : kViolinHalfWidth * interpolate(curve, s[r]) / peak;
      points.points.push_back({u * half, s[r], input_values(r, i), {}});
    }
    plot.series.push_back(std::move(outline));
    plot.series.push_back(std::move(points));
  }
  return plot;
}

}  // namespace mlpsens
