#pragma once

#include "mlpsens/dataset.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/measures.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mlpsens {

enum class PlotKind { label_scatter, importance_bar, density, time_series, feature_violin };
enum class SeriesStyle { labeled_points, bars, line, outline, points };

std::string_view to_string(PlotKind kind) noexcept;
std::string_view to_string(SeriesStyle style) noexcept;

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> color;  // scalar mapped onto the colour ramp
  std::string label;
};

struct PlotSeries {
  std::string name;
  SeriesStyle style = SeriesStyle::line;
  std::vector<PlotPoint> points;
  std::string facet;  // empty: main panel
};

/// Renderer-independent description of one figure.
struct PlotData {
  PlotKind kind = PlotKind::label_scatter;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// Tick labels placed at x = 0, 1, ... (bar and violin plots).
  std::vector<std::string> x_categories;
  /// x values are seconds since the Unix epoch.
  bool x_is_time = false;
  std::string color_label;
  std::vector<std::string> notices;

  /// Facet keys in first-appearance order; empty when not faceted.
  std::vector<std::string> facets() const;
  bool empty() const noexcept;
};

/// Non-finite coordinates and duplicate series names.
std::vector<std::string> validate_plot(const PlotData& plot);

/// JSON sidecar for external plotting tools.
std::string plot_to_json(const PlotData& plot);

inline constexpr double kViolinHalfWidth = 0.4;
inline constexpr std::uint64_t kJitterSeed = 0x5eed;

struct SensitivityPlots {
  std::vector<PlotData> plots;  // label, bar and (with a tensor) density
  std::vector<std::string> notices;
};

/// The mean/sd label plot, the mean-square bar plot and, when `tensor` is
/// given, the overlaid density of each input's sensitivities, for one output.
SensitivityPlots sensitivity_plots(const SensitivitySummary& summary,
                                   const SensitivityTensor* tensor,
                                   Index output_index = 0);

/// Sensitivity against time, one line per input; faceted per input or
/// overlaid. Timestamps must be non-decreasing.
PlotData time_plot(const SensitivityTensor& tensor,
                   std::span<const double> timestamps, bool calendar_time,
                   bool facet, Index output_index = 0);

/// One facet per input: a mirrored-KDE violin of the sensitivities plus
/// jittered points coloured by the input's value at each sample. Point jitter
/// half-width is 0.4 * local density / peak density (panel width 1).
/// `input_values` is N x n^1 in the same column order as the tensor.
PlotData feature_plot(const SensitivityTensor& tensor,
                      const Eigen::MatrixXd& input_values,
                      Index output_index = 0);

}  // namespace mlpsens
