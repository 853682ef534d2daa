#include "mlpsens/svg.hpp"

#include "mlpsens/error.hpp"
#include "mlpsens/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mlpsens {

namespace {

constexpr std::array<const char*, 8> kPalette{
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a",
    "#66a61e", "#e6ab02", "#a6761d", "#666666"};
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 16.0;
constexpr double kTitleHeight = 36.0;
constexpr double kStripHeight = 20.0;
constexpr double kAxisHeight = 40.0;
constexpr double kLegendWidth = 150.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_text(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad(double fraction) {
    if (!valid()) {
      lo = 0.0;
      hi = 1.0;
      return;
    }
    double span = hi - lo;
    if (span <= 0.0) span = std::max(1.0, std::abs(lo)) * 0.1;
    lo -= span * fraction;
    hi += span * fraction;
  }
};

// Round-number ticks (1, 2, 5 x 10^k) covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    if (ticks.size() > 50) break;
  }
  return ticks;
}

struct Panel {
  std::string facet;
  std::vector<std::size_t> series;
  double top = 0.0;
  double height = 0.0;
};

class Renderer {
 public:
  Renderer(const PlotData& plot, double width, double height)
      : plot_(plot), width_(width), height_(height) {}

  std::string run() {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
         << num(width_) << "\" height=\"" << num(height_) << "\" viewBox=\"0 0 "
         << num(width_) << " " << num(height_) << "\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\""
         << num(height_) << "\" fill=\"#ffffff\"/>\n";
    text(width_ / 2, 22, plot_.title, "title", "middle", 15);

    if (plot_.empty()) {
      text(width_ / 2, height_ / 2, "empty", "placeholder", "middle", 14);
      out_ << "</svg>\n";
      return out_.str();
    }

    const bool legend = has_legend();
    plot_right_ = width_ - kMarginRight - (legend ? kLegendWidth : 0.0);
    layout_panels();
    for (const auto& p : panels_) draw_panel(p);
    if (legend) draw_legend();
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  void text(double x, double y, std::string_view s, std::string_view cls,
            std::string_view anchor, double size, double rotate = 0.0) {
    out_ << "<text class=\"" << cls << "\" x=\"" << num(x) << "\" y=\"" << num(y)
         << "\" font-family=\"sans-serif\" font-size=\"" << num(size)
         << "\" text-anchor=\"" << anchor << "\"";
    if (rotate != 0.0) {
      out_ << " transform=\"rotate(" << num(rotate) << " " << num(x) << " "
           << num(y) << ")\"";
    }
    out_ << ">" << escape(s) << "</text>\n";
  }

  const char* color_of(std::size_t series_index) const {
    // Series sharing a name prefix (violin + points) share a colour.
    return kPalette[series_index % kPalette.size()];
  }

  bool has_legend() const {
    if (plot_.kind == PlotKind::feature_violin) return true;
    std::size_t named = 0;
    for (const auto& s : plot_.series) {
      named += s.style == SeriesStyle::line || s.style == SeriesStyle::outline;
    }
    return named > 1 || (named == 1 && plot_.facets().empty());
  }

  void layout_panels() {
    const auto keys = plot_.facets();
    if (keys.empty()) {
      Panel p;
      for (std::size_t i = 0; i < plot_.series.size(); ++i) p.series.push_back(i);
      panels_.push_back(std::move(p));
    } else {
      for (const auto& key : keys) {
        Panel p;
        p.facet = key;
        for (std::size_t i = 0; i < plot_.series.size(); ++i) {
          if (plot_.series[i].facet == key) p.series.push_back(i);
        }
        panels_.push_back(std::move(p));
      }
    }
    const double avail = height_ - kTitleHeight;
    const double each = avail / static_cast<double>(panels_.size());
    for (std::size_t i = 0; i < panels_.size(); ++i) {
      panels_[i].top = kTitleHeight + each * static_cast<double>(i);
      panels_[i].height = each;
    }
  }

  void draw_panel(const Panel& panel) {
    const bool strip = !panel.facet.empty();
    const double top = panel.top + (strip ? kStripHeight : 4.0);
    const double bottom = panel.top + panel.height - kAxisHeight;
    const double left = kMarginLeft;
    const double right = plot_right_;
    if (bottom - top < 10.0) return;

    Range xr;
    Range yr;
    for (std::size_t i : panel.series) {
      for (const auto& p : plot_.series[i].points) {
        xr.add(p.x);
        yr.add(p.y);
      }
    }
    const bool categorical = !plot_.x_categories.empty();
    if (plot_.kind == PlotKind::importance_bar || plot_.kind == PlotKind::density) {
      yr.add(0.0);
    }
    if (plot_.kind == PlotKind::feature_violin) {
      xr = Range{-0.5, 0.5};
    } else if (categorical) {
      xr = Range{-0.6, static_cast<double>(plot_.x_categories.size()) - 0.4};
    } else {
      xr.pad(0.04);
    }
    yr.pad(0.06);
    if (plot_.kind == PlotKind::importance_bar || plot_.kind == PlotKind::density) {
      yr.lo = std::max(yr.lo, 0.0);
    }

    auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * (right - left); };
    auto sy = [&](double y) { return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - top); };

    if (strip) {
      out_ << "<rect class=\"strip\" x=\"" << num(left) << "\" y=\""
           << num(panel.top + 2) << "\" width=\"" << num(right - left)
           << "\" height=\"" << num(kStripHeight - 4) << "\" fill=\"#e5e5e5\"/>\n";
      text((left + right) / 2, panel.top + kStripHeight - 6, panel.facet, "facet",
           "middle", 11);
    }
    out_ << "<rect class=\"panel\" x=\"" << num(left) << "\" y=\"" << num(top)
         << "\" width=\"" << num(right - left) << "\" height=\"" << num(bottom - top)
         << "\" fill=\"#fafafa\" stroke=\"#999999\" stroke-width=\"0.8\"/>\n";

    // y axis
    for (double t : nice_ticks(yr.lo, yr.hi, 5)) {
      const double y = sy(t);
      out_ << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\""
           << num(right) << "\" y2=\"" << num(y)
           << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
      text(left - 6, y + 4, tick_text(t), "tick", "end", 10);
    }
    // x axis
    if (categorical || plot_.kind == PlotKind::feature_violin) {
      const auto labels = plot_.kind == PlotKind::feature_violin
                              ? std::vector<std::string>{panel.facet}
                              : plot_.x_categories;
      for (std::size_t c = 0; c < labels.size(); ++c) {
        const double x = sx(static_cast<double>(c));
        text(x, bottom + 15, labels[c], "tick", "middle", 10);
      }
    } else if (plot_.x_is_time) {
      const double day = 86400.0;
      for (double t : nice_ticks(xr.lo / day, xr.hi / day, 6)) {
        const double x = sx(t * day);
        out_ << "<line x1=\"" << num(x) << "\" y1=\"" << num(top) << "\" x2=\""
             << num(x) << "\" y2=\"" << num(bottom)
             << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
        text(x, bottom + 15, format_iso8601(std::round(t) * day), "tick", "middle", 10);
      }
    } else {
      for (double t : nice_ticks(xr.lo, xr.hi, 6)) {
        const double x = sx(t);
        out_ << "<line x1=\"" << num(x) << "\" y1=\"" << num(top) << "\" x2=\""
             << num(x) << "\" y2=\"" << num(bottom)
             << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
        text(x, bottom + 15, tick_text(t), "tick", "middle", 10);
      }
    }
    if (yr.lo < 0.0 && yr.hi > 0.0) {
      out_ << "<line class=\"zero\" x1=\"" << num(left) << "\" y1=\"" << num(sy(0))
           << "\" x2=\"" << num(right) << "\" y2=\"" << num(sy(0))
           << "\" stroke=\"#888888\" stroke-width=\"0.8\"/>\n";
    }
    text((left + right) / 2, bottom + 32, plot_.x_label, "axis-label", "middle", 11);
    text(16, (top + bottom) / 2, plot_.y_label, "axis-label", "middle", 11, -90);

    for (std::size_t i : panel.series) draw_series(i, sx, sy);
  }

  template <typename SX, typename SY>
  void draw_series(std::size_t index, const SX& sx, const SY& sy) {
    const PlotSeries& s = plot_.series[index];
    const char* color = color_of(plot_.kind == PlotKind::feature_violin ? index / 2 : index);
    out_ << "<g class=\"series\" data-name=\"" << escape(s.name) << "\">\n";
    switch (s.style) {
      case SeriesStyle::line:
      case SeriesStyle::outline: {
        out_ << (s.style == SeriesStyle::line ? "<polyline" : "<polygon")
             << " points=\"";
        for (std::size_t k = 0; k < s.points.size(); ++k) {
          out_ << (k ? " " : "") << num(sx(s.points[k].x)) << ","
               << num(sy(s.points[k].y));
        }
        if (s.style == SeriesStyle::line) {
          out_ << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.4\"/>\n";
        } else {
          out_ << "\" fill=\"" << color << "\" fill-opacity=\"0.25\" stroke=\""
               << color << "\" stroke-width=\"1\"/>\n";
        }
        break;
      }
      case SeriesStyle::bars: {
        const double zero = sy(0.0);
        for (const auto& p : s.points) {
          const double x0 = sx(p.x - 0.4);
          const double x1 = sx(p.x + 0.4);
          const double y = sy(p.y);
          out_ << "<rect x=\"" << num(x0) << "\" y=\"" << num(std::min(y, zero))
               << "\" width=\"" << num(x1 - x0) << "\" height=\""
               << num(std::abs(zero - y)) << "\" fill=\"" << color << "\"/>\n";
        }
        break;
      }
      case SeriesStyle::labeled_points:
        for (const auto& p : s.points) {
          out_ << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y))
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
          text(sx(p.x) + 5, sy(p.y) - 5, p.label, "point-label", "start", 12);
        }
        break;
      case SeriesStyle::points: {
        Range cr;
        for (const auto& p : s.points) {
          if (p.color) cr.add(*p.color);
        }
        for (const auto& p : s.points) {
          out_ << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y))
               << "\" r=\"1.6\" fill=\""
               << (p.color ? ramp(*p.color, cr) : std::string(color)) << "\"/>\n";
        }
        break;
      }
    }
    out_ << "</g>\n";
  }

  static std::string ramp(double v, const Range& r) {
    const double t = r.hi > r.lo ? (v - r.lo) / (r.hi - r.lo) : 0.5;
    // Blue (low) to red (high).
    const auto mix = [t](int a, int b) {
      return static_cast<int>(std::lround(a + (b - a) * t));
    };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(0x2c, 0xd7), mix(0x7b, 0x19),
                  mix(0xb6, 0x1c));
    return buf;
  }

  void draw_legend() {
    const double x = plot_right_ + 16;
    double y = kTitleHeight + 16;
    out_ << "<g class=\"legend\">\n";
    if (plot_.kind == PlotKind::feature_violin) {
      text(x, y, plot_.color_label.empty() ? "value" : plot_.color_label, "legend",
           "start", 11);
      const Range unit{0.0, 1.0};
      for (int k = 0; k <= 4; ++k) {
        y += 16;
        out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" "
             << "height=\"10\" fill=\"" << ramp(k / 4.0, unit) << "\"/>\n";
        text(x + 18, y, k == 0 ? "low" : (k == 4 ? "high" : ""), "legend", "start", 10);
      }
      out_ << "</g>\n";
      return;
    }
    for (std::size_t i = 0; i < plot_.series.size(); ++i) {
      const auto& s = plot_.series[i];
      if (s.style != SeriesStyle::line && s.style != SeriesStyle::outline) continue;
      out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9)
           << "\" width=\"12\" height=\"10\" fill=\"" << color_of(i) << "\"/>\n";
      text(x + 18, y, s.name, "legend", "start", 11);
      y += 18;
    }
    out_ << "</g>\n";
  }

  const PlotData& plot_;
  double width_;
  double height_;
  double plot_right_ = 0.0;
  std::vector<Panel> panels_;
  std::ostringstream out_;
};

}  // namespace

std::string render_svg(const PlotData& plot, double width_px, double height_px) {
  if (!std::isfinite(width_px) || !std::isfinite(height_px) || width_px < 100.0 ||
      height_px < 100.0) {
    throw ValidationError("SVG dimensions must be finite and at least 100 px");
  }
  const auto problems = validate_plot(plot);
  if (!problems.empty()) throw ValidationError("invalid plot data: " + problems.front());
  return Renderer(plot, width_px, height_px).run();
}

}  // namespace mlpsens
