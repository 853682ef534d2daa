#include "mlpsens/network.hpp"

#include "mlpsens/error.hpp"

#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace mlpsens {

namespace {

constexpr std::array<std::pair<Activation, std::string_view>, 10> kNames{{
    {Activation::sigmoid, "sigmoid"},
    {Activation::tanh, "tanh"},
    {Activation::linear, "linear"},
    {Activation::relu, "relu"},
    {Activation::prelu, "prelu"},
    {Activation::elu, "elu"},
    {Activation::step, "step"},
    {Activation::arctan, "arctan"},
    {Activation::softplus, "softplus"},
    {Activation::softmax, "softmax"},
}};

void check_names(const std::vector<std::string>& names, std::string_view what,
                 std::vector<std::string>& out) {
  std::set<std::string_view> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      out.push_back(std::string(what) + " contains duplicate name \"" + n +
                    "\"");
    }
  }
}

}  // namespace

ActivationKind ActivationKind::make(Activation kind,
                                    std::optional<double> param) {
  ActivationKind a{kind, 0.0};
  if (kind == Activation::prelu) a.param = param.value_or(kDefaultPreluSlope);
  if (kind == Activation::elu) a.param = param.value_or(kDefaultEluScale);
  return a;
}

std::string_view to_string(Activation kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<Activation> parse_activation(std::string_view name) noexcept {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

Eigen::MatrixXd InputStandardization::apply(const Eigen::MatrixXd& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != means.size()) {
    throw DimensionError("input standardization expects " +
                         std::to_string(means.size()) + " columns, got " +
                         std::to_string(raw.cols()));
  }
  Eigen::MatrixXd out(raw.rows(), raw.cols());
  for (Index c = 0; c < raw.cols(); ++c) {
    out.col(c) = (raw.col(c).array() - means[c]) / sds[c];
  }
  return out;
}

std::vector<Index> NetworkSpec::structure() const {
  std::vector<Index> s{input_width()};
  for (const auto& layer : layers) s.push_back(layer.width);
  return s;
}

std::vector<std::string> validate_network(const NetworkSpec& spec) {
  std::vector<std::string> out;
  if (spec.input_names.empty()) out.emplace_back("network has no inputs");
  if (spec.layers.empty()) {
    out.emplace_back("network needs at least one weighted layer (L >= 2)");
  }
  check_names(spec.input_names, "input_names", out);
  check_names(spec.output_names, "output_names", out);

  Index prev = spec.input_width();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& layer = spec.layers[i];
    const std::string where = "layer " + std::to_string(i + 2);
    if (layer.width < 1) out.push_back(where + ": width must be >= 1");
    if (layer.weights.cols() != layer.width) {
      out.push_back(where + ": weight matrix has " +
                    std::to_string(layer.weights.cols()) +
                    " columns but width is " + std::to_string(layer.width));
    }
    if (layer.weights.rows() != prev + 1) {
      out.push_back(where + ": weight matrix has " +
                    std::to_string(layer.weights.rows()) + " rows, expected " +
                    std::to_string(prev + 1) + " (" + std::to_string(prev) +
                    " inputs plus bias row)");
    }
    if (!layer.weights.allFinite()) {
      out.push_back(where + ": non-finite weight");
    }
    const auto& act = layer.activation;
    if (!std::isfinite(act.param)) {
      out.push_back(where + ": non-finite activation parameter");
    } else if (act.kind == Activation::elu && act.param <= 0.0) {
      out.push_back(where + ": elu parameter must be > 0");
    } else if (act.kind == Activation::prelu && act.param < 0.0) {
      out.push_back(where + ": prelu parameter must be >= 0");
    }
    if (act.kind == Activation::softmax && i + 1 != spec.layers.size()) {
      out.push_back(where + ": softmax is only allowed on the output layer");
    }
    prev = layer.width;
  }
  if (!spec.layers.empty() &&
      static_cast<Index>(spec.output_names.size()) != spec.output_width()) {
    out.push_back("output_names has " +
                  std::to_string(spec.output_names.size()) +
                  " entries but the output layer has width " +
                  std::to_string(spec.output_width()));
  }
  if (spec.input_standardization) {
    const auto& s = *spec.input_standardization;
    if (static_cast<Index>(s.means.size()) != spec.input_width() ||
        static_cast<Index>(s.sds.size()) != spec.input_width()) {
      out.emplace_back("input standardization length differs from input count");
    }
    for (double sd : s.sds) {
      if (!(sd > 0.0) || !std::isfinite(sd)) {
        out.emplace_back("input standardization has a non-positive sd");
        break;
      }
    }
  }
  return out;
}

void require_valid(const NetworkSpec& spec) {
  const auto violations = validate_network(spec);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid network:";
  for (const auto& v : violations) msg << "\n  " << v;
  throw ValidationError(msg.str());
}

std::size_t weight_count(std::span<const Index> structure) {
  std::size_t total = 0;
  for (std::size_t l = 1; l < structure.size(); ++l) {
    total += static_cast<std::size_t>((structure[l - 1] + 1) * structure[l]);
  }
  return total;
}

std::vector<std::string> default_names(std::string_view prefix, Index n) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n));
  for (Index i = 1; i <= n; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return names;
}

NetworkSpec network_from_flat(std::span<const Index> structure,
                              std::span<const double> weights,
                              std::span<const ActivationKind> activations,
                              std::vector<std::string> input_names,
                              std::vector<std::string> output_names) {
  if (structure.size() < 2) {
    throw ValidationError("structure needs at least two layers");
  }
  for (Index w : structure) {
    if (w < 1) throw ValidationError("every layer width must be >= 1");
  }
  if (activations.size() != structure.size() - 1) {
    throw DimensionError("expected " + std::to_string(structure.size() - 1) +
                         " activations, got " +
                         std::to_string(activations.size()));
  }
  const std::size_t expected = weight_count(structure);
  if (weights.size() != expected) {
    throw DimensionError("expected " + std::to_string(expected) +
                         " weights, got " + std::to_string(weights.size()));
  }

  NetworkSpec spec;
  spec.input_names = input_names.empty() ? default_names("X", structure.front())
                                         : std::move(input_names);
  spec.output_names = output_names.empty()
                          ? default_names("Y", structure.back())
                          : std::move(output_names);
  std::size_t offset = 0;
  for (std::size_t l = 1; l < structure.size(); ++l) {
    LayerSpec layer;
    layer.width = structure[l];
    layer.activation = activations[l - 1];
    layer.weights.resize(structure[l - 1] + 1, structure[l]);
    // Eigen's default storage is column-major, matching the flat order.
    for (Index k = 0; k < layer.weights.size(); ++k) {
      layer.weights.data()[k] = weights[offset++];
    }
    spec.layers.push_back(std::move(layer));
  }
  require_valid(spec);
  return spec;
}

std::vector<double> flatten_weights(const NetworkSpec& spec) {
  std::vector<double> flat;
  for (const auto& layer : spec.layers) {
    flat.insert(flat.end(), layer.weights.data(),
                layer.weights.data() + layer.weights.size());
  }
  return flat;
}

}  // namespace mlpsens
