#include "mlpsens/error.hpp"
#include "mlpsens/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace mlpsens {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const json& member(const json& obj, const std::string& key,
                   const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + key, "missing field");
  return *it;
}

const json& array_at(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite number");
  return v;
}

std::vector<std::string> names_at(const json& j, const std::string& path) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < array_at(j, path).size(); ++i) {
    const auto& e = j[i];
    if (!e.is_string()) fail(path + "[" + std::to_string(i) + "]", "expected a string");
    names.push_back(e.get<std::string>());
  }
  return names;
}

std::vector<double> numbers_at(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array_at(j, path).size(); ++i) {
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ActivationKind activation_at(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto& kind = member(j, "kind", path + ".");
  if (!kind.is_string()) fail(path + ".kind", "expected a string");
  const auto parsed = parse_activation(kind.get<std::string>());
  if (!parsed) {
    fail(path + ".kind", "unknown activation \"" + kind.get<std::string>() + "\"");
  }
  std::optional<double> param;
  if (const auto it = j.find("param"); it != j.end()) {
    param = number_at(*it, path + ".param");
  }
  return ActivationKind::make(*parsed, param);
}

}  // namespace

std::string save_model(const NetworkSpec& spec) {
  require_valid(spec);
  ordered_json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["input_names"] = spec.input_names;
  doc["output_names"] = spec.output_names;
  ordered_json structure = ordered_json::array();
  for (Index w : spec.structure()) structure.push_back(w);
  doc["structure"] = structure;

  ordered_json activations = ordered_json::array();
  ordered_json weights = ordered_json::array();
  for (const auto& layer : spec.layers) {
    ordered_json act;
    act["kind"] = to_string(layer.activation.kind);
    if (layer.activation.has_param()) act["param"] = layer.activation.param;
    activations.push_back(act);

    ordered_json rows = ordered_json::array();
    for (Index r = 0; r < layer.weights.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (Index c = 0; c < layer.weights.cols(); ++c) {
        row.push_back(layer.weights(r, c));
      }
      rows.push_back(row);
    }
    weights.push_back(rows);
  }
  doc["activations"] = activations;
  doc["weights"] = weights;
  if (spec.input_standardization) {
    doc["input_standardization"] = {
        {"means", spec.input_standardization->means},
        {"sds", spec.input_standardization->sds}};
  }
  return doc.dump(2) + "\n";
}

NetworkSpec load_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    fail("$", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");

  const auto& version = member(doc, "schema_version", "");
  if (!version.is_string()) fail("schema_version", "expected a string");
  if (version.get<std::string>() != kModelSchemaVersion) {
    fail("schema_version",
         "unsupported version \"" + version.get<std::string>() + "\"");
  }

  NetworkSpec spec;
  spec.input_names = names_at(member(doc, "input_names", ""), "input_names");
  spec.output_names = names_at(member(doc, "output_names", ""), "output_names");

  const auto& structure_j = array_at(member(doc, "structure", ""), "structure");
  std::vector<Index> structure;
  for (std::size_t i = 0; i < structure_j.size(); ++i) {
    const auto& w = structure_j[i];
    if (!w.is_number_integer() || w.get<long long>() < 1) {
      fail("structure[" + std::to_string(i) + "]", "expected a positive integer");
    }
    structure.push_back(static_cast<Index>(w.get<long long>()));
  }
  if (structure.size() < 2) fail("structure", "needs at least two layers");
  if (static_cast<Index>(spec.input_names.size()) != structure.front()) {
    fail("input_names", "length differs from structure[0]");
  }

  const auto& acts = array_at(member(doc, "activations", ""), "activations");
  const auto& weights = array_at(member(doc, "weights", ""), "weights");
  if (acts.size() != structure.size() - 1) {
    fail("activations", "expected " + std::to_string(structure.size() - 1) +
                            " entries, got " + std::to_string(acts.size()));
  }
  if (weights.size() != structure.size() - 1) {
    fail("weights", "expected " + std::to_string(structure.size() - 1) +
                        " layers, got " + std::to_string(weights.size()));
  }

  for (std::size_t l = 1; l < structure.size(); ++l) {
    const std::string lpath = "weights[" + std::to_string(l - 1) + "]";
    const auto& rows = array_at(weights[l - 1], lpath);
    const Index expect_rows = structure[l - 1] + 1;
    if (static_cast<Index>(rows.size()) != expect_rows) {
      fail(lpath, "expected " + std::to_string(expect_rows) +
                      " rows (bias row first), got " + std::to_string(rows.size()));
    }
    LayerSpec layer;
    layer.width = structure[l];
    layer.activation =
        activation_at(acts[l - 1], "activations[" + std::to_string(l - 1) + "]");
    layer.weights.resize(expect_rows, structure[l]);
    for (Index r = 0; r < expect_rows; ++r) {
      const std::string rpath = lpath + "[" + std::to_string(r) + "]";
      const auto& row = array_at(rows[r], rpath);
      if (static_cast<Index>(row.size()) != structure[l]) {
        fail(rpath, "expected " + std::to_string(structure[l]) +
                        " entries, got " + std::to_string(row.size()));
      }
      for (Index c = 0; c < structure[l]; ++c) {
        layer.weights(r, c) =
            number_at(row[c], rpath + "[" + std::to_string(c) + "]");
      }
    }
    spec.layers.push_back(std::move(layer));
  }

  if (const auto it = doc.find("input_standardization"); it != doc.end()) {
    if (!it->is_object()) fail("input_standardization", "expected an object");
    InputStandardization s;
    s.means = numbers_at(member(*it, "means", "input_standardization."),
                         "input_standardization.means");
    s.sds = numbers_at(member(*it, "sds", "input_standardization."),
                       "input_standardization.sds");
    spec.input_standardization = std::move(s);
  }

  const auto violations = validate_network(spec);
  if (!violations.empty()) {
    std::ostringstream msg;
    for (const auto& v : violations) msg << "\n  " << v;
    fail("$", "model violates network invariants:" + msg.str());
  }
  return spec;
}

}  // namespace mlpsens
