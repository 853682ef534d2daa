#include "mlpsens/baselines.hpp"
#include "mlpsens/cli.hpp"
#include "mlpsens/error.hpp"
#include "mlpsens/io.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/kde.hpp"
#include "mlpsens/measures.hpp"
#include "mlpsens/synthetic.hpp"
#include "mlpsens/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace mlpsens;

namespace {

ActivationKind activation_from(const std::string& text) {
  const auto colon = text.find(':');
  const auto kind = parse_activation(text.substr(0, colon));
  if (!kind) throw ValidationError("unknown activation \"" + text + "\"");
  std::optional<double> param;
  if (colon != std::string::npos) param = std::stod(text.substr(colon + 1));
  return ActivationKind::make(*kind, param);
}

std::vector<ActivationKind> activations_from(const std::vector<std::string>& names) {
  std::vector<ActivationKind> out;
  for (const auto& n : names) out.push_back(activation_from(n));
  return out;
}

std::string activation_name(const ActivationKind& a) {
  std::string s(to_string(a.kind));
  if (a.has_param()) s += ":" + format_number(a.param);
  return s;
}

py::array_t<double> tensor_array(const SensitivityTensor& t) {
  py::array_t<double> out({t.samples(), t.inputs(), t.outputs()});
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

SensitivityTensor tensor_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                              std::vector<std::string> inputs, std::vector<std::string> outputs) {
  if (a.ndim() != 3) throw DimensionError("sensitivity array must be 3-D");
  if (inputs.empty()) inputs = default_names("X", a.shape(1));
  if (outputs.empty()) outputs = default_names("Y", a.shape(2));
  if (static_cast<py::ssize_t>(inputs.size()) != a.shape(1) ||
      static_cast<py::ssize_t>(outputs.size()) != a.shape(2)) {
    throw DimensionError("name lists do not match the array shape");
  }
  SensitivityTensor t(a.shape(0), std::move(inputs), std::move(outputs));
  std::copy(a.data(), a.data() + a.size(), t.data().begin());
  return t;
}

py::dict measure_dict(const SensitivityMeasure& m) {
  py::dict d;
  d["mean"] = m.mean;
  d["sd"] = m.sd;
  d["mean_sq"] = m.mean_sq;
  return d;
}

py::dict summary_dict(const SensitivitySummary& s) {
  py::dict outputs;
  for (const auto& o : s.outputs) {
    py::dict rows;
    for (const auto& r : o.rows) rows[py::str(r.input)] = measure_dict(r);
    outputs[py::str(o.output)] = rows;
  }
  py::dict combined;
  for (const auto& r : s.combined) combined[py::str(r.input)] = measure_dict(r);
  py::dict d;
  d["outputs"] = outputs;
  d["combined"] = combined;
  d["sample_count"] = s.sample_count;
  d["degenerate_sample"] = s.degenerate_sample;
  d["ranking"] = rank_inputs(s);
  return d;
}

py::dict dataset_dict(const Dataset& d) {
  py::dict out;
  out["columns"] = d.column_names;
  out["values"] = d.values;
  out["inputs"] = d.input_names();
  out["outputs"] = d.output_names();
  out["x"] = d.inputs();
  out["y"] = d.outputs();
  if (d.timestamp) out["timestamps"] = d.timestamp->values;
  return out;
}

py::dict importance_dict(const ImportanceTable& t) {
  py::dict d;
  for (const auto& e : t.rows) d[py::str(e.input)] = e.value;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Analytic input sensitivities of multilayer perceptrons";

  // Translators run newest first, so the base class goes in first. Each
  // subclass also derives from the matching builtin exception.
  auto base = py::register_exception<Error>(m, "Error", PyExc_Exception);
  auto bases = [&](PyObject* builtin) {
    return py::make_tuple(py::handle(builtin), base).release();
  };
  py::register_exception<ValidationError>(m, "ValidationError", bases(PyExc_ValueError));
  py::register_exception<IoError>(m, "IoError", bases(PyExc_OSError));
  py::register_exception<DivergenceError>(m, "DivergenceError", bases(PyExc_ArithmeticError));
  py::register_exception<UnsupportedStructureError>(m, "UnsupportedStructureError",
                                                    bases(PyExc_NotImplementedError));

  py::class_<NetworkSpec>(m, "Network")
      .def_property_readonly("input_names", [](const NetworkSpec& n) { return n.input_names; })
      .def_property_readonly("output_names", [](const NetworkSpec& n) { return n.output_names; })
      .def_property_readonly("structure", &NetworkSpec::structure)
      .def_property_readonly("activations",
                             [](const NetworkSpec& n) {
                               std::vector<std::string> out;
                               for (const auto& l : n.layers) out.push_back(activation_name(l.activation));
                               return out;
                             })
      .def_property_readonly("weights",
                             [](const NetworkSpec& n) {
                               std::vector<Eigen::MatrixXd> out;
                               for (const auto& l : n.layers) out.push_back(l.weights);
                               return out;
                             },
                             "Per-layer weight matrices, bias row first.")
      .def("flat_weights", &flatten_weights)
      .def("predict",
           [](const NetworkSpec& n, const Eigen::MatrixXd& x) { return predict(n, network_inputs(n, x)); },
           py::arg("x"))
      .def("to_json", &save_model)
      .def("__eq__", [](const NetworkSpec& a, const NetworkSpec& b) { return a == b; })
      .def("__repr__", [](const NetworkSpec& n) {
        std::ostringstream s;
        s << "Network(structure=[";
        const auto st = n.structure();
        for (std::size_t i = 0; i < st.size(); ++i) s << (i ? ", " : "") << st[i];
        s << "])";
        return s.str();
      });

  m.def("network_from_flat",
        [](const std::vector<Index>& structure, const std::vector<double>& weights,
           const std::vector<std::string>& activations, std::vector<std::string> input_names,
           std::vector<std::string> output_names) {
          return network_from_flat(structure, weights, activations_from(activations),
                                   std::move(input_names), std::move(output_names));
        },
        py::arg("structure"), py::arg("weights"), py::arg("activations"),
        py::arg("input_names") = std::vector<std::string>{},
        py::arg("output_names") = std::vector<std::string>{});
  m.def("init_weights",
        [](const std::vector<Index>& structure, const std::vector<std::string>& activations,
           std::uint64_t seed, double init_scale, std::vector<std::string> input_names,
           std::vector<std::string> output_names) {
          return init_weights(structure, activations_from(activations), seed, init_scale,
                              std::move(input_names), std::move(output_names));
        },
        py::arg("structure"), py::arg("activations"), py::arg("seed") = 0, py::arg("init_scale") = 1.0,
        py::arg("input_names") = std::vector<std::string>{},
        py::arg("output_names") = std::vector<std::string>{});
  m.def("load_model", &load_model, py::arg("document"));
  m.def("save_model", &save_model, py::arg("network"));
  m.def("validate_network", &validate_network, py::arg("network"));

  m.def("sensitivities",
        [](const NetworkSpec& n, const Eigen::MatrixXd& x, Index block_size, unsigned threads) {
          SensitivityTensor t;
          {
            py::gil_scoped_release release;
            t = raw_sensitivities(n, x, {block_size, threads});
          }
          return tensor_array(t);
        },
        py::arg("network"), py::arg("x"), py::arg("block_size") = 256, py::arg("threads") = 1,
        "N x inputs x outputs array of partial derivatives at each row of x.");
  m.def("jacobian_at",
        [](const NetworkSpec& n, const Eigen::VectorXd& x) {
          return raw_sensitivities(n, x.transpose()).slice(0);
        },
        py::arg("network"), py::arg("x"));

  m.def("summarize",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           std::vector<std::string> inputs, std::vector<std::string> outputs, bool combined) {
          SensitivitySummary s = summarize(tensor_from(a, std::move(inputs), std::move(outputs)));
          if (combined) s = combine(std::move(s));
          return summary_dict(s);
        },
        py::arg("tensor"), py::arg("input_names") = std::vector<std::string>{},
        py::arg("output_names") = std::vector<std::string>{}, py::arg("combine") = false);
  m.def("analyze",
        [](const NetworkSpec& n, const Eigen::MatrixXd& x, bool combined) {
          SensitivitySummary s = summarize(raw_sensitivities(n, x));
          if (combined) s = combine(std::move(s));
          return summary_dict(s);
        },
        py::arg("network"), py::arg("x"), py::arg("combine") = false);

  m.def("garson", [](const NetworkSpec& n, Index k) { return importance_dict(garson(n, k)); },
        py::arg("network"), py::arg("output_index") = 0);
  m.def("olden", [](const NetworkSpec& n, Index k) { return importance_dict(olden(n, k)); },
        py::arg("network"), py::arg("output_index") = 0);

  m.def("train",
        [](const NetworkSpec& n, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int max_epochs,
           double learning_rate, double l2_decay, const std::string& loss) {
          TrainConfig c;
          c.max_epochs = max_epochs;
          c.learning_rate = learning_rate;
          c.l2_decay = l2_decay;
          c.loss = parse_loss(loss);
          TrainResult r;
          {
            py::gil_scoped_release release;
            r = train(n, network_inputs(n, x), y, c);
          }
          py::dict report;
          report["loss_history"] = r.report.loss_history;
          report["final_loss"] = r.report.final_loss;
          report["epochs_run"] = r.report.epochs_run;
          return py::make_tuple(r.network, report);
        },
        py::arg("network"), py::arg("x"), py::arg("y"), py::arg("max_epochs") = 1000,
        py::arg("learning_rate") = 0.01, py::arg("l2_decay") = 0.0, py::arg("loss") = "mse");

  m.def("generate_simdata", [](Index n, std::uint64_t seed) { return dataset_dict(generate_simdata(n, seed)); },
        py::arg("n") = kSimdataRows, py::arg("seed") = 150);
  m.def("generate_seasonal_demand",
        [](Index days, std::uint64_t seed) { return dataset_dict(generate_seasonal_demand(days, seed)); },
        py::arg("n_days") = 730, py::arg("seed") = 150);

  m.def("kde",
        [](const std::vector<double>& v, int grid_points) {
          const DensityCurve c = kde(v, grid_points);
          return py::make_tuple(c.x, c.density, c.bandwidth);
        },
        py::arg("values"), py::arg("grid_points") = kDefaultGridPoints);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a command-line invocation; returns (exit code, stdout, stderr).");
}
