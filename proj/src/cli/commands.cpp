#include "mlpsens/cli.hpp"

#include "mlpsens/baselines.hpp"
#include "mlpsens/error.hpp"
#include "mlpsens/io.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/measures.hpp"
#include "mlpsens/plots.hpp"
#include "mlpsens/svg.hpp"
#include "mlpsens/synthetic.hpp"
#include "mlpsens/trainer.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>

namespace mlpsens {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const DivergenceError*>(&e)) return kExitDivergence;
  if (dynamic_cast<const UnsupportedStructureError*>(&e)) return kExitUnsupported;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
  return kExitFailure;
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',') {
      out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item += c;
    }
  }
  out.push_back(item);
  std::erase_if(out, [](const std::string& s) { return s.empty(); });
  return out;
}

ActivationKind activation_from_flag(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto kind = parse_activation(name);
  if (!kind) throw ValidationError("unknown activation \"" + name + "\"");
  std::optional<double> param;
  if (colon != std::string::npos) {
    const std::string p = text.substr(colon + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (ec != std::errc() || ptr != p.data() + p.size()) {
      throw ValidationError("bad activation parameter in \"" + text + "\"");
    }
    param = v;
  }
  return ActivationKind::make(*kind, param);
}

std::vector<Index> structure_from_flag(const std::string& text) {
  std::vector<Index> widths;
  for (const auto& part : split_list(text)) {
    Index v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v < 1) {
      throw ValidationError("bad --structure entry \"" + part + "\"");
    }
    widths.push_back(v);
  }
  if (widths.size() < 2) {
    throw ValidationError("--structure needs at least an input and an output width");
  }
  return widths;
}

Dataset load_for_model(const NetworkSpec& network, const std::string& path,
                       std::optional<std::string> timestamp = std::nullopt) {
  const std::string text = read_file(path);
  return load_dataset(text, network.input_names, std::vector<std::string>{},
                      std::move(timestamp));
}

Index output_index(const NetworkSpec& network, const std::string& name) {
  const auto& names = network.output_names;
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw ValidationError("model has no output named \"" + name + "\"");
  }
  return static_cast<Index>(it - names.begin());
}

// Keeps only output `k` of the tensor.
SensitivityTensor select_output(const SensitivityTensor& t, Index k) {
  SensitivityTensor out(t.samples(), t.input_names(), {t.output_names()[k]});
  for (Index s = 0; s < t.samples(); ++s) {
    for (Index i = 0; i < t.inputs(); ++i) out(s, i, 0) = t(s, i, k);
  }
  return out;
}

void write_all(const fs::path& dir, const std::vector<ExportFile>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  for (const auto& f : files) write_file_atomic(dir / f.name, f.bytes);
}

std::string safe_name(std::string s) {
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

ordered_json measures_json(const std::vector<SensitivityMeasure>& rows) {
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) {
    out.push_back({{"input", r.input}, {"mean", r.mean}, {"sd", r.sd},
                   {"mean_sq", r.mean_sq}});
  }
  return out;
}

ordered_json importance_json(const ImportanceTable& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& e : table.rows) rows.push_back({{"input", e.input}, {"value", e.value}});
  return {{"output", table.output}, {"importance", rows}};
}

// ---- subcommands ------------------------------------------------------------

struct GenDataArgs {
  std::string kind = "simdata";
  Index rows = 0;
  std::uint64_t seed = 150;
  std::string out;
};

int cmd_gen_data(const GenDataArgs& a, std::ostream& err) {
  Dataset data;
  if (a.kind == "simdata") {
    data = generate_simdata(a.rows > 0 ? a.rows : kSimdataRows, a.seed);
  } else if (a.kind == "seasonal") {
    const Index days = a.rows > 0 ? a.rows : 730;
    if (days < 14) throw ValidationError("seasonal data needs at least 14 days");
    data = generate_seasonal_demand(days, a.seed);
  } else {
    throw ValidationError("unknown dataset kind \"" + a.kind + "\"");
  }
  write_file_atomic(a.out, dataset_to_csv(data));
  err << "wrote " << data.rows() << " rows to " << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string dataset;
  std::string inputs;
  std::string outputs;
  std::string structure;
  std::string activations;
  int epochs = 1000;
  double learning_rate = 0.01;
  double l2 = 0.0;
  std::string loss = "mse";
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  bool standardize = false;
  std::string out;
  std::string report;
};

int cmd_train(const TrainArgs& a, std::ostream& err) {
  const std::vector<Index> structure = structure_from_flag(a.structure);
  std::vector<ActivationKind> acts;
  if (a.activations.empty()) {
    acts.assign(structure.size() - 1, ActivationKind::make(Activation::sigmoid));
    acts.back() = ActivationKind::make(Activation::linear);
  } else {
    for (const auto& s : split_list(a.activations)) acts.push_back(activation_from_flag(s));
  }
  if (acts.size() != structure.size() - 1) {
    throw DimensionError("expected " + std::to_string(structure.size() - 1) +
                         " activations, got " + std::to_string(acts.size()));
  }
  TrainConfig config;
  config.max_epochs = a.epochs;
  config.learning_rate = a.learning_rate;
  config.l2_decay = a.l2;
  config.loss = parse_loss(a.loss);
  config.seed = a.seed;
  config.init_scale = a.init_scale;
  require_valid(config);

  const std::vector<std::string> outputs = split_list(a.outputs);
  if (outputs.empty()) throw ValidationError("--outputs names no columns");
  const std::string text = read_file(a.dataset);
  std::vector<std::string> inputs = split_list(a.inputs);
  if (inputs.empty()) {
    for (const auto& h : parse_csv(text).header) {
      if (std::find(outputs.begin(), outputs.end(), h) == outputs.end()) inputs.push_back(h);
    }
  }
  Dataset data = load_dataset(text, inputs, outputs);
  if (static_cast<Index>(inputs.size()) != structure.front() ||
      static_cast<Index>(outputs.size()) != structure.back()) {
    throw DimensionError("--structure " + a.structure + " does not match " +
                         std::to_string(inputs.size()) + " input and " +
                         std::to_string(outputs.size()) + " output columns");
  }

  NetworkSpec net = init_weights(structure, acts, a.seed, a.init_scale, inputs, outputs);
  if (a.standardize) {
    const Scaler sc = fit_scaler(data, data.input_columns);
    net.input_standardization = InputStandardization{sc.means, sc.sds};
  }
  const TrainResult result = train(net, data, config);

  ordered_json rep;
  rep["dataset"] = a.dataset;
  rep["rows"] = data.rows();
  rep["structure"] = structure;
  rep["loss"] = to_string(config.loss);
  rep["learning_rate"] = config.learning_rate;
  rep["momentum"] = kMomentum;
  rep["l2_decay"] = config.l2_decay;
  rep["seed"] = config.seed;
  rep["epochs_run"] = result.report.epochs_run;
  rep["final_loss"] = result.report.final_loss;
  rep["loss_history"] = result.report.loss_history;

  const fs::path report_path =
      a.report.empty() ? fs::path(a.out).replace_extension(".train.json") : fs::path(a.report);
  write_file_atomic(a.out, save_model(result.network));
  write_file_atomic(report_path, rep.dump(2) + "\n");
  err << "trained " << result.report.epochs_run << " epochs, final "
      << to_string(config.loss) << " " << format_number(result.report.final_loss)
      << "\nwrote " << a.out << " and " << report_path.string() << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string model;
  std::string dataset;
  bool raw = false;
  bool combine = false;
  std::string output_name;
  std::string format = "csv";
  std::string out_dir = ".";
  std::string stem = "sensitivity";
  unsigned threads = 1;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& err) {
  const ExportFormat format = parse_export_format(a.format);
  const NetworkSpec net = load_model(read_file(a.model));
  const Dataset data = load_for_model(net, a.dataset);
  SensitivityTensor tensor = raw_sensitivities(net, data.inputs(), {256, std::max(1u, a.threads)});
  if (!a.output_name.empty()) tensor = select_output(tensor, output_index(net, a.output_name));

  SensitivitySummary summary = summarize(tensor);
  if (a.combine) summary = combine(std::move(summary));
  if (summary.degenerate_sample) err << "warning: single sample, sd reported as 0\n";
  if (summary.has_nan()) err << "warning: some sensitivities are NaN\n";

  std::vector<ExportFile> files = export_summary(summary, format, a.stem);
  if (a.raw) {
    const char* ext = format == ExportFormat::csv ? "_raw.csv" : "_raw.json";
    files.push_back({a.stem + ext, export_tensor(tensor, format)});
  }
  write_all(a.out_dir, files);
  for (const auto& f : files) err << "wrote " << (fs::path(a.out_dir) / f.name).string() << "\n";
  return kExitOk;
}

struct PlotArgs {
  std::string model;
  std::string dataset;
  std::string kind = "sensitivity";
  std::string date_column;
  bool facet = true;
  bool sidecar = false;
  std::string output_name;
  std::string out_dir = ".";
  double width = 800;
  double height = 600;
};

int cmd_plot(const PlotArgs& a, std::ostream& err) {
  if (a.kind != "sensitivity" && a.kind != "time" && a.kind != "feature") {
    throw ValidationError("unknown plot kind \"" + a.kind + "\"");
  }
  if (a.kind == "time" && a.date_column.empty()) {
    throw ValidationError("time plots need --date-column");
  }
  if (!(a.width >= 100 && a.height >= 100)) {
    throw ValidationError("--width and --height must be at least 100");
  }
  const NetworkSpec net = load_model(read_file(a.model));
  std::optional<std::string> ts;
  if (a.kind == "time") ts = a.date_column;
  const Dataset data = load_for_model(net, a.dataset, ts);
  const SensitivityTensor tensor = raw_sensitivities(net, data.inputs());

  std::vector<Index> outputs;
  if (a.output_name.empty()) {
    for (Index k = 0; k < tensor.outputs(); ++k) outputs.push_back(k);
  } else {
    outputs.push_back(output_index(net, a.output_name));
  }
  const bool suffix = tensor.outputs() > 1;

  std::vector<std::pair<std::string, PlotData>> plots;
  for (Index k : outputs) {
    const std::string tag = suffix ? "_" + safe_name(tensor.output_names()[k]) : "";
    if (a.kind == "sensitivity") {
      const SensitivitySummary summary = summarize(tensor);
      SensitivityPlots sp = sensitivity_plots(summary, &tensor, k);
      const char* names[] = {"sensitivity_label", "sensitivity_bar", "sensitivity_density"};
      for (std::size_t p = 0; p < sp.plots.size() && p < 3; ++p) {
        plots.emplace_back(names[p] + tag, std::move(sp.plots[p]));
      }
      for (const auto& n : sp.notices) err << "note: " << n << "\n";
    } else if (a.kind == "time") {
      const Timestamps& t = *data.timestamp;
      plots.emplace_back("sensitivity_time" + tag,
                         time_plot(tensor, t.values, t.calendar, a.facet, k));
    } else {
      plots.emplace_back("sensitivity_feature" + tag,
                         feature_plot(tensor, data.inputs(), k));
    }
  }

  std::vector<ExportFile> files;
  for (const auto& [name, plot] : plots) {
    files.push_back({name + ".svg", render_svg(plot, a.width, a.height)});
    if (a.sidecar) files.push_back({name + ".json", plot_to_json(plot)});
  }
  write_all(a.out_dir, files);
  for (const auto& f : files) err << "wrote " << (fs::path(a.out_dir) / f.name).string() << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string model;
  std::string dataset;
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  const NetworkSpec net = load_model(read_file(a.model));
  const Dataset data = load_for_model(net, a.dataset);
  const std::string report = build_report(net, data);
  if (a.out.empty()) {
    out << report;
  } else {
    write_file_atomic(a.out, report);
    err << "wrote " << a.out << "\n";
  }
  return kExitOk;
}

}  // namespace

std::string build_report(const NetworkSpec& network, const Dataset& data) {
  require_valid(network);
  const SensitivityTensor tensor = raw_sensitivities(network, data.inputs());
  const SensitivitySummary summary = combine(summarize(tensor));

  ordered_json doc;
  doc["model"] = {{"structure", network.structure()},
                  {"input_names", network.input_names},
                  {"output_names", network.output_names}};
  ordered_json acts = ordered_json::array();
  for (const auto& l : network.layers) acts.push_back(std::string(to_string(l.activation.kind)));
  doc["model"]["activations"] = acts;
  doc["sample_count"] = summary.sample_count;

  ordered_json outputs = ordered_json::array();
  for (std::size_t k = 0; k < summary.outputs.size(); ++k) {
    outputs.push_back({{"output", summary.outputs[k].output},
                       {"measures", measures_json(summary.outputs[k].rows)},
                       {"ranking", rank_inputs(summary, Metric::mean_sq,
                                               static_cast<Index>(k))}});
  }
  doc["outputs"] = outputs;
  doc["combined"] = measures_json(summary.combined);
  doc["ranking"] = rank_inputs(summary, Metric::mean_sq);

  ordered_json baselines;
  try {
    ordered_json g = ordered_json::array();
    ordered_json o = ordered_json::array();
    for (Index k = 0; k < network.output_width(); ++k) {
      o.push_back(importance_json(olden(network, k)));
      try {
        g.push_back(importance_json(garson(network, k)));
      } catch (const DegenerateError& e) {
        g.push_back({{"output", network.output_names[k]}, {"unavailable", e.what()}});
      }
    }
    baselines["garson"] = g;
    baselines["olden"] = o;
  } catch (const UnsupportedStructureError&) {
    baselines = "unsupported structure";
  }
  doc["baselines"] = baselines;

  std::vector<std::string> notes;
  if (summary.degenerate_sample) notes.emplace_back("single sample: sd reported as 0");
  if (summary.has_nan()) notes.emplace_back("some sensitivities are NaN");
  doc["notes"] = notes;
  return doc.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Sensitivity analysis for multilayer perceptrons", "mlpsens"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen_cmd->add_option("kind", gen.kind, "simdata or seasonal")->required();
  gen_cmd->add_option("--rows", gen.rows, "Rows (simdata) or days (seasonal)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a network on a CSV dataset");
  train_cmd->add_option("--dataset", tr.dataset, "Input CSV")->required();
  train_cmd->add_option("--outputs", tr.outputs, "Comma-separated output columns")->required();
  train_cmd->add_option("--inputs", tr.inputs, "Comma-separated input columns (default: the rest)");
  train_cmd->add_option("--structure", tr.structure, "Layer widths, e.g. 3,10,1")->required();
  train_cmd->add_option("--activations", tr.activations,
                        "Per-layer activations, e.g. sigmoid,linear or prelu:0.05");
  train_cmd->add_option("--epochs", tr.epochs)->capture_default_str();
  train_cmd->add_option("--lr", tr.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--l2", tr.l2, "L2 decay on non-bias weights")->capture_default_str();
  train_cmd->add_option("--loss", tr.loss, "mse or cross-entropy")->capture_default_str();
  train_cmd->add_option("--seed", tr.seed, "Weight initialization seed")->capture_default_str();
  train_cmd->add_option("--init-scale", tr.init_scale)->capture_default_str();
  train_cmd->add_flag("--standardize", tr.standardize, "Standardize inputs inside the model");
  train_cmd->add_option("--out", tr.out, "Model file to write")->required();
  train_cmd->add_option("--report", tr.report, "Training report path (default <out>.train.json)");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute sensitivity measures");
  analyze_cmd->add_option("--model", an.model)->required();
  analyze_cmd->add_option("--dataset", an.dataset)->required();
  analyze_cmd->add_flag("--raw", an.raw, "Also export the raw sensitivity tensor");
  analyze_cmd->add_flag("--combine", an.combine, "Add measures combined over outputs");
  analyze_cmd->add_option("--output-name", an.output_name, "Analyze a single output");
  analyze_cmd->add_option("--format", an.format, "csv or structured-text")->capture_default_str();
  analyze_cmd->add_option("--out-dir", an.out_dir)->capture_default_str();
  analyze_cmd->add_option("--stem", an.stem, "File name stem")->capture_default_str();
  analyze_cmd->add_option("--threads", an.threads)->capture_default_str();

  PlotArgs pl;
  auto* plot_cmd = app.add_subcommand("plot", "Render sensitivity plots as SVG");
  plot_cmd->add_option("--model", pl.model)->required();
  plot_cmd->add_option("--dataset", pl.dataset)->required();
  plot_cmd->add_option("--kind", pl.kind, "sensitivity, time or feature")->capture_default_str();
  plot_cmd->add_option("--date-column", pl.date_column, "Timestamp column for time plots");
  plot_cmd->add_flag("--facet,!--no-facet", pl.facet, "One panel per input (time plots)");
  plot_cmd->add_flag("--data", pl.sidecar, "Also write each plot's data as JSON");
  plot_cmd->add_option("--output-name", pl.output_name, "Plot a single output");
  plot_cmd->add_option("--out-dir", pl.out_dir)->capture_default_str();
  plot_cmd->add_option("--width", pl.width)->capture_default_str();
  plot_cmd->add_option("--height", pl.height)->capture_default_str();

  ReportArgs rp;
  auto* report_cmd = app.add_subcommand("report", "Write a structured-text analysis report");
  report_cmd->add_option("--model", rp.model)->required();
  report_cmd->add_option("--dataset", rp.dataset)->required();
  report_cmd->add_option("--out", rp.out, "Report path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_data(gen, err);
    if (train_cmd->parsed()) return cmd_train(tr, err);
    if (analyze_cmd->parsed()) return cmd_analyze(an, err);
    if (plot_cmd->parsed()) return cmd_plot(pl, err);
    if (report_cmd->parsed()) return cmd_report(rp, out, err);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << " (epoch " << e.epoch() << ")\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitFailure;
}

}  // namespace mlpsens
