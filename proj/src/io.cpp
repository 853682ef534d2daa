#include "mlpsens/io.hpp"

#include "mlpsens/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace mlpsens {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string file_token(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
                      c == '-' || c == '_';
    out += keep ? c : '_';
  }
  return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

ordered_json measure_json(const SensitivityMeasure& m) {
  ordered_json j;
  j["varNames"] = m.input;
  j["mean"] = m.mean;
  j["std"] = m.sd;
  j["meanSensSQ"] = m.mean_sq;
  j["nan"] = m.has_nan;
  return j;
}

}  // namespace

// ---- CSV -----------------------------------------------------------------------

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && trim(record[0]).empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
    }
  }
  if (quoted) throw ParseError("CSV line " + std::to_string(line) + ": unterminated quote");
  if (any && (!field.empty() || !record.empty())) end_record();
  if (records.empty()) throw ParseError("CSV has no header row");

  CsvTable table;
  table.header = std::move(records.front());
  for (auto& h : table.header) h = std::string(trim(h));
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ParseError("CSV row " + std::to_string(r) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

std::optional<double> parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  double seconds = static_cast<double>(sys_days{ymd}.time_since_epoch().count()) * 86400.0;

  std::string_view rest = text.substr(10);
  if (rest.empty()) return seconds;
  if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
  rest.remove_prefix(1);
  if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
  if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
  unsigned hh = 0;
  unsigned mm = 0;
  if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mm) ||
      hh > 23 || mm > 59) {
    return std::nullopt;
  }
  double ss = 0.0;
  if (rest.size() > 5) {
    if (rest[5] != ':') return std::nullopt;
    const auto s = parse_double(rest.substr(6));
    if (!s || *s < 0.0 || *s >= 61.0) return std::nullopt;
    ss = *s;
  }
  return seconds + hh * 3600.0 + mm * 60.0 + ss;
}

std::string format_iso8601(double seconds) {
  using namespace std::chrono;
  const double day_count = std::floor(seconds / 86400.0);
  const year_month_day ymd{sys_days{days{static_cast<long>(day_count)}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  const double rem = seconds - day_count * 86400.0;
  if (rem == 0.0) return buf;
  const auto secs = static_cast<long>(std::llround(rem));
  char time[32];
  std::snprintf(time, sizeof time, "T%02ld:%02ld:%02ldZ", secs / 3600,
                (secs / 60) % 60, secs % 60);
  return std::string(buf) + time;
}

Dataset load_dataset(std::string_view csv,
                     std::span<const std::string> input_columns,
                     std::span<const std::string> output_columns,
                     std::optional<std::string> timestamp_column) {
  const CsvTable table = parse_csv(csv);
  if (table.rows.empty()) throw ParseError("CSV has a header but no data rows");

  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == name) return i;
    }
    return std::nullopt;
  };

  std::vector<std::string> wanted(input_columns.begin(), input_columns.end());
  wanted.insert(wanted.end(), output_columns.begin(), output_columns.end());
  std::vector<std::size_t> source;
  std::string missing;
  for (const auto& name : wanted) {
    if (const auto i = find(name)) {
      source.push_back(*i);
    } else {
      missing += (missing.empty() ? "" : ", ") + name;
    }
  }
  std::optional<std::size_t> ts_source;
  if (timestamp_column) {
    ts_source = find(*timestamp_column);
    if (!ts_source) missing += (missing.empty() ? "" : ", ") + *timestamp_column;
  }
  if (!missing.empty()) throw ValidationError("missing column(s): " + missing);

  Dataset data;
  data.column_names = wanted;
  const auto n = static_cast<Index>(table.rows.size());
  data.values.resize(n, static_cast<Index>(wanted.size()));
  for (Index r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < source.size(); ++c) {
      const std::string& cell = table.rows[r][source[c]];
      const auto v = parse_double(cell);
      const std::string where = "row " + std::to_string(r + 1) + ", column \"" +
                                wanted[c] + "\"";
      if (trim(cell).empty()) throw ParseError(where + ": empty cell");
      if (!v) throw ParseError(where + ": not a number (\"" + cell + "\")");
      if (!std::isfinite(*v)) throw ParseError(where + ": non-finite value");
      data.values(r, static_cast<Index>(c)) = *v;
    }
  }
  for (std::size_t i = 0; i < input_columns.size(); ++i) {
    data.input_columns.push_back(static_cast<Index>(i));
  }
  for (std::size_t i = 0; i < output_columns.size(); ++i) {
    data.output_columns.push_back(static_cast<Index>(input_columns.size() + i));
  }

  if (ts_source) {
    Timestamps ts;
    ts.column_name = *timestamp_column;
    const auto& first = table.rows.front()[*ts_source];
    ts.calendar = parse_iso8601(first).has_value();
    for (Index r = 0; r < n; ++r) {
      const std::string& cell = table.rows[r][*ts_source];
      const auto v = ts.calendar ? parse_iso8601(cell) : parse_double(cell);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("row " + std::to_string(r + 1) + ", column \"" +
                         *timestamp_column + "\": invalid time value \"" + cell +
                         "\"");
      }
      ts.values.push_back(*v);
    }
    data.timestamp = std::move(ts);
  }
  require_valid(data);
  return data;
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream out;
  bool first = true;
  if (data.timestamp) {
    out << csv_field(data.timestamp->column_name);
    first = false;
  }
  for (const auto& name : data.column_names) {
    out << (first ? "" : ",") << csv_field(name);
    first = false;
  }
  out << '\n';
  for (Index r = 0; r < data.rows(); ++r) {
    first = true;
    if (data.timestamp) {
      const double t = data.timestamp->values[r];
      out << (data.timestamp->calendar ? format_iso8601(t) : format_number(t));
      first = false;
    }
    for (Index c = 0; c < data.values.cols(); ++c) {
      out << (first ? "" : ",") << format_number(data.values(r, c));
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

// ---- exports -------------------------------------------------------------------

ExportFormat parse_export_format(std::string_view name) {
  if (name == "csv") return ExportFormat::csv;
  if (name == "structured-text" || name == "json") return ExportFormat::structured_text;
  throw ValidationError("unknown format \"" + std::string(name) +
                        "\" (expected csv or structured-text)");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string measures_csv(std::span<const SensitivityMeasure> rows) {
  std::string out = "varNames,mean,std,meanSensSQ\n";
  for (const auto& r : rows) {
    out += csv_field(r.input) + "," + format_number(r.mean) + "," +
           format_number(r.sd) + "," + format_number(r.mean_sq) + "\n";
  }
  return out;
}

std::vector<ExportFile> export_summary(const SensitivitySummary& summary,
                                       ExportFormat format,
                                       std::string_view stem) {
  std::vector<ExportFile> files;
  if (format == ExportFormat::csv) {
    for (const auto& o : summary.outputs) {
      files.push_back({std::string(stem) + "_" + file_token(o.output) + ".csv",
                       measures_csv(o.rows)});
    }
    if (!summary.combined.empty()) {
      files.push_back({std::string(stem) + ".csv", measures_csv(summary.combined)});
    }
    return files;
  }

  ordered_json doc;
  doc["sample_count"] = summary.sample_count;
  doc["degenerate_sample"] = summary.degenerate_sample;
  doc["outputs"] = ordered_json::array();
  for (const auto& o : summary.outputs) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : o.rows) rows.push_back(measure_json(r));
    doc["outputs"].push_back({{"output", o.output}, {"rows", rows}});
  }
  if (!summary.combined.empty()) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : summary.combined) rows.push_back(measure_json(r));
    doc["combined"] = rows;
  }
  files.push_back({std::string(stem) + ".json", doc.dump(2) + "\n"});
  return files;
}

std::string export_tensor(const SensitivityTensor& tensor, ExportFormat format) {
  if (format == ExportFormat::csv) {
    std::string out = "sample,input,output,value\n";
    for (Index s = 0; s < tensor.samples(); ++s) {
      for (Index i = 0; i < tensor.inputs(); ++i) {
        for (Index k = 0; k < tensor.outputs(); ++k) {
          out += std::to_string(s) + "," + csv_field(tensor.input_names()[i]) +
                 "," + csv_field(tensor.output_names()[k]) + "," +
                 format_number(tensor(s, i, k)) + "\n";
        }
      }
    }
    return out;
  }
  ordered_json doc;
  doc["shape"] = {tensor.samples(), tensor.inputs(), tensor.outputs()};
  doc["input_names"] = tensor.input_names();
  doc["output_names"] = tensor.output_names();
  doc["layout"] = "sample-major [sample][input][output]";
  doc["values"] = tensor.data();
  return doc.dump(2) + "\n";
}

std::string importance_csv(const ImportanceTable& table) {
  std::string out = "varNames," + std::string(to_string(table.method)) + "\n";
  for (const auto& r : table.rows) {
    out += csv_field(r.input) + "," + format_number(r.value) + "\n";
  }
  return out;
}

// ---- files ---------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path.string() + "\" for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading \"" + path.string() + "\"");
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open \"" + path.string() + "\" for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("error writing \"" + path.string() + "\"");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at \"" + path.string() + "\"");
  }
}

}  // namespace mlpsens
