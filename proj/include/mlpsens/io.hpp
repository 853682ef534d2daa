#pragma once

#include "mlpsens/baselines.hpp"
#include "mlpsens/dataset.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/measures.hpp"
#include "mlpsens/network.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlpsens {

inline constexpr std::string_view kModelSchemaVersion = "1";

// ---- model files -----------------------------------------------------------

/// Canonical JSON model document (schema version "1"). See docs/model-format.md.
std::string save_model(const NetworkSpec& spec);

/// Throws ParseError naming the JSON path of the offending field.
NetworkSpec load_model(std::string_view document);

// ---- datasets ----------------------------------------------------------------

/// Parsed CSV: header plus raw string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma separated, mandatory header, optional double-quote quoting.
CsvTable parse_csv(std::string_view text);

/// Builds a Dataset holding the named input and output columns (in that order).
/// The timestamp column may hold ISO-8601 dates/instants or plain numbers.
Dataset load_dataset(std::string_view csv,
                     std::span<const std::string> input_columns,
                     std::span<const std::string> output_columns,
                     std::optional<std::string> timestamp_column = std::nullopt);

/// Writes the timestamp column (if any) followed by all value columns.
std::string dataset_to_csv(const Dataset& data);

/// Seconds since the Unix epoch for "YYYY-MM-DD[THH:MM[:SS[.fff]]][Z]".
std::optional<double> parse_iso8601(std::string_view text);
/// "YYYY-MM-DD" when the instant is midnight UTC, else "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(double seconds);

// ---- exports -----------------------------------------------------------------

enum class ExportFormat { csv, structured_text };
ExportFormat parse_export_format(std::string_view name);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

struct ExportFile {
  std::string name;
  std::string bytes;
};

/// CSV with columns varNames,mean,std,meanSensSQ.
std::string measures_csv(std::span<const SensitivityMeasure> rows);

/// CSV: one file per output named "<stem>_<output>.csv" plus "<stem>.csv" for
/// the combined rows when present. Structured text: a single "<stem>.json".
std::vector<ExportFile> export_summary(const SensitivitySummary& summary,
                                       ExportFormat format,
                                       std::string_view stem = "sensitivity");

/// Long form sample,input,output,value (CSV) or a JSON document with the
/// shape and sample-major values.
std::string export_tensor(const SensitivityTensor& tensor, ExportFormat format);

std::string importance_csv(const ImportanceTable& table);

// ---- files -------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mlpsens
