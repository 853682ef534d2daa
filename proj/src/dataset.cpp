#include "mlpsens/dataset.hpp"

#include "mlpsens/error.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace mlpsens {

std::optional<Index> Dataset::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    if (column_names[i] == name) return static_cast<Index>(i);
  }
  return std::nullopt;
}

std::vector<std::string> Dataset::input_names() const {
  std::vector<std::string> out;
  for (Index c : input_columns) out.push_back(column_names[c]);
  return out;
}

std::vector<std::string> Dataset::output_names() const {
  std::vector<std::string> out;
  for (Index c : output_columns) out.push_back(column_names[c]);
  return out;
}

Eigen::MatrixXd Dataset::select(std::span<const Index> columns) const {
  Eigen::MatrixXd out(values.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Index>(j)) = values.col(columns[j]);
  }
  return out;
}

std::vector<std::string> validate_dataset(const Dataset& data) {
  std::vector<std::string> out;
  const Index d = data.values.cols();
  if (data.values.rows() < 1) out.emplace_back("dataset has no rows");
  if (static_cast<Index>(data.column_names.size()) != d) {
    out.emplace_back("column_names length differs from column count");
  }
  std::set<Index> inputs;
  for (Index c : data.input_columns) {
    if (c < 0 || c >= d) {
      out.push_back("input column index " + std::to_string(c) + " out of range");
    }
    inputs.insert(c);
  }
  for (Index c : data.output_columns) {
    if (c < 0 || c >= d) {
      out.push_back("output column index " + std::to_string(c) + " out of range");
    }
    if (inputs.count(c)) {
      out.push_back("column " + std::to_string(c) + " is both input and output");
    }
  }
  auto check_finite = [&](const std::vector<Index>& cols) {
    for (Index c : cols) {
      if (c < 0 || c >= d) continue;
      for (Index r = 0; r < data.values.rows(); ++r) {
        if (!std::isfinite(data.values(r, c))) {
          out.push_back("non-finite value at row " + std::to_string(r + 1) +
                        ", column \"" + data.column_names[c] + "\"");
          return;
        }
      }
    }
  };
  check_finite(data.input_columns);
  check_finite(data.output_columns);
  if (data.timestamp &&
      static_cast<Index>(data.timestamp->values.size()) != data.values.rows()) {
    out.emplace_back("timestamp length differs from row count");
  }
  return out;
}

void require_valid(const Dataset& data) {
  const auto violations = validate_dataset(data);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid dataset:";
  for (const auto& v : violations) msg << "\n  " << v;
  throw ValidationError(msg.str());
}

double sample_mean(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.mean();
}

double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() /
                   static_cast<double>(v.size() - 1));
}

Scaler fit_scaler(const Dataset& data, std::span<const Index> columns) {
  Scaler s;
  for (Index c : columns) {
    if (c < 0 || c >= data.values.cols()) {
      throw DimensionError("scaler column " + std::to_string(c) +
                           " out of range");
    }
    const double sd = sample_sd(data.values.col(c));
    if (!(sd > 0.0)) {
      throw DegenerateError("cannot standardize constant column \"" +
                            data.column_names[c] + "\"");
    }
    s.columns.push_back(c);
    s.means.push_back(sample_mean(data.values.col(c)));
    s.sds.push_back(sd);
  }
  return s;
}

Dataset apply_scaler(Dataset data, const Scaler& scaler) {
  for (std::size_t j = 0; j < scaler.columns.size(); ++j) {
    auto col = data.values.col(scaler.columns[j]);
    col = (col.array() - scaler.means[j]) / scaler.sds[j];
  }
  return data;
}

Dataset invert_scaler(Dataset data, const Scaler& scaler) {
  for (std::size_t j = 0; j < scaler.columns.size(); ++j) {
    auto col = data.values.col(scaler.columns[j]);
    col = col.array() * scaler.sds[j] + scaler.means[j];
  }
  return data;
}

}  // namespace mlpsens
