#pragma once

#include "mlpsens/network.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mlpsens {

/// Per-row time values. Calendar timestamps are stored as seconds since the
/// Unix epoch (UTC); plain numeric time columns are stored as-is.
struct Timestamps {
  std::string column_name;
  std::vector<double> values;
  bool calendar = false;
};

/// Named numeric columns with input/output roles.
struct Dataset {
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;  // N x d
  std::vector<Index> input_columns;
  std::vector<Index> output_columns;
  std::optional<Timestamps> timestamp;

  Index rows() const noexcept { return values.rows(); }
  std::optional<Index> column_index(std::string_view name) const;
  Eigen::MatrixXd inputs() const { return select(input_columns); }
  Eigen::MatrixXd outputs() const { return select(output_columns); }
  std::vector<std::string> input_names() const;
  std::vector<std::string> output_names() const;
  Eigen::MatrixXd select(std::span<const Index> columns) const;
};

std::vector<std::string> validate_dataset(const Dataset& data);
void require_valid(const Dataset& data);

/// Column means and sample standard deviations (divisor N-1).
struct Scaler {
  std::vector<Index> columns;
  std::vector<double> means;
  std::vector<double> sds;
};

/// Throws DegenerateError naming the first constant column.
Scaler fit_scaler(const Dataset& data, std::span<const Index> columns);
Dataset apply_scaler(Dataset data, const Scaler& scaler);
Dataset invert_scaler(Dataset data, const Scaler& scaler);

/// Sample mean and standard deviation (divisor N-1) of a column.
double sample_mean(const Eigen::Ref<const Eigen::VectorXd>& v);
double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace mlpsens
