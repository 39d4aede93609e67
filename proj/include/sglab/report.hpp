#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sglab {

enum class RowStatus {
  /// Informational value, no check attached.
  info,
  pass,
  fail,
  /// An adaptive procedure stopped at its cap.
  nonconvergence,
  /// The task raised an error.
  error,
};

std::string to_string(RowStatus s);

/// One line of an experiment report.
struct ReportRow {
  std::string task;
  std::string name;
  /// Input values in declaration order, already formatted.
  std::vector<std::pair<std::string, std::string>> inputs;
  std::optional<double> value;
  /// Value of the closed-form expression the computed value is compared with.
  std::optional<double> formula;
  /// value / formula, present only when both exist.
  std::optional<double> ratio;
  /// The formula or identity the row refers to.
  std::string provenance;
  double error_budget = 0.0;
  RowStatus status = RowStatus::info;
  std::string note;
};

struct Report {
  std::vector<ReportRow> rows;
};

/// Adds value, formula and their ratio to a row.
void set_values(ReportRow& row, double value, std::optional<double> formula = std::nullopt);

/// 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double x);

std::string to_csv(const Report& report);
std::string to_json(const Report& report);

}  // namespace sglab
