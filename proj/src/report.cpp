#include "sglab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace sglab {

std::string to_string(RowStatus s) {
  switch (s) {
    case RowStatus::info: return "info";
    case RowStatus::pass: return "pass";
    case RowStatus::fail: return "fail";
    case RowStatus::nonconvergence: return "nonconvergence";
    case RowStatus::error: return "error";
  }
  return "unknown";
}

void set_values(ReportRow& row, double value, std::optional<double> formula) {
  row.value = value;
  row.formula = formula;
  if (formula && *formula != 0.0) row.ratio = value / *formula;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_number(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

std::string join_inputs(const ReportRow& row) {
  std::string s;
  for (const auto& [k, v] : row.inputs) {
    if (!s.empty()) s += ';';
    s += k + "=" + v;
  }
  return s;
}

nlohmann::ordered_json json_number(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x)) return nullptr;
  return *x;
}

}  // namespace

std::string to_csv(const Report& report) {
  std::ostringstream out;
  out << "task,name,inputs,value,formula,ratio,error_budget,status,provenance,note\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.task) << ',' << csv_field(r.name) << ',' << csv_field(join_inputs(r)) << ','
        << opt_number(r.value) << ',' << opt_number(r.formula) << ',' << opt_number(r.ratio) << ','
        << format_number(r.error_budget) << ',' << to_string(r.status) << ','
        << csv_field(r.provenance) << ',' << csv_field(r.note) << '\n';
  }
  return out.str();
}

std::string to_json(const Report& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::size_t counts[5] = {0, 0, 0, 0, 0};
  for (const auto& r : report.rows) {
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    nlohmann::ordered_json row;
    row["task"] = r.task;
    row["name"] = r.name;
    row["inputs"] = std::move(inputs);
    row["value"] = json_number(r.value);
    // Non-finite values have no JSON number; keep their text form.
    if (r.value && !std::isfinite(*r.value)) row["value_text"] = format_number(*r.value);
    row["formula"] = json_number(r.formula);
    row["ratio"] = json_number(r.ratio);
    row["error_budget"] = json_number(r.error_budget);
    row["status"] = to_string(r.status);
    row["provenance"] = r.provenance;
    row["note"] = r.note;
    rows.push_back(std::move(row));
    ++counts[static_cast<int>(r.status)];
  }
  nlohmann::ordered_json doc;
  doc["summary"] = {{"rows", report.rows.size()},
                    {"pass", counts[static_cast<int>(RowStatus::pass)]},
                    {"fail", counts[static_cast<int>(RowStatus::fail)]},
                    {"nonconvergence", counts[static_cast<int>(RowStatus::nonconvergence)]},
                    {"error", counts[static_cast<int>(RowStatus::error)]}};
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace sglab
