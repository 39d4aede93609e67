#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sglab/errors.hpp"
#include "sglab/report.hpp"
#include "sglab/spaces.hpp"

namespace sglab {

/// Malformed or invalid experiment spec. `line` is 1-based, 0 when unknown.
class SpecError : public Error {
 public:
  SpecError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct InstanceSpec {
  /// two_point, cycle, complete, random or zero.
  std::string kind = "two_point";
  int n = 2;
  std::uint64_t seed = 1;
  double rate = 1.0;
};

/// A task and its numeric parameters. Scalars are stored as one-element
/// lists; complex entries are written as [re, im] pairs or strings like "1+0.1i".
struct TaskSpec {
  std::string name;
  std::map<std::string, std::vector<complex>> params;
  int line = 0;
};

struct Tolerances {
  double hille_yosida = 1e-9;
  double contour = 1e-8;
  double rota = 1e-12;
  double subordination = 1e-6;
  double identity = 1e-6;
  double hn = 1e-8;
  double lps = 1e-4;

  void set_all(double tol);
};

struct ExperimentSpec {
  InstanceSpec instance;
  double p = 2.0;
  double q = 2.0;
  int d = 1;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  /// Points of the log-spaced time grid used by the kato task.
  int time_points = 400;
  /// Restarts of every ratio optimizer.
  int restarts = 8;
  std::vector<TaskSpec> tasks;
};

/// Names accepted in the `tasks` list.
const std::vector<std::string>& task_names();

ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool fail_fast = false;
  int jobs = 1;
};

struct RunResult {
  Report report;
  /// 0 all checks pass, 1 a check failed or a task raised, 3 non-convergence.
  int exit_code = 0;
};

/// Runs the tasks in declaration order; rows appear in the same order for any `jobs`.
RunResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {});

/// Writes report.csv and report.json into `dir` (created if missing).
void write_reports(const Report& report, const std::string& dir);

struct BoundsTableRow {
  double q = 0.0;
  double m = 0.0;
  /// epsilon_from_delta(1, q).
  double epsilon = 0.0;
  double B = 0.0;
  double angle = 0.0;
  double Tz_bound = 0.0;
  /// k = 1, general p.
  double heat_general = 0.0;
  /// p = q, k = 1.
  double heat_sharp = 0.0;
  double xu_specialized = 0.0;
  /// xu_specialized / heat_sharp.
  double ratio = 0.0;
};

std::vector<BoundsTableRow> bounds_table(const std::vector<double>& q_list,
                                         const std::vector<double>& m_list);

}  // namespace sglab
