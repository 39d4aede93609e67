#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sglab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Runs semigroup experiments described by a YAML spec and writes report.csv / report.json"};
  std::string spec_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool fail_fast = false;
  bool list_tasks = false;
  int jobs = 1;
  app.add_option("--spec", spec_path, "Experiment spec file");
  app.add_option("--out", out_dir, "Directory for report files")->capture_default_str();
  app.add_option("--seed", seed, "Seed overriding the spec file");
  app.add_option("--tol", tol, "Tolerance overriding every check tolerance");
  app.add_flag("--fail-fast", fail_fast, "Stop after the first task with a failing row");
  app.add_flag("--list-tasks", list_tasks, "Print the task names and exit");
  app.add_option("--jobs", jobs, "Tasks run in parallel")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (list_tasks) {
    for (const auto& name : sglab::task_names()) std::cout << name << '\n';
    return 0;
  }
  if (spec_path.empty()) {
    std::cerr << "error: --spec is required\n";
    return 2;
  }

  sglab::ExperimentSpec spec;
  try {
    spec = sglab::load_spec(spec_path);
  } catch (const sglab::SpecError& e) {
    std::cerr << spec_path << ": " << e.what() << '\n';
    return 2;
  }

  sglab::RunOptions opts;
  opts.seed = seed;
  opts.tol = tol;
  opts.fail_fast = fail_fast;
  opts.jobs = jobs;
  try {
    const sglab::RunResult res = sglab::run_experiment(spec, opts);
    sglab::write_reports(res.report, out_dir);
    for (const auto& row : res.report.rows) {
      std::cout << row.task << " | " << row.name << " | "
                << (row.value ? sglab::format_number(*row.value) : "-") << " | "
                << sglab::to_string(row.status) << '\n';
    }
    return res.exit_code;
  } catch (const sglab::SpecError& e) {
    std::cerr << spec_path << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
