#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sglab/experiment.hpp"

using namespace sglab;
using doctest::Approx;

namespace {

namespace fs = std::filesystem;

int line_of_error(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e.line();
  }
  return -1;
}

const ReportRow* find_row(const Report& r, const std::string& task, const std::string& name) {
  for (const auto& row : r.rows)
    if (row.task == task && row.name == name) return &row;
  return nullptr;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sglab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(SGLAB_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("spec defaults and task forms") {
  const auto s = parse_spec("tasks:\n  - validate\n  - name: kato\n    t: [0.5, 1]\n");
  CHECK(s.instance.kind == "two_point");
  CHECK(s.p == 2.0);
  CHECK(s.q == 2.0);
  CHECK(s.d == 1);
  REQUIRE(s.tasks.size() == 2);
  CHECK(s.tasks[0].name == "validate");
  CHECK(s.tasks[1].params.at("t").size() == 2);
  CHECK(s.tasks[1].line == 3);
  CHECK(task_names().size() == 13);
}

TEST_CASE("complex parameters") {
  const auto s = parse_spec(
      "tasks:\n  - name: contour-check\n    z: [1, \"1+0.1i\", \"2-3i\", [0.5, -0.25], \"0.5i\", 2.5]\n");
  const auto& z = s.tasks[0].params.at("z");
  REQUIRE(z.size() == 6);
  CHECK(z[0] == complex(1.0, 0.0));
  CHECK(z[1] == complex(1.0, 0.1));
  CHECK(z[2] == complex(2.0, -3.0));
  CHECK(z[3] == complex(0.5, -0.25));
  CHECK(z[4] == complex(0.0, 0.5));
  CHECK(z[5] == complex(2.5, 0.0));
}

TEST_CASE("spec errors carry line numbers") {
  CHECK(line_of_error("tasks:\n  - validate\nbogus: 1\n") == 3);
  CHECK(line_of_error("tasks:\n  - validate\n  - nonsense\n") == 3);
  CHECK(line_of_error("tasks:\n  - name: kato\n    tt: 1\n") == 3);
  CHECK(line_of_error("norms:\n  p: 1\ntasks: [validate]\n") > 0);
  CHECK(line_of_error("norms:\n  p: 2\n  q: 1.5\ntasks: [validate]\n") > 0);
  CHECK(line_of_error("instance:\n  kind: torus\ntasks: [validate]\n") == 2);
  CHECK(line_of_error("tasks:\n  - name: kato\n    t: abc\n") == 3);
  CHECK(line_of_error("tasks: [validate\n") > 0);
  CHECK(line_of_error("seed: 1\n") >= 0);
  CHECK(line_of_error("tasks:\n  - name: validate\n    t: [1, [1, 2, 3]]\n") == 3);
  CHECK_THROWS_AS(load_spec("/nonexistent/spec.yaml"), SpecError);
}

TEST_CASE("two-point run: closed-form values") {
  const auto spec = parse_spec(
      "norms: {p: 2, q: 2, d: 1}\ntasks:\n  - validate\n  - kato\n  - name: bounds-table\n    q: 2\n    m: 1\n");
  const auto res = run_experiment(spec);
  CHECK(res.exit_code == 0);
  const auto* valid = find_row(res.report, "validate", "valid");
  REQUIRE(valid);
  CHECK(valid->status == RowStatus::pass);
  const auto* eps = find_row(res.report, "kato", "epsilon");
  REQUIRE(eps);
  CHECK(*eps->value == Approx(1.0).epsilon(1e-12));
  const auto* B = find_row(res.report, "bounds-table", "B");
  REQUIRE(B);
  CHECK(*B->value == Approx(6.7725887222397816).epsilon(1e-14));
}

TEST_CASE("example specs pass") {
  for (const char* name : {"two_point.yaml", "random.yaml", "bounds.yaml"}) {
    const auto res = run_experiment(load_spec(std::string(SGLAB_SPECS) + "/" + name));
    INFO(name);
    CHECK(res.exit_code == 0);
    for (const auto& row : res.report.rows) CHECK(row.status != RowStatus::fail);
  }
}

TEST_CASE("runs are deterministic and independent of jobs") {
  const auto spec = load_spec(std::string(SGLAB_SPECS) + "/random.yaml");
  const auto a = run_experiment(spec);
  const auto b = run_experiment(spec);
  RunOptions par;
  par.jobs = 3;
  const auto c = run_experiment(spec, par);
  CHECK(to_json(a.report) == to_json(b.report));
  CHECK(to_csv(a.report) == to_csv(c.report));
  CHECK(a.exit_code == c.exit_code);
}

TEST_CASE("exit codes") {
  SUBCASE("error row gives 1") {
    const auto spec = parse_spec("tasks:\n  - name: contour-check\n    z: \"0.1+5i\"\n  - validate\n");
    const auto res = run_experiment(spec);
    CHECK(res.exit_code == 1);
    CHECK(res.report.rows.front().status == RowStatus::error);
    RunOptions ff;
    ff.fail_fast = true;
    CHECK(run_experiment(spec, ff).report.rows.size() == 1);
  }
  SUBCASE("nonconvergence gives 3 and outranks failures") {
    const auto spec = parse_spec(
        "tolerances: {subordination: 1.0e-300}\n"
        "tasks:\n  - subordination\n  - name: contour-check\n    z: \"0.1+5i\"\n");
    const auto res = run_experiment(spec);
    CHECK(res.exit_code == 3);
    CHECK(res.report.rows.front().status == RowStatus::nonconvergence);
  }
  SUBCASE("tolerance override") {
    RunOptions o;
    o.tol = -1.0;
    CHECK_THROWS_AS(run_experiment(parse_spec("tasks: [validate]\n"), o), SpecError);
  }
}

TEST_CASE("report formats") {
  const auto res = run_experiment(parse_spec("tasks:\n  - kato\n"));
  const std::string csv = to_csv(res.report);
  CHECK(csv.rfind("task,name,inputs,value,formula,ratio,error_budget,status,provenance,note\n", 0) == 0);
  const auto doc = nlohmann::json::parse(to_json(res.report));
  CHECK(doc["summary"]["rows"] == res.report.rows.size());
  CHECK(doc["rows"][0]["task"] == "kato");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0 / 0.0) == "inf");
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  const std::string spec = std::string(SGLAB_SPECS) + "/two_point.yaml";
  CHECK(run_cli("--list-tasks") == 0);
  CHECK(run_cli("") == 2);
  std::ofstream(dir / "bad.yaml") << "tasks:\n  - nonsense\n";
  CHECK(run_cli("--spec " + (dir / "bad.yaml").string()) == 2);
  CHECK(run_cli("--spec " + spec + " --out " + (dir / "a").string()) == 0);
  CHECK(run_cli("--spec " + spec + " --out " + (dir / "b").string() + " --jobs 2") == 0);
  CHECK(fs::exists(dir / "a" / "report.csv"));
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(slurp(dir / "a" / "report.csv") == slurp(dir / "b" / "report.csv"));
  std::ofstream(dir / "slow.yaml") << "tolerances: {subordination: 1.0e-300}\ntasks: [subordination]\n";
  CHECK(run_cli("--spec " + (dir / "slow.yaml").string() + " --out " + (dir / "c").string()) == 3);
  fs::remove_all(dir);
}
