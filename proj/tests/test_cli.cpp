#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohomlab/cli.hpp"
#include "cohomlab/reports.hpp"

using namespace cohomlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cohomlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cohomlab_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::size_t file_count(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) ++n;
  return n;
}

// Restores COHOMLAB_OUT_DIR on scope exit.
struct OutDirGuard {
  std::string saved;
  bool had = false;
  OutDirGuard() {
    if (const char* v = std::getenv(kOutDirEnv)) {
      saved = v;
      had = true;
    }
    unsetenv(kOutDirEnv);
  }
  ~OutDirGuard() {
    if (had)
      setenv(kOutDirEnv, saved.c_str(), 1);
    else
      unsetenv(kOutDirEnv);
  }
};

}  // namespace

TEST_CASE("report envelope") {
  CHECK(check_le("a", 1.0, 1.0).pass);
  CHECK_FALSE(check_le("a", 1.1, 1.0).pass);
  CHECK(check_ge("a", 2.0, 1.0).pass);
  CHECK_FALSE(check_ge("a", 0.5, 1.0).pass);
  CHECK(check_near("a", 1.05, 1.0, 0.1).pass);
  CHECK_FALSE(check_near("a", 1.2, 1.0, 0.1).pass);
  CHECK(check_near("a", 1.0, 1.0, 0.1).comparison == "=~1.0");
  CHECK(check_true("a", true).pass);
  CHECK_FALSE(check_true("a", false).pass);

  Report r("solve", R"({"b":1,"a":2})");
  CHECK(r.all_pass());
  r.add(check_le("residual", 1e-4, 1e-3));
  r.set_result(R"({"x":[1,2]})");
  r.set_wall_time(0.25);
  CHECK(r.all_pass());
  auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["schema"] == "v1");
  CHECK(j["command"] == "solve");
  CHECK(j["config"]["a"] == 2);
  CHECK(j["wall_time_s"] == 0.25);
  CHECK(j["checks"].size() == 1);
  CHECK(j["checks"][0]["name"] == "residual");
  CHECK(j["checks"][0]["comparison"] == "<=");
  CHECK(j["all_pass"] == true);
  CHECK(j["result"]["x"][1] == 2);

  r.add(check_le("inf", std::numeric_limits<double>::infinity(), 1.0));
  CHECK_FALSE(r.all_pass());
  j = nlohmann::json::parse(r.to_json());
  CHECK(j["checks"][1]["value"].is_null());
  CHECK(j["all_pass"] == false);

  const auto csv = r.to_csv("chi,density\n0,1\n");
  CHECK(csv.rfind("# schema: v1\n", 0) == 0);
  CHECK(csv.find("# all_pass: false\n") != std::string::npos);
  CHECK(csv.size() >= 16);
  CHECK(csv.substr(csv.size() - 16) == "chi,density\n0,1\n");
}

TEST_CASE("command line parsing") {
  const char* argv[] = {"cohomlab", "solve", "--model", "rho", "--t", "0.5", "--tol", "residual=1e-5", "--grid", "coarse"};
  const auto c = parse_command_line(10, argv);
  CHECK(c.command == Command::Solve);
  CHECK(c.model == RepModel::rho(0.5));
  CHECK(c.grid == GridProfile::Coarse);
  CHECK(c.tolerances.at("residual") == 1e-5);
  const auto j = nlohmann::json::parse(c.to_json());
  CHECK(j["command"] == "solve");
  CHECK(j["grid"] == "coarse");

  for (const auto& s : {"verify-algebra", "solve", "obstruct", "classify", "counterexample", "sweep", "density"})
    CHECK(to_string(parse_command(s)) == s);

  const char* bad_tol[] = {"cohomlab", "solve", "--tol", "residual=abc"};
  CHECK_THROWS_AS(parse_command_line(4, bad_tol), UsageError);
  const char* unknown_tol[] = {"cohomlab", "solve", "--tol", "nonsense=1"};
  CHECK_THROWS_AS(parse_command_line(4, unknown_tol), UsageError);
  const char* no_command[] = {"cohomlab"};
  CHECK_THROWS_AS(parse_command_line(1, no_command), UsageError);
  const char* help[] = {"cohomlab", "--help"};
  CHECK_THROWS_AS(parse_command_line(2, help), HelpRequested);
}

TEST_CASE("exit status contract") {
  OutDirGuard guard;
  const auto dir = scratch("exit");

  SUBCASE("pass writes one report and exits 0") {
    const auto path = dir / "table.json";
    const auto r = run({"classify", "--n", "3", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("classify: PASS") != std::string::npos);
    CHECK(file_count(dir) == 1);
    const auto j = load(path);
    CHECK(j["schema"] == "v1");
    CHECK(j["all_pass"] == true);
    CHECK(j["config"]["n"] == 3);
    CHECK(j.contains("wall_time_s"));
    for (const auto& c : j["checks"]) CHECK(c["pass"] == true);
  }

  SUBCASE("verify-algebra passes on rho") {
    CHECK(run({"verify-algebra", "--model", "rho", "--t", "1", "--grid", "default", "--out", (dir / "a.json").string()})
              .code == 0);
  }

  SUBCASE("malformed flag exits 1 without a report") {
    const auto path = dir / "r.json";
    const auto r = run({"solve", "--model", "rho", "--t", "0", "--rhs", "bump-derivative", "--out", path.string(), "--bogus"});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
    CHECK(file_count(dir) == 0);
  }

  SUBCASE("invalid combinations exit 1 without a report") {
    CHECK(run({"solve", "--model", "tau", "--method", "primitive", "--out", (dir / "x.json").string()}).code == 1);
    CHECK(run({"solve", "--format", "csv", "--out", (dir / "x.csv").string()}).code == 1);
    CHECK(run({"classify", "--n", "12", "--out", (dir / "x.json").string()}).code == 1);
    CHECK(run({"density", "--model", "rho", "--gen", "u_2_1", "--out", (dir / "x.json").string()}).code == 1);
    CHECK(file_count(dir) == 0);
  }

  SUBCASE("failed check exits 2 with a report") {
    const auto path = dir / "fail.json";
    const auto r = run({"solve", "--method", "fourier", "--rhs", "bump-bump", "--out", path.string()});
    CHECK(r.code == 2);
    CHECK(r.out.find("solve: FAIL") != std::string::npos);
    const auto j = load(path);
    CHECK(j["all_pass"] == false);
  }

  SUBCASE("tightened tolerance turns a pass into exit 2") {
    CHECK(run({"solve", "--out", (dir / "ok.json").string()}).code == 0);
    CHECK(run({"solve", "--tol", "residual=0", "--out", (dir / "tight.json").string()}).code == 2);
  }

  SUBCASE("library error becomes a failed check") {
    const auto path = dir / "err.json";
    CHECK(run({"density", "--model", "rho", "--gen", "V", "--out", path.string()}).code == 2);
    const auto j = load(path);
    bool found = false;
    for (const auto& c : j["checks"])
      if (c["pass"] == false) found = true;
    CHECK(found);
  }

  SUBCASE("unwritable report path exits 1") {
    std::ofstream(dir / "blocker") << "x";
    CHECK(run({"classify", "--n", "3", "--out", (dir / "blocker" / "t.json").string()}).code == 1);
  }

  SUBCASE("help exits 0") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--model") != std::string::npos);
  }

  fs::remove_all(dir);
}

TEST_CASE("determinism modulo wall time") {
  OutDirGuard guard;
  const auto dir = scratch("determinism");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"solve", "--model", "rho", "--t", "0"},
           {"classify", "--n", "4"},
           {"counterexample", "--case", "re4"},
           {"obstruct", "--rhs", "bump-bump"}}) {
    std::vector<nlohmann::json> reports;
    std::vector<std::string> texts;
    for (const char* name : {"one.json", "two.json"}) {
      auto a = args;
      a.insert(a.end(), {"--out", (dir / name).string()});
      run(a);
      auto text = slurp(dir / name);
      auto j = nlohmann::json::parse(text);
      j["wall_time_s"] = 0.0;
      j["config"].erase("out");
      reports.push_back(j);
      texts.push_back(j.dump(2));
    }
    CHECK(texts[0] == texts[1]);
  }
  fs::remove_all(dir);
}

TEST_CASE("output directory and formats") {
  OutDirGuard guard;
  const auto dir = scratch("outdir");
  setenv(kOutDirEnv, dir.string().c_str(), 1);

  CHECK(run({"classify", "--n", "4", "--format", "csv"}).code == 0);
  CHECK(fs::exists(dir / "classify.csv"));
  const auto csv = slurp(dir / "classify.csv");
  CHECK(csv.rfind("# schema: v1\n", 0) == 0);
  CHECK(csv.find("n,i,j,k,l,verdict") != std::string::npos);

  CHECK(run({"classify", "--n", "3", "--out", "sub/t.json"}).code == 0);
  CHECK(fs::exists(dir / "sub" / "t.json"));

  CHECK(run({"density", "--model", "rho", "--gen", "Y1", "--vector", "bump", "--format", "csv", "--out", "d.csv"}).code ==
        0);
  CHECK(slurp(dir / "d.csv").find("chi,density") != std::string::npos);

  // Absolute paths ignore the variable.
  const auto other = scratch("outdir_abs");
  CHECK(run({"classify", "--n", "3", "--out", (other / "abs.json").string()}).code == 0);
  CHECK(fs::exists(other / "abs.json"));
  fs::remove_all(other);
  fs::remove_all(dir);
}

TEST_CASE("config file with flag override") {
  OutDirGuard guard;
  const auto dir = scratch("config");
  const auto cfg = dir / "run.toml";
  std::ofstream(cfg) << "command = \"sweep\"\n"
                        "model = \"rho\"\n"
                        "t-samples = [1.0, 2.0]\n"
                        "samples = 48\n"
                        "loss = 4\n"
                        "out = \"" << (dir / "from_cfg.json").string() << "\"\n";

  CHECK(run({"--config", cfg.string()}).code == 0);
  auto j = load(dir / "from_cfg.json");
  CHECK(j["command"] == "sweep");
  CHECK(j["config"]["loss"] == 4);
  CHECK(j["config"]["t_samples"].size() == 2);

  CHECK(run({"--config", cfg.string(), "--loss", "2", "--out", (dir / "override.json").string()}).code == 0);
  j = load(dir / "override.json");
  CHECK(j["config"]["loss"] == 2);
  CHECK(j["config"]["samples"] == 48);

  std::ofstream(dir / "bad.toml") << "no_such_option = 1\n";
  CHECK(run({"classify", "--config", (dir / "bad.toml").string()}).code == 1);
  fs::remove_all(dir);
}
