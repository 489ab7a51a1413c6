#pragma once

#include <string>
#include <vector>

namespace cohomlab {

inline constexpr const char* kReportSchema = "v1";

// One asserted check: `value comparison limit`, e.g. residual <= 1e-3.
struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string comparison;  // "<=", ">=", "==" or "" for boolean checks
};

Check check_le(std::string name, double value, double limit);
Check check_ge(std::string name, double value, double limit);
// |value - target| <= tol, reported as comparison "=~" with limit = tol.
Check check_near(std::string name, double value, double target, double tol);
Check check_true(std::string name, bool pass);

// Report envelope shared by every command:
//   {"schema": "v1", "command", "config", "wall_time_s", "checks",
//    "all_pass", "result"}
// `config` and `result` are JSON texts. Keys are emitted sorted, so equal
// inputs give byte-identical output apart from wall_time_s.
class Report {
 public:
  Report(std::string command, std::string config_json);

  void add(Check c);
  void set_result(std::string json_text);
  void set_wall_time(double seconds);

  bool all_pass() const;
  const std::vector<Check>& checks() const { return checks_; }

  std::string to_json() const;
  // The CSV body preceded by "# key: value" lines for schema, command,
  // config, wall time and each check.
  std::string to_csv(const std::string& body) const;

 private:
  std::string command_;
  std::string config_;
  std::string result_ = "null";
  double wall_time_ = 0.0;
  std::vector<Check> checks_;
};

}  // namespace cohomlab
