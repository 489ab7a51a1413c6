#include "cohomlab/reports.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace cohomlab {

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json check_json(const Check& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}, {"limit", number(c.limit)},
          {"comparison", c.comparison}};
}

}  // namespace

Check check_le(std::string name, double value, double limit) {
  return {std::move(name), value <= limit, value, limit, "<="};
}

Check check_ge(std::string name, double value, double limit) {
  return {std::move(name), value >= limit, value, limit, ">="};
}

Check check_near(std::string name, double value, double target, double tol) {
  return {std::move(name), std::abs(value - target) <= tol, value, tol, "=~" + nlohmann::json(target).dump()};
}

Check check_true(std::string name, bool pass) { return {std::move(name), pass, pass ? 1.0 : 0.0, 1.0, ""}; }

Report::Report(std::string command, std::string config_json)
    : command_(std::move(command)), config_(std::move(config_json)) {}

void Report::add(Check c) { checks_.push_back(std::move(c)); }
void Report::set_result(std::string json_text) { result_ = std::move(json_text); }
void Report::set_wall_time(double seconds) { wall_time_ = seconds; }

bool Report::all_pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

std::string Report::to_json() const {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : checks_) checks.push_back(check_json(c));
  return nlohmann::json{{"schema", kReportSchema},
                        {"command", command_},
                        {"config", nlohmann::json::parse(config_)},
                        {"wall_time_s", wall_time_},
                        {"checks", checks},
                        {"all_pass", all_pass()},
                        {"result", nlohmann::json::parse(result_)}}
             .dump(2) +
         "\n";
}

std::string Report::to_csv(const std::string& body) const {
  std::ostringstream os;
  os << "# schema: " << kReportSchema << '\n';
  os << "# command: " << command_ << '\n';
  os << "# config: " << nlohmann::json::parse(config_).dump() << '\n';
  os << "# wall_time_s: " << nlohmann::json(wall_time_).dump() << '\n';
  for (const auto& c : checks_) os << "# check: " << check_json(c).dump() << '\n';
  os << "# all_pass: " << (all_pass() ? "true" : "false") << '\n';
  os << body;
  return os.str();
}

}  // namespace cohomlab
