#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cohomlab/errors.hpp"
#include "cohomlab/rep_models.hpp"

namespace cohomlab {

// Malformed command line or config; exit status 1, no report.
class UsageError : public Error {
 public:
  using Error::Error;
};

// --help on the command line; what() is the help text.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

enum class Command : std::uint8_t { VerifyAlgebra, Solve, Obstruct, Classify, Counterexample, Sweep, Density };
std::string to_string(Command c);
Command parse_command(const std::string& s);

enum class OutputFormat : std::uint8_t { Json, Csv };

// Environment variable naming the directory for relative or default report
// paths.
inline constexpr const char* kOutDirEnv = "COHOMLAB_OUT_DIR";

struct RunConfig {
  Command command = Command::VerifyAlgebra;
  RepModel model;
  GridProfile grid = GridProfile::Default;
  std::map<std::string, double> tolerances;  // overrides of named check limits
  std::filesystem::path out;                 // empty: <command>.<format>
  OutputFormat format = OutputFormat::Json;

  // solve / obstruct / sweep
  std::string rhs;  // empty: bump-derivative (gaussian-derivative for sweep)
  std::string method = "primitive";  // primitive or fourier
  std::size_t axis = 1;
  std::string expect;  // obstruct: "", "vanishes" or "fails"
  // counterexample
  std::string case_name = "re4";  // re4, case1, case2
  int j = 3;
  // sweep
  std::vector<double> t_samples;
  int s = 0;
  int loss = 6;
  std::size_t samples = 64;
  // density
  std::string gen = "u_2_1";
  std::string vector = "coboundary";  // coboundary, case1, bump
  int window = 3;

  std::string to_json() const;
};

// Parses argv (argv[0] is the program name). Flags override values from a
// TOML/INI file given with --config. Throws UsageError, or HelpRequested for
// --help.
RunConfig parse_command_line(int argc, const char* const* argv);

// Command-specific consistency; throws UsageError.
void validate(const RunConfig& config);

// Path the report is written to, after applying COHOMLAB_OUT_DIR.
std::filesystem::path report_path(const RunConfig& config);

// Runs the command and writes one report file. Returns 0 when every check
// passes and 2 otherwise; library errors during the run become a failed
// check. Throws UsageError for invalid configs and Error for IO failures.
int dispatch(const RunConfig& config);

// parse + validate + dispatch with the exit-status contract: 0 pass, 2 check
// failure, 1 usage or IO error (message on `err`, no report).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cohomlab
