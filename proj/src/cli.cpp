#include "cohomlab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "cohomlab/cohomology_solver.hpp"
#include "cohomlab/counterexamples.hpp"
#include "cohomlab/reports.hpp"
#include "cohomlab/root_combinatorics.hpp"

namespace cohomlab {

namespace {

constexpr Complex kI{0.0, 1.0};

const std::vector<std::pair<Command, std::string>> kCommands = {
    {Command::VerifyAlgebra, "verify-algebra"}, {Command::Solve, "solve"},
    {Command::Obstruct, "obstruct"},            {Command::Classify, "classify"},
    {Command::Counterexample, "counterexample"}, {Command::Sweep, "sweep"},
    {Command::Density, "density"}};

const std::set<std::string> kTolerances = {"bracket", "residual", "obstruction", "exponent",
                                           "integral", "plancherel", "spread"};

// Default check limits; --tol name=value overrides.
double limit(const RunConfig& c, const std::string& name, double fallback) {
  const auto it = c.tolerances.find(name);
  return it == c.tolerances.end() ? fallback : it->second;
}

std::string default_rhs(const RunConfig& c) {
  if (!c.rhs.empty()) return c.rhs;
  return c.command == Command::Sweep ? "gaussian-derivative" : "bump-derivative";
}

// The generator whose cohomological equation a model's solvers address.
std::string flow_generator(const RepModel& m) {
  switch (m.kind) {
    case ModelKind::Rho:
    case ModelKind::DualRho: return "V";
    case ModelKind::Pi:
    case ModelKind::Tau: return "U1";
    case ModelKind::IndLine: return "u_2_1";
  }
  return "V";
}

SampledFunction make_rhs(const std::string& name, const RepModel& m, const std::vector<Grid1D>& grids,
                         GridProfile profile) {
  if (name == "bump-derivative" || name == "gaussian-derivative") {
    SweepProblem p;
    p.rhs = name;
    return sweep_rhs(p, grids);
  }
  if (name == "bump-bump") {
    std::vector<double> centers(grids.size(), 0.0);
    centers[0] = 4.0;
    return bump(grids, 0.5, 2.0, centers);
  }
  if (name == "coboundary") return apply_generator(m, flow_generator(m), bump_family(m, grids)[0]);
  if (name == "re4") return remark_re4_example(profile).g;
  throw UsageError("unknown right-hand side '" + name + "'");
}

// max over the bump family of |[a,b] f - (exact bracket) f| / (|ab f| + |ba f| + |f|).
struct BracketRow {
  std::string a, b;
  double defect = 0.0;
};

std::vector<BracketRow> bracket_rows(const RepModel& m, const std::vector<Grid1D>& grids,
                                     std::vector<std::string>& skipped) {
  const auto family = bump_family(m, grids);
  const auto alphabet = m.alphabet();
  std::vector<BracketRow> rows;
  for (std::size_t p = 0; p < alphabet.size(); ++p)
    for (std::size_t q = p + 1; q < alphabet.size(); ++q) {
      const auto& a = alphabet[p];
      const auto& b = alphabet[q];
      const auto br = bracket(generator_matrix(m, a), generator_matrix(m, b));
      std::vector<std::pair<std::string, double>> terms;
      bool ok = true;
      for (const auto& [basis, c] : br.decompose()) {
        const auto gen = generator_for(m, basis);
        if (!gen) {
          ok = false;
          break;
        }
        terms.emplace_back(*gen, static_cast<double>(c));
      }
      if (!ok) {
        skipped.push_back("[" + a + "," + b + "]");
        continue;
      }
      BracketRow row{a, b, 0.0};
      for (const auto& f : family) {
        const auto ab = apply_word(m, {a, b}, f);
        const auto ba = apply_word(m, {b, a}, f);
        auto expected = SampledFunction::zeros(f.grids());
        for (const auto& [gen, c] : terms) expected = expected + c * apply_generator(m, gen, f);
        const double scale = l2_norm(ab) + l2_norm(ba) + l2_norm(f);
        row.defect = std::max(row.defect, l2_norm(ab - ba - expected) / scale);
      }
      rows.push_back(row);
    }
  return rows;
}

using Json = nlohmann::json;

Json parse_json(const std::string& s) { return Json::parse(s); }

struct Outcome {
  Json result;
  std::string csv;  // body for --format csv
};

Outcome run_verify_algebra(const RunConfig& c, Report& r) {
  const auto grids = model_grids(c.model, c.grid);
  const double tol = limit(c, "bracket", grids.size() == 3 ? 5e-3 : 1e-4);
  std::vector<std::string> skipped;
  Json rows = Json::array();
  for (const auto& row : bracket_rows(c.model, grids, skipped)) {
    const std::string name = "[" + row.a + "," + row.b + "]";
    r.add(check_le(name, row.defect, tol));
    rows.push_back({{"pair", name}, {"defect", row.defect}});
  }
  return {{{"brackets", rows}, {"skipped", skipped}, {"samples_per_axis", grids[0].n}}, ""};
}

Outcome run_solve(const RunConfig& c, Report& r) {
  const auto grids = model_grids(c.model, c.grid);
  const auto g = make_rhs(default_rhs(c), c.model, grids, c.grid);
  const double tol = limit(c, "residual", 1e-3);
  Json result;
  if (c.method == "primitive") {
    ObstructionReport obstruction;
    const auto f = primitive_solve(g, 1, ObstructionMode::Strict, &obstruction, kDerivedBoundaryTolerance);
    const auto h = -kI * f;
    auto report = verify_solution(c.model, "V", h, apply_generator(c.model, "Y2", g, kDerivedBoundaryTolerance));
    instantiate_primitive_bound(report, c.model, h, g);
    r.add(check_le("residual V h = Y2 g", report.residual_rel, tol));
    r.add(check_true("primitive bound", report.bound_holds));
    result = {{"equation", "V h = Y2 g"}, {"obstruction", parse_json(obstruction.to_json())},
              {"solve", parse_json(report.to_json())}};
  } else {
    const auto gen = flow_generator(c.model);
    const auto out = fourier_solve(g, c.model);
    if (const auto* flag = std::get_if<DivergenceFlag>(&out)) {
      r.add(check_le("zero-bin energy ratio", flag->ratio, kDivergenceThreshold));
      result = {{"equation", gen + " f = g"}, {"divergence", parse_json(flag->to_json())}};
    } else {
      const auto report = verify_solution(c.model, gen, std::get<SampledFunction>(out), g);
      r.add(check_le("residual " + gen + " f = g", report.residual_rel, tol));
      result = {{"equation", gen + " f = g"}, {"solve", parse_json(report.to_json())}};
    }
  }
  return {result, ""};
}

Outcome run_obstruct(const RunConfig& c, Report& r) {
  const auto grids = model_grids(c.model, c.grid);
  const auto g = make_rhs(default_rhs(c), c.model, grids, c.grid);
  std::optional<double> tol;
  if (c.tolerances.count("obstruction")) tol = c.tolerances.at("obstruction");
  const auto rep = obstruction_integral(g, c.axis, tol, kDerivedBoundaryTolerance);
  if (!c.expect.empty()) {
    const bool vanishes = rep.verdict == ObstructionVerdict::Vanishes;
    r.add(check_true("verdict " + c.expect, vanishes == (c.expect == "vanishes")));
  }
  return {parse_json(rep.to_json()), ""};
}

Outcome run_classify(const RunConfig& c, Report& r) {
  const auto table = rigidity_table(c.model.n);
  const auto verdict_of = [&](int i, int j, int k, int l) -> std::optional<Verdict> {
    for (const auto& row : table.rows)
      if ((row.p.i == i && row.p.j == j && row.q.i == k && row.q.j == l) ||
          (row.p.i == k && row.p.j == l && row.q.i == i && row.q.j == j))
        return row.verdict;
    return std::nullopt;
  };
  if (c.model.n == 3) {
    const auto it = table.counts.find(Verdict::StrongRigid);
    r.add(check_le("StrongRigid pairs", it == table.counts.end() ? 0.0 : it->second, 0.0));
  }
  if (c.model.n == 4) {
    r.add(check_true("(u_1_2, u_3_4) StrongRigid", verdict_of(1, 2, 3, 4) == Verdict::StrongRigid));
    r.add(check_true("(u_1_2, u_1_3) WeakObstructed", verdict_of(1, 2, 1, 3) == Verdict::WeakObstructed));
  }
  return {parse_json(table.to_json()), table.to_csv()};
}

Outcome run_counterexample(const RunConfig& c, Report& r) {
  const double exp_tol = limit(c, "exponent", 0.1);
  if (c.case_name == "re4") {
    const auto ex = remark_re4_example(c.grid);
    const auto obstruction = obstruction_integral(ex.g, 1);
    r.add(check_le("|int h|", std::abs(ex.h_integral), limit(c, "integral", 1e-10)));
    r.add(check_le("slice integrals", obstruction.max_abs, limit(c, "obstruction", 1e-8)));
    r.add(check_true("Diverges", ex.certificate.verdict == DivergenceVerdict::Diverges));
    r.add(check_near("fitted exponent", ex.certificate.fitted_exponent, 1.0, exp_tol));
    Json result = parse_json(ex.to_json());
    result["obstruction_max_abs"] = obstruction.max_abs;
    return {result, ""};
  }
  const int n = c.model.n;
  if (c.case_name == "case1") {
    const auto pair = build_case1(n, c.j, c.model.t, c.model.parity, c.grid);
    const auto cert = case1_candidate_density(pair.g);
    r.add(check_le("relation residual", pair.relation_residual, limit(c, "residual", 1e-6)));
    r.add(check_true("Diverges", cert.verdict == DivergenceVerdict::Diverges));
    r.add(check_near("fitted exponent", cert.fitted_exponent, 1.0, exp_tol));
    return {{{"pair", parse_json(pair.to_json())}, {"certificate", parse_json(cert.to_json())}}, ""};
  }
  const auto pair = build_case2(n, c.j, c.model.t, c.model.parity, c.grid);
  r.add(check_le("relation residual", pair.relation_residual, limit(c, "residual", 1e-4)));
  return {{{"pair", parse_json(pair.to_json())}}, ""};
}

Outcome run_sweep(const RunConfig& c, Report& r) {
  SweepProblem p;
  p.family = c.model.kind;
  p.r = c.model.r;
  p.z = c.model.z;
  p.rhs = default_rhs(c);
  p.s = c.s;
  p.loss = c.loss;
  p.n = c.samples;
  const auto ts = c.t_samples.empty() ? std::vector<double>{0.5, 1.0, 2.0, 4.0, 8.0} : c.t_samples;
  const auto rep = sweep_fibers(p, ts);
  for (const auto& e : rep.entries)
    r.add(check_true("fiber t=" + Json(e.t).dump() + (e.error.empty() ? "" : ": " + e.error), e.error.empty()));
  if (!rep.entries.empty()) {
    r.add(check_le("ratio spread", rep.spread, limit(c, "spread", 2.0)));
    r.add(check_le("|log-log slope|", std::abs(rep.slope), 0.1));
  }
  return {parse_json(rep.to_json()), ""};
}

Outcome run_density(const RunConfig& c, Report& r) {
  const auto grids = model_grids(c.model, c.grid);
  SampledFunction v = bump_family(c.model, grids)[0];
  if (c.vector == "coboundary") {
    v = apply_generator(c.model, c.gen, v);
  } else if (c.vector == "case1") {
    v = build_case1(c.model.n, c.j, c.model.t, c.model.parity, c.grid).g;
  }
  const auto d = spectral_density(v, c.model, c.gen);
  const double norm2 = std::pow(l2_norm(v), 2);
  r.add(check_le("Plancherel", std::abs(d.total_energy() / norm2 - 1.0), limit(c, "plancherel", 1e-6)));
  Json result = parse_json(d.to_json());
  result["limit_at_zero"] = density_limit_at_zero(d, c.window);
  result["window"] = c.window;
  return {result, d.to_csv()};
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [k, name] : kCommands)
    if (k == c) return name;
  return "?";
}

Command parse_command(const std::string& s) {
  for (const auto& [k, name] : kCommands)
    if (name == s) return k;
  throw UsageError("unknown command '" + s + "'");
}

std::string RunConfig::to_json() const {
  Json tol = Json::object();
  for (const auto& [k, v] : tolerances) tol[k] = v;
  Json j{{"command", to_string(command)},
         {"model", parse_json(model.to_json())},
         {"grid", to_string(grid)},
         {"tolerances", tol},
         {"out", out.string()},
         {"format", format == OutputFormat::Json ? "json" : "csv"}};
  switch (command) {
    case Command::Solve:
      j["rhs"] = default_rhs(*this);
      j["method"] = method;
      break;
    case Command::Obstruct:
      j["rhs"] = default_rhs(*this);
      j["axis"] = axis;
      j["expect"] = expect;
      break;
    case Command::Counterexample:
      j["case"] = case_name;
      j["n"] = model.n;
      j["j"] = this->j;
      break;
    case Command::Sweep:
      j["rhs"] = default_rhs(*this);
      j["t_samples"] = t_samples;
      j["s"] = s;
      j["loss"] = loss;
      j["samples"] = samples;
      break;
    case Command::Density:
      j["gen"] = gen;
      j["vector"] = vector;
      j["window"] = window;
      j["j"] = this->j;
      break;
    case Command::Classify: j["n"] = model.n; break;
    case Command::VerifyAlgebra: break;
  }
  return j.dump();
}

RunConfig parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"Cohomological equations in explicit unitary representation models", "cohomlab"};
  app.set_config("--config", "", "TOML/INI file with option values (flags override it)");
  app.allow_config_extras(false);

  std::string command, model = "rho", parity = "plus", grid = "default", format = "json", out;
  double t = 0.0, r = 0.0, z = 1.0;
  int n = 3;
  bool fourier = false;
  std::vector<std::string> tols;
  RunConfig c;
  std::string rhs;

  std::vector<std::string> names;
  for (const auto& kv : kCommands) names.push_back(kv.second);
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(names));
  app.add_option("--model", model, "rho, dual_rho, pi, tau or ind_line")
      ->check(CLI::IsMember({"rho", "dual_rho", "pi", "tau", "ind_line"}));
  app.add_option("--t", t, "Model parameter t");
  app.add_option("--r", r, "Model parameter r (pi, tau)");
  app.add_option("--z", z, "Fiber z (tau)");
  app.add_option("--n", n, "sl(n) rank for ind_line, classify and counterexample");
  app.add_option("--parity", parity, "plus or minus (ind_line)")->check(CLI::IsMember({"plus", "minus"}));
  app.add_flag("--fourier", fourier, "dual_rho on the Fourier side");
  app.add_option("--grid", grid, "Grid profile")->check(CLI::IsMember({"default", "fine", "coarse"}));
  app.add_option("--tol", tols, "Check limit override name=value (repeatable)");
  app.add_option("--out", out, "Report path (relative paths resolve under $COHOMLAB_OUT_DIR)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--rhs", rhs, "Right-hand side recipe");
  app.add_option("--method", c.method, "primitive or fourier")->check(CLI::IsMember({"primitive", "fourier"}));
  app.add_option("--axis", c.axis, "Integration axis (obstruct)");
  app.add_option("--expect", c.expect, "Expected obstruction verdict")->check(CLI::IsMember({"vanishes", "fails"}));
  app.add_option("--case", c.case_name, "re4, case1 or case2")->check(CLI::IsMember({"re4", "case1", "case2"}));
  app.add_option("--j", c.j, "Root index j (counterexample, density)");
  app.add_option("--t-samples", c.t_samples, "Fiber parameters t (sweep)")->delimiter(',');
  app.add_option("--s", c.s, "Sobolev index of the solution (sweep)");
  app.add_option("--loss", c.loss, "Sobolev loss (sweep)");
  app.add_option("--samples", c.samples, "Samples per axis (sweep)");
  app.add_option("--gen", c.gen, "Generator (density)");
  app.add_option("--vector", c.vector, "coboundary, case1 or bump (density)")
      ->check(CLI::IsMember({"coboundary", "case1", "bump"}));
  app.add_option("--window", c.window, "Bins averaged at chi = 0 (density)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  c.command = parse_command(command);
  c.rhs = rhs;
  c.out = out;
  c.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  c.grid = parse_grid_profile(grid);
  for (const auto& item : tols) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + item + "'");
    const auto key = item.substr(0, eq);
    if (!kTolerances.count(key)) throw UsageError("unknown tolerance '" + key + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() - eq - 1 || !(v >= 0.0)) throw UsageError("bad tolerance value in '" + item + "'");
    c.tolerances[key] = v;
  }
  try {
    const ModelKind kind = parse_model_kind(model);
    switch (kind) {
      case ModelKind::Rho: c.model = RepModel::rho(t); break;
      case ModelKind::DualRho: c.model = RepModel::dual_rho(t, fourier); break;
      case ModelKind::Pi: c.model = RepModel::pi(t, r); break;
      case ModelKind::Tau: c.model = RepModel::tau(t, r, z); break;
      case ModelKind::IndLine: c.model = RepModel::ind_line(n, t, parse_parity(parity)); break;
    }
    c.model.n = n;
    c.model.parity = parse_parity(parity);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

void validate(const RunConfig& c) {
  const auto kind = c.model.kind;
  const bool planar = kind == ModelKind::Rho || kind == ModelKind::Tau;
  if (c.format == OutputFormat::Csv && c.command != Command::Classify && c.command != Command::Density)
    throw UsageError("csv output is available for classify and density only");
  const std::set<std::string> rhs_names = {"bump-derivative", "gaussian-derivative", "bump-bump", "coboundary", "re4"};
  if (!c.rhs.empty() && !rhs_names.count(c.rhs)) throw UsageError("unknown right-hand side '" + c.rhs + "'");
  const auto rhs = default_rhs(c);
  const bool planar_rhs = rhs == "bump-derivative" || rhs == "gaussian-derivative" || rhs == "re4";
  switch (c.command) {
    case Command::VerifyAlgebra:
    case Command::Classify:
      if (c.command == Command::Classify && (c.model.n < 2 || c.model.n > 8))
        throw UsageError("classify needs 2 <= n <= 8");
      break;
    case Command::Solve:
      if (c.method == "primitive" && kind != ModelKind::Rho) throw UsageError("the primitive method needs --model rho");
      if (c.method == "fourier" && !planar) throw UsageError("the fourier method needs --model rho or tau");
      if (planar_rhs && !planar) throw UsageError("right-hand side '" + rhs + "' lives on the rho/tau plane");
      break;
    case Command::Obstruct:
      if (planar_rhs && !planar) throw UsageError("right-hand side '" + rhs + "' lives on the rho/tau plane");
      if (c.axis >= c.model.dimension()) throw UsageError("--axis is out of range for the model");
      break;
    case Command::Counterexample:
      if (c.case_name != "re4" && (c.model.n < 3 || c.model.n > 4 || c.j < 3 || c.j > c.model.n))
        throw UsageError("counterexample pairs need n in {3, 4} and 3 <= j <= n");
      break;
    case Command::Sweep:
      if (!planar) throw UsageError("sweep needs --model rho or tau");
      if (rhs != "bump-derivative" && rhs != "gaussian-derivative")
        throw UsageError("sweep right-hand sides are bump-derivative or gaussian-derivative");
      if (c.samples < 8) throw UsageError("--samples must be at least 8");
      if (c.s < 0 || c.loss < 0) throw UsageError("--s and --loss must be nonnegative");
      break;
    case Command::Density:
      if (!c.model.has_generator(c.gen)) throw UsageError("generator '" + c.gen + "' is not in the model alphabet");
      if (c.window < 2) throw UsageError("--window must be at least 2");
      if (c.vector == "case1" && kind != ModelKind::IndLine) throw UsageError("--vector case1 needs --model ind_line");
      break;
  }
}

std::filesystem::path report_path(const RunConfig& c) {
  std::filesystem::path p = c.out;
  if (p.empty()) p = to_string(c.command) + (c.format == OutputFormat::Csv ? ".csv" : ".json");
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) p = std::filesystem::path(dir) / p;
  }
  return p;
}

int dispatch(const RunConfig& c) {
  validate(c);
  const auto path = report_path(c);
  Report report(to_string(c.command), c.to_json());
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    static const std::map<Command, std::function<Outcome(const RunConfig&, Report&)>> runners = {
        {Command::VerifyAlgebra, run_verify_algebra}, {Command::Solve, run_solve},
        {Command::Obstruct, run_obstruct},           {Command::Classify, run_classify},
        {Command::Counterexample, run_counterexample}, {Command::Sweep, run_sweep},
        {Command::Density, run_density}};
    outcome = runners.at(c.command)(c, report);
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    report.add(check_true(std::string("completed: ") + e.what(), false));
    outcome.result = {{"error", e.what()}};
  }
  report.set_wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  report.set_result(outcome.result.dump());

  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open report file " + path.string());
  file << (c.format == OutputFormat::Csv ? report.to_csv(outcome.csv) : report.to_json());
  if (!file.flush()) throw Error("cannot write report file " + path.string());
  return report.all_pass() ? 0 : 2;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_command_line(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "cohomlab: " << e.what() << '\n';
    return 1;
  }
  try {
    const int code = dispatch(config);
    out << to_string(config.command) << ": " << (code == 0 ? "PASS" : "FAIL") << " -> " << report_path(config).string()
        << '\n';
    return code;
  } catch (const Error& e) {
    err << "cohomlab: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cohomlab
