#include "cohomlab/cohomology_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cohomlab/errors.hpp"
#include "generator_id.hpp"

namespace cohomlab {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();
// Edge tolerance that skips the check (intermediate results).
constexpr double kUnchecked = kInf;

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

// Measure of the cell at index k of a grid.
double cell(const Grid1D& g, std::size_t k) { return g.spacing() * g.density(k); }

// Index of a sample within the transverse slab (all axes except `axis`).
std::size_t transverse_index(const SampledFunction& f, std::size_t axis, std::size_t flat) {
  const std::size_t stride = f.stride(axis);
  const std::size_t n = f.extent(axis);
  return (flat / (stride * n)) * stride + flat % stride;
}

// Product of cell measures over all axes except `axis`.
double transverse_measure(const SampledFunction& f, std::size_t axis, std::size_t flat) {
  const auto idx = f.unravel(flat);
  double m = 1.0;
  for (std::size_t a = 0; a < f.dims(); ++a)
    if (a != axis) m *= cell(f.grid(a), idx[a]);
  return m;
}

void check_axis(const SampledFunction& f, std::size_t axis) {
  if (axis >= f.dims()) throw DimensionError("axis " + std::to_string(axis) + " out of range");
}

void check_edges(const SampledFunction& f, std::size_t axis, double tol) {
  const double peak = f.max_abs();
  if (peak == 0.0) return;
  const std::size_t n = f.extent(axis), stride = f.stride(axis);
  double edge = 0.0;
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const std::size_t k = (flat / stride) % n;
    if (k < 2 || k + 2 >= n) edge = std::max(edge, std::abs(f[flat]));
  }
  if (edge > tol * peak)
    throw BoundaryError("function does not vanish at the ends of axis " + std::to_string(axis));
}

// Coordinate realising a generator as multiplication by i*chi, possibly after
// a Fourier transform along the axis.
struct Diagonalization {
  std::size_t axis = 0;
  double sign = 1.0;
  bool fourier = false;
};

std::optional<Diagonalization> diagonalize(const RepModel& m, const std::string& gen) {
  switch (m.kind) {
    case ModelKind::Rho:
      if (gen == "Y1") return Diagonalization{1, -1.0, false};
      if (gen == "Y2") return Diagonalization{0, 1.0, false};
      break;
    case ModelKind::DualRho:
      if (gen == "Y2") return Diagonalization{0, 1.0, false};
      if (m.fourier && gen == "V") return Diagonalization{1, -1.0, false};
      break;
    case ModelKind::Pi:
      if (gen == "Y1") return Diagonalization{0, 1.0, false};
      if (gen == "Y2") return Diagonalization{1, -1.0, false};
      if (gen == "Y3") return Diagonalization{2, -1.0, false};
      break;
    case ModelKind::IndLine: {
      const auto id = detail::parse_generator(gen);
      if (id.indexed && id.basis.kind == BasisElement::Kind::Root && id.basis.j == 1 && id.basis.i >= 2)
        return Diagonalization{static_cast<std::size_t>(id.basis.i - 2), -1.0, true};
      break;
    }
    case ModelKind::Tau:
      break;
  }
  return std::nullopt;
}

// Grid with points -x_{n-1-k} of g.
Grid1D negated(const Grid1D& g) {
  Grid1D out = g;
  const double h = g.spacing();
  out.lo = -g.hi + (1.0 - 2.0 * g.offset) * h;
  out.hi = out.lo + static_cast<double>(g.n) * h;
  return out;
}

}  // namespace

std::string to_string(ObstructionVerdict v) { return v == ObstructionVerdict::Vanishes ? "Vanishes" : "Fails"; }

std::string ObstructionReport::to_json() const {
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& c : per_slice_integral) slices.push_back({c.real(), c.imag()});
  return nlohmann::json{{"per_slice_integral", slices},
                        {"max_abs", max_abs},
                        {"verdict", to_string(verdict)},
                        {"tolerance_used", tolerance_used}}
      .dump(2);
}

double default_obstruction_tolerance(const SampledFunction& g, std::size_t axis) {
  check_axis(g, axis);
  return 1e-8 * l2_norm(g) * (g.grid(axis).hi - g.grid(axis).lo);
}

ObstructionReport obstruction_integral(const SampledFunction& g, std::size_t axis, std::optional<double> tol,
                                       double boundary_tol) {
  check_axis(g, axis);
  check_edges(g, axis, boundary_tol);
  const Grid1D& ax = g.grid(axis);
  const std::size_t n = ax.n, stride = g.stride(axis);
  ObstructionReport r;
  r.per_slice_integral.assign(g.size() / n, Complex{});
  for (std::size_t flat = 0; flat < g.size(); ++flat)
    r.per_slice_integral[transverse_index(g, axis, flat)] += g[flat] * cell(ax, (flat / stride) % n);
  for (const auto& c : r.per_slice_integral) r.max_abs = std::max(r.max_abs, std::abs(c));
  r.tolerance_used = tol.value_or(default_obstruction_tolerance(g, axis));
  r.verdict = r.max_abs <= r.tolerance_used ? ObstructionVerdict::Vanishes : ObstructionVerdict::Fails;
  return r;
}

SampledFunction primitive_solve(const SampledFunction& g, std::size_t axis, ObstructionMode mode,
                                ObstructionReport* report, double boundary_tol) {
  const auto obstruction = obstruction_integral(g, axis, std::nullopt, boundary_tol);
  if (report) *report = obstruction;
  if (obstruction.verdict == ObstructionVerdict::Fails && mode == ObstructionMode::Strict)
    throw ObstructionError("slice integrals do not vanish (max " + std::to_string(obstruction.max_abs) +
                           ", tolerance " + std::to_string(obstruction.tolerance_used) + ")");
  const std::size_t n = g.extent(axis), stride = g.stride(axis);
  const double h = g.grid(axis).spacing();
  // Euler-Maclaurin end corrections of the trapezoid tail through h^6.
  const auto d1 = differentiate(g, axis, boundary_tol);
  const auto d3 = differentiate(differentiate(d1, axis, kUnchecked), axis, kUnchecked);
  const auto d5 = differentiate(differentiate(d3, axis, kUnchecked), axis, kUnchecked);
  const double c1 = h * h / 12.0, c3 = -std::pow(h, 4) / 720.0, c5 = std::pow(h, 6) / 30240.0;
  std::vector<Complex> out(g.size());
  // Walk every line along the axis from the top edge down.
  for (std::size_t base = 0; base < g.size(); ++base) {
    if ((base / stride) % n != 0) continue;
    Complex above{};  // sum of g over samples strictly above k
    for (std::size_t k = n; k-- > 0;) {
      const std::size_t flat = base + k * stride;
      const Complex tail = h * (0.5 * g[flat] + above) + c1 * d1[flat] + c3 * d3[flat] + c5 * d5[flat];
      out[flat] = -tail;
      above += g[flat];
    }
  }
  return g.with_values(std::move(out));
}

std::string SolveReport::to_json() const {
  return nlohmann::json{{"residual_rel", residual_rel},
                        {"solution_norm", solution_norm},
                        {"bound_lhs", finite_or_null(bound_lhs)},
                        {"bound_rhs", finite_or_null(bound_rhs)},
                        {"bound_holds", bound_holds},
                        {"bound_kind", bound_kind}}
      .dump(2);
}

SolveReport verify_solution(const RepModel& model, const std::string& gen, const SampledFunction& f,
                            const SampledFunction& rhs, double boundary_tol) {
  if (!f.same_space(rhs)) throw DimensionError("solution and right-hand side live on different grids");
  SolveReport r;
  const auto af = apply_generator(model, gen, f, boundary_tol);
  r.residual_rel = safe_ratio(l2_norm(af - rhs), l2_norm(rhs));
  r.solution_norm = l2_norm(f);
  r.bound_lhs = r.solution_norm;
  r.bound_rhs = kInf;
  r.bound_holds = true;
  return r;
}

void instantiate_primitive_bound(SolveReport& report, const RepModel& model, const SampledFunction& f,
                                 const SampledFunction& g, double slack) {
  const auto y1g = apply_generator(model, "Y1", g, kDerivedBoundaryTolerance);
  const auto y1y1g = apply_generator(model, "Y1", y1g, kUnchecked);
  report.bound_lhs = l2_norm(f);
  report.bound_rhs = 2.0 * (l2_norm(g) + l2_norm(y1g) + l2_norm(y1y1g)) * (1.0 + slack);
  report.bound_holds = report.bound_lhs <= report.bound_rhs;
  report.bound_kind = "primitive";
}

void instantiate_sobolev_ratio(SolveReport& report, const RepModel& model, const SampledFunction& f,
                               const SampledFunction& g, int s, int loss) {
  report.bound_lhs = sobolev_norm(model, f, s, kDerivedBoundaryTolerance);
  report.bound_rhs = sobolev_norm(model, g, s + loss, kDerivedBoundaryTolerance);
  report.bound_holds = report.bound_lhs <= report.bound_rhs;
  report.bound_kind = "sobolev:" + std::to_string(s) + "/" + std::to_string(s + loss);
}

std::string DivergenceFlag::to_json() const {
  return nlohmann::json{{"zero_bin_energy", zero_bin_energy},
                        {"reference_energy", reference_energy},
                        {"ratio", finite_or_null(ratio)}}
      .dump(2);
}

FourierSolveResult fourier_solve(const SampledFunction& g, const RepModel& model) {
  if (model.kind != ModelKind::Rho && model.kind != ModelKind::Tau)
    throw DomainError("fourier_solve needs a Rho or Tau model");
  if (g.dims() != 2) throw DimensionError("fourier_solve needs a 2-D function");
  if (g.grid(0).samples_zero()) throw SingularGridError("x grid samples x = 0");
  const auto G = fourier_axis(g, 1, Direction::Forward);
  const Grid1D& xg = G.grid(0);
  const Grid1D& fg = G.grid(1);
  const std::size_t nx = xg.n, ny = fg.n, m0 = ny / 2;
  const double dxi = fg.spacing();

  std::vector<double> energy(ny, 0.0);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t m = 0; m < ny; ++m) energy[m] += std::norm(G[i * ny + m]) * cell(xg, i);
  DivergenceFlag flag;
  flag.zero_bin_energy = energy[m0] / (dxi * dxi);
  for (std::size_t m = 0; m < ny; ++m)
    if (m != m0) flag.reference_energy = std::max(flag.reference_energy, energy[m] / std::pow(fg.point(m), 2));
  if (flag.reference_energy == 0.0 && flag.zero_bin_energy == 0.0) return SampledFunction::zeros(g.grids());
  flag.ratio = flag.reference_energy > 0.0 ? flag.zero_bin_energy / flag.reference_energy : kInf;
  if (flag.ratio >= kDivergenceThreshold) return flag;

  // Continuous limit at xi = 0: i/x dg^/dxi(x, 0) = (2 pi)^-1/2 / x * int y g dy.
  const Grid1D& yg = g.grid(1);
  std::vector<Complex> moment(nx);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t k = 0; k < yg.n; ++k) moment[i] += yg.point(k) * g[i * yg.n + k] * cell(yg, k);
  std::vector<Complex> F(G.size());
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = xg.point(i);
    for (std::size_t m = 0; m < ny; ++m) {
      const std::size_t flat = i * ny + m;
      if (m == m0) {
        F[flat] = moment[i] / (x * std::sqrt(2.0 * std::numbers::pi));
      } else {
        F[flat] = kI * G[flat] / (x * fg.point(m));
      }
    }
  }
  return fourier_axis(G.with_values(std::move(F)), 1, Direction::Inverse, g.grid(1));
}

double SpectralDensity::total_energy() const {
  double s = 0.0;
  for (double d : density) s += d * d;
  return s * chi_grid.spacing();
}

std::string SpectralDensity::to_json() const {
  return nlohmann::json{{"chi", chi_grid.points()}, {"density", density}}.dump(2);
}

std::string SpectralDensity::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "chi,density\n";
  for (std::size_t k = 0; k < density.size(); ++k) os << chi_grid.point(k) << ',' << density[k] << '\n';
  return os.str();
}

SpectralDensity spectral_density(const SampledFunction& v, const RepModel& model, const std::string& gen) {
  if (!model.has_generator(gen)) throw AlphabetError("generator " + gen + " is not in the model alphabet");
  const auto diag = diagonalize(model, gen);
  if (!diag) throw NotDiagonalizedError("generator " + gen + " has no multiplication or translation realisation");
  if (v.dims() != model.dimension()) throw DimensionError("function does not match the model");
  const SampledFunction w = diag->fourier ? fourier_axis(v, diag->axis, Direction::Forward) : v;
  const Grid1D& ax = w.grid(diag->axis);
  const std::size_t n = ax.n, stride = w.stride(diag->axis);
  std::vector<double> level(n, 0.0);
  for (std::size_t flat = 0; flat < w.size(); ++flat)
    level[(flat / stride) % n] += std::norm(w[flat]) * transverse_measure(w, diag->axis, flat);
  SpectralDensity d;
  d.density.resize(n);
  for (std::size_t k = 0; k < n; ++k) d.density[k] = std::sqrt(level[k] * ax.density(k));
  d.chi_grid = ax;
  if (diag->sign < 0) {
    std::reverse(d.density.begin(), d.density.end());
    d.chi_grid = negated(ax);
  }
  return d;
}

double density_limit_at_zero(const SpectralDensity& d, int window) {
  if (window < 2) throw DomainError("window must cover at least 2 bins");
  if (static_cast<std::size_t>(window) > d.density.size()) throw DomainError("window exceeds the grid");
  std::vector<std::size_t> order(d.density.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(d.chi_grid.point(a)) < std::abs(d.chi_grid.point(b));
  });
  double s = 0.0;
  for (int k = 0; k < window; ++k) s += d.density[order[k]];
  return s / window;
}

std::string FiberReport::to_json() const {
  return nlohmann::json{{"residual_u1", residual_u1},
                        {"residual_y3", residual_y3},
                        {"cocycle_defect", cocycle_defect},
                        {"bound_constant", finite_or_null(bound_constant)}}
      .dump(2);
}

FiberReport fiber_cocycle_solve(const SampledFunction& f, const SampledFunction& g, const RepModel& model) {
  if (model.kind != ModelKind::Tau) throw DomainError("fiber_cocycle_solve needs a Tau model");
  if (model.z == 0.0) throw ZeroFiberError("z = 0 is the excluded fiber");
  if (!f.same_space(g)) throw DimensionError("f and g live on different grids");
  const double z = model.z;
  FiberReport r{(kI / z) * f};
  // f and g are typically images of generators, so edges are checked at the
  // derived-output tolerance.
  const double tol = kDerivedBoundaryTolerance;
  const auto u1f = apply_generator(model, "U1", f, tol);
  const auto y3g = apply_generator(model, "Y3", g, tol);
  r.cocycle_defect = safe_ratio(l2_norm(u1f - y3g), std::max(l2_norm(u1f), l2_norm(y3g)));
  r.residual_u1 = safe_ratio(l2_norm(apply_generator(model, "U1", r.p, tol) - g), l2_norm(g));
  r.residual_y3 = safe_ratio(l2_norm(apply_generator(model, "Y3", r.p, tol) - f), l2_norm(f));
  const double g2 = sobolev_norm(model, g, 2, tol);
  r.bound_constant = g2 > 0.0 ? l2_norm(r.p) / g2 : (l2_norm(r.p) == 0.0 ? 0.0 : kInf);
  return r;
}

std::string SweepReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json row{{"t", e.t}, {"ratio", finite_or_null(e.ratio)}, {"error", e.error}};
    row["report"] = nlohmann::json::parse(e.report.to_json());
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"entries", rows},
                        {"max_ratio", max_ratio},
                        {"spread", spread},
                        {"slope", slope},
                        {"bounded", bounded}}
      .dump(2);
}

SampledFunction sweep_rhs(const SweepProblem& problem, const std::vector<Grid1D>& grids) {
  if (problem.rhs == "gaussian-derivative")
    return SampledFunction::sample(grids, [](std::span<const double> x) {
      const double u = (x[0] - 4.0) / 0.5, v = x[1] / 0.7;
      return Complex(std::exp(-0.5 * u * u) * (-v / 0.7) * std::exp(-0.5 * v * v));
    });
  if (problem.rhs == "bump-derivative")
    return SampledFunction::sample(grids, [](std::span<const double> x) {
      return Complex(bump_profile(x[0] - 4.0, 0.5, 1.5) * bump_profile_derivative(x[1], 0.5, 2.0));
    });
  throw DomainError("unknown right-hand side recipe " + problem.rhs);
}

SweepReport sweep_fibers(const SweepProblem& problem, const std::vector<double>& t_samples) {
  if (problem.family != ModelKind::Rho && problem.family != ModelKind::Tau)
    throw DomainError("sweep family must be Rho or Tau");
  SweepReport out;
  std::vector<double> logt, logr;
  double lo = kInf;
  for (double t : t_samples) {
    SweepEntry e;
    e.t = t;
    try {
      const RepModel m = problem.family == ModelKind::Rho ? RepModel::rho(t) : RepModel::tau(t, problem.r, problem.z);
      const std::string gen = problem.family == ModelKind::Rho ? "V" : "U1";
      const auto grids = model_grids(m, problem.n);
      const auto g = sweep_rhs(problem, grids);
      auto solved = fourier_solve(g, m);
      if (std::holds_alternative<DivergenceFlag>(solved)) throw ObstructionError("right-hand side flagged as divergent");
      const auto& f = std::get<SampledFunction>(solved);
      e.report = verify_solution(m, gen, f, g);
      instantiate_sobolev_ratio(e.report, m, f, g, problem.s, problem.loss);
      e.ratio = e.report.bound_lhs / e.report.bound_rhs;
      out.max_ratio = std::max(out.max_ratio, e.ratio);
      lo = std::min(lo, e.ratio);
      if (t > 0.0 && e.ratio > 0.0) {
        logt.push_back(std::log(t));
        logr.push_back(std::log(e.ratio));
      }
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.entries.push_back(std::move(e));
  }
  if (out.max_ratio > 0.0) out.spread = out.max_ratio / lo;
  if (logt.size() >= 2) {
    const double mt = std::accumulate(logt.begin(), logt.end(), 0.0) / logt.size();
    const double mr = std::accumulate(logr.begin(), logr.end(), 0.0) / logr.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < logt.size(); ++k) {
      sxy += (logt[k] - mt) * (logr[k] - mr);
      sxx += (logt[k] - mt) * (logt[k] - mt);
    }
    out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  bool failed = false;
  for (const auto& e : out.entries) failed = failed || !e.error.empty();
  out.bounded = !failed && out.spread <= 2.0 && std::abs(out.slope) <= 0.1;
  return out;
}

}  // namespace cohomlab
