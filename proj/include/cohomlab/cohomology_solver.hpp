#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cohomlab/function_space.hpp"
#include "cohomlab/rep_models.hpp"

namespace cohomlab {

// ---------------------------------------------------------------------------
// Slice-integral obstruction for V f = g.

enum class ObstructionVerdict : std::uint8_t { Vanishes, Fails };
std::string to_string(ObstructionVerdict v);

struct ObstructionReport {
  // integral of g along the axis, one entry per transverse sample (row-major
  // over the remaining axes)
  std::vector<Complex> per_slice_integral;
  double max_abs = 0.0;
  ObstructionVerdict verdict = ObstructionVerdict::Vanishes;
  double tolerance_used = 0.0;

  std::string to_json() const;
};

// 1e-8 * |g| * (axis length).
double default_obstruction_tolerance(const SampledFunction& g, std::size_t axis);

// Edge tolerance for checks on outputs of spectral operators (solutions, or
// right-hand sides built with apply_generator). Spectral derivatives of the
// sampled bumps ring at ~4e-8 of the peak at 256 samples per axis, far below
// the 1e-3 residual scale these checks feed.
inline constexpr double kDerivedBoundaryTolerance = 1e-6;

// Midpoint-rule integral along `axis` for every transverse sample. Throws
// BoundaryError if g does not decay at the ends of the axis.
ObstructionReport obstruction_integral(const SampledFunction& g, std::size_t axis,
                                       std::optional<double> tol = std::nullopt,
                                       double boundary_tol = kBoundaryTolerance);

// ---------------------------------------------------------------------------
// Primitive along an axis.

enum class ObstructionMode : std::uint8_t { Strict, Warn };

// f(y) = -int_0^inf g(y + s) ds along `axis`, so that d/dy f = g. Cumulative
// trapezoid tail from the top edge with Euler-Maclaurin end corrections
// through h^6 (spectral derivatives of g). Strict mode throws ObstructionError when the slice integrals
// do not vanish; Warn mode proceeds and leaves the verdict in `report`.
SampledFunction primitive_solve(const SampledFunction& g, std::size_t axis,
                                ObstructionMode mode = ObstructionMode::Strict,
                                ObstructionReport* report = nullptr,
                                double boundary_tol = kBoundaryTolerance);

// ---------------------------------------------------------------------------
// Solution checks.

struct SolveReport {
  double residual_rel = 0.0;  // |A f - rhs| / |rhs|
  double solution_norm = 0.0;
  double bound_lhs = 0.0;
  double bound_rhs = 0.0;
  bool bound_holds = false;
  std::string bound_kind = "none";

  std::string to_json() const;
};

// Residual of apply_generator(gen, f) against rhs. The bound fields start as
// |f| <= +inf (kind "none") until a bound is instantiated below.
SolveReport verify_solution(const RepModel& model, const std::string& gen, const SampledFunction& f,
                            const SampledFunction& rhs, double boundary_tol = kDerivedBoundaryTolerance);

// |f| <= 2(|g| + |Y1 g| + |Y1^2 g|) * (1 + slack) for a primitive f of g.
void instantiate_primitive_bound(SolveReport& report, const RepModel& model, const SampledFunction& f,
                                 const SampledFunction& g, double slack = 0.01);

// |f|_s against |g|_{s+loss}; bound_holds records |f|_s <= |g|_{s+loss}.
void instantiate_sobolev_ratio(SolveReport& report, const RepModel& model, const SampledFunction& f,
                               const SampledFunction& g, int s, int loss = 6);

// ---------------------------------------------------------------------------
// Fourier-side solver for -x d/dy f = g.

struct DivergenceFlag {
  double zero_bin_energy = 0.0;  // |g^(., 0)|^2 / dxi^2
  double reference_energy = 0.0;  // max over xi != 0 of |g^(., xi)|^2 / xi^2
  double ratio = 0.0;

  std::string to_json() const;
};

// Zero-bin energy at or above this fraction of the largest off-zero bin
// energy flags divergence.
inline constexpr double kDivergenceThreshold = 1e-3;

using FourierSolveResult = std::variant<SampledFunction, DivergenceFlag>;

// f^ = g^ * i / (x xi) on the y-frequency grid; the xi = 0 bin takes the
// continuous limit i/x * dg^/dxi(x, 0), computed from the first moment of
// g in y. Rho and Tau (V resp. U1 = -x d/dy) only. Throws SingularGridError
// if the x grid samples 0.
FourierSolveResult fourier_solve(const SampledFunction& g, const RepModel& model);

// ---------------------------------------------------------------------------
// Spectral density of the one-parameter group of a generator.

struct SpectralDensity {
  Grid1D chi_grid;
  std::vector<double> density;

  // sum density^2 * dchi
  double total_energy() const;
  std::string to_json() const;
  std::string to_csv() const;  // "chi,density" rows
};

// The generator must act as i * chi for a coordinate chi (multiplication) or
// for chi = -xi after a Fourier transform along one axis (IndLine u_{i,1}).
// Throws NotDiagonalizedError otherwise.
SpectralDensity spectral_density(const SampledFunction& v, const RepModel& model, const std::string& gen);

// Mean of the density over the `window` bins of smallest |chi|.
double density_limit_at_zero(const SpectralDensity& d, int window);

// ---------------------------------------------------------------------------
// Fiber cocycle U1 p = g, Y3 p = f in Tau(t, r, z).

struct FiberReport {
  SampledFunction p;
  double residual_u1 = 0.0;      // |U1 p - g| / |g|
  double residual_y3 = 0.0;      // |Y3 p - f| / |f|
  double cocycle_defect = 0.0;   // |U1 f - Y3 g| / max(|U1 f|, |Y3 g|)
  double bound_constant = 0.0;   // |p| / |g|_2 for this run

  std::string to_json() const;
};

// p = i f / z. Throws ZeroFiberError for z = 0.
FiberReport fiber_cocycle_solve(const SampledFunction& f, const SampledFunction& g, const RepModel& model);

// ---------------------------------------------------------------------------
// Parameter sweep.

struct SweepProblem {
  ModelKind family = ModelKind::Rho;  // Rho or Tau
  double r = 0.0;
  double z = 1.0;
  std::string rhs = "gaussian-derivative";
  int s = 0;
  int loss = 6;
  std::size_t n = 64;
};

struct SweepEntry {
  double t = 0.0;
  SolveReport report;
  double ratio = 0.0;  // |f_t|_s / |g_t|_{s+loss}
  std::string error;   // non-empty if the fiber failed
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  double max_ratio = 0.0;
  double spread = 0.0;  // max / min ratio
  double slope = 0.0;   // least-squares slope of log ratio against log t
  bool bounded = true;  // spread <= 2 and |slope| <= 0.1

  std::string to_json() const;
};

// Right-hand side of a sweep, phi(x) psi'(y) with phi centred at x = 4 and
// psi centred at y = 0 (so every y-slice integrates to 0):
//   "gaussian-derivative"  phi, psi Gaussians of width 0.5 and 0.7
//   "bump-derivative"      phi, psi smooth bumps on [2.5, 5.5] and [-2, 2]
// Sobolev norms of order 6 are resolved on the default grid only for the
// Gaussian recipe; compactly supported bumps have too slowly decaying spectra.
SampledFunction sweep_rhs(const SweepProblem& problem, const std::vector<Grid1D>& grids);

// Entries are ordered by t as given; failing fibers are recorded, not thrown.
SweepReport sweep_fibers(const SweepProblem& problem, const std::vector<double>& t_samples);

}  // namespace cohomlab
