#pragma once

#include <string>
#include <vector>

#include "cohomlab/function_space.hpp"
#include "cohomlab/rep_models.hpp"

namespace cohomlab {

// ---------------------------------------------------------------------------
// Divergence certificates.

enum class DivergenceVerdict : std::uint8_t { Converges, Diverges };
std::string to_string(DivergenceVerdict v);

inline constexpr double kExponentThreshold = 0.5;
// Coarsest ladder points left out of the exponent fit.
inline constexpr std::size_t kFitDiscard = 2;

struct DivergenceCertificate {
  std::vector<double> epsilons;         // strictly decreasing, positive
  std::vector<double> truncated_norms;  // N(eps), nondecreasing
  double fitted_exponent = 0.0;         // slope of log N^2 against log(1/eps)
  double exponent_threshold = kExponentThreshold;
  DivergenceVerdict verdict = DivergenceVerdict::Converges;

  std::string to_json() const;
};

// eps_k = eps0 / 2^k, k = 0..count-1.
std::vector<double> epsilon_ladder(double eps0, std::size_t count = 7);

// Certificate for N(eps)^2 = int_{|s| >= eps} q(s) ds from samples of q >= 0
// on `grid` (trapezoid weights: half weight on samples with |s| = eps).
// Throws DomainError for a ladder that is not strictly decreasing and
// positive or shorter than kFitDiscard + 2, ResolutionError when the
// smallest eps is below 2 grid spacings.
DivergenceCertificate certify_truncated_norms(const Grid1D& grid, const std::vector<double>& q,
                                              const std::vector<double>& epsilons,
                                              double exponent_threshold = kExponentThreshold);

// ---------------------------------------------------------------------------
// Non-solvable cocycle pairs in IndLine(n, t, parity).

struct CocyclePair {
  RepModel model;
  SampledFunction f;
  SampledFunction g;
  std::string relation;       // e.g. "u_2_1 f = u_2_3 g"
  double relation_residual = 0.0;  // |lhs - rhs| / |rhs|

  std::string to_json() const;
};

// Profile p of the product h = p(x_1)...p(x_{n-1}): p >= 0, p = 1 on [-1, 1],
// supported in [-3.5, 3.5].
double case_profile(double s);
double case_profile_derivative(double s);

// g = h, f = x_{j-1} h; relation u_{2,1} f = u_{2,j} g. Throws DimensionError
// unless 3 <= j <= n and n is 3 or 4.
CocyclePair build_case1(int n, int j, double t, Parity parity, GridProfile profile = GridProfile::Default);

// g = (n/2 + i t - 1) h + sum_k x_k d_k h, f = -d_1 h (closed forms);
// relation u_{1,j} f = u_{2,j} g.
CocyclePair build_case2(int n, int j, double t, Parity parity, GridProfile profile = GridProfile::Default);

struct CandidateOptions {
  // Length of the zero-padded x_1 axis; sets the frequency bin 2 pi / length.
  double padded_length = 4096.0;
  // Empty: epsilon_ladder(128 bins), so the smallest eps sits at 2 bins.
  std::vector<double> epsilons;
  // false replaces g^/xi by g^ (a convergent control).
  bool divide = true;
  double exponent_threshold = kExponentThreshold;
};

// Certificate for the candidate solution w^ = i g^ / xi of u_{2,1} w = g,
// Fourier side along x_1: N(eps)^2 = int_{|xi| >= eps} |g^(xi, .)|^2 / xi^2.
DivergenceCertificate case1_candidate_density(const SampledFunction& g, const CandidateOptions& options = {});

// ---------------------------------------------------------------------------
// Slice-integral condition without a solution (Rho at t = 0).

struct Re4Example {
  SampledFunction g;          // h(x) h(y) on the Rho(0) grid
  Grid1D line;                // 1-D grid of the certificate
  std::vector<double> h;      // h on `line`
  double h_integral = 0.0;    // quadrature of h on `line`
  double lobe_amplitude = 0.0;
  DivergenceCertificate certificate;  // N(eps)^2 = int_{|x| >= eps} |h / x|^2

  std::string to_json() const;
};

// h = 1 on [-1, 1], falling to 0 on [1, 2], minus A times a bump on
// 2 <= |x| <= 4; A makes int h = 0 on the certificate grid (n = 8192 on
// [-8, 8], offset 0). Ladder eps0 = 128 spacings.
double re4_profile(double s, double amplitude);
Re4Example remark_re4_example(GridProfile profile = GridProfile::Default);

}  // namespace cohomlab
