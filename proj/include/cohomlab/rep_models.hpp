#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cohomlab/function_space.hpp"
#include "cohomlab/root_combinatorics.hpp"

namespace cohomlab {

enum class ModelKind : std::uint8_t { Rho, DualRho, Pi, Tau, IndLine };
enum class Parity : std::uint8_t { Plus, Minus };
enum class GridProfile : std::uint8_t { Default, Fine, Coarse };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);
std::string to_string(Parity p);
Parity parse_parity(const std::string& s);
std::string to_string(GridProfile p);
GridProfile parse_grid_profile(const std::string& s);

// Tagged representation model. Unused parameters stay at their defaults.
//   Rho(t)            on L2(R^2, dx dy)
//   DualRho(t)        on L2(R^2, |x| dx dlambda); with `fourier` set, the
//                     lambda axis is replaced by its Fourier dual y
//   Pi(t, r)          on L2(R^3)
//   Tau(t, r, z)      on L2(R^2), the z-fiber of Pi
//   IndLine(n, t, +-) on L2(R^{n-1})
struct RepModel {
  ModelKind kind = ModelKind::Rho;
  double t = 0.0;
  double r = 0.0;
  double z = 0.0;
  int n = 3;
  Parity parity = Parity::Plus;
  bool fourier = false;

  static RepModel rho(double t);
  static RepModel dual_rho(double t, bool fourier = false);
  static RepModel pi(double t, double r);
  static RepModel tau(double t, double r, double z);
  static RepModel ind_line(int n, double t, Parity parity = Parity::Plus);

  std::vector<std::string> alphabet() const;
  bool has_generator(const std::string& gen) const;
  // Number of function-space axes.
  std::size_t dimension() const;

  std::string to_json() const;  // {"kind": ..., "params": {...}}
  static RepModel from_json(const std::string& text);

  friend bool operator==(const RepModel&, const RepModel&) = default;
};

// Samples per axis for a profile: 256/512/128 on 1-2 axes, 64/128/32 on 3.
std::size_t profile_samples(GridProfile profile, std::size_t dims);

// Default box [-8, 8] on every axis, offset 0.5. DualRho puts |x| on the x
// axis; its Fourier variant samples y on a frequency-form grid (offset 0,
// y = 0 included).
std::vector<Grid1D> model_grids(const RepModel& model, GridProfile profile = GridProfile::Default);
std::vector<Grid1D> model_grids(const RepModel& model, std::size_t n_per_axis);

// Standard test vectors for a model: smooth bumps kept away from x = 0 when
// the model has x^-1 or x^-2 coefficients.
std::vector<SampledFunction> bump_family(const RepModel& model, const std::vector<Grid1D>& grids);

// ---------------------------------------------------------------------------
// Derived representation.

using GeneratorWord = std::vector<std::string>;

// `boundary_tol` is the edge check applied to the input (relative to max |f|).
// Derivatives do not enlarge the support, so inside words and Sobolev sums
// only the input is checked.
SampledFunction apply_generator(const RepModel& model, const std::string& gen,
                                const SampledFunction& f, double boundary_tol = kBoundaryTolerance);

// Rightmost letter first; the empty word is the identity.
SampledFunction apply_word(const RepModel& model, const GeneratorWord& word,
                           const SampledFunction& f, double boundary_tol = kBoundaryTolerance);

// sqrt(|f|^2 + sum over all words w of length 1..k of |w f|^2).
double sobolev_norm(const RepModel& model, const SampledFunction& f, int k,
                    double boundary_tol = kBoundaryTolerance);

// -X^2 - 2(UV + VU); Rho and DualRho only.
SampledFunction casimir_apply(const RepModel& model, const SampledFunction& f);

// Size m of the sl(m) the model's Lie algebra embeds in (3 for Rho/DualRho,
// 4 for Pi/Tau, n for IndLine).
int embedding_rank(const RepModel& model);
// Matrix of a generator in sl(m).
SlElement generator_matrix(const RepModel& model, const std::string& gen);
// Generator realising a basis element of sl(m), if the model has one.
std::optional<std::string> generator_for(const RepModel& model, const BasisElement& b);

// ---------------------------------------------------------------------------
// Group action.

// One-parameter factor of an IndLine element: exp(s u_{i,j}) or exp(s X_i).
struct OneParameter {
  BasisElement generator;
  double s = 0.0;
};

// (g, v) with g = [[a, b], [c, d]] (plus the affine column (u1, u2) for Pi).
// v holds (v1, v2) for Rho/DualRho, (v1, v2, v3) for Pi and the central
// coordinate v3 for Tau. IndLine elements are words `factors`, leftmost
// factor outermost.
struct GroupElement {
  ModelKind kind = ModelKind::Rho;
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double u1 = 0.0, u2 = 0.0;
  double v1 = 0.0, v2 = 0.0, v3 = 0.0;
  std::vector<OneParameter> factors;

  static GroupElement identity(ModelKind kind);
  static GroupElement linear(ModelKind kind, double a, double b, double c, double d);
  static GroupElement translation(ModelKind kind, double v1, double v2, double v3 = 0.0);

  bool is_identity() const;
  // ad - bc = 1 within 1e-12; throws DomainError otherwise.
  void validate() const;
};

// (g1, v1)(g2, v2) = (g1 g2, g2^-1 v1 + v2); IndLine words concatenate.
GroupElement compose(const GroupElement& g1, const GroupElement& g2);
GroupElement inverse(const GroupElement& g);
// exp(s A) for a generator A of the model.
GroupElement exp_generator(const RepModel& model, const std::string& gen, double s);

// Pointwise form of the action: (rho(g) f)(p) = multiplier(p) * f(source_point(p)).
// Not available for the Fourier variant of DualRho or IndLine words of more
// than one factor.
std::array<double, 3> source_point(const RepModel& model, const GroupElement& g,
                                   const std::array<double, 3>& p);
Complex multiplier(const RepModel& model, const GroupElement& g, const std::array<double, 3>& p);

// Resamples with separable 6-point Lagrange interpolation (zero outside the
// box). Throws RangeError when part of the support of f would be mapped out of
// the box and SingularValueError when a multiplier denominator vanishes on the
// support of the result.
SampledFunction apply_group(const RepModel& model, const GroupElement& g, const SampledFunction& f);

// | |rho(g) f| - |f| | / |f|.
double unitarity_defect(const RepModel& model, const GroupElement& g, const SampledFunction& f);

}  // namespace cohomlab
