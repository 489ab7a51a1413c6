#include <doctest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "cohomlab/cohomology_solver.hpp"
#include "cohomlab/counterexamples.hpp"
#include "cohomlab/errors.hpp"

using namespace cohomlab;

namespace {

const Complex kI{0.0, 1.0};

std::vector<double> sample(const Grid1D& grid, double (*fn)(double)) {
  std::vector<double> q(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) q[k] = fn(grid.point(k));
  return q;
}

double inverse_square(double s) { return s == 0.0 ? 0.0 : 1.0 / (s * s); }
double gaussian(double s) { return std::exp(-s * s); }

}  // namespace

TEST_CASE("epsilon ladder and certificates") {
  const auto ladder = epsilon_ladder(0.5);
  REQUIRE(ladder.size() == 7);
  for (std::size_t k = 0; k < ladder.size(); ++k) CHECK(ladder[k] == std::ldexp(0.5, -static_cast<int>(k)));
  CHECK_THROWS_AS(epsilon_ladder(0.0), DomainError);

  const auto grid = make_grid(-8.0, 8.0, 4096, 0.0);
  const auto eps = epsilon_ladder(128.0 * grid.spacing());

  SUBCASE("inverse square diverges like 1/eps") {
    const auto c = certify_truncated_norms(grid, sample(grid, inverse_square), eps);
    CHECK(c.verdict == DivergenceVerdict::Diverges);
    CHECK(c.fitted_exponent == doctest::Approx(1.0).epsilon(0.1));
    for (std::size_t k = 1; k < eps.size(); ++k) CHECK(c.truncated_norms[k] >= c.truncated_norms[k - 1]);
    // Oracle: N(eps)^2 - N(eps0)^2 = 2 (1/eps - 1/eps0).
    const double n0 = c.truncated_norms[0] * c.truncated_norms[0];
    for (std::size_t k = 1; k < eps.size(); ++k) {
      const double oracle = 2.0 * (1.0 / eps[k] - 1.0 / eps[0]);
      CHECK(std::abs(c.truncated_norms[k] * c.truncated_norms[k] - n0 - oracle) <= 0.05 * oracle);
    }
  }

  SUBCASE("integrable density converges") {
    const auto c = certify_truncated_norms(grid, sample(grid, gaussian), eps);
    CHECK(c.verdict == DivergenceVerdict::Converges);
    CHECK(std::abs(c.fitted_exponent) < 0.1);
  }

  SUBCASE("threshold") {
    const auto c = certify_truncated_norms(grid, sample(grid, inverse_square), eps, 2.0);
    CHECK(c.verdict == DivergenceVerdict::Converges);
    CHECK(c.exponent_threshold == 2.0);
  }

  SUBCASE("errors") {
    const auto q = sample(grid, gaussian);
    CHECK_THROWS_AS(certify_truncated_norms(grid, q, {0.5, 0.25, 0.25, 0.1}), DomainError);
    CHECK_THROWS_AS(certify_truncated_norms(grid, q, {0.5, 0.25, 0.1}), DomainError);
    CHECK_THROWS_AS(certify_truncated_norms(grid, q, {0.5, 0.25, -0.1, -0.2}), DomainError);
    CHECK_THROWS_AS(certify_truncated_norms(grid, q, epsilon_ladder(100.0 * grid.spacing())), ResolutionError);
    CHECK_THROWS_AS(certify_truncated_norms(grid, std::vector<double>(10, 1.0), eps), DimensionError);
  }

  SUBCASE("json") {
    const auto j = nlohmann::json::parse(certify_truncated_norms(grid, sample(grid, gaussian), eps).to_json());
    CHECK(j["verdict"] == "Converges");
    CHECK(j["epsilons"].size() == 7);
    CHECK(j["truncated_norms"].size() == 7);
    CHECK(j.contains("fitted_exponent"));
  }
}

TEST_CASE("case 1 pair") {
  const auto pair = build_case1(3, 3, 0.0, Parity::Plus);
  CHECK(pair.relation == "u_2_1 f = u_2_3 g");
  CHECK(pair.relation_residual <= 1e-6);
  CHECK(pair.model == RepModel::ind_line(3, 0.0, Parity::Plus));

  // f = x_2 g pointwise, and both vanish outside the bump box.
  const auto& grids = pair.g.grids();
  double worst = 0.0, outside = 0.0;
  for (std::size_t flat = 0; flat < pair.g.size(); ++flat) {
    const auto idx = pair.g.unravel(flat);
    const double x1 = grids[0].point(idx[0]), x2 = grids[1].point(idx[1]);
    worst = std::max(worst, std::abs(pair.f[flat] - x2 * pair.g[flat]));
    if (std::abs(x1) >= 3.5 || std::abs(x2) >= 3.5) outside = std::max(outside, std::abs(pair.g[flat]) + std::abs(pair.f[flat]));
  }
  CHECK(worst == 0.0);
  CHECK(outside == 0.0);

  // The profile is 1 on [-1, 1] and nonnegative.
  for (double s = -4.0; s <= 4.0; s += 0.01) {
    CHECK(case_profile(s) >= 0.0);
    if (std::abs(s) <= 1.0) CHECK(case_profile(s) == 1.0);
  }

  const auto p4 = build_case1(4, 4, 1.0, Parity::Minus, GridProfile::Coarse);
  CHECK(p4.relation == "u_2_1 f = u_2_4 g");
  CHECK(p4.relation_residual <= 1e-6);

  CHECK_THROWS_AS(build_case1(3, 2, 0.0, Parity::Plus), DimensionError);
  CHECK_THROWS_AS(build_case1(3, 4, 0.0, Parity::Plus), DimensionError);
  CHECK_THROWS_AS(build_case1(5, 3, 0.0, Parity::Plus), DimensionError);

  const auto j = nlohmann::json::parse(pair.to_json());
  CHECK(j["relation"] == pair.relation);
  CHECK(j["model"]["kind"] == "ind_line");
}

TEST_CASE("case 2 pair") {
  const auto p0 = build_case2(3, 3, 0.0, Parity::Plus);
  const auto p1 = build_case2(3, 3, 1.0, Parity::Plus);
  CHECK(p0.relation == "u_1_3 f = u_2_3 g");
  CHECK(p0.relation_residual <= 1e-4);
  CHECK(p1.relation_residual <= 1e-4);

  // g is affine in t with slope i h; f does not depend on t.
  const auto h = build_case1(3, 3, 0.0, Parity::Plus).g;
  const auto p5 = build_case2(3, 3, 5.0, Parity::Minus);
  CHECK(l2_norm(p1.g - p0.g - kI * h) <= 1e-12 * l2_norm(h));
  CHECK(l2_norm(p5.g - p0.g - (5.0 * kI) * h) <= 1e-12 * l2_norm(h));
  CHECK(l2_norm(p5.f - p0.f) == 0.0);

  // f = -d_1 h against the spectral derivative.
  CHECK(l2_norm(p0.f + differentiate(h, 0)) <= 1e-4 * l2_norm(p0.f));

  CHECK_THROWS_AS(build_case2(4, 5, 0.0, Parity::Plus), DimensionError);
}

TEST_CASE("case 1 candidate certificate") {
  const auto g = build_case1(3, 3, 0.0, Parity::Plus).g;
  const auto c = case1_candidate_density(g);
  CHECK(c.verdict == DivergenceVerdict::Diverges);
  CHECK(c.fitted_exponent == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t k = 1; k < c.epsilons.size(); ++k) CHECK(c.truncated_norms[k] >= c.truncated_norms[k - 1]);

  SUBCASE("small-xi oracle") {
    // N(eps)^2 ~ 2 |p^(0)|^2 |p|^2 / eps with p^(0) = (2 pi)^-1/2 int p.
    double mass = 0.0, sq = 0.0;
    const int n = 100000;
    const double h = 7.0 / n;
    for (int k = 0; k < n; ++k) {
      const double p = case_profile(-3.5 + (k + 0.5) * h);
      mass += p * h;
      sq += p * p * h;
    }
    const double lead = 2.0 * mass * mass / (2.0 * std::numbers::pi) * sq;
    const double eps = c.epsilons.back();
    const double n2 = c.truncated_norms.back() * c.truncated_norms.back();
    CHECK(n2 * eps == doctest::Approx(lead).epsilon(0.05));
  }

  SUBCASE("no division converges") {
    CandidateOptions o;
    o.divide = false;
    const auto cc = case1_candidate_density(g, o);
    CHECK(cc.verdict == DivergenceVerdict::Converges);
    CHECK(std::abs(cc.fitted_exponent) < 0.1);
  }

  SUBCASE("refinement") {
    const auto fine = case1_candidate_density(build_case1(3, 3, 0.0, Parity::Plus, GridProfile::Fine).g);
    CHECK(std::abs(fine.fitted_exponent - c.fitted_exponent) < 0.05);
  }

  SUBCASE("stable across t and parity") {
    for (double t : {1.0, 5.0})
      for (auto parity : {Parity::Plus, Parity::Minus}) {
        const auto other = case1_candidate_density(build_case1(3, 3, t, parity).g);
        CHECK(other.verdict == c.verdict);
        CHECK(other.fitted_exponent == doctest::Approx(c.fitted_exponent));
      }
  }

  SUBCASE("resolution") {
    CandidateOptions o;
    o.padded_length = 64.0;
    o.epsilons = epsilon_ladder(0.05);
    CHECK_THROWS_AS(case1_candidate_density(g, o), ResolutionError);
  }
}

TEST_CASE("slice-integral condition without a solution") {
  const auto ex = remark_re4_example();
  CHECK(std::abs(ex.h_integral) <= 1e-10);
  CHECK(ex.line.n == 8192);
  CHECK(ex.line.samples_zero());

  // h = 1 on [-1, 1] with a negative outer lobe.
  double lowest = 0.0;
  for (std::size_t k = 0; k < ex.line.n; ++k) {
    const double x = ex.line.point(k);
    if (std::abs(x) <= 1.0) CHECK(ex.h[k] == 1.0);
    if (std::abs(x) >= 4.0) CHECK(ex.h[k] == 0.0);
    lowest = std::min(lowest, ex.h[k]);
  }
  CHECK(lowest < 0.0);
  CHECK(ex.lobe_amplitude > 0.0);

  const auto obstruction = obstruction_integral(ex.g, 1);
  CHECK(obstruction.verdict == ObstructionVerdict::Vanishes);
  CHECK(obstruction.max_abs <= 1e-8);
  CHECK(ex.g.grids() == model_grids(RepModel::rho(0.0)));

  const auto& c = ex.certificate;
  CHECK(c.verdict == DivergenceVerdict::Diverges);
  CHECK(c.fitted_exponent == doctest::Approx(1.0).epsilon(0.1));
  // Oracle int_eps^1 x^-2 dx = 1/eps - 1 on both sides of 0, relative to eps0.
  const double n0 = c.truncated_norms[0] * c.truncated_norms[0];
  for (std::size_t k = 1; k < c.epsilons.size(); ++k) {
    const double oracle = 2.0 * ((1.0 / c.epsilons[k] - 1.0) - (1.0 / c.epsilons[0] - 1.0));
    CHECK(std::abs(c.truncated_norms[k] * c.truncated_norms[k] - n0 - oracle) <= 0.05 * oracle);
  }

  const auto j = nlohmann::json::parse(ex.to_json());
  CHECK(j["certificate"]["verdict"] == "Diverges");
}
