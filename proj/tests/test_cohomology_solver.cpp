#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "cohomlab/cohomology_solver.hpp"
#include "cohomlab/errors.hpp"

using namespace cohomlab;

namespace {

const Complex kI{0.0, 1.0};

double rel(const SampledFunction& a, const SampledFunction& b) { return l2_norm(a - b) / l2_norm(b); }

double max_diff(const SampledFunction& a, const SampledFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// phi(x) psi(y) and phi(x) psi'(y): phi a bump at x = 4, psi a bump at y = 0.
SampledFunction phi_psi(const std::vector<Grid1D>& grids) {
  return SampledFunction::sample(grids, [](std::span<const double> x) {
    return Complex(bump_profile(x[0] - 4.0, 0.5, 2.0) * bump_profile(x[1], 1.0, 3.0));
  });
}

SampledFunction phi_dpsi(const std::vector<Grid1D>& grids) {
  return SampledFunction::sample(grids, [](std::span<const double> x) {
    return Complex(bump_profile(x[0] - 4.0, 0.5, 2.0) * bump_profile_derivative(x[1], 1.0, 3.0));
  });
}

SampledFunction bump_bump(const std::vector<Grid1D>& grids) {
  return SampledFunction::sample(grids, [](std::span<const double> x) {
    return Complex(bump_profile(x[0] - 4.0, 0.5, 2.0) * bump_profile(x[1], 0.5, 2.0));
  });
}

// Integral of bump_profile(., plateau, support) by a fine midpoint rule.
double profile_integral(double plateau, double support) {
  const int n = 200000;
  const double h = 2.0 * support / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += bump_profile(-support + (k + 0.5) * h, plateau, support);
  return s * h;
}

}  // namespace

TEST_CASE("obstruction integral") {
  const auto m = RepModel::rho(1.0);
  const auto grids = model_grids(m);

  SUBCASE("derivative in y integrates to zero slice-wise") {
    const auto r = obstruction_integral(phi_dpsi(grids), 1);
    CHECK(r.verdict == ObstructionVerdict::Vanishes);
    CHECK(r.per_slice_integral.size() == grids[0].n);
    CHECK(r.max_abs <= r.tolerance_used);
  }

  SUBCASE("positive product fails with the slice-wise profile") {
    const auto r = obstruction_integral(bump_bump(grids), 1);
    CHECK(r.verdict == ObstructionVerdict::Fails);
    const double mass = profile_integral(0.5, 2.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < grids[0].n; ++i) {
      const double expect = bump_profile(grids[0].point(i) - 4.0, 0.5, 2.0) * mass;
      worst = std::max(worst, std::abs(r.per_slice_integral[i] - expect));
    }
    CHECK(worst < 1e-10);
    CHECK(r.max_abs == doctest::Approx(mass).epsilon(1e-10));
  }

  SUBCASE("every coboundary V f0 passes") {
    for (const auto& f0 : bump_family(m, grids)) {
      const auto g = apply_generator(m, "V", f0);
      const auto r = obstruction_integral(g, 1, std::nullopt, kDerivedBoundaryTolerance);
      CHECK(r.verdict == ObstructionVerdict::Vanishes);
    }
  }

  SUBCASE("verdict follows the tolerance") {
    const auto g = bump_bump(grids);
    const auto r = obstruction_integral(g, 1, 10.0);
    CHECK(r.verdict == ObstructionVerdict::Vanishes);
    CHECK(r.tolerance_used == 10.0);
    CHECK(default_obstruction_tolerance(g, 1) == doctest::Approx(1e-8 * l2_norm(g) * 16.0));
  }

  SUBCASE("errors") {
    const auto wide = SampledFunction::sample(grids, [](std::span<const double> x) {
      return Complex(std::exp(-0.01 * x[1] * x[1]));
    });
    CHECK_THROWS_AS(obstruction_integral(wide, 1), BoundaryError);
    CHECK_THROWS_AS(obstruction_integral(bump_bump(grids), 2), DimensionError);
  }

  SUBCASE("json") {
    const auto j = nlohmann::json::parse(obstruction_integral(bump_bump(grids), 1).to_json());
    CHECK(j["verdict"] == "Fails");
    CHECK(j["per_slice_integral"].size() == grids[0].n);
    CHECK(j.contains("max_abs"));
    CHECK(j.contains("tolerance_used"));
  }
}

TEST_CASE("primitive along an axis") {
  const auto m = RepModel::rho(1.0);
  const auto grids = model_grids(m);

  SUBCASE("zero") {
    const auto z = SampledFunction::zeros(grids);
    CHECK(l2_norm(primitive_solve(z, 1)) == 0.0);
  }

  SUBCASE("closed-form antiderivative") {
    // The bump transitions are resolved to 1e-8 only on the fine profile.
    const auto fine = model_grids(m, GridProfile::Fine);
    CHECK(max_diff(primitive_solve(phi_dpsi(fine), 1), phi_psi(fine)) < 1e-8);
    const auto coarse = model_grids(m, GridProfile::Coarse);
    const double e_coarse = max_diff(primitive_solve(phi_dpsi(coarse), 1), phi_psi(coarse));
    const double e_default = max_diff(primitive_solve(phi_dpsi(grids), 1), phi_psi(grids));
    CHECK(e_default * 16.0 < e_coarse);
  }

  SUBCASE("tail from below agrees") {
    // f(y) = int_{-inf}^0 g(y + s) ds by a forward trapezoid sum with the
    // h^2/12 end correction.
    const auto g = phi_dpsi(grids);
    const auto dg = differentiate(g, 1);
    const auto f = primitive_solve(g, 1);
    const std::size_t ny = grids[1].n;
    const double h = grids[1].spacing();
    double worst = 0.0;
    for (std::size_t i = 0; i < grids[0].n; ++i) {
      Complex below{};
      for (std::size_t k = 0; k < ny; ++k) {
        const Complex gk = g[i * ny + k];
        worst = std::max(worst, std::abs(f[i * ny + k] - h * (below + 0.5 * gk) + h * h / 12.0 * dg[i * ny + k]));
        below += gk;
      }
    }
    CHECK(worst < 1e-5);
  }

  SUBCASE("obstruction modes") {
    const auto g = bump_bump(grids);
    CHECK_THROWS_AS(primitive_solve(g, 1), ObstructionError);
    ObstructionReport report;
    const auto f = primitive_solve(g, 1, ObstructionMode::Warn, &report);
    CHECK(report.verdict == ObstructionVerdict::Fails);
    CHECK(f.same_space(g));
  }

  SUBCASE("coboundary identity and norm bound") {
    const auto g = phi_dpsi(grids);
    const auto h = -kI * primitive_solve(g, 1);
    auto report = verify_solution(m, "V", h, apply_generator(m, "Y2", g));
    CHECK(report.residual_rel <= 1e-3);
    CHECK(report.bound_kind == "none");
    instantiate_primitive_bound(report, m, h, g);
    CHECK(report.bound_kind == "primitive");
    CHECK(report.bound_holds);
    CHECK(report.bound_lhs == doctest::Approx(l2_norm(h)));
    const auto y1g = apply_generator(m, "Y1", g);
    const double expect = 2.0 * (l2_norm(g) + l2_norm(y1g) + l2_norm(apply_generator(m, "Y1", y1g))) * 1.01;
    CHECK(report.bound_rhs == doctest::Approx(expect));
  }

  SUBCASE("bound over the standard family's coboundaries") {
    for (const auto& f0 : bump_family(m, grids)) {
      const auto g = apply_generator(m, "V", f0);
      const auto f = primitive_solve(g, 1, ObstructionMode::Strict, nullptr, kDerivedBoundaryTolerance);
      SolveReport report;
      instantiate_primitive_bound(report, m, f, g);
      CHECK(report.bound_holds);
    }
  }
}

TEST_CASE("solution checks") {
  const auto m = RepModel::rho(1.0);
  const auto grids = model_grids(m);
  const auto f = bump_family(m, grids)[0];

  SUBCASE("exact pair") {
    const auto rhs = apply_generator(m, "V", f);
    const auto report = verify_solution(m, "V", f, rhs);
    CHECK(report.residual_rel <= 1e-10);
    CHECK(report.solution_norm == doctest::Approx(l2_norm(f)));
    CHECK(report.bound_holds);
    CHECK(std::isinf(report.bound_rhs));
  }

  SUBCASE("perturbation is detected") {
    const auto rhs = apply_generator(m, "V", f);
    std::mt19937 rng(7);
    std::normal_distribution<double> noise;
    std::vector<Complex> values(f.values().begin(), f.values().end());
    for (auto& v : values) v *= 1.0 + 0.01 * noise(rng);
    const auto noisy = f.with_values(std::move(values));
    const double clean = verify_solution(m, "V", f, rhs).residual_rel;
    const double dirty = verify_solution(m, "V", noisy, rhs).residual_rel;
    CHECK(dirty >= 10.0 * std::max(clean, 1e-16));
  }

  SUBCASE("sobolev ratio") {
    auto report = verify_solution(m, "V", f, apply_generator(m, "V", f));
    instantiate_sobolev_ratio(report, m, f, f, 0, 2);
    CHECK(report.bound_kind == "sobolev:0/2");
    CHECK(report.bound_holds);
    CHECK(report.bound_lhs == doctest::Approx(l2_norm(f)));
  }

  SUBCASE("grid mismatch") {
    const auto other = bump_family(m, model_grids(m, GridProfile::Coarse))[0];
    CHECK_THROWS_AS(verify_solution(m, "V", f, other), DimensionError);
  }

  SUBCASE("json") {
    const auto j = nlohmann::json::parse(verify_solution(m, "V", f, apply_generator(m, "V", f)).to_json());
    for (const char* key : {"residual_rel", "solution_norm", "bound_lhs", "bound_rhs", "bound_holds", "bound_kind"})
      CHECK(j.contains(key));
    CHECK(j["bound_rhs"].is_null());
  }
}

TEST_CASE("Fourier-side solver") {
  const auto m = RepModel::rho(1.0);
  const auto grids = model_grids(m);

  SUBCASE("coboundaries are solved") {
    for (const auto& f0 : bump_family(m, grids)) {
      const auto g = apply_generator(m, "V", f0);
      const auto out = fourier_solve(g, m);
      REQUIRE(std::holds_alternative<SampledFunction>(out));
      const auto& f = std::get<SampledFunction>(out);
      CHECK(verify_solution(m, "V", f, g).residual_rel <= 1e-3);
      CHECK(rel(f, f0) <= 1e-3);
    }
  }

  SUBCASE("tau fiber") {
    const auto tau = RepModel::tau(1.0, 0.5, 2.0);
    const auto tg = model_grids(tau);
    const auto f0 = bump_family(tau, tg)[1];
    const auto g = apply_generator(tau, "U1", f0);
    const auto out = fourier_solve(g, tau);
    REQUIRE(std::holds_alternative<SampledFunction>(out));
    CHECK(verify_solution(tau, "U1", std::get<SampledFunction>(out), g).residual_rel <= 1e-3);
  }

  SUBCASE("nonzero slice integral is flagged") {
    const auto out = fourier_solve(bump_bump(grids), m);
    REQUIRE(std::holds_alternative<DivergenceFlag>(out));
    const auto& flag = std::get<DivergenceFlag>(out);
    CHECK(flag.ratio >= kDivergenceThreshold);
    CHECK(flag.ratio == doctest::Approx(flag.zero_bin_energy / flag.reference_energy));
    CHECK(nlohmann::json::parse(flag.to_json()).contains("ratio"));
  }

  SUBCASE("zero") {
    const auto out = fourier_solve(SampledFunction::zeros(grids), m);
    REQUIRE(std::holds_alternative<SampledFunction>(out));
    CHECK(l2_norm(std::get<SampledFunction>(out)) == 0.0);
  }

  SUBCASE("errors") {
    const auto bad = std::vector<Grid1D>{make_grid(-8.0, 8.0, 256, 0.0), grids[1]};
    CHECK_THROWS_AS(fourier_solve(SampledFunction::zeros(bad), m), SingularGridError);
    const auto dual = RepModel::dual_rho(1.0);
    CHECK_THROWS_AS(fourier_solve(SampledFunction::zeros(model_grids(dual)), dual), DomainError);
  }
}

TEST_CASE("spectral density") {
  const auto m = RepModel::rho(1.0);
  const auto grids = model_grids(m);

  SUBCASE("separable closed form") {
    const auto v = bump_bump(grids);
    const auto d = spectral_density(v, m, "Y2");
    // |bump_y| in L2 by the grid quadrature of the y factor alone.
    const auto y_only = SampledFunction::sample({grids[1]}, [](std::span<const double> x) {
      return Complex(bump_profile(x[0], 0.5, 2.0));
    });
    const double norm_y = l2_norm(y_only);
    double worst = 0.0;
    for (std::size_t k = 0; k < d.density.size(); ++k)
      worst = std::max(worst, std::abs(d.density[k] - bump_profile(d.chi_grid.point(k) - 4.0, 0.5, 2.0) * norm_y));
    CHECK(worst < 1e-12);
  }

  SUBCASE("Plancherel") {
    for (const auto& v : bump_family(m, grids)) {
      for (const char* gen : {"Y1", "Y2"}) {
        const auto d = spectral_density(v, m, gen);
        CHECK(std::abs(d.total_energy() / std::pow(l2_norm(v), 2) - 1.0) <= 1e-6);
      }
    }
    const auto ind = RepModel::ind_line(3, 1.0);
    const auto ig = model_grids(ind);
    for (const auto& v : bump_family(ind, ig)) {
      for (const char* gen : {"u_2_1", "u_3_1"}) {
        const auto d = spectral_density(v, ind, gen);
        CHECK(std::abs(d.total_energy() / std::pow(l2_norm(v), 2) - 1.0) <= 1e-6);
      }
    }
  }

  SUBCASE("sign convention") {
    // Y1 = -i y: the density at chi sits on the level set y = -chi.
    const auto v = SampledFunction::sample(grids, [](std::span<const double> x) {
      return Complex(bump_profile(x[0] - 4.0, 0.5, 2.0) * bump_profile(x[1] - 2.0, 0.25, 1.0));
    });
    const auto d = spectral_density(v, m, "Y1");
    double peak_chi = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < d.density.size(); ++k)
      if (d.density[k] > peak) peak = d.density[k], peak_chi = d.chi_grid.point(k);
    CHECK(peak_chi == doctest::Approx(-2.0).epsilon(0.1));
  }

  SUBCASE("continuity under refinement") {
    const auto ind = RepModel::ind_line(3, 1.0);
    double prev = 0.0;
    for (std::size_t n : {128u, 256u}) {
      const auto ig = model_grids(ind, n);
      const auto g = bump_family(ind, ig)[1];
      const auto v = apply_word(ind, {"u_1_3", "u_1_3"}, g);
      const auto d = spectral_density(v, ind, "u_2_1");
      double jump = 0.0;
      for (std::size_t k = 1; k < d.density.size(); ++k) jump = std::max(jump, std::abs(d.density[k] - d.density[k - 1]));
      if (prev > 0.0) CHECK(jump < prev);
      prev = jump;
    }
  }

  SUBCASE("limit surrogate") {
    SpectralDensity zero{make_grid(-1.0, 1.0, 16), std::vector<double>(16, 0.0)};
    CHECK(density_limit_at_zero(zero, 3) == 0.0);
    CHECK_THROWS_AS(density_limit_at_zero(zero, 1), DomainError);
    CHECK_THROWS_AS(density_limit_at_zero(zero, 17), DomainError);
    SpectralDensity ramp{make_grid(-1.0, 1.0, 8), {9.0, 9.0, 9.0, 4.0, 1.0, 9.0, 9.0, 9.0}};
    CHECK(density_limit_at_zero(ramp, 2) == doctest::Approx(2.5));
  }

  SUBCASE("errors") {
    const auto v = bump_bump(grids);
    CHECK_THROWS_AS(spectral_density(v, m, "V"), NotDiagonalizedError);
    CHECK_THROWS_AS(spectral_density(v, m, "u_2_1"), AlphabetError);
  }

  SUBCASE("serialization") {
    const auto d = spectral_density(bump_bump(grids), m, "Y2");
    const auto csv = d.to_csv();
    CHECK(csv.rfind("chi,density\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(d.density.size() + 1));
    const auto j = nlohmann::json::parse(d.to_json());
    CHECK(j["chi"].size() == d.density.size());
    CHECK(j["density"].size() == d.density.size());
  }
}

TEST_CASE("fiber cocycle") {
  for (double z : {0.5, -0.5, 2.0, -2.0}) {
    const auto m = RepModel::tau(1.0, 0.5, z);
    const auto grids = model_grids(m);
    const auto p0 = bump_family(m, grids)[2];
    const auto g = apply_generator(m, "U1", p0);
    const auto f = apply_generator(m, "Y3", p0);
    const auto r = fiber_cocycle_solve(f, g, m);
    CHECK(rel(r.p, p0) <= 1e-10);
    CHECK(r.residual_u1 <= 1e-10);
    CHECK(r.residual_y3 <= 1e-10);
    CHECK(r.cocycle_defect <= 1e-10);
    CHECK(r.bound_constant > 0.0);
    CHECK(r.bound_constant == doctest::Approx(l2_norm(r.p) / sobolev_norm(m, g, 2, kDerivedBoundaryTolerance)));
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j.contains("cocycle_defect"));

    // A 10% violation of U1 f = Y3 g shows up in the defect.
    const auto r2 = fiber_cocycle_solve(1.1 * f, g, m);
    CHECK(r2.cocycle_defect == doctest::Approx(0.1 / 1.1).epsilon(1e-6));
  }
  const auto m0 = RepModel::tau(1.0, 0.5, 0.0);
  const auto g0 = bump_family(m0, model_grids(m0))[0];
  CHECK_THROWS_AS(fiber_cocycle_solve(g0, g0, m0), ZeroFiberError);
  CHECK_THROWS_AS(fiber_cocycle_solve(g0, g0, RepModel::rho(1.0)), DomainError);
}

TEST_CASE("fiber sweep") {
  SweepProblem problem;

  SUBCASE("empty") {
    const auto r = sweep_fibers(problem, {});
    CHECK(r.entries.empty());
    CHECK(r.max_ratio == 0.0);
    CHECK(r.bounded);
  }

  SUBCASE("single fiber reduces to one check") {
    const auto r = sweep_fibers(problem, {1.0});
    REQUIRE(r.entries.size() == 1);
    const auto& e = r.entries[0];
    CHECK(e.error.empty());
    CHECK(e.report.residual_rel <= 1e-3);
    CHECK(e.ratio == doctest::Approx(e.report.bound_lhs / e.report.bound_rhs));
    CHECK(r.spread == doctest::Approx(1.0));
    CHECK(r.slope == 0.0);

    const auto m = RepModel::rho(1.0);
    const auto grids = model_grids(m, problem.n);
    const auto g = sweep_rhs(problem, grids);
    CHECK(obstruction_integral(g, 1).verdict == ObstructionVerdict::Vanishes);
    const auto f = std::get<SampledFunction>(fourier_solve(g, m));
    CHECK(verify_solution(m, "V", f, g).residual_rel == doctest::Approx(e.report.residual_rel));
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["entries"].size() == 1);
  }

  SUBCASE("failures are collected") {
    problem.rhs = "no-such-recipe";
    const auto r = sweep_fibers(problem, {1.0, 2.0});
    REQUIRE(r.entries.size() == 2);
    CHECK_FALSE(r.entries[0].error.empty());
    CHECK_FALSE(r.bounded);
  }

  SUBCASE("family check") {
    problem.family = ModelKind::Pi;
    CHECK_THROWS_AS(sweep_fibers(problem, {1.0}), DomainError);
  }
}
