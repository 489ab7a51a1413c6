#include "cohomlab/counterexamples.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "cohomlab/errors.hpp"

namespace cohomlab {

namespace {

// Relative slack for comparing eps against grid points.
constexpr double kEdgeSlack = 1e-9;

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

void check_case(int n, int j) {
  if (n != 3 && n != 4) throw DimensionError("counterexample pairs are built for n = 3 or 4");
  if (j < 3 || j > n) throw DimensionError("j must satisfy 3 <= j <= n");
}

double product_except(std::span<const double> x, std::size_t skip) {
  double p = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (k != skip) p *= case_profile(x[k]);
  return p;
}

std::string root(int i, int j) { return "u_" + std::to_string(i) + "_" + std::to_string(j); }

CocyclePair finish(RepModel model, SampledFunction f, SampledFunction g, const std::string& lhs_gen,
                   const std::string& rhs_gen) {
  const auto lhs = apply_generator(model, lhs_gen, f);
  const auto rhs = apply_generator(model, rhs_gen, g);
  const double den = l2_norm(rhs);
  CocyclePair out{std::move(model), std::move(f), std::move(g), lhs_gen + " f = " + rhs_gen + " g", 0.0};
  out.relation_residual = den > 0.0 ? l2_norm(lhs - rhs) / den : l2_norm(lhs);
  return out;
}

}  // namespace

std::string to_string(DivergenceVerdict v) { return v == DivergenceVerdict::Diverges ? "Diverges" : "Converges"; }

std::string DivergenceCertificate::to_json() const {
  return nlohmann::json{{"epsilons", epsilons},
                        {"truncated_norms", truncated_norms},
                        {"fitted_exponent", fitted_exponent},
                        {"exponent_threshold", exponent_threshold},
                        {"verdict", to_string(verdict)}}
      .dump(2);
}

std::vector<double> epsilon_ladder(double eps0, std::size_t count) {
  if (!(eps0 > 0.0)) throw DomainError("eps0 must be positive");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = std::ldexp(eps0, -static_cast<int>(k));
  return out;
}

DivergenceCertificate certify_truncated_norms(const Grid1D& grid, const std::vector<double>& q,
                                              const std::vector<double>& epsilons, double exponent_threshold) {
  if (q.size() != grid.n) throw DimensionError("density samples do not match the grid");
  if (epsilons.size() < kFitDiscard + 2) throw DomainError("epsilon ladder is too short for a fit");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0)) throw DomainError("epsilons must be positive");
    if (k > 0 && !(epsilons[k] < epsilons[k - 1])) throw DomainError("epsilons must be strictly decreasing");
  }
  const double h = grid.spacing();
  if (epsilons.back() < 2.0 * h * (1.0 - kEdgeSlack))
    throw ResolutionError("smallest epsilon is below 2 grid bins");

  DivergenceCertificate c;
  c.epsilons = epsilons;
  c.exponent_threshold = exponent_threshold;
  for (double eps : epsilons) {
    double s = 0.0;
    for (std::size_t k = 0; k < grid.n; ++k) {
      const double a = std::abs(grid.point(k));
      if (std::abs(a - eps) <= kEdgeSlack * eps) {
        s += 0.5 * q[k];
      } else if (a > eps) {
        s += q[k];
      }
    }
    c.truncated_norms.push_back(std::sqrt(s * h));
  }

  std::vector<double> lx, ly;
  for (std::size_t k = kFitDiscard; k < epsilons.size(); ++k) {
    lx.push_back(-std::log(epsilons[k]));
    ly.push_back(2.0 * std::log(c.truncated_norms[k]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  c.fitted_exponent = sxy / sxx;
  c.verdict = c.fitted_exponent >= exponent_threshold ? DivergenceVerdict::Diverges : DivergenceVerdict::Converges;
  return c;
}

std::string CocyclePair::to_json() const {
  return nlohmann::json{{"model", parse(model.to_json())},
                        {"relation", relation},
                        {"relation_residual", relation_residual},
                        {"f_norm", l2_norm(f)},
                        {"g_norm", l2_norm(g)}}
      .dump(2);
}

double case_profile(double s) { return bump_profile(s, 1.0, 3.5); }
double case_profile_derivative(double s) { return bump_profile_derivative(s, 1.0, 3.5); }

CocyclePair build_case1(int n, int j, double t, Parity parity, GridProfile profile) {
  check_case(n, j);
  const auto model = RepModel::ind_line(n, t, parity);
  const auto grids = model_grids(model, profile);
  const auto xj = static_cast<std::size_t>(j - 2);
  auto g = SampledFunction::sample(grids, [](std::span<const double> x) { return Complex(product_except(x, x.size())); });
  auto f = SampledFunction::sample(grids, [xj](std::span<const double> x) {
    return Complex(x[xj] * product_except(x, x.size()));
  });
  return finish(model, std::move(f), std::move(g), root(2, 1), root(2, j));
}

CocyclePair build_case2(int n, int j, double t, Parity parity, GridProfile profile) {
  check_case(n, j);
  const auto model = RepModel::ind_line(n, t, parity);
  const auto grids = model_grids(model, profile);
  const Complex c = Complex(n / 2.0 - 1.0, t);
  auto g = SampledFunction::sample(grids, [c](std::span<const double> x) {
    Complex v = c * product_except(x, x.size());
    for (std::size_t k = 0; k < x.size(); ++k) v += x[k] * case_profile_derivative(x[k]) * product_except(x, k);
    return v;
  });
  auto f = SampledFunction::sample(grids, [](std::span<const double> x) {
    return Complex(-case_profile_derivative(x[0]) * product_except(x, 0));
  });
  return finish(model, std::move(f), std::move(g), root(1, j), root(2, j));
}

DivergenceCertificate case1_candidate_density(const SampledFunction& g, const CandidateOptions& options) {
  const Grid1D& ax = g.grid(0);
  const double h = ax.spacing();
  const auto want = static_cast<std::size_t>(std::ceil(options.padded_length / h));
  const std::size_t np = std::bit_ceil(std::max(want, ax.n));
  Grid1D padded = ax;
  padded.n = np;
  padded.lo = ax.lo - static_cast<double>((np - ax.n) / 2) * h;
  padded.hi = padded.lo + static_cast<double>(np) * h;
  const Grid1D freq = frequency_grid(padded);

  // Transverse energy |g^(xi, .)|^2 accumulated one x_1 line at a time.
  const std::size_t lines = g.size() / ax.n, shift = (np - ax.n) / 2;
  std::vector<double> energy(np, 0.0);
  std::vector<Complex> buf(np);
  for (std::size_t line = 0; line < lines; ++line) {
    double measure = 1.0;
    const auto idx = g.unravel(line);
    for (std::size_t a = 1; a < g.dims(); ++a) measure *= g.grid(a).spacing() * g.grid(a).density(idx[a]);
    std::fill(buf.begin(), buf.end(), Complex{});
    bool any = false;
    for (std::size_t k = 0; k < ax.n; ++k) {
      buf[shift + k] = g[k * lines + line];
      any = any || buf[shift + k] != Complex{};
    }
    if (!any) continue;
    const auto G = fourier_axis(SampledFunction({padded}, buf), 0, Direction::Forward);
    for (std::size_t m = 0; m < np; ++m) energy[m] += std::norm(G[m]) * measure;
  }
  std::vector<double> q(np, 0.0);
  for (std::size_t m = 0; m < np; ++m) {
    const double xi = freq.point(m);
    if (!options.divide) {
      q[m] = energy[m];
    } else if (m != np / 2) {
      q[m] = energy[m] / (xi * xi);
    }
  }
  const auto eps = options.epsilons.empty() ? epsilon_ladder(128.0 * freq.spacing()) : options.epsilons;
  return certify_truncated_norms(freq, q, eps, options.exponent_threshold);
}

std::string Re4Example::to_json() const {
  return nlohmann::json{{"h_integral", h_integral},
                        {"lobe_amplitude", lobe_amplitude},
                        {"line", {{"lo", line.lo}, {"hi", line.hi}, {"n", line.n}, {"offset", line.offset}}},
                        {"certificate", parse(certificate.to_json())}}
      .dump(2);
}

double re4_profile(double s, double amplitude) {
  return bump_profile(s, 1.0, 2.0) - amplitude * bump_profile(std::abs(s) - 3.0, 0.25, 1.0);
}

Re4Example remark_re4_example(GridProfile profile) {
  const Grid1D line = make_grid(-8.0, 8.0, 8192, 0.0);
  // int h = 0 is linear in the lobe amplitude: A = int core / int lobes.
  double core = 0.0, lobes = 0.0;
  for (std::size_t k = 0; k < line.n; ++k) {
    core += re4_profile(line.point(k), 0.0);
    lobes += re4_profile(line.point(k), 0.0) - re4_profile(line.point(k), 1.0);
  }
  const double a = core / lobes;
  std::vector<double> h(line.n), q(line.n, 0.0);
  for (std::size_t k = 0; k < line.n; ++k) {
    const double x = line.point(k);
    h[k] = re4_profile(x, a);
    if (x != 0.0) q[k] = h[k] * h[k] / (x * x);
  }
  const double integral = std::accumulate(h.begin(), h.end(), 0.0) * line.spacing();
  auto certificate = certify_truncated_norms(line, q, epsilon_ladder(128.0 * line.spacing()));
  auto g = SampledFunction::sample(model_grids(RepModel::rho(0.0), profile), [a](std::span<const double> x) {
    return Complex(re4_profile(x[0], a) * re4_profile(x[1], a));
  });
  return Re4Example{std::move(g), line, std::move(h), integral, a, std::move(certificate)};
}

}  // namespace cohomlab
