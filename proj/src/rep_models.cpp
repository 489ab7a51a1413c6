#include "cohomlab/rep_models.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

#include "cohomlab/errors.hpp"
#include "generator_id.hpp"

namespace cohomlab {

namespace {

constexpr Complex kI{0.0, 1.0};

bool singular_coefficients(ModelKind k) { return k != ModelKind::IndLine; }

}  // namespace

// ---------------------------------------------------------------------------
// Names.

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Rho: return "rho";
    case ModelKind::DualRho: return "dual_rho";
    case ModelKind::Pi: return "pi";
    case ModelKind::Tau: return "tau";
    case ModelKind::IndLine: return "ind_line";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  for (auto k : {ModelKind::Rho, ModelKind::DualRho, ModelKind::Pi, ModelKind::Tau, ModelKind::IndLine})
    if (to_string(k) == s) return k;
  throw FormatError("unknown model kind '" + s + "'");
}

std::string to_string(Parity p) { return p == Parity::Plus ? "plus" : "minus"; }

Parity parse_parity(const std::string& s) {
  if (s == "plus" || s == "+") return Parity::Plus;
  if (s == "minus" || s == "-") return Parity::Minus;
  throw FormatError("unknown parity '" + s + "'");
}

std::string to_string(GridProfile p) {
  switch (p) {
    case GridProfile::Default: return "default";
    case GridProfile::Fine: return "fine";
    case GridProfile::Coarse: return "coarse";
  }
  return "?";
}

GridProfile parse_grid_profile(const std::string& s) {
  for (auto p : {GridProfile::Default, GridProfile::Fine, GridProfile::Coarse})
    if (to_string(p) == s) return p;
  throw FormatError("unknown grid profile '" + s + "'");
}

// ---------------------------------------------------------------------------
// Generator ids.

namespace detail {

GeneratorId parse_generator(const std::string& gen) {
  GeneratorId id;
  id.text = gen;
  auto parse_int = [&](const std::string& s) {
    if (s.empty() || s.size() > 3) throw AlphabetError("malformed generator id '" + gen + "'");
    for (char c : s)
      if (c < '0' || c > '9') throw AlphabetError("malformed generator id '" + gen + "'");
    return std::stoi(s);
  };
  if (gen.rfind("u_", 0) == 0) {
    const auto rest = gen.substr(2);
    const auto sep = rest.find('_');
    if (sep == std::string::npos) throw AlphabetError("malformed generator id '" + gen + "'");
    id.indexed = true;
    id.basis = BasisElement::root(parse_int(rest.substr(0, sep)), parse_int(rest.substr(sep + 1)));
  } else if (gen.rfind("X_", 0) == 0) {
    id.indexed = true;
    id.basis = BasisElement::diagonal(parse_int(gen.substr(2)));
  }
  return id;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// RepModel.

RepModel RepModel::rho(double t) {
  RepModel m;
  m.kind = ModelKind::Rho;
  m.t = t;
  return m;
}

RepModel RepModel::dual_rho(double t, bool fourier) {
  RepModel m;
  m.kind = ModelKind::DualRho;
  m.t = t;
  m.fourier = fourier;
  return m;
}

RepModel RepModel::pi(double t, double r) {
  RepModel m;
  m.kind = ModelKind::Pi;
  m.t = t;
  m.r = r;
  return m;
}

RepModel RepModel::tau(double t, double r, double z) {
  RepModel m;
  m.kind = ModelKind::Tau;
  m.t = t;
  m.r = r;
  m.z = z;
  return m;
}

RepModel RepModel::ind_line(int n, double t, Parity parity) {
  if (n < 3) throw DimensionError("IndLine needs n >= 3");
  RepModel m;
  m.kind = ModelKind::IndLine;
  m.n = n;
  m.t = t;
  m.parity = parity;
  return m;
}

std::vector<std::string> RepModel::alphabet() const {
  switch (kind) {
    case ModelKind::Rho:
    case ModelKind::DualRho: return {"X", "U", "V", "Y1", "Y2"};
    case ModelKind::Pi: return {"X", "U1", "U2", "U3", "V1", "Y1", "Y2", "Y3"};
    case ModelKind::Tau: return {"X", "U1", "V1", "Y3"};
    case ModelKind::IndLine: {
      std::vector<std::string> out;
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
          if (i != j) out.push_back(BasisElement::root(i, j).label());
      for (int i = 1; i < n; ++i) out.push_back(BasisElement::diagonal(i).label());
      return out;
    }
  }
  return {};
}

bool RepModel::has_generator(const std::string& gen) const {
  for (const auto& a : alphabet())
    if (a == gen) return true;
  return false;
}

std::size_t RepModel::dimension() const {
  switch (kind) {
    case ModelKind::Pi: return 3;
    case ModelKind::IndLine: return static_cast<std::size_t>(n - 1);
    default: return 2;
  }
}

std::string RepModel::to_json() const {
  nlohmann::json params;
  switch (kind) {
    case ModelKind::Rho: params = {{"t", t}}; break;
    case ModelKind::DualRho: params = {{"t", t}, {"fourier", fourier}}; break;
    case ModelKind::Pi: params = {{"t", t}, {"r", r}}; break;
    case ModelKind::Tau: params = {{"t", t}, {"r", r}, {"z", z}}; break;
    case ModelKind::IndLine: params = {{"n", n}, {"t", t}, {"parity", to_string(parity)}}; break;
  }
  return nlohmann::json{{"kind", to_string(kind)}, {"params", params}}.dump();
}

RepModel RepModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model descriptor: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind")) throw FormatError("model descriptor needs a kind");
  const auto kind = parse_model_kind(j["kind"].get<std::string>());
  const nlohmann::json p = j.value("params", nlohmann::json::object());
  try {
    switch (kind) {
      case ModelKind::Rho: return rho(p.value("t", 0.0));
      case ModelKind::DualRho: return dual_rho(p.value("t", 0.0), p.value("fourier", false));
      case ModelKind::Pi: return pi(p.value("t", 0.0), p.value("r", 0.0));
      case ModelKind::Tau: return tau(p.value("t", 0.0), p.value("r", 0.0), p.value("z", 0.0));
      case ModelKind::IndLine:
        return ind_line(p.value("n", 3), p.value("t", 0.0),
                        parse_parity(p.value("parity", std::string("plus"))));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad model parameter: ") + e.what());
  }
  throw FormatError("unreachable model kind");
}

// ---------------------------------------------------------------------------
// Grids and test vectors.

std::size_t profile_samples(GridProfile profile, std::size_t dims) {
  const std::size_t base = dims >= 3 ? 64 : 256;
  switch (profile) {
    case GridProfile::Fine: return 2 * base;
    case GridProfile::Coarse: return base / 2;
    default: return base;
  }
}

std::vector<Grid1D> model_grids(const RepModel& model, GridProfile profile) {
  return model_grids(model, profile_samples(profile, model.dimension()));
}

std::vector<Grid1D> model_grids(const RepModel& model, std::size_t n_per_axis) {
  constexpr double L = 8.0;
  std::vector<Grid1D> grids(model.dimension(), make_grid(-L, L, n_per_axis, 0.5));
  if (model.kind == ModelKind::DualRho) {
    grids[0].weight = Measure::AbsX;
    if (model.fourier) {
      if (n_per_axis % 2 != 0) throw DomainError("Fourier-side grids need an even sample count");
      grids[1] = make_grid(-L, L, n_per_axis, 0.0);
    }
  }
  return grids;
}

std::vector<SampledFunction> bump_family(const RepModel& model, const std::vector<Grid1D>& grids) {
  const std::size_t d = grids.size();
  if (d != model.dimension()) throw DimensionError("grid count does not match the model");
  struct Spec {
    double plateau, support;
    std::vector<double> center;
    std::vector<double> wave;  // plane-wave modulation exp(i k.x)
  };
  std::vector<Spec> specs;
  // Wide transitions keep the spectral truncation error of second-order
  // operator identities near 1e-5 at 256 samples per axis.
  if (singular_coefficients(model.kind)) {
    specs = {{0.25, 3.5, {4.2, 0.0, 0.0}, {}},
             {0.25, 3.5, {-4.2, 0.5, -0.5}, {}},
             {0.25, 3.3, {4.3, -0.5, 0.5}, {1.0, -0.5, 0.5}}};
  } else {
    specs = {{1.0, 4.0, {0.0, 0.0, 0.0}, {}},
             {0.25, 3.5, {0.5, -0.5, 0.5}, {}},
             {0.25, 3.5, {-0.5, 1.0, 0.0}, {1.0, -0.5, 0.5}}};
  }
  std::vector<SampledFunction> out;
  for (auto& s : specs) {
    s.center.resize(d);
    auto f = bump(grids, s.plateau, s.support, s.center);
    if (!s.wave.empty()) {
      s.wave.resize(d);
      auto wave = SampledFunction::sample(grids, [&](std::span<const double> x) {
        double phase = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) phase += s.wave[a] * x[a];
        return std::polar(1.0, phase);
      });
      f = hadamard(f, wave);
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derived representation.

namespace {

using SF = SampledFunction;

// Boundary tolerance for the current application. Differential operators do
// not enlarge supports, so only the input of a word is checked; intermediate
// results (whose edge samples carry spectral ringing) pass kUnchecked.
constexpr double kUnchecked = std::numeric_limits<double>::infinity();

SF D(const SF& f, std::size_t axis, double tol) { return differentiate(f, axis, tol); }
// Derivative of an intermediate result.
SF Dn(const SF& f, std::size_t axis) { return differentiate(f, axis, kUnchecked); }
SF M(const SF& f, std::size_t axis, int power) { return coord_multiply(f, axis, power); }

[[noreturn]] void not_in_alphabet(const RepModel& model, const std::string& gen) {
  throw AlphabetError("generator '" + gen + "' is not in the " + to_string(model.kind) +
                      " alphabet");
}

SF apply_rho(const RepModel& m, const std::string& g, const SF& f, double tol) {
  // X = -x dx + y dy, U = i t x^-2 - y dx, V = -x dy, Y1 = -i y, Y2 = i x.
  if (g == "X") return M(D(f, 1, tol), 1, 1) - M(D(f, 0, tol), 0, 1);
  if (g == "U") {
    SF out = -1.0 * M(D(f, 0, tol), 1, 1);
    if (m.t != 0.0) out = out + (kI * m.t) * M(f, 0, -2);
    return out;
  }
  if (g == "V") return -1.0 * M(D(f, 1, tol), 0, 1);
  if (g == "Y1") return -kI * M(f, 1, 1);
  if (g == "Y2") return kI * M(f, 0, 1);
  not_in_alphabet(m, g);
}

SF apply_dual(const RepModel& m, const std::string& g, const SF& f, double tol) {
  if (!m.fourier) {
    // Coordinates (x, lambda):
    // X = -x dx + 2 l dl, U = i t x^-2 - l x dx + l^2 dl, V = -dl,
    // Y1 = -i x l, Y2 = i x.
    if (g == "X") return 2.0 * M(D(f, 1, tol), 1, 1) - M(D(f, 0, tol), 0, 1);
    if (g == "U") {
      SF out = M(D(f, 1, tol), 1, 2) - M(M(D(f, 0, tol), 0, 1), 1, 1);
      if (m.t != 0.0) out = out + (kI * m.t) * M(f, 0, -2);
      return out;
    }
    if (g == "V") return -1.0 * D(f, 1, tol);
    if (g == "Y1") return -kI * M(M(f, 0, 1), 1, 1);
    if (g == "Y2") return kI * M(f, 0, 1);
    not_in_alphabet(m, g);
  }
  // Coordinates (x, y), y dual to lambda:
  // X = -2 - x dx - 2 y dy, U = i t x^-2 - i x dx dy - 2 i dy - i y dy^2,
  // V = -i y, Y1 = x dy, Y2 = i x.
  if (g == "X") return -2.0 * f - M(D(f, 0, tol), 0, 1) - 2.0 * M(D(f, 1, tol), 1, 1);
  if (g == "U") {
    const SF fy = D(f, 1, tol);
    SF out = -kI * M(Dn(fy, 0), 0, 1) - (2.0 * kI) * fy - kI * M(Dn(fy, 1), 1, 1);
    if (m.t != 0.0) out = out + (kI * m.t) * M(f, 0, -2);
    return out;
  }
  if (g == "V") return -kI * M(f, 1, 1);
  if (g == "Y1") return M(D(f, 1, tol), 0, 1);
  if (g == "Y2") return kI * M(f, 0, 1);
  not_in_alphabet(m, g);
}

SF apply_pi(const RepModel& m, const std::string& g, const SF& f, double tol) {
  // X = x dx - y dy, U1 = -x dy, U2 = -x dz, U3 = y dz + i t x^-1,
  // V1 = -y dx + i (r + t z) x^-2, Y1 = i x, Y2 = -i y, Y3 = -i z.
  if (g == "X") return M(D(f, 0, tol), 0, 1) - M(D(f, 1, tol), 1, 1);
  if (g == "U1") return -1.0 * M(D(f, 1, tol), 0, 1);
  if (g == "U2") return -1.0 * M(D(f, 2, tol), 0, 1);
  if (g == "U3") {
    SF out = M(D(f, 2, tol), 1, 1);
    if (m.t != 0.0) out = out + (kI * m.t) * M(f, 0, -1);
    return out;
  }
  if (g == "V1") {
    SF out = -1.0 * M(D(f, 0, tol), 1, 1);
    if (m.r != 0.0 || m.t != 0.0) {
      const SF fx2 = M(f, 0, -2);
      out = out + (kI * m.r) * fx2 + (kI * m.t) * M(fx2, 2, 1);
    }
    return out;
  }
  if (g == "Y1") return kI * M(f, 0, 1);
  if (g == "Y2") return -kI * M(f, 1, 1);
  if (g == "Y3") return -kI * M(f, 2, 1);
  not_in_alphabet(m, g);
}

SF apply_tau(const RepModel& m, const std::string& g, const SF& f, double tol) {
  // Fiber z of Pi: X = x dx - y dy, U1 = -x dy, V1 = -y dx + i (r + t z) x^-2,
  // Y3 = -i z.
  if (g == "X") return M(D(f, 0, tol), 0, 1) - M(D(f, 1, tol), 1, 1);
  if (g == "U1") return -1.0 * M(D(f, 1, tol), 0, 1);
  if (g == "V1") {
    SF out = -1.0 * M(D(f, 0, tol), 1, 1);
    const double coeff = m.r + m.t * m.z;
    if (coeff != 0.0) out = out + (kI * coeff) * M(f, 0, -2);
    return out;
  }
  if (g == "Y3") return (-kI * m.z) * f;
  not_in_alphabet(m, g);
}

SF euler(const SF& f, double tol) {
  SF out = M(D(f, 0, tol), 0, 1);
  for (std::size_t k = 1; k < f.dims(); ++k) out = out + M(D(f, k, tol), k, 1);
  return out;
}

SF apply_ind(const RepModel& m, const std::string& g, const SF& f, double tol) {
  const auto id = detail::parse_generator(g);
  if (!id.indexed || !m.has_generator(g)) not_in_alphabet(m, g);
  const Complex c0(m.n / 2.0, m.t);
  const auto& b = id.basis;
  if (b.kind == BasisElement::Kind::Diagonal) {
    const auto i = static_cast<std::size_t>(b.i);
    if (i == 1) return c0 * f + M(D(f, 0, tol), 0, 1) + euler(f, tol);
    return M(D(f, i - 1, tol), i - 1, 1) - M(D(f, i - 2, tol), i - 2, 1);
  }
  const auto i = static_cast<std::size_t>(b.i);
  const auto j = static_cast<std::size_t>(b.j);
  if (i == 1) return M(c0 * f + euler(f, tol), j - 2, 1);
  if (j == 1) return -1.0 * D(f, i - 2, tol);
  return -1.0 * M(D(f, i - 2, tol), j - 2, 1);
}

}  // namespace

namespace {

SF dispatch(const RepModel& model, const std::string& gen, const SF& f, double tol) {
  if (f.dims() != model.dimension())
    throw DimensionError("function has " + std::to_string(f.dims()) + " axes, model needs " +
                         std::to_string(model.dimension()));
  switch (model.kind) {
    case ModelKind::Rho: return apply_rho(model, gen, f, tol);
    case ModelKind::DualRho: return apply_dual(model, gen, f, tol);
    case ModelKind::Pi: return apply_pi(model, gen, f, tol);
    case ModelKind::Tau: return apply_tau(model, gen, f, tol);
    case ModelKind::IndLine: return apply_ind(model, gen, f, tol);
  }
  not_in_alphabet(model, gen);
}

}  // namespace

SampledFunction apply_generator(const RepModel& model, const std::string& gen,
                                const SampledFunction& f, double boundary_tol) {
  return dispatch(model, gen, f, boundary_tol);
}

SampledFunction apply_word(const RepModel& model, const GeneratorWord& word,
                           const SampledFunction& f, double boundary_tol) {
  for (const auto& g : word)
    if (!model.has_generator(g)) not_in_alphabet(model, g);
  SampledFunction out = f;
  double tol = boundary_tol;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    out = dispatch(model, *it, out, tol);
    tol = kUnchecked;
  }
  return out;
}

double sobolev_norm(const RepModel& model, const SampledFunction& f, int k, double boundary_tol) {
  if (k < 0) throw DomainError("Sobolev index must be nonnegative");
  const auto letters = model.alphabet();
  const double base = l2_norm(f);
  double total = base * base;
  // Depth-first over words: each child prepends one letter to its parent.
  std::function<void(const SampledFunction&, int)> walk = [&](const SampledFunction& v, int depth) {
    if (depth == k) return;
    for (const auto& g : letters) {
      const auto w = dispatch(model, g, v, depth == 0 ? boundary_tol : kUnchecked);
      const double nw = l2_norm(w);
      total += nw * nw;
      walk(w, depth + 1);
    }
  };
  walk(f, 0);
  return std::sqrt(total);
}

SampledFunction casimir_apply(const RepModel& model, const SampledFunction& f) {
  if (model.kind != ModelKind::Rho && model.kind != ModelKind::DualRho)
    throw AlphabetError("the Casimir is defined for the sl(2) models only");
  return -1.0 * apply_word(model, {"X", "X"}, f) -
         2.0 * (apply_word(model, {"U", "V"}, f) + apply_word(model, {"V", "U"}, f));
}

// ---------------------------------------------------------------------------
// Embedding in sl(m).

int embedding_rank(const RepModel& model) {
  switch (model.kind) {
    case ModelKind::Rho:
    case ModelKind::DualRho: return 3;
    case ModelKind::Pi:
    case ModelKind::Tau: return 4;
    case ModelKind::IndLine: return model.n;
  }
  return 0;
}

namespace {

std::optional<BasisElement> named_basis(ModelKind kind, const std::string& gen) {
  using B = BasisElement;
  const bool sl2 = kind == ModelKind::Rho || kind == ModelKind::DualRho;
  if (gen == "X") return B::diagonal(1);
  if (sl2) {
    if (gen == "U") return B::root(1, 2);
    if (gen == "V") return B::root(2, 1);
    if (gen == "Y1") return B::root(1, 3);
    if (gen == "Y2") return B::root(2, 3);
    return std::nullopt;
  }
  if (gen == "U1") return B::root(1, 2);
  if (gen == "V1") return B::root(2, 1);
  if (gen == "Y3") return B::root(3, 4);
  if (kind == ModelKind::Pi) {
    if (gen == "U2") return B::root(1, 3);
    if (gen == "U3") return B::root(2, 3);
    if (gen == "Y1") return B::root(1, 4);
    if (gen == "Y2") return B::root(2, 4);
  }
  return std::nullopt;
}

}  // namespace

SlElement generator_matrix(const RepModel& model, const std::string& gen) {
  if (!model.has_generator(gen)) not_in_alphabet(model, gen);
  const int m = embedding_rank(model);
  if (model.kind == ModelKind::IndLine) return SlElement::basis(detail::parse_generator(gen).basis, m);
  return SlElement::basis(*named_basis(model.kind, gen), m);
}

std::optional<std::string> generator_for(const RepModel& model, const BasisElement& b) {
  for (const auto& g : model.alphabet()) {
    const auto e = model.kind == ModelKind::IndLine ? std::optional(detail::parse_generator(g).basis)
                                                    : named_basis(model.kind, g);
    if (e && *e == b) return g;
  }
  return std::nullopt;
}

}  // namespace cohomlab
