#include <cmath>
#include <optional>

#include "cohomlab/errors.hpp"
#include "cohomlab/rep_models.hpp"
#include "generator_id.hpp"

namespace cohomlab {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr std::size_t kFourierPad = 4;
using Point = std::array<double, 3>;

bool linear_identity(const GroupElement& g) {
  return g.a == 1.0 && g.b == 0.0 && g.c == 0.0 && g.d == 1.0 && g.u1 == 0.0 && g.u2 == 0.0;
}

}  // namespace

GroupElement GroupElement::identity(ModelKind kind) {
  GroupElement g;
  g.kind = kind;
  return g;
}

GroupElement GroupElement::linear(ModelKind kind, double a, double b, double c, double d) {
  GroupElement g = identity(kind);
  g.a = a;
  g.b = b;
  g.c = c;
  g.d = d;
  g.validate();
  return g;
}

GroupElement GroupElement::translation(ModelKind kind, double v1, double v2, double v3) {
  GroupElement g = identity(kind);
  g.v1 = v1;
  g.v2 = v2;
  g.v3 = v3;
  return g;
}

bool GroupElement::is_identity() const {
  if (kind == ModelKind::IndLine) {
    for (const auto& f : factors)
      if (f.s != 0.0) return false;
    return true;
  }
  return linear_identity(*this) && v1 == 0.0 && v2 == 0.0 && v3 == 0.0;
}

void GroupElement::validate() const {
  if (kind == ModelKind::IndLine) return;
  if (std::abs(a * d - b * c - 1.0) > 1e-12)
    throw DomainError("group element violates ad - bc = 1 (det = " + std::to_string(a * d - b * c) + ")");
}

namespace {

// Inverse of the affine 3x3 matrix [[a, b, u1], [c, d, u2], [0, 0, 1]] applied
// to (w1, w2, w3).
std::array<double, 3> affine_inverse_apply(const GroupElement& g, double w1, double w2, double w3) {
  // A^-1 = [[d, -b], [-c, a]]; (A^-1 (w12 - u w3), w3).
  const double r1 = w1 - g.u1 * w3;
  const double r2 = w2 - g.u2 * w3;
  return {g.d * r1 - g.b * r2, -g.c * r1 + g.a * r2, w3};
}

std::array<double, 3> affine_apply(const GroupElement& g, double w1, double w2, double w3) {
  return {g.a * w1 + g.b * w2 + g.u1 * w3, g.c * w1 + g.d * w2 + g.u2 * w3, w3};
}

void require_same_kind(const GroupElement& g1, const GroupElement& g2) {
  if (g1.kind != g2.kind) throw DomainError("group elements of different models");
}

}  // namespace

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  require_same_kind(g1, g2);
  GroupElement out = GroupElement::identity(g1.kind);
  if (g1.kind == ModelKind::IndLine) {
    out.factors = g1.factors;
    out.factors.insert(out.factors.end(), g2.factors.begin(), g2.factors.end());
    return out;
  }
  out.a = g1.a * g2.a + g1.b * g2.c;
  out.b = g1.a * g2.b + g1.b * g2.d;
  out.c = g1.c * g2.a + g1.d * g2.c;
  out.d = g1.c * g2.b + g1.d * g2.d;
  if (g1.kind == ModelKind::Pi) {
    out.u1 = g1.a * g2.u1 + g1.b * g2.u2 + g1.u1;
    out.u2 = g1.c * g2.u1 + g1.d * g2.u2 + g1.u2;
  }
  switch (g1.kind) {
    case ModelKind::Tau: out.v3 = g1.v3 + g2.v3; break;
    case ModelKind::Pi: {
      const auto w = affine_inverse_apply(g2, g1.v1, g1.v2, g1.v3);
      out.v1 = w[0] + g2.v1;
      out.v2 = w[1] + g2.v2;
      out.v3 = w[2] + g2.v3;
      break;
    }
    default: {
      const auto w = affine_inverse_apply(g2, g1.v1, g1.v2, 0.0);
      out.v1 = w[0] + g2.v1;
      out.v2 = w[1] + g2.v2;
      break;
    }
  }
  return out;
}

GroupElement inverse(const GroupElement& g) {
  GroupElement out = GroupElement::identity(g.kind);
  if (g.kind == ModelKind::IndLine) {
    for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it) out.factors.push_back({it->generator, -it->s});
    return out;
  }
  out.a = g.d;
  out.b = -g.b;
  out.c = -g.c;
  out.d = g.a;
  if (g.kind == ModelKind::Pi) {
    out.u1 = -(g.d * g.u1 - g.b * g.u2);
    out.u2 = -(-g.c * g.u1 + g.a * g.u2);
  }
  // (g, v)^-1 = (g^-1, -g v).
  if (g.kind == ModelKind::Tau) {
    out.v3 = -g.v3;
  } else {
    const auto w = affine_apply(g, g.v1, g.v2, g.kind == ModelKind::Pi ? g.v3 : 0.0);
    out.v1 = -w[0];
    out.v2 = -w[1];
    if (g.kind == ModelKind::Pi) out.v3 = -w[2];
  }
  return out;
}

GroupElement exp_generator(const RepModel& model, const std::string& gen, double s) {
  if (!model.has_generator(gen))
    throw AlphabetError("generator '" + gen + "' is not in the " + to_string(model.kind) + " alphabet");
  GroupElement g = GroupElement::identity(model.kind);
  if (model.kind == ModelKind::IndLine) {
    g.factors.push_back({detail::parse_generator(gen).basis, s});
    return g;
  }
  if (gen == "X") {
    g.a = std::exp(s);
    g.d = std::exp(-s);
    return g;
  }
  const bool sl2 = model.kind == ModelKind::Rho || model.kind == ModelKind::DualRho;
  if (sl2) {
    if (gen == "U") g.b = s;
    else if (gen == "V") g.c = s;
    else if (gen == "Y1") g.v1 = s;
    else if (gen == "Y2") g.v2 = s;
    return g;
  }
  if (gen == "U1") g.b = s;
  else if (gen == "V1") g.c = s;
  else if (gen == "U2") g.u1 = s;
  else if (gen == "U3") g.u2 = s;
  else if (gen == "Y1") g.v1 = s;
  else if (gen == "Y2") g.v2 = s;
  else if (gen == "Y3") g.v3 = s;
  return g;
}

// ---------------------------------------------------------------------------
// Pointwise form.

namespace {

void require_pointwise(const RepModel& model, const GroupElement& g) {
  if (model.kind != g.kind) throw DomainError("group element does not belong to the model");
  if (model.kind == ModelKind::DualRho && model.fourier)
    throw DomainError("the Fourier-side dual model has no pointwise action");
  if (model.kind == ModelKind::IndLine && g.factors.size() > 1)
    throw DomainError("pointwise action needs a single one-parameter factor");
}

Point ind_source(const RepModel& model, const OneParameter& f, const Point& p) {
  Point q = p;
  const auto& b = f.generator;
  const std::size_t dims = static_cast<std::size_t>(model.n - 1);
  if (b.kind == BasisElement::Kind::Diagonal) {
    if (b.i == 1) {
      q[0] = std::exp(2.0 * f.s) * p[0];
      for (std::size_t k = 1; k < dims; ++k) q[k] = std::exp(f.s) * p[k];
    } else {
      const auto i = static_cast<std::size_t>(b.i);
      q[i - 2] = std::exp(-f.s) * p[i - 2];
      q[i - 1] = std::exp(f.s) * p[i - 1];
    }
    return q;
  }
  const auto i = static_cast<std::size_t>(b.i);
  const auto j = static_cast<std::size_t>(b.j);
  if (i == 1) {
    const double w = 1.0 - p[j - 2] * f.s;
    for (std::size_t k = 0; k < dims; ++k) q[k] = p[k] / w;
  } else if (j == 1) {
    q[i - 2] = p[i - 2] - f.s;
  } else {
    q[i - 2] = p[i - 2] - f.s * p[j - 2];
  }
  return q;
}

Complex ind_multiplier(const RepModel& model, const OneParameter& f, const Point& p) {
  const auto& b = f.generator;
  if (b.kind == BasisElement::Kind::Diagonal) {
    if (b.i != 1) return 1.0;
    return std::exp(Complex(f.s * model.n / 2.0, model.t * f.s));
  }
  if (b.i != 1) return 1.0;
  const double w = 1.0 - p[static_cast<std::size_t>(b.j) - 2] * f.s;
  // |w|^{-n/2 - i t} eps(w)
  const double aw = std::abs(w);
  Complex m = std::pow(aw, -model.n / 2.0) * std::polar(1.0, -model.t * std::log(aw));
  if (model.parity == Parity::Minus && w < 0.0) m = -m;
  return m;
}

// Denominator whose vanishing makes the multiplier singular, if any.
std::optional<double> denominator(const RepModel& model, const GroupElement& g, const Point& p) {
  switch (model.kind) {
    case ModelKind::Rho:
      if (g.b == 0.0) return std::nullopt;
      return p[0] * (g.d * p[0] - g.b * p[1]);
    case ModelKind::DualRho:
      if (g.b == 0.0) return std::nullopt;
      return p[0] * (g.d * p[0] - g.b * p[1] * p[0]);
    case ModelKind::Pi: {
      const double D = g.a * p[0] - g.c * p[1];
      if (g.c != 0.0) return p[0] * D;
      if (g.u2 != 0.0) return D;
      return std::nullopt;
    }
    case ModelKind::Tau:
      if (g.c == 0.0) return std::nullopt;
      return p[0] * (g.a * p[0] - g.c * p[1]);
    case ModelKind::IndLine: {
      if (g.factors.empty()) return std::nullopt;
      const auto& f = g.factors.front();
      if (f.generator.kind != BasisElement::Kind::Root || f.generator.i != 1) return std::nullopt;
      return 1.0 - p[static_cast<std::size_t>(f.generator.j) - 2] * f.s;
    }
  }
  return std::nullopt;
}

}  // namespace

Point source_point(const RepModel& model, const GroupElement& g, const Point& p) {
  require_pointwise(model, g);
  switch (model.kind) {
    case ModelKind::Rho:
      return {g.d * p[0] - g.b * p[1], -g.c * p[0] + g.a * p[1], 0.0};
    case ModelKind::Tau:
      return {g.a * p[0] - g.c * p[1], -g.b * p[0] + g.d * p[1], 0.0};
    case ModelKind::DualRho: {
      // (x, l) -> (x', y'/x') with (x', y') the Rho image of (x, l x).
      const double y = p[1] * p[0];
      const double xs = g.d * p[0] - g.b * y;
      const double ys = -g.c * p[0] + g.a * y;
      return {xs, ys / xs, 0.0};
    }
    case ModelKind::Pi:
      return {g.a * p[0] - g.c * p[1], -g.b * p[0] + g.d * p[1], -g.u1 * p[0] + g.u2 * p[1] + p[2]};
    case ModelKind::IndLine:
      if (g.factors.empty()) return p;
      return ind_source(model, g.factors.front(), p);
  }
  return p;
}

Complex multiplier(const RepModel& model, const GroupElement& g, const Point& p) {
  require_pointwise(model, g);
  switch (model.kind) {
    case ModelKind::Rho: {
      const Point q = source_point(model, g, p);
      double phase = g.v2 * q[0] - g.v1 * q[1];
      if (g.b != 0.0) phase += g.b * model.t / (p[0] * q[0]);
      return std::polar(1.0, phase);
    }
    case ModelKind::DualRho: {
      const Point q = source_point(model, g, p);
      double phase = g.v2 * q[0] - g.v1 * q[1] * q[0];
      if (g.b != 0.0) phase += g.b * model.t / (p[0] * q[0]);
      return std::polar(1.0, phase);
    }
    case ModelKind::Pi: {
      const Point q = source_point(model, g, p);
      double phase = q[0] * g.v1 - q[1] * g.v2 - q[2] * g.v3;
      const double D = q[0];
      if (g.c != 0.0 || g.u2 != 0.0) {
        const double p1 = g.c == 0.0 ? 0.0 : g.c / (p[0] * D);
        const double p2 = p[2] * p1 + (-g.c * g.u1 + g.a * g.u2) / D;
        phase += p1 * model.r + p2 * model.t;
      }
      return std::polar(1.0, phase);
    }
    case ModelKind::Tau: {
      double phase = -model.z * g.v3;
      if (g.c != 0.0) {
        const double p1 = g.c / (p[0] * (g.a * p[0] - g.c * p[1]));
        phase += p1 * model.r + p1 * model.z * model.t;
      }
      return std::polar(1.0, phase);
    }
    case ModelKind::IndLine:
      if (g.factors.empty()) return 1.0;
      return ind_multiplier(model, g.factors.front(), p);
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Resampling.

namespace {

constexpr double kLagrangeDenominators[6] = {-120.0, 24.0, -12.0, 12.0, -24.0, 120.0};

struct Stencil {
  long base = 0;
  double w[6] = {0, 0, 0, 0, 0, 0};
};

// 6-point Lagrange weights for the value at coordinate q. Returns false when
// no node of the stencil lies on the grid.
bool make_stencil(const Grid1D& g, double q, Stencil& st) {
  const double s = (q - g.lo) / g.spacing() - g.offset;
  if (!std::isfinite(s)) return false;
  const double fl = std::floor(s);
  const double t = s - fl;
  st.base = static_cast<long>(fl) - 2;
  if (st.base + 5 < 0 || st.base >= static_cast<long>(g.n)) return false;
  for (int m = 0; m < 6; ++m) {
    double num = 1.0;
    for (int k = 0; k < 6; ++k)
      if (k != m) num *= t - (k - 2);
    st.w[m] = num / kLagrangeDenominators[m];
  }
  return true;
}

Complex interpolate(const SampledFunction& f, const Point& q) {
  const std::size_t dims = f.dims();
  Stencil st[3];
  for (std::size_t a = 0; a < dims; ++a)
    if (!make_stencil(f.grid(a), q[a], st[a])) return 0.0;
  const long n0 = static_cast<long>(f.extent(0));
  const long n1 = dims > 1 ? static_cast<long>(f.extent(1)) : 1;
  const long n2 = dims > 2 ? static_cast<long>(f.extent(2)) : 1;
  const int m1 = dims > 1 ? 6 : 1;
  const int m2 = dims > 2 ? 6 : 1;
  Complex acc{};
  for (int i = 0; i < 6; ++i) {
    const long k0 = st[0].base + i;
    if (k0 < 0 || k0 >= n0) continue;
    for (int j = 0; j < m1; ++j) {
      const long k1 = dims > 1 ? st[1].base + j : 0;
      if (k1 < 0 || k1 >= n1) continue;
      const double w01 = st[0].w[i] * (dims > 1 ? st[1].w[j] : 1.0);
      for (int k = 0; k < m2; ++k) {
        const long k2 = dims > 2 ? st[2].base + k : 0;
        if (k2 < 0 || k2 >= n2) continue;
        const double w = w01 * (dims > 2 ? st[2].w[k] : 1.0);
        acc += w * f[static_cast<std::size_t>((k0 * n1 + k1) * n2 + k2)];
      }
    }
  }
  return acc;
}

void check_range(const RepModel& model, const GroupElement& g, const SampledFunction& f, double cut) {
  const GroupElement ginv = inverse(g);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    if (std::abs(f[flat]) <= cut) continue;
    const Point q = f.coords(flat);
    const Point p = source_point(model, ginv, q);
    for (std::size_t a = 0; a < f.dims(); ++a) {
      const auto& gr = f.grid(a);
      if (!(p[a] >= gr.lo && p[a] <= gr.hi))
        throw RangeError("group action moves the support of f out of the box on axis " +
                         std::to_string(a));
    }
  }
}

void check_singular(const RepModel& model, const GroupElement& g, const SampledFunction& out,
                    double cut) {
  std::vector<double> den(out.size(), 0.0);
  std::vector<char> live(out.size(), 0);
  bool any = false;
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    if (std::abs(out[flat]) <= cut) continue;
    const auto dv = denominator(model, g, out.coords(flat));
    if (!dv) return;
    any = true;
    if (std::abs(*dv) < 1e-12) throw SingularValueError("multiplier denominator vanishes on the support");
    den[flat] = *dv;
    live[flat] = 1;
  }
  if (!any) return;
  for (std::size_t a = 0; a < out.dims(); ++a) {
    const std::size_t stride = out.stride(a);
    const std::size_t n = out.extent(a);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      if ((flat / stride) % n + 1 >= n) continue;
      const std::size_t next = flat + stride;
      if (live[flat] && live[next] && (den[flat] > 0) != (den[next] > 0))
        throw SingularValueError("multiplier denominator changes sign inside the support");
    }
  }
}

SampledFunction apply_single(const RepModel& model, const GroupElement& g, const SampledFunction& f) {
  if (g.is_identity()) return f;
  const double peak = f.max_abs();
  if (peak == 0.0) return f;
  const double cut = kBoundaryTolerance * peak;
  std::vector<Complex> v(f.size());
  const bool pure_translation = model.kind != ModelKind::IndLine && linear_identity(g);
  if (pure_translation) {
    for (std::size_t flat = 0; flat < f.size(); ++flat)
      if (f[flat] != Complex{}) v[flat] = multiplier(model, g, f.coords(flat)) * f[flat];
    return f.with_values(std::move(v));
  }
  check_range(model, g, f, cut);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const Point p = f.coords(flat);
    const Complex val = interpolate(f, source_point(model, g, p));
    if (std::abs(val) <= cut) continue;
    v[flat] = multiplier(model, g, p) * val;
  }
  auto out = f.with_values(std::move(v));
  check_singular(model, g, out, cut);
  return out;
}

}  // namespace

SampledFunction apply_group(const RepModel& model, const GroupElement& g, const SampledFunction& f) {
  if (model.kind != g.kind) throw DomainError("group element does not belong to the model");
  if (f.dims() != model.dimension()) throw DimensionError("function does not match the model");
  g.validate();
  if (model.kind == ModelKind::IndLine) {
    SampledFunction out = f;
    for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it) {
      GroupElement single = GroupElement::identity(ModelKind::IndLine);
      single.factors.push_back(*it);
      out = apply_single(model, single, out);
    }
    return out;
  }
  if (model.kind == ModelKind::DualRho && model.fourier) {
    if (g.is_identity()) return f;
    // Conjugate the lambda-side action by the Fourier transform on axis 1.
    // Zero-padding y refines the lambda grid, whose spacing 2 pi / (y range)
    // would otherwise not shrink with n and would limit the interpolation.
    RepModel side = model;
    side.fourier = false;
    const auto& gy = f.grid(1);
    const std::size_t nx = f.extent(0), ny = gy.n, shift = (kFourierPad - 1) * ny / 2;
    Grid1D wide = gy;
    wide.n = kFourierPad * ny;
    wide.lo = gy.lo - static_cast<double>(shift) * gy.spacing();
    wide.hi = wide.lo + static_cast<double>(wide.n) * gy.spacing();
    std::vector<Complex> padded(nx * wide.n, Complex{});
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t k = 0; k < ny; ++k) padded[i * wide.n + shift + k] = f[i * ny + k];
    const SampledFunction big({f.grid(0), wide}, std::move(padded));
    const auto lam = fourier_axis(big, 1, Direction::Inverse);
    const auto moved = apply_single(side, g, lam);
    const auto back = fourier_axis(moved, 1, Direction::Forward, wide);
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t k = 0; k < ny; ++k) out[i * ny + k] = back[i * wide.n + shift + k];
    return f.with_values(std::move(out));
  }
  return apply_single(model, g, f);
}

double unitarity_defect(const RepModel& model, const GroupElement& g, const SampledFunction& f) {
  const double nf = l2_norm(f);
  if (nf == 0.0) throw DomainError("unitarity defect of the zero vector");
  return std::abs(l2_norm(apply_group(model, g, f)) - nf) / nf;
}

}  // namespace cohomlab
