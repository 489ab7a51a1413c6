#include "cohomlab/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cohomlab/errors.hpp"
#include "fft.hpp"

namespace cohomlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::size_t> shape_of(const SampledFunction& f) {
  std::vector<std::size_t> shape;
  for (const auto& g : f.grids()) shape.push_back(g.n);
  return shape;
}

void require_axis(const SampledFunction& f, std::size_t axis) {
  if (axis >= f.dims())
    throw DomainError("axis " + std::to_string(axis) + " out of range for a " +
                      std::to_string(f.dims()) + "-d function");
}

void require_same_space(const SampledFunction& a, const SampledFunction& b) {
  if (!a.same_space(b)) throw DomainError("functions live on different grids");
}

// Calls fn(flat, k) for every sample, where k is the index along `axis`.
template <class Fn>
void for_each_along(const SampledFunction& f, std::size_t axis, Fn&& fn) {
  const std::size_t stride = f.stride(axis);
  const std::size_t n = f.extent(axis);
  std::size_t flat = 0;
  for (std::size_t outer = 0; outer < f.size() / (stride * n); ++outer)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t inner = 0; inner < stride; ++inner) fn(flat++, k);
}

}  // namespace

std::string to_string(Measure m) { return m == Measure::AbsX ? "abs_x" : "lebesgue"; }

Measure parse_measure(const std::string& s) {
  if (s == "lebesgue") return Measure::Lebesgue;
  if (s == "abs_x") return Measure::AbsX;
  throw FormatError("unknown measure '" + s + "'");
}

double Grid1D::density(std::size_t k) const {
  return weight == Measure::AbsX ? std::abs(point(k)) : 1.0;
}

std::vector<double> Grid1D::points() const {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = point(k);
  return x;
}

bool Grid1D::samples_zero() const {
  const double h = spacing();
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(point(k)) <= 1e-9 * h) return true;
  return false;
}

Grid1D make_grid(double lo, double hi, std::size_t n, double offset, Measure weight) {
  if (!(lo < hi)) throw DomainError("grid requires lo < hi");
  if (n < 8) throw DomainError("grid requires at least 8 samples");
  if (!(offset >= 0.0 && offset < 1.0)) throw DomainError("grid offset must lie in [0, 1)");
  return Grid1D{lo, hi, n, offset, weight};
}

Grid1D frequency_grid(const Grid1D& spatial) {
  const double dxi = kTwoPi / (static_cast<double>(spatial.n) * spatial.spacing());
  const double lo = -static_cast<double>(spatial.n / 2) * dxi;
  return Grid1D{lo, lo + static_cast<double>(spatial.n) * dxi, spatial.n, 0.0, Measure::Lebesgue};
}

// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(std::vector<Grid1D> grids, std::vector<Complex> values)
    : grids_(std::move(grids)), values_(std::move(values)) {
  if (grids_.empty() || grids_.size() > 3)
    throw DomainError("sampled functions have 1 to 3 axes");
  std::size_t total = 1;
  for (const auto& g : grids_) {
    make_grid(g.lo, g.hi, g.n, g.offset, g.weight);
    total *= g.n;
  }
  if (values_.size() != total)
    throw DomainError("value count " + std::to_string(values_.size()) +
                      " does not match grid shape (" + std::to_string(total) + ")");
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DomainError("sampled function contains non-finite values");
  std::size_t s = 1;
  for (std::size_t a = grids_.size(); a-- > 0;) {
    strides_[a] = s;
    s *= grids_[a].n;
  }
}

SampledFunction SampledFunction::zeros(std::vector<Grid1D> grids) {
  std::size_t total = 1;
  for (const auto& g : grids) total *= g.n;
  return SampledFunction(std::move(grids), std::vector<Complex>(total));
}

const Grid1D& SampledFunction::grid(std::size_t axis) const {
  if (axis >= grids_.size()) throw DomainError("axis out of range");
  return grids_[axis];
}

std::size_t SampledFunction::stride(std::size_t axis) const {
  if (axis >= grids_.size()) throw DomainError("axis out of range");
  return strides_[axis];
}

std::array<std::size_t, 3> SampledFunction::unravel(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t a = 0; a < grids_.size(); ++a) idx[a] = (flat / strides_[a]) % grids_[a].n;
  return idx;
}

std::array<double, 3> SampledFunction::coords(std::size_t flat) const {
  const auto idx = unravel(flat);
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < grids_.size(); ++a) c[a] = grids_[a].point(idx[a]);
  return c;
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool SampledFunction::same_space(const SampledFunction& other) const {
  return grids_ == other.grids_;
}

SampledFunction SampledFunction::with_values(std::vector<Complex> values) const {
  return SampledFunction(grids_, std::move(values));
}

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b) {
  require_same_space(a, b);
  std::vector<Complex> v(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
  return a.with_values(std::move(v));
}

SampledFunction operator-(const SampledFunction& a, const SampledFunction& b) {
  require_same_space(a, b);
  std::vector<Complex> v(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b[i];
  return a.with_values(std::move(v));
}

SampledFunction operator*(Complex c, const SampledFunction& f) {
  std::vector<Complex> v(f.values().begin(), f.values().end());
  for (auto& x : v) x *= c;
  return f.with_values(std::move(v));
}

SampledFunction hadamard(const SampledFunction& a, const SampledFunction& b) {
  require_same_space(a, b);
  std::vector<Complex> v(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= b[i];
  return a.with_values(std::move(v));
}

// ---------------------------------------------------------------------------

double bump_profile(double s, double plateau, double support) {
  const double r = std::abs(s);
  if (r <= plateau) return 1.0;
  if (r >= support) return 0.0;
  const double u = (r - plateau) / (support - plateau);
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  return a / (a + b);
}

double bump_profile_derivative(double s, double plateau, double support) {
  const double r = std::abs(s);
  if (r <= plateau || r >= support) return 0.0;
  const double w = support - plateau;
  const double u = (r - plateau) / w;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  const double du = a * b * (-1.0 / ((1.0 - u) * (1.0 - u)) - 1.0 / (u * u)) / ((a + b) * (a + b));
  return (s < 0 ? -du : du) / w;
}

SampledFunction bump(const std::vector<Grid1D>& grids, double plateau, double support,
                     std::vector<double> centers) {
  if (!(plateau > 0.0 && plateau < support))
    throw DomainError("bump requires 0 < plateau < support");
  centers.resize(grids.size(), 0.0);
  for (std::size_t a = 0; a < grids.size(); ++a) {
    if (centers[a] - support < grids[a].lo || centers[a] + support > grids[a].hi)
      throw DomainError("bump support exceeds the grid extent on axis " + std::to_string(a));
  }
  return SampledFunction::sample(grids, [&](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t a = 0; a < x.size(); ++a) v *= bump_profile(x[a] - centers[a], plateau, support);
    return Complex(v, 0.0);
  });
}

// ---------------------------------------------------------------------------

namespace {

// Per-sample measure weight times cell volume.
std::vector<double> cell_measures(const SampledFunction& f) {
  std::vector<std::vector<double>> axis_w(f.dims());
  for (std::size_t a = 0; a < f.dims(); ++a) {
    const auto& g = f.grid(a);
    axis_w[a].resize(g.n);
    for (std::size_t k = 0; k < g.n; ++k) axis_w[a][k] = g.density(k) * g.spacing();
  }
  std::vector<double> w(f.size(), 1.0);
  for (std::size_t a = 0; a < f.dims(); ++a)
    for_each_along(f, a, [&](std::size_t flat, std::size_t k) { w[flat] *= axis_w[a][k]; });
  return w;
}

}  // namespace

double l2_norm(const SampledFunction& f) {
  const auto w = cell_measures(f);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::norm(f[i]) * w[i];
  return std::sqrt(s);
}

Complex inner_product(const SampledFunction& f, const SampledFunction& g) {
  require_same_space(f, g);
  const auto w = cell_measures(f);
  Complex s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]) * w[i];
  return s;
}

Complex integrate(const SampledFunction& f) {
  const auto w = cell_measures(f);
  Complex s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * w[i];
  return s;
}

SampledFunction differentiate(const SampledFunction& f, std::size_t axis, double boundary_tol) {
  require_axis(f, axis);
  const double peak = f.max_abs();
  if (peak == 0.0) return f;
  const std::size_t n = f.extent(axis);
  double edge = 0.0;
  if (std::isfinite(boundary_tol))
    for_each_along(f, axis, [&](std::size_t flat, std::size_t k) {
      if (k < 2 || k + 2 >= n) edge = std::max(edge, std::abs(f[flat]));
    });
  if (edge > boundary_tol * peak)
    throw BoundaryError("function does not vanish at the box edge on axis " +
                        std::to_string(axis) + " (edge/max = " + std::to_string(edge / peak) + ")");

  std::vector<Complex> v(f.values().begin(), f.values().end());
  const auto shape = shape_of(f);
  detail::dft_axis(v, shape, axis, -1);
  const double length = f.grid(axis).hi - f.grid(axis).lo;
  std::vector<Complex> factor(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double signed_m = m <= n / 2 ? static_cast<double>(m) : static_cast<double>(m) - n;
    const bool nyquist = (n % 2 == 0) && m == n / 2;
    factor[m] = nyquist ? Complex{} : Complex(0.0, kTwoPi * signed_m / length) / static_cast<double>(n);
  }
  for_each_along(f, axis, [&](std::size_t flat, std::size_t k) { v[flat] *= factor[k]; });
  detail::dft_axis(v, shape, axis, +1);
  return f.with_values(std::move(v));
}

SampledFunction fourier_axis(const SampledFunction& f, std::size_t axis, Direction direction,
                             std::optional<Grid1D> target) {
  require_axis(f, axis);
  const Grid1D& src = f.grid(axis);
  const std::size_t n = src.n;
  Grid1D dst;
  if (direction == Direction::Forward) {
    dst = frequency_grid(src);
  } else if (target) {
    dst = *target;
    dst.weight = Measure::Lebesgue;
  } else {
    const double h = kTwoPi / (static_cast<double>(n) * src.spacing());
    dst = Grid1D{-0.5 * n * h, 0.5 * n * h, n, 0.5, Measure::Lebesgue};
  }
  if (dst.n != n) throw DomainError("inverse transform target must have the same sample count");
  const double hs = src.spacing();
  const double hd = dst.spacing();
  if (std::abs(hs * hd * n / kTwoPi - 1.0) > 1e-9)
    throw DomainError("inverse transform target spacing is not dual to the frequency spacing");

  // Exponent kernel exp(sign i a_k b_m) with a_k = a0 + k ha, b_m = b0 + m hb and
  // ha hb = 2 pi / n factors into pre-twiddle, DFT, post-twiddle.
  const int sign = direction == Direction::Forward ? -1 : +1;
  const double a0 = src.lo + src.offset * hs;  // input sample origin
  const double b0 = dst.lo + dst.offset * hd;  // output sample origin
  std::vector<Complex> pre(n), post(n);
  for (std::size_t k = 0; k < n; ++k) pre[k] = std::polar(1.0, sign * b0 * k * hs);
  const double scale = hs / std::sqrt(kTwoPi);
  for (std::size_t m = 0; m < n; ++m)
    post[m] = scale * std::polar(1.0, sign * (a0 * b0 + a0 * m * hd));

  std::vector<Complex> v(f.values().begin(), f.values().end());
  for_each_along(f, axis, [&](std::size_t flat, std::size_t k) { v[flat] *= pre[k]; });
  const auto shape = shape_of(f);
  detail::dft_axis(v, shape, axis, sign);
  for_each_along(f, axis, [&](std::size_t flat, std::size_t k) { v[flat] *= post[k]; });

  auto grids = f.grids();
  grids[axis] = dst;
  return SampledFunction(std::move(grids), std::move(v));
}

SampledFunction coord_multiply(const SampledFunction& f, std::size_t axis, int power) {
  require_axis(f, axis);
  if (power == 0) return f;
  const Grid1D& g = f.grid(axis);
  if (power < 0 && g.samples_zero())
    throw SingularGridError("negative power of a coordinate on an axis that samples 0");
  std::vector<double> factor(g.n);
  for (std::size_t k = 0; k < g.n; ++k) factor[k] = std::pow(g.point(k), power);
  std::vector<Complex> v(f.values().begin(), f.values().end());
  for_each_along(f, axis, [&](std::size_t flat, std::size_t k) { v[flat] *= factor[k]; });
  return f.with_values(std::move(v));
}

SampledFunction slice(const SampledFunction& f, std::size_t axis, std::size_t k) {
  require_axis(f, axis);
  if (f.dims() < 2) throw DomainError("cannot slice a 1-d function");
  if (k >= f.extent(axis)) throw DomainError("slice index out of range");
  std::vector<Grid1D> grids;
  for (std::size_t a = 0; a < f.dims(); ++a)
    if (a != axis) grids.push_back(f.grid(a));
  std::vector<Complex> v;
  v.reserve(f.size() / f.extent(axis));
  for_each_along(f, axis, [&](std::size_t flat, std::size_t idx) {
    if (idx == k) v.push_back(f[flat]);
  });
  return SampledFunction(std::move(grids), std::move(v));
}

}  // namespace cohomlab
