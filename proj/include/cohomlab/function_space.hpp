#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cohomlab {

using Complex = std::complex<double>;

// Relative magnitude (against max |f|) that counts as "zero" at the edges of
// the box, and below which a sample is outside the numerical support.
inline constexpr double kBoundaryTolerance = 1e-12;

enum class Measure : std::uint8_t { Lebesgue = 0, AbsX = 1 };

std::string to_string(Measure m);
Measure parse_measure(const std::string& s);

// Uniform cell grid on [lo, hi]: x_k = lo + (k + offset) * h, h = (hi - lo) / n.
struct Grid1D {
  double lo = -8.0;
  double hi = 8.0;
  std::size_t n = 256;
  double offset = 0.5;
  Measure weight = Measure::Lebesgue;

  double spacing() const { return (hi - lo) / static_cast<double>(n); }
  double point(std::size_t k) const { return lo + (static_cast<double>(k) + offset) * spacing(); }
  // Density of the measure at sample k (1 or |x_k|).
  double density(std::size_t k) const;
  std::vector<double> points() const;
  // True when some sample sits at x = 0 (up to rounding).
  bool samples_zero() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

// Validating constructor; throws DomainError unless lo < hi, n >= 8 and
// 0 <= offset < 1.
Grid1D make_grid(double lo, double hi, std::size_t n, double offset = 0.5,
                 Measure weight = Measure::Lebesgue);

// Grid of the Fourier-dual variable: same n, spacing 2*pi/(n h), the sample
// at index n/2 is frequency 0.
Grid1D frequency_grid(const Grid1D& spatial);

// Complex samples on a tensor grid of 1-3 axes, row-major (axis 0 slowest).
// Values are immutable once constructed; every operation returns a new
// function.
class SampledFunction {
 public:
  SampledFunction(std::vector<Grid1D> grids, std::vector<Complex> values);

  static SampledFunction zeros(std::vector<Grid1D> grids);

  // fn receives the coordinates of a sample (size == number of axes).
  template <class Fn>
  static SampledFunction sample(std::vector<Grid1D> grids, Fn&& fn);

  const std::vector<Grid1D>& grids() const noexcept { return grids_; }
  const Grid1D& grid(std::size_t axis) const;
  std::size_t dims() const noexcept { return grids_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t extent(std::size_t axis) const { return grid(axis).n; }
  std::size_t stride(std::size_t axis) const;
  std::span<const Complex> values() const noexcept { return values_; }
  const Complex& operator[](std::size_t flat) const { return values_[flat]; }

  // Multi-index of a flat offset (unused trailing entries are 0).
  std::array<std::size_t, 3> unravel(std::size_t flat) const;
  // Coordinates of a flat offset.
  std::array<double, 3> coords(std::size_t flat) const;

  double max_abs() const;
  bool same_space(const SampledFunction& other) const;
  SampledFunction with_values(std::vector<Complex> values) const;

 private:
  std::vector<Grid1D> grids_;
  std::vector<Complex> values_;
  std::array<std::size_t, 3> strides_{1, 1, 1};
};

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator-(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator*(Complex c, const SampledFunction& f);
inline SampledFunction operator*(const SampledFunction& f, Complex c) { return c * f; }
// Pointwise product on a common grid.
SampledFunction hadamard(const SampledFunction& a, const SampledFunction& b);

// Smooth cutoff on R: 1 on [-plateau, plateau], 0 outside [-support, support],
// C-infinity exp-based transition in between.
double bump_profile(double s, double plateau, double support);
// d/ds of bump_profile.
double bump_profile_derivative(double s, double plateau, double support);

// Tensor product of bump_profile on every axis, centred at `centers`
// (default 0). Throws DomainError if the support box leaves the grid.
SampledFunction bump(const std::vector<Grid1D>& grids, double plateau, double support,
                     std::vector<double> centers = {});

double l2_norm(const SampledFunction& f);
// <f, g> = sum f * conj(g) * measure, linear in the first slot.
Complex inner_product(const SampledFunction& f, const SampledFunction& g);
// Integral of f against the grid measure (midpoint rule).
Complex integrate(const SampledFunction& f);

// Spectral derivative along `axis`. Throws BoundaryError when |f| in the two
// outermost samples on either end exceeds boundary_tol * max|f|.
SampledFunction differentiate(const SampledFunction& f, std::size_t axis,
                              double boundary_tol = kBoundaryTolerance);

enum class Direction { Forward, Inverse };

// Unitary continuous-normalised Fourier transform along one axis,
//   Forward: F(xi) = (2 pi)^{-1/2} sum_k f(x_k) e^{-i xi x_k} h.
// Forward lands on frequency_grid(axis grid). Inverse maps a frequency axis
// back to `target`, by default the symmetric offset-0.5 grid of matching
// spacing.
SampledFunction fourier_axis(const SampledFunction& f, std::size_t axis, Direction direction,
                             std::optional<Grid1D> target = std::nullopt);

// Pointwise multiplication by (coordinate on `axis`)^power. Throws
// SingularGridError for power < 0 on an axis that samples 0.
SampledFunction coord_multiply(const SampledFunction& f, std::size_t axis, int power);

// Restriction to the hyperplane {axis index = k}; drops that axis.
SampledFunction slice(const SampledFunction& f, std::size_t axis, std::size_t k);

// -------------------------------------------------------------------------

template <class Fn>
SampledFunction SampledFunction::sample(std::vector<Grid1D> grids, Fn&& fn) {
  SampledFunction out = zeros(std::move(grids));
  const std::size_t d = out.dims();
  std::vector<Complex> values(out.size());
  std::array<double, 3> c{};
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    c = out.coords(flat);
    values[flat] = fn(std::span<const double>(c.data(), d));
  }
  return out.with_values(std::move(values));
}

}  // namespace cohomlab
