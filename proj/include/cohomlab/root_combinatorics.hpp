#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cohomlab {

// Root vector u_{i,j} of sl(n): the elementary matrix with a single 1 at
// (i, j). Indices are 1-based.
struct RootVector {
  int i = 1;
  int j = 2;
  int n = 2;

  std::string label() const;  // "u_i_j"
  auto operator<=>(const RootVector&) const = default;
};

// Throws DimensionError unless 1 <= i, j <= n, i != j, n >= 2.
RootVector make_root(int i, int j, int n);

// Basis of sl(n): root vectors u_{i,j} and diagonals X_k = E_kk - E_{k+1,k+1}.
struct BasisElement {
  enum class Kind : std::uint8_t { Root, Diagonal };
  Kind kind = Kind::Root;
  int i = 1;  // row index, or k for a diagonal
  int j = 2;  // column index (unused for diagonals)

  static BasisElement root(int i, int j) { return {Kind::Root, i, j}; }
  static BasisElement diagonal(int k) { return {Kind::Diagonal, k, 0}; }
  std::string label() const;  // "u_i_j" or "X_k"
  auto operator<=>(const BasisElement&) const = default;
};

// Sparse integer n x n matrix, used for exact sl(n, Z) arithmetic.
class SlElement {
 public:
  explicit SlElement(int n);
  static SlElement root(const RootVector& r);
  static SlElement basis(const BasisElement& b, int n);

  int n() const noexcept { return n_; }
  std::int64_t entry(int row, int col) const;
  void add(int row, int col, std::int64_t value);
  bool is_zero() const noexcept { return entries_.empty(); }
  const std::map<std::pair<int, int>, std::int64_t>& entries() const noexcept { return entries_; }

  // Coefficients on {u_{i,j}} and {X_k}; throws DomainError when the trace is
  // nonzero (not in sl(n)).
  std::map<BasisElement, std::int64_t> decompose() const;
  std::string to_string() const;

  friend bool operator==(const SlElement&, const SlElement&) = default;

 private:
  int n_;
  std::map<std::pair<int, int>, std::int64_t> entries_;
};

SlElement operator+(const SlElement& a, const SlElement& b);
SlElement operator-(const SlElement& a, const SlElement& b);
SlElement operator*(std::int64_t c, const SlElement& a);
SlElement matmul(const SlElement& a, const SlElement& b);

// [a, b] = ab - ba. DimensionError if the sizes differ.
SlElement bracket(const SlElement& a, const SlElement& b);

std::vector<RootVector> all_roots(int n);

// E_{i,j}: roots other than u_{i,j} commuting with u_{i,j} but not with u_{j,i}.
std::vector<RootVector> compute_E(int i, int j, int n);
// Ebar_{i,j}: roots other than u_{i,j} commuting with both u_{i,j} and u_{j,i}.
std::vector<RootVector> compute_Ebar(int i, int j, int n);

enum class Verdict : std::uint8_t { NonCommuting, Identical, StrongRigid, WeakObstructed };
std::string to_string(Verdict v);

Verdict classify_pair(const RootVector& p, const RootVector& q);

struct RigidityRow {
  RootVector p;
  RootVector q;
  Verdict verdict;
};

struct RigidityTable {
  int n = 0;
  std::vector<RigidityRow> rows;  // unordered commuting distinct pairs, p < q
  std::map<Verdict, int> counts;

  std::string to_json() const;
  // Columns n,i,j,k,l,verdict.
  std::string to_csv() const;
};

RigidityTable rigidity_table(int n);

}  // namespace cohomlab
