#include "cohomlab/root_combinatorics.hpp"

#include <sstream>

#include <json.hpp>

#include "cohomlab/errors.hpp"

namespace cohomlab {

std::string RootVector::label() const {
  return "u_" + std::to_string(i) + "_" + std::to_string(j);
}

RootVector make_root(int i, int j, int n) {
  if (n < 2) throw DimensionError("sl(n) needs n >= 2");
  if (i < 1 || j < 1 || i > n || j > n || i == j)
    throw DimensionError("invalid root vector u_" + std::to_string(i) + "_" + std::to_string(j) +
                         " in sl(" + std::to_string(n) + ")");
  return {i, j, n};
}

std::string BasisElement::label() const {
  if (kind == Kind::Diagonal) return "X_" + std::to_string(i);
  return "u_" + std::to_string(i) + "_" + std::to_string(j);
}

SlElement::SlElement(int n) : n_(n) {
  if (n < 2) throw DimensionError("sl(n) needs n >= 2");
}

SlElement SlElement::root(const RootVector& r) {
  make_root(r.i, r.j, r.n);
  SlElement e(r.n);
  e.add(r.i, r.j, 1);
  return e;
}

SlElement SlElement::basis(const BasisElement& b, int n) {
  if (b.kind == BasisElement::Kind::Root) return root(make_root(b.i, b.j, n));
  if (b.i < 1 || b.i >= n) throw DimensionError("diagonal X_" + std::to_string(b.i) + " out of range");
  SlElement e(n);
  e.add(b.i, b.i, 1);
  e.add(b.i + 1, b.i + 1, -1);
  return e;
}

std::int64_t SlElement::entry(int row, int col) const {
  auto it = entries_.find({row, col});
  return it == entries_.end() ? 0 : it->second;
}

void SlElement::add(int row, int col, std::int64_t value) {
  if (row < 1 || col < 1 || row > n_ || col > n_) throw DimensionError("matrix index out of range");
  if (value == 0) return;
  auto& slot = entries_[{row, col}];
  slot += value;
  if (slot == 0) entries_.erase({row, col});
}

std::map<BasisElement, std::int64_t> SlElement::decompose() const {
  std::map<BasisElement, std::int64_t> out;
  std::vector<std::int64_t> diag(n_ + 1, 0);
  for (const auto& [rc, v] : entries_) {
    if (rc.first == rc.second)
      diag[rc.first] = v;
    else
      out[BasisElement::root(rc.first, rc.second)] = v;
  }
  // diag(d_1..d_n) = sum_k c_k X_k with c_k = d_1 + ... + d_k.
  std::int64_t running = 0;
  for (int k = 1; k < n_; ++k) {
    running += diag[k];
    if (running != 0) out[BasisElement::diagonal(k)] = running;
  }
  if (running + diag[n_] != 0) throw DomainError("matrix is not trace-free");
  return out;
}

std::string SlElement::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [b, c] : decompose()) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    const auto mag = c < 0 ? -c : c;
    if (mag != 1) os << mag << "*";
    os << b.label();
    first = false;
  }
  return os.str();
}

namespace {

void require_same_n(const SlElement& a, const SlElement& b) {
  if (a.n() != b.n())
    throw DimensionError("sl(" + std::to_string(a.n()) + ") and sl(" + std::to_string(b.n()) +
                         ") elements mixed");
}

}  // namespace

SlElement operator+(const SlElement& a, const SlElement& b) {
  require_same_n(a, b);
  SlElement out = a;
  for (const auto& [rc, v] : b.entries()) out.add(rc.first, rc.second, v);
  return out;
}

SlElement operator-(const SlElement& a, const SlElement& b) { return a + (-1) * b; }

SlElement operator*(std::int64_t c, const SlElement& a) {
  SlElement out(a.n());
  for (const auto& [rc, v] : a.entries()) out.add(rc.first, rc.second, c * v);
  return out;
}

SlElement matmul(const SlElement& a, const SlElement& b) {
  require_same_n(a, b);
  SlElement out(a.n());
  for (const auto& [ra, va] : a.entries())
    for (const auto& [rb, vb] : b.entries())
      if (ra.second == rb.first) out.add(ra.first, rb.second, va * vb);
  return out;
}

SlElement bracket(const SlElement& a, const SlElement& b) { return matmul(a, b) - matmul(b, a); }

std::vector<RootVector> all_roots(int n) {
  if (n < 2) throw DimensionError("sl(n) needs n >= 2");
  std::vector<RootVector> out;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) out.push_back({i, j, n});
  return out;
}

namespace {

std::vector<RootVector> commuting_set(int i, int j, int n, bool opposite_commutes) {
  const RootVector p = make_root(i, j, n);
  const SlElement up = SlElement::root(p);
  const SlElement uo = SlElement::root({j, i, n});
  std::vector<RootVector> out;
  for (const auto& q : all_roots(n)) {
    if (q == p) continue;
    const SlElement uq = SlElement::root(q);
    if (!bracket(uq, up).is_zero()) continue;
    if (bracket(uq, uo).is_zero() == opposite_commutes) out.push_back(q);
  }
  return out;
}

bool contains(const std::vector<RootVector>& set, const RootVector& r) {
  for (const auto& x : set)
    if (x == r) return true;
  return false;
}

}  // namespace

std::vector<RootVector> compute_E(int i, int j, int n) { return commuting_set(i, j, n, false); }

std::vector<RootVector> compute_Ebar(int i, int j, int n) { return commuting_set(i, j, n, true); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NonCommuting: return "NonCommuting";
    case Verdict::Identical: return "Identical";
    case Verdict::StrongRigid: return "StrongRigid";
    case Verdict::WeakObstructed: return "WeakObstructed";
  }
  return "?";
}

Verdict classify_pair(const RootVector& p, const RootVector& q) {
  make_root(p.i, p.j, p.n);
  make_root(q.i, q.j, q.n);
  if (p.n != q.n) throw DimensionError("root vectors from different sl(n)");
  if (p == q) return Verdict::Identical;
  if (!bracket(SlElement::root(p), SlElement::root(q)).is_zero()) return Verdict::NonCommuting;
  if (contains(compute_Ebar(q.i, q.j, q.n), p)) return Verdict::StrongRigid;
  if (contains(compute_E(q.i, q.j, q.n), p)) return Verdict::WeakObstructed;
  throw DomainError("commuting pair " + p.label() + ", " + q.label() + " lies in neither E nor Ebar");
}

RigidityTable rigidity_table(int n) {
  RigidityTable table;
  table.n = n;
  for (auto v : {Verdict::StrongRigid, Verdict::WeakObstructed}) table.counts[v] = 0;
  if (n < 2) return table;
  const auto roots = all_roots(n);
  for (std::size_t a = 0; a < roots.size(); ++a)
    for (std::size_t b = a + 1; b < roots.size(); ++b) {
      const Verdict v = classify_pair(roots[a], roots[b]);
      if (v == Verdict::NonCommuting) continue;
      table.rows.push_back({roots[a], roots[b], v});
      ++table.counts[v];
    }
  return table;
}

std::string RigidityTable::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"n", n}, {"i", r.p.i}, {"j", r.p.j}, {"k", r.q.i}, {"l", r.q.j},
                      {"verdict", cohomlab::to_string(r.verdict)}});
  nlohmann::json counts_j = nlohmann::json::object();
  for (const auto& [v, c] : counts) counts_j[cohomlab::to_string(v)] = c;
  return nlohmann::json{{"n", n}, {"rows", rows_j}, {"counts", counts_j}}.dump(2);
}

std::string RigidityTable::to_csv() const {
  std::ostringstream os;
  os << "n,i,j,k,l,verdict\n";
  for (const auto& r : rows)
    os << n << ',' << r.p.i << ',' << r.p.j << ',' << r.q.i << ',' << r.q.j << ','
       << cohomlab::to_string(r.verdict) << '\n';
  return os.str();
}

}  // namespace cohomlab
