#pragma once

// Reference implementations used only by the tests. Each one is written from
// the definitions, shares no code with the library's algorithms, and trades
// speed for obviousness.

#include "blowup.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using blowup::Integer;
using blowup::Rational;
using blowup::VertexId;
using blowup::WeightedForest;

/// Q(G) as a plain dense table: -weight on the diagonal, -1 per edge.
inline std::vector<std::vector<Integer>> gram(const WeightedForest& f) {
  const auto ids = f.vertex_ids();
  const std::size_t n = ids.size();
  std::vector<std::vector<Integer>> q(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    q[i][i] = -f.weight(ids[i]);
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && f.has_edge(ids[i], ids[j])) q[i][j] = -1;
  }
  return q;
}

/// Laplace expansion along successive rows, memoized on the set of columns
/// still available.
inline Integer cofactor_det(const std::vector<std::vector<Integer>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  std::map<std::uint32_t, Integer> memo;
  auto rec = [&](auto&& self, std::size_t row, std::uint32_t cols) -> Integer {
    if (row == n) return 1;
    if (auto it = memo.find(cols); it != memo.end()) return it->second;
    Integer total = 0;
    int sign = 1;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(cols & (1u << c))) continue;
      if (a[row][c] != 0) total += sign * a[row][c] * self(self, row + 1, cols & ~(1u << c));
      sign = -sign;
    }
    memo.emplace(cols, total);
    return total;
  };
  return rec(rec, 0, (n == 32 ? 0u : (1u << n)) - 1u);
}

inline Integer cofactor_det(const WeightedForest& f) { return cofactor_det(gram(f)); }

/// Textbook Gaussian elimination over the rationals. Empty when singular.
inline std::vector<Rational> rational_solve(std::vector<std::vector<Integer>> m, std::vector<Integer> rhs) {
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(m[i][j]);
    a[i][n] = Rational(rhs[i]);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return {};
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  return x;
}

/// Intersection matrix (the negative of Q) in id order.
inline std::vector<std::vector<Integer>> intersection(const WeightedForest& f) {
  auto q = gram(f);
  for (auto& row : q)
    for (auto& x : row) x = -x;
  return q;
}

/// Inertia from the characteristic polynomial. A real symmetric matrix has
/// only real eigenvalues, so Descartes' rule of signs counts the positive
/// and negative ones exactly. Coefficients by Faddeev-LeVerrier.
inline blowup::Signature charpoly_inertia(const std::vector<std::vector<Integer>>& input) {
  const std::size_t n = input.size();
  using Mat = std::vector<std::vector<Rational>>;
  Mat a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(input[i][j]);
  auto mul = [&](const Mat& x, const Mat& y) {
    Mat z(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (x[i][k] != 0)
          for (std::size_t j = 0; j < n; ++j) z[i][j] += x[i][k] * y[k][j];
    return z;
  };
  // p(x) = x^n + c[1] x^{n-1} + ... + c[n]
  std::vector<Rational> c(n + 1);
  c[0] = 1;
  Mat m(n, std::vector<Rational>(n));
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < n; ++i) m[i][i] += c[k - 1];
    m = mul(a, m);
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += m[i][i];
    c[k] = -tr / Rational(static_cast<long long>(k));
  }
  std::size_t zeros = 0;
  while (zeros < n && c[n - zeros] == 0) ++zeros;
  auto sign_changes = [&](bool negate_x) {
    std::size_t changes = 0;
    int last = 0;
    for (std::size_t k = 0; k <= n - zeros; ++k) {
      if (c[k] == 0) continue;
      // coefficient of x^{n-k}; substituting -x flips odd powers
      int s = c[k] > 0 ? 1 : -1;
      if (negate_x && (n - k) % 2 == 1) s = -s;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  };
  return blowup::Signature{sign_changes(false), zeros, sign_changes(true)};
}

/// Random forest with `n` vertices (ids 0..n-1), weights in [lo, hi] and
/// each tree edge kept with probability keep.
inline WeightedForest random_forest(std::mt19937_64& rng, std::size_t n, int lo, int hi, double keep) {
  WeightedForest f;
  std::uniform_int_distribution<int> w(lo, hi);
  std::bernoulli_distribution k(keep);
  for (std::uint32_t i = 0; i < n; ++i) f.add_vertex(VertexId{i}, w(rng));
  for (std::uint32_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::uint32_t> parent(0, i - 1);
    const std::uint32_t p = parent(rng);
    if (k(rng)) f.add_edge(VertexId{p}, VertexId{i});
  }
  return f;
}

/// Random history of exactly `depth` ops.
inline std::vector<blowup::BlowupOp> random_history(std::mt19937_64& rng, std::size_t depth) {
  blowup::BlowupState s = blowup::seed_p2();
  std::vector<blowup::BlowupOp> ops;
  for (std::size_t i = 0; i < depth; ++i) {
    const auto avail = blowup::available_ops(s);
    std::uniform_int_distribution<std::size_t> pick(0, avail.size() - 1);
    ops.push_back(avail[pick(rng)]);
    s = blowup::apply(s, ops.back());
  }
  return ops;
}

/// Root- and weight-preserving isomorphism test by trying every bijection.
inline bool isomorphic(const blowup::BlowupState& a, const blowup::BlowupState& b) {
  const auto ia = a.forest().vertex_ids();
  const auto ib = b.forest().vertex_ids();
  if (ia.size() != ib.size() || a.forest().edge_count() != b.forest().edge_count()) return false;
  std::vector<std::size_t> perm(ib.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; ok && i < ia.size(); ++i) {
      const VertexId x = ia[i], y = ib[perm[i]];
      ok = a.forest().weight(x) == b.forest().weight(y) && ((x == a.root()) == (y == b.root()));
      for (std::size_t j = i + 1; ok && j < ia.size(); ++j)
        ok = a.forest().has_edge(x, ia[j]) == b.forest().has_edge(y, ib[perm[j]]);
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

/// Classes of states reachable with exactly `depth` ops, found by applying
/// every op sequence and comparing each result against one representative
/// of every class seen so far.
inline std::vector<blowup::BlowupState> brute_force_classes(std::size_t depth) {
  std::vector<blowup::BlowupState> states{blowup::seed_p2()};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<blowup::BlowupState> next;
    for (const auto& s : states)
      for (const auto& op : blowup::available_ops(s)) next.push_back(blowup::apply(s, op));
    states = std::move(next);
  }
  std::vector<blowup::BlowupState> reps;
  for (const auto& s : states) {
    bool found = false;
    for (const auto& r : reps)
      if (isomorphic(s, r)) {
        found = true;
        break;
      }
    if (!found) reps.push_back(s);
  }
  return reps;
}

}  // namespace oracle
