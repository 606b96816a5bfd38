#pragma once

#include "blowup/integer.hpp"

#include <cassert>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace blowup {

/// Inertia of a symmetric matrix: counts of positive, zero and negative
/// eigenvalues.
struct Signature {
  std::size_t n_positive = 0;
  std::size_t n_zero = 0;
  std::size_t n_negative = 0;

  std::size_t size() const { return n_positive + n_zero + n_negative; }
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Dense square matrix, row-major.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using IntegerMatrix = SquareMatrix<Integer>;

/// Determinant by fraction-free (Bareiss) elimination.
inline Integer bareiss_determinant(IntegerMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Integer prev = 1;
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return negate ? Integer(-m(n - 1, n - 1)) : m(n - 1, n - 1);
}

/// Solves m * x = rhs exactly with fraction-free Gauss-Jordan elimination.
/// Returns nullopt when m is singular.
inline std::optional<std::vector<Rational>> solve_exact(IntegerMatrix m, std::vector<Integer> rhs) {
  const std::size_t n = m.size();
  assert(rhs.size() == n);
  Integer prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(rhs[k], rhs[p]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
      }
      rhs[i] = (m(k, k) * rhs[i] - m(i, k) * rhs[k]) / prev;
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  std::vector<Rational> x;
  x.reserve(n);
  for (std::size_t i = 0; i < n; ++i) x.push_back(make_rational(rhs[i], m(i, i)));
  return x;
}

/// Exact Sylvester inertia of a symmetric integer matrix. Congruence
/// elimination over the rationals: 1x1 pivots where a diagonal entry is
/// nonzero, otherwise a 2x2 pivot [[0,b],[b,0]] which contributes one
/// positive and one negative direction.
inline Signature matrix_inertia(const IntegerMatrix& input) {
  const std::size_t n = input.size();
  SquareMatrix<Rational> a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = input(i, j);

  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  Signature sig;
  auto erase = [&](std::size_t idx) { std::erase(active, idx); };

  while (!active.empty()) {
    std::optional<std::size_t> diag;
    for (std::size_t i : active) {
      if (a(i, i) != 0) {
        diag = i;
        break;
      }
    }
    if (diag) {
      const std::size_t p = *diag;
      const Rational pivot = a(p, p);
      (pivot > 0 ? sig.n_positive : sig.n_negative) += 1;
      erase(p);
      for (std::size_t i : active) {
        if (a(i, p) == 0) continue;
        const Rational f = a(i, p) / pivot;
        for (std::size_t j : active) a(i, j) -= f * a(p, j);
      }
      continue;
    }

    std::optional<std::pair<std::size_t, std::size_t>> off;
    for (std::size_t i : active) {
      for (std::size_t j : active) {
        if (i != j && a(i, j) != 0) {
          off = {i, j};
          break;
        }
      }
      if (off) break;
    }
    if (!off) {
      sig.n_zero += active.size();
      break;
    }
    const auto [p, q] = *off;
    const Rational b = a(p, q);
    sig.n_positive += 1;
    sig.n_negative += 1;
    erase(p);
    erase(q);
    // Schur complement against [[0,b],[b,0]]^{-1} = [[0,1/b],[1/b,0]].
    std::vector<Rational> col_p, col_q;
    for (std::size_t i : active) {
      col_p.push_back(a(i, p));
      col_q.push_back(a(i, q));
    }
    for (std::size_t r = 0; r < active.size(); ++r) {
      for (std::size_t c = 0; c < active.size(); ++c) {
        a(active[r], active[c]) -= (col_p[r] * col_q[c] + col_q[r] * col_p[c]) / b;
      }
    }
  }
  return sig;
}

}  // namespace blowup
