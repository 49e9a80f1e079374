#pragma once

#include <optional>
#include <vector>

#include "berezin/rational.hpp"

namespace berezin {

// Small dense exact linear algebra over a field scalar (Rat or GaussRat).
// Plain Gaussian elimination; every matrix this library eliminates exactly
// is desk-scale (rank <= 3 Cartan data, per-weight-space Gram blocks).
template <class S>
using ExactMat = std::vector<std::vector<S>>;

template <class S>
bool exact_is_zero(const S& s) {
  return scalar_traits<S>::is_zero(s);
}

// Reduces A in place to row echelon form, applying the same operations to
// the optional right-hand block. Returns the pivot column of every row.
template <class S>
std::vector<int> echelon(ExactMat<S>& a, ExactMat<S>* rhs = nullptr) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  std::vector<int> pivot_cols;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pr = -1;
    for (int i = r; i < rows; ++i) {
      if (!exact_is_zero(a[i][c])) {
        pr = i;
        break;
      }
    }
    if (pr < 0) continue;
    std::swap(a[pr], a[r]);
    if (rhs) std::swap((*rhs)[pr], (*rhs)[r]);
    S inv = scalar_traits<S>::one() / a[r][c];
    for (int j = c; j < cols; ++j) a[r][j] = a[r][j] * inv;
    if (rhs)
      for (auto& x : (*rhs)[r]) x = x * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || exact_is_zero(a[i][c])) continue;
      S f = a[i][c];
      for (int j = c; j < cols; ++j) a[i][j] = a[i][j] - f * a[r][j];
      if (rhs)
        for (size_t j = 0; j < (*rhs)[i].size(); ++j)
          (*rhs)[i][j] = (*rhs)[i][j] - f * (*rhs)[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  return pivot_cols;
}

template <class S>
int exact_rank(ExactMat<S> a) {
  return static_cast<int>(echelon(a).size());
}

// Determinant of a square matrix by triangularization; exact division, swap
// parity tracked through the sign.
template <class S>
S exact_det(ExactMat<S> a) {
  const int n = static_cast<int>(a.size());
  S det = scalar_traits<S>::one();
  for (int c = 0; c < n; ++c) {
    int pr = -1;
    for (int i = c; i < n; ++i) {
      if (!exact_is_zero(a[i][c])) {
        pr = i;
        break;
      }
    }
    if (pr < 0) return scalar_traits<S>::zero();
    if (pr != c) {
      std::swap(a[pr], a[c]);
      det = scalar_traits<S>::zero() - det;
    }
    det = det * a[c][c];
    for (int i = c + 1; i < n; ++i) {
      if (exact_is_zero(a[i][c])) continue;
      S f = a[i][c] / a[c][c];
      for (int j = c; j < n; ++j) a[i][j] = a[i][j] - f * a[c][j];
    }
  }
  return det;
}

template <class S>
std::vector<int> pivot_columns(ExactMat<S> a) {
  return echelon(a);
}

// Solves A x = b for square nonsingular A; nullopt when singular.
template <class S>
std::optional<std::vector<S>> solve(ExactMat<S> a, std::vector<S> b) {
  const int n = static_cast<int>(a.size());
  ExactMat<S> rhs(n, std::vector<S>(1));
  for (int i = 0; i < n; ++i) rhs[i][0] = b[i];
  auto piv = echelon(a, &rhs);
  if (static_cast<int>(piv.size()) != n) return std::nullopt;
  std::vector<S> x(n);
  for (int i = 0; i < n; ++i) x[piv[i]] = rhs[i][0];
  return x;
}

template <class S>
std::optional<ExactMat<S>> inverse(ExactMat<S> a) {
  const int n = static_cast<int>(a.size());
  ExactMat<S> rhs(n, std::vector<S>(n, scalar_traits<S>::zero()));
  for (int i = 0; i < n; ++i) rhs[i][i] = scalar_traits<S>::one();
  auto piv = echelon(a, &rhs);
  if (static_cast<int>(piv.size()) != n) return std::nullopt;
  ExactMat<S> inv(n, std::vector<S>(n));
  for (int i = 0; i < n; ++i) inv[piv[i]] = rhs[i];
  return inv;
}

template <class S>
std::vector<S> mat_vec(const ExactMat<S>& a, const std::vector<S>& x) {
  std::vector<S> y(a.size(), scalar_traits<S>::zero());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] = y[i] + a[i][j] * x[j];
  return y;
}

}  // namespace berezin
