#pragma once

#include <cstddef>
#include <vector>

#include "genwass/error.hpp"
#include "genwass/matrix.hpp"
#include "genwass/numeric.hpp"

namespace genwass {

enum class LpStatus { Optimal, Unbounded };

template <Scalar T>
struct LpResult {
  LpStatus status = LpStatus::Optimal;
  std::vector<T> x;
  T objective{0};
  std::size_t pivots = 0;
};

/// Dense tableau simplex for  max c.x  s.t.  A x <= rhs, x >= 0, with rhs >= 0.
///
/// The slack basis is feasible from the start, so there is no phase one. Bland's
/// rule (lowest entering index, lowest leaving basic index on ratio ties) rules out
/// cycling. With `Rational` every pivot is exact.
template <Scalar T>
LpResult<T> maximize_bland(const DenseMatrix<T>& A, const std::vector<T>& rhs, const std::vector<T>& c) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  if (rhs.size() != m || c.size() != n) throw Error(ErrorCode::ShapeMismatch, "LP dimensions disagree");
  for (std::size_t r = 0; r < m; ++r)
    if (rhs[r] < T(0)) throw Error(ErrorCode::InvalidParams, {r}, "LP right-hand side must be nonnegative");

  const T eps = tolerance<T>(1e-12);
  const std::size_t width = n + m + 1;  // structural, slack, rhs
  DenseMatrix<T> tab(m + 1, width);      // last row is the objective
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) tab(r, j) = A(r, j);
    tab(r, n + r) = T(1);
    tab(r, width - 1) = rhs[r];
    basis[r] = n + r;
  }
  for (std::size_t j = 0; j < n; ++j) tab(m, j) = -c[j];

  LpResult<T> result;
  std::vector<std::size_t> nonzero;
  for (;;) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (tab(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter == width) break;

    std::size_t leave = m;
    T best_ratio(0);
    for (std::size_t r = 0; r < m; ++r) {
      if (!(tab(r, enter) > eps)) continue;
      T ratio = tab(r, width - 1) / tab(r, enter);
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == m) {
      result.status = LpStatus::Unbounded;
      return result;
    }

    const T pivot = tab(leave, enter);
    nonzero.clear();
    for (std::size_t j = 0; j < width; ++j) {
      if (tab(leave, j) != T(0)) {
        tab(leave, j) /= pivot;
        nonzero.push_back(j);
      }
    }
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const T factor = tab(r, enter);
      if (factor == T(0)) continue;
      for (auto j : nonzero) tab(r, j) -= factor * tab(leave, j);
      if constexpr (!is_exact_v<T>) tab(r, enter) = T(0);
    }
    basis[leave] = enter;
    ++result.pivots;
  }

  result.x.assign(n, T(0));
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) result.x[basis[r]] = tab(r, width - 1);
  result.objective = T(0);
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace genwass
