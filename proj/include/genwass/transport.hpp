#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "genwass/error.hpp"
#include "genwass/matrix.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/spaces.hpp"

namespace genwass {

/// Creation/destruction price a, transport price b, order p.
///
/// The entropy behind a is F(s) = a|1 - s|, whose recession slope is a; that slope
/// is why no plan ever ships along an arc costing more than 2a.
template <Scalar T>
struct EntropyParams {
  T a{1};
  T b{1};
  double p = 1.0;

  void validate() const {
    if (!(a > T(0))) throw Error(ErrorCode::InvalidParams, "InvalidParams: a must be positive");
    if (!(b > T(0))) throw Error(ErrorCode::InvalidParams, "InvalidParams: b must be positive");
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidParams, "InvalidParams: p must be at least 1");
  }
};

/// Nonnegative mass on X x X. Row sums are the first marginal, column sums the second.
template <Scalar T>
struct TransportPlan {
  FiniteMetricSpace<T> space;
  DenseMatrix<T> gamma;

  T mass() const { return gamma.sum(); }
  DiscreteMeasure<T> source_marginal() const { return DiscreteMeasure<T>(space, gamma.row_sums()); }
  DiscreteMeasure<T> target_marginal() const { return DiscreteMeasure<T>(space, gamma.col_sums()); }

  /// Sum of d^p * gamma.
  T cost(double p = 1.0) const {
    T out(0);
    for (std::size_t i = 0; i < gamma.rows(); ++i)
      for (std::size_t j = 0; j < gamma.cols(); ++j)
        if (gamma(i, j) != T(0)) out += power<T>(space(i, j), p) * gamma(i, j);
    return out;
  }
};

/// Throws InfeasibleInputs unless gamma >= 0 with marginals under mu and nu.
template <Scalar T>
void check_submarginal(const TransportPlan<T>& plan, const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                       const T& tol) {
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  DiscreteMeasure<T>::require_same_space(plan.space, mu.space());
  const std::size_t n = mu.size();
  if (plan.gamma.rows() != n || plan.gamma.cols() != n)
    throw Error(ErrorCode::ShapeMismatch, "plan shape does not match the space");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (plan.gamma(i, j) < -tol)
        throw Error(ErrorCode::InfeasibleInputs, {i, j},
                    "InfeasibleInputs: negative plan entry at (" + mu.space().label(i) + "," +
                        mu.space().label(j) + ")");
  auto rows = plan.gamma.row_sums();
  auto cols = plan.gamma.col_sums();
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i] > mu[i] + tol)
      throw Error(ErrorCode::InfeasibleInputs, {i},
                  "InfeasibleInputs: plan ships more than mu holds at " + mu.space().label(i));
    if (cols[i] > nu[i] + tol)
      throw Error(ErrorCode::InfeasibleInputs, {i},
                  "InfeasibleInputs: plan delivers more than nu holds at " + mu.space().label(i));
  }
}

}  // namespace genwass
