#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "genwass/duality.hpp"
#include "genwass/error.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/solver_wp.hpp"
#include "genwass/spaces.hpp"
#include "genwass/transport.hpp"

namespace genwass {

template <Scalar T>
struct QuotientCheck {
  T upstairs{0};    // W(mu, nu) on X
  T downstairs{0};  // W(p#mu, p#nu) on X/G
  bool holds = false;
};

namespace detail {

// Zero for exact p = 1 solves; p > 1 values pass through a floating-point root.
template <Scalar T>
T quotient_tolerance(const EntropyParams<T>& params, const T& scale) {
  if (params.p == 1.0) return tolerance<T>(1e-9) * (T(1) + abs_value<T>(scale));
  return from_double<T>(1e-9) * (T(1) + abs_value<T>(scale));
}

template <Scalar T>
void require_invariant(const FiniteGroupAction<T>& action, const DiscreteMeasure<T>& m, const char* name) {
  if (auto w = find_invariance_violation(action, m)) {
    const auto& g = action.elements()[w->element];
    throw Error(ErrorCode::NotInvariant, {w->point, w->element},
                detail::witness(ErrorCode::NotInvariant, {name, action.space().label(w->point), g.label}));
  }
}

}  // namespace detail

/// Computes W on X and on X/G for the pushed-forward pair; `holds` records
/// downstairs <= upstairs. Invariance is not required.
template <Scalar T>
QuotientCheck<T> check_quotient_contraction(const FiniteGroupAction<T>& action, const DiscreteMeasure<T>& mu,
                                            const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  DiscreteMeasure<T>::require_same_space(action.space(), mu.space());
  DiscreteMeasure<T>::require_same_space(action.space(), nu.space());
  const auto q = build_quotient(action);
  QuotientCheck<T> out;
  out.upstairs = solve(mu, nu, params).value;
  out.downstairs = solve(pushforward(q.quotient, q.projection, mu), pushforward(q.quotient, q.projection, nu),
                         params)
                       .value;
  out.holds = out.downstairs <= out.upstairs + detail::quotient_tolerance(params, out.upstairs);
  return out;
}

/// Same pair of values for G-invariant mu and nu; `holds` records equality.
template <Scalar T>
QuotientCheck<T> check_quotient_isometry(const FiniteGroupAction<T>& action, const DiscreteMeasure<T>& mu,
                                         const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  DiscreteMeasure<T>::require_same_space(action.space(), mu.space());
  DiscreteMeasure<T>::require_same_space(action.space(), nu.space());
  detail::require_invariant(action, mu, "mu");
  detail::require_invariant(action, nu, "nu");
  auto out = check_quotient_contraction(action, mu, nu, params);
  out.holds = abs_value<T>(out.upstairs - out.downstairs) <= detail::quotient_tolerance(params, out.upstairs);
  return out;
}

template <Scalar T>
struct FlatLiftCheck {
  T downstairs_value{0};    // flat LP on X/G
  T upstairs_objective{0};  // sum over X of (f o p)(mu - nu)
  bool lifted_feasible = false;
  bool holds = false;
};

/// p = 1 cross-check through the flat formulation: the optimal quotient witness
/// composed with the projection stays feasible on X and, for invariant inputs,
/// reaches the same objective.
template <Scalar T>
FlatLiftCheck<T> check_flat_lift(const FiniteGroupAction<T>& action, const DiscreteMeasure<T>& mu,
                                 const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  const auto q = build_quotient(action);
  const auto flat = solve_flat(pushforward(q.quotient, q.projection, mu), pushforward(q.quotient, q.projection, nu),
                               params);
  const std::size_t n = action.space().size();
  std::vector<T> lifted(n);
  for (std::size_t x = 0; x < n; ++x) lifted[x] = flat.witness.f[q.projection[x]];
  FlatLiftCheck<T> out;
  out.downstairs_value = flat.value;
  const auto diff = signed_difference(mu, nu);
  for (std::size_t x = 0; x < n; ++x) out.upstairs_objective += lifted[x] * diff[x];
  const T tol = tolerance<T>(1e-9) * (T(1) + abs_value<T>(flat.value));
  out.lifted_feasible = is_flat_feasible(action.space(), lifted, params, tol);
  out.holds = out.lifted_feasible && abs_value<T>(out.upstairs_objective - out.downstairs_value) <= tol;
  return out;
}

}  // namespace genwass
