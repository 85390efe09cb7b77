#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "genwass/error.hpp"
#include "genwass/matrix.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/simplex.hpp"
#include "genwass/spaces.hpp"
#include "genwass/transport.hpp"

namespace genwass {

/// A value of T or negative infinity.
template <Scalar T>
struct ExtendedReal {
  bool negative_infinity = false;
  T value{0};

  static ExtendedReal minus_infinity() { return {true, T(0)}; }
  static ExtendedReal finite(T v) { return {false, std::move(v)}; }
  bool is_finite() const { return !negative_infinity; }
};

/// I(phi) = inf over s >= 0 of (s phi + a|1 - s|): a above a, phi on [-a, a],
/// -infinity below -a.
template <Scalar T>
ExtendedReal<T> truncate_I(const T& phi, const T& a) {
  if (phi > a) return ExtendedReal<T>::finite(a);
  if (phi < -a) return ExtendedReal<T>::minus_infinity();
  return ExtendedReal<T>::finite(phi);
}

/// Dual pair (phi1, phi2). Feasible when both sit above -a and
/// phi1(x) + phi2(y) <= b d(x, y) everywhere.
template <Scalar T>
struct DualPotentials {
  std::vector<T> phi1;
  std::vector<T> phi2;
  EntropyParams<T> params;
};

template <Scalar T>
struct FlatWitness {
  std::vector<T> f;
};

template <Scalar T>
T feasibility_slack(const FiniteMetricSpace<T>& space, const EntropyParams<T>& params) {
  return tolerance<T>(1e-12) * (T(1) + params.a + params.b * space.diameter());
}

template <Scalar T>
bool is_dual_feasible(const FiniteMetricSpace<T>& space, const DualPotentials<T>& pots, const T& tol) {
  const std::size_t n = space.size();
  if (pots.phi1.size() != n || pots.phi2.size() != n) return false;
  const T& a = pots.params.a;
  const T& b = pots.params.b;
  for (std::size_t i = 0; i < n; ++i)
    if (pots.phi1[i] < -a - tol || pots.phi2[i] < -a - tol) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (pots.phi1[i] + pots.phi2[j] > b * space(i, j) + tol) return false;
  return true;
}

/// |f| <= a and |f(i) - f(j)| <= b d(i, j).
template <Scalar T>
bool is_flat_feasible(const FiniteMetricSpace<T>& space, const std::vector<T>& f, const EntropyParams<T>& params,
                      const T& tol) {
  const std::size_t n = space.size();
  if (f.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (abs_value<T>(f[i]) > params.a + tol) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (abs_value<T>(f[i] - f[j]) > params.b * space(i, j) + tol) return false;
  return true;
}

template <Scalar T>
struct DualEvaluation {
  bool feasible = false;
  ExtendedReal<T> objective;
};

/// Sum over sides of sum_x I(phi_i(x)) mu_i(x). A -infinity truncation meeting
/// positive mass short-circuits the objective to -infinity.
template <Scalar T>
DualEvaluation<T> evaluate_dual(const DualPotentials<T>& pots, const DiscreteMeasure<T>& mu,
                                const DiscreteMeasure<T>& nu) {
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  const auto& space = mu.space();
  if (pots.phi1.size() != space.size() || pots.phi2.size() != space.size())
    throw Error(ErrorCode::SpaceMismatch, "potentials do not match the space");
  DualEvaluation<T> out;
  out.feasible = is_dual_feasible(space, pots, feasibility_slack(space, pots.params));
  T total(0);
  const std::vector<T>* phis[2] = {&pots.phi1, &pots.phi2};
  const DiscreteMeasure<T>* measures[2] = {&mu, &nu};
  for (int side = 0; side < 2; ++side) {
    for (std::size_t x = 0; x < space.size(); ++x) {
      const T& mass = (*measures[side])[x];
      if (mass == T(0)) continue;
      auto truncated = truncate_I((*phis[side])[x], pots.params.a);
      if (!truncated.is_finite()) {
        out.objective = ExtendedReal<T>::minus_infinity();
        return out;
      }
      total += truncated.value * mass;
    }
  }
  out.objective = ExtendedReal<T>::finite(total);
  return out;
}

/// Capped transform x -> min(min_y [b d(x, y) - phi(y)], a).
///
/// The result is b-Lipschitz. When phi is part of a feasible pair it lies in
/// [-a, a], and a b-Lipschitz input psi in [-a, a] maps to exactly -psi.
template <Scalar T>
std::vector<T> c_transform(const FiniteMetricSpace<T>& space, const std::vector<T>& phi,
                           const EntropyParams<T>& params) {
  const std::size_t n = space.size();
  if (phi.size() != n) throw Error(ErrorCode::SpaceMismatch, "potential does not match the space");
  std::vector<T> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    T best = params.a;
    for (std::size_t y = 0; y < n; ++y) {
      T candidate = params.b * space(x, y) - phi[y];
      if (candidate < best) best = candidate;
    }
    out[x] = best;
  }
  return out;
}

template <Scalar T>
struct FlatResult {
  T value{0};
  FlatWitness<T> witness;
  std::size_t pivots = 0;
};

/// sup of sum f (mu - nu) over |f| <= a, Lip(f) <= b, as a linear program.
///
/// Runs the Bland simplex on g = f + a >= 0 with rows g_i <= 2a and
/// g_i - g_j <= b d(i, j) for every ordered pair. Shares no code with the flow
/// solver.
template <Scalar T>
FlatResult<T> solve_flat(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  params.validate();
  const auto diff = signed_difference(mu, nu);
  const auto& space = mu.space();
  const std::size_t n = space.size();
  const std::size_t rows = n + n * (n - (n ? 1 : 0));
  DenseMatrix<T> A(rows, n);
  std::vector<T> rhs(rows);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i, ++r) {
    A(r, i) = T(1);
    rhs[r] = params.a + params.a;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      A(r, i) = T(1);
      A(r, j) = T(-1);
      rhs[r] = params.b * space(i, j);
      ++r;
    }
  auto lp = maximize_bland(A, rhs, diff);
  if (lp.status != LpStatus::Optimal) throw Error(ErrorCode::SolverFailure, "flat LP reported unbounded");
  FlatResult<T> out;
  out.pivots = lp.pivots;
  out.witness.f.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.witness.f[i] = lp.x[i] - params.a;
  for (std::size_t i = 0; i < n; ++i) out.value += out.witness.f[i] * diff[i];
  return out;
}

struct CertificateViolation {
  int condition = 0;  // 1..4
  int side = 0;       // 1 or 2; 0 for pair conditions
  std::size_t i = 0;
  std::size_t j = 0;
  std::string detail;
};

/// Conditions (i)-(iv) linking a sub-marginal plan and a dual pair.
///
/// A_k is the canonical finite choice: the support of the k-th plan marginal
/// together with the points where mu_k vanishes.
struct OptimalityCertificate {
  std::vector<std::size_t> A1;
  std::vector<std::size_t> A2;
  std::array<bool, 4> conditions{true, true, true, true};
  std::vector<CertificateViolation> violations;

  bool passed() const { return conditions[0] && conditions[1] && conditions[2] && conditions[3]; }
};

template <Scalar T>
OptimalityCertificate verify_optimality(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                                        const EntropyParams<T>& params, const TransportPlan<T>& plan,
                                        const DualPotentials<T>& pots, const T& tol) {
  params.validate();
  const auto& space = mu.space();
  const std::size_t n = space.size();
  check_submarginal(plan, mu, nu, tol);
  if (!is_dual_feasible(space, pots, tol))
    throw Error(ErrorCode::InfeasibleInputs, "InfeasibleInputs: potentials are not dual feasible");

  const T& a = params.a;
  const T& b = params.b;
  OptimalityCertificate cert;
  auto fail = [&](int condition, int side, std::size_t i, std::size_t j, std::string detail) {
    cert.conditions[condition - 1] = false;
    cert.violations.push_back({condition, side, i, j, std::move(detail)});
  };

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!(plan.gamma(i, j) > tol)) continue;
      T gap = b * space(i, j) - pots.phi1[i] - pots.phi2[j];
      if (abs_value<T>(gap) > tol)
        fail(2, 0, i, j,
             "phi1(" + space.label(i) + ") + phi2(" + space.label(j) + ") falls short of b d by " +
                 format_scalar(gap));
    }

  const DiscreteMeasure<T> marginals[2] = {plan.source_marginal(), plan.target_marginal()};
  const DiscreteMeasure<T>* measures[2] = {&mu, &nu};
  const std::vector<T>* phis[2] = {&pots.phi1, &pots.phi2};
  std::vector<std::size_t>* sets[2] = {&cert.A1, &cert.A2};
  for (int k = 0; k < 2; ++k) {
    const auto& m = *measures[k];
    const auto& g = marginals[k];
    const auto& phi = *phis[k];
    const auto density = lebesgue_decompose(g, m).density;      // gamma_k = f mu_k
    const auto singular = lebesgue_decompose(m, g).singular;    // mu_k = g gamma_k + mu_k^perp
    std::vector<bool> in_A(n, false);
    for (std::size_t x = 0; x < n; ++x) {
      in_A[x] = g[x] > tol || !(m[x] > tol);
      if (in_A[x]) sets[k]->push_back(x);
    }
    T outside(0);
    T singular_inside(0);
    for (std::size_t x = 0; x < n; ++x) {
      if (!in_A[x]) outside += g[x];
      else singular_inside += singular[x];
    }
    if (outside > tol) fail(1, k + 1, 0, 0, "marginal charges the complement of A");
    if (singular_inside > tol) fail(1, k + 1, 0, 0, "singular part charges A");
    for (std::size_t x = 0; x < n; ++x) {
      if (in_A[x] && m[x] > tol) {
        T product = (a - phi[x]) * (T(1) - density[x]);
        if (abs_value<T>(product) > tol)
          fail(3, k + 1, x, x,
               "(a - phi)(1 - f) = " + format_scalar(product) + " at " + space.label(x));
      }
      if (!in_A[x] && singular[x] > tol && abs_value<T>(phi[x] - a) > tol)
        fail(4, k + 1, x, x, "phi = " + format_scalar(phi[x]) + " below a on destroyed mass at " + space.label(x));
    }
  }
  return cert;
}

}  // namespace genwass
