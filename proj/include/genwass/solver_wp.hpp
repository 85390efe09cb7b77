#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "genwass/detail/bipartite_flow.hpp"
#include "genwass/error.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/solver_w1.hpp"
#include "genwass/transport.hpp"

namespace genwass {

namespace detail {

template <Scalar T>
DenseMatrix<T> power_costs(const FiniteMetricSpace<T>& space, double p) {
  const std::size_t n = space.size();
  DenseMatrix<T> cost(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost(i, j) = power<T>(space(i, j), p);
  return cost;
}

}  // namespace detail

/// Balanced W_p: (min over plans with exact marginals of sum d^p gamma)^(1/p).
///
/// The plan is unnormalized, which is the same number as |mu| times the optimal
/// cost of a probability coupling. Exact for p = 1 in exact mode.
template <Scalar T>
T wasserstein_p(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, double p) {
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidParams, "InvalidParams: p must be at least 1");
  const T mass_mu = mu.mass();
  const T mass_nu = nu.mass();
  if (abs_value<T>(mass_mu - mass_nu) > tolerance<T>(1e-12) * (T(1) + mass_mu))
    throw Error(ErrorCode::MassMismatch, "MassMismatch: |mu| = " + format_scalar(mass_mu) +
                                             " but |nu| = " + format_scalar(mass_nu));
  detail::BipartiteFlow<T> flow(mu.weights(), nu.weights(), detail::power_costs(mu.space(), p));
  while (auto path = flow.shortest_path()) flow.augment(*path);
  return root<T>(flow.total_cost(), p);
}

/// Vertices of m -> min { sum d^p gamma : gamma sub-marginal, total mass m }.
///
/// Each successive-shortest-path augmentation adds one linear segment whose slope
/// is the path cost, so slopes never decrease. Zero-length segments are merged.
template <Scalar T>
ParametricCurve<T> parametric_transport_curve(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, double p) {
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidParams, "InvalidParams: p must be at least 1");
  detail::BipartiteFlow<T> flow(mu.weights(), nu.weights(), detail::power_costs(mu.space(), p));
  ParametricCurve<T> curve;
  curve.points.push_back({T(0), T(0)});
  curve.augmentations.push_back(0);
  std::size_t steps = 0;
  while (auto path = flow.shortest_path()) {
    flow.augment(*path);
    ++steps;
    if (path->amount > flow.epsilon()) {
      curve.points.push_back({flow.flow_value(), flow.total_cost()});
      curve.augmentations.push_back(steps);
    } else {
      curve.points.back() = {flow.flow_value(), flow.total_cost()};
      curve.augmentations.back() = steps;
    }
  }
  return curve;
}

/// W_p^{a,b} by scanning the breakpoints of the parametric curve.
///
/// With m fixed the best sub-marginal pair costs V(m) = a(|mu| + |nu| - 2m) +
/// b T(m)^(1/p). On one segment T is linear in m, t -> t^(1/p) is concave and
/// increasing, so V is concave there and its minimum sits at an endpoint. Scanning
/// the breakpoints is therefore exact. Among equal values the smallest m wins
/// (exactly for p = 1, within 1e-12 relative otherwise since the root is taken
/// in floating point).
///
/// For p = 1 the report carries an optimal dual pair and certificate; for p > 1
/// both are absent.
template <Scalar T>
SolveReport<T> solve_wp(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  params.validate();
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  const double p = params.p;
  const T total = mu.mass() + nu.mass();
  auto curve = parametric_transport_curve(mu, nu, p);

  std::size_t chosen = 0;
  if (p == 1.0) {
    T best(0);
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
      const auto& pt = curve.points[k];
      T v = params.a * (total - pt.mass - pt.mass) + params.b * pt.cost;
      if (k == 0 || v < best) {
        best = v;
        chosen = k;
      }
    }
  } else {
    std::vector<double> values;
    const double a = to_double(params.a);
    const double b = to_double(params.b);
    const double tot = to_double(total);
    for (const auto& pt : curve.points) {
      double t = std::max(0.0, to_double(pt.cost));
      values.push_back(a * (tot - 2.0 * to_double(pt.mass)) + b * std::pow(t, 1.0 / p));
    }
    double best = values[0];
    for (double v : values) best = std::min(best, v);
    const double slack = 1e-12 * (1.0 + std::abs(best));
    while (values[chosen] > best + slack) ++chosen;
  }

  detail::BipartiteFlow<T> flow(mu.weights(), nu.weights(), detail::power_costs(mu.space(), p));
  for (std::size_t step = 0; step < curve.augmentations[chosen]; ++step) {
    auto path = flow.shortest_path();
    if (!path) throw Error(ErrorCode::SolverFailure, "flow replay ended early");
    flow.augment(*path);
  }

  if (p == 1.0) {
    auto report = detail::finish_w1_report(mu, nu, params, flow.plan());
    report.curve = std::move(curve);
    return report;
  }

  SolveReport<T> report(TransportPlan<T>{mu.space(), flow.plan()});
  report.transported_mass = report.plan.mass();
  report.destroyed_mass = mu.mass() - report.transported_mass;
  report.created_mass = nu.mass() - report.transported_mass;
  report.value = params.a * (report.destroyed_mass + report.created_mass) +
                 params.b * root<T>(report.plan.cost(p), p);
  report.curve = std::move(curve);
  return report;
}

/// W_p^{a,b} through the solver matching p: the flow solver with early stop for
/// p = 1, the breakpoint scan otherwise.
template <Scalar T>
SolveReport<T> solve(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  return params.p == 1.0 ? solve_w1(mu, nu, params) : solve_wp(mu, nu, params);
}

template <Scalar T>
T distance(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  return solve(mu, nu, params).value;
}

}  // namespace genwass
