#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "genwass/detail/bipartite_flow.hpp"
#include "genwass/duality.hpp"
#include "genwass/error.hpp"
#include "genwass/matrix.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/transport.hpp"

namespace genwass {

template <Scalar T>
struct CurvePoint {
  T mass;  // transported mass m
  T cost;  // accumulated sum of d^p gamma
};

/// Breakpoints of the minimal p-cost as a function of transported mass.
template <Scalar T>
struct ParametricCurve {
  std::vector<CurvePoint<T>> points;
  std::vector<std::size_t> augmentations;  // flow steps taken to reach each point
};

template <Scalar T>
struct SolveReport {
  explicit SolveReport(TransportPlan<T> p) : plan(std::move(p)) {}

  T value{0};
  TransportPlan<T> plan;
  std::optional<DualPotentials<T>> potentials;  // p = 1 only
  T transported_mass{0};
  T destroyed_mass{0};  // |mu| - m
  T created_mass{0};    // |nu| - m
  std::optional<T> duality_gap;
  std::optional<OptimalityCertificate> certificate;  // absent: not applicable
  std::optional<ParametricCurve<T>> curve;
};

namespace detail {

template <Scalar T>
T gap_tolerance(const T& value) {
  return tolerance<T>(1e-9) * (T(1) + abs_value<T>(value));
}

/// Optimal dual pair for a sub-marginal plan that is optimal for the cost b d.
///
/// Casts the plan as an uncapacitated transshipment through a waste node Z
/// (row -> Z and Z -> column both cost a) and takes Bellman-Ford distances
/// from Z in its residual graph: phi1 = -dist(row), phi2 = dist(column). Rows
/// Z cannot reach carry no mass and take the largest feasible value. The result
/// is clamped to [-a, a]. A negative cycle means the plan was not optimal.
template <Scalar T>
DualPotentials<T> recover_potentials(const FiniteMetricSpace<T>& space, const DiscreteMeasure<T>& mu,
                                     const DiscreteMeasure<T>& nu, const DenseMatrix<T>& gamma,
                                     const EntropyParams<T>& params) {
  const std::size_t n = space.size();
  const T& a = params.a;
  const T eps = tolerance<T>(1e-12) * (T(1) + mu.mass() + nu.mass());
  const auto rows = gamma.row_sums();
  const auto cols = gamma.col_sums();

  struct Edge {
    std::size_t from, to;
    T cost;
  };
  // Nodes: 0 = Z, 1..n rows, n+1..2n columns.
  auto row = [](std::size_t i) { return 1 + i; };
  auto col = [n](std::size_t j) { return 1 + n + j; };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({row(i), 0, a});
    if (mu[i] - rows[i] > eps) edges.push_back({0, row(i), T(-a)});
  }
  for (std::size_t j = 0; j < n; ++j) {
    edges.push_back({0, col(j), a});
    if (nu[j] - cols[j] > eps) edges.push_back({col(j), 0, T(-a)});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T c = params.b * space(i, j);
      edges.push_back({row(i), col(j), c});
      if (gamma(i, j) > eps) edges.push_back({col(j), row(i), T(-c)});
    }

  const std::size_t nodes = 2 * n + 1;
  std::vector<std::optional<T>> dist(nodes);
  dist[0] = T(0);
  const T relax_eps = tolerance<T>(1e-13) * (T(1) + a + params.b * space.diameter());
  bool changed = true;
  for (std::size_t round = 0; round <= nodes && changed; ++round) {
    changed = false;
    for (const auto& e : edges) {
      if (!dist[e.from]) continue;
      T candidate = *dist[e.from] + e.cost;
      if (!dist[e.to] || candidate < *dist[e.to] - relax_eps) {
        dist[e.to] = candidate;
        changed = true;
      }
    }
    if (changed && round == nodes)
      throw Error(ErrorCode::SolverFailure, "negative residual cycle: transport plan is not optimal");
  }

  DualPotentials<T> pots{std::vector<T>(n), std::vector<T>(n), params};
  for (std::size_t j = 0; j < n; ++j) pots.phi2[j] = *dist[col(j)];  // Z -> column always exists
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[row(i)]) {
      pots.phi1[i] = -*dist[row(i)];
    } else {
      T best = a;
      for (std::size_t j = 0; j < n; ++j) best = std::min(best, T(params.b * space(i, j) - pots.phi2[j]));
      pots.phi1[i] = best;
    }
  }
  auto clamp = [&](T& x) {
    if (x < -a) x = -a;
    if (x > a) x = a;
  };
  for (auto& x : pots.phi1) clamp(x);
  for (auto& x : pots.phi2) clamp(x);
  return pots;
}

/// Fills value, masses, potentials, gap and certificate for an optimal p = 1 plan.
template <Scalar T>
SolveReport<T> finish_w1_report(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                                const EntropyParams<T>& params, DenseMatrix<T> gamma) {
  const auto& space = mu.space();
  SolveReport<T> report(TransportPlan<T>{space, std::move(gamma)});
  const T m = report.plan.mass();
  report.transported_mass = m;
  report.destroyed_mass = mu.mass() - m;
  report.created_mass = nu.mass() - m;
  report.value = params.a * (report.destroyed_mass + report.created_mass) + params.b * report.plan.cost(1.0);

  auto pots = recover_potentials(space, mu, nu, report.plan.gamma, params);
  T dual(0);
  for (std::size_t x = 0; x < space.size(); ++x) dual += pots.phi1[x] * mu[x] + pots.phi2[x] * nu[x];
  const T gap = report.value - dual;
  if (abs_value<T>(gap) > gap_tolerance(report.value)) {
    throw Error(ErrorCode::SolverFailure, "duality gap " + format_scalar(gap) + " exceeds tolerance");
  }
  report.duality_gap = gap;
  report.certificate = verify_optimality(mu, nu, params, report.plan, pots, gap_tolerance(report.value));
  report.potentials = std::move(pots);
  return report;
}

}  // namespace detail

/// W_1^{a,b}(mu, nu) with an optimal plan and an optimal dual pair.
///
/// Ships along shortest augmenting paths while a path costs strictly less than
/// 2a, the price of destroying a unit at the source and creating it at the
/// target. Ties do not ship. Throws SolverFailure when the recovered duals miss
/// the primal value by more than 1e-9 (1 + value) in float mode, or at all in
/// exact mode.
template <Scalar T>
SolveReport<T> solve_w1(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const EntropyParams<T>& params) {
  params.validate();
  if (params.p != 1.0) throw Error(ErrorCode::InvalidParams, "InvalidParams: solve_w1 requires p = 1");
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  const auto& space = mu.space();
  const std::size_t n = space.size();

  DenseMatrix<T> cost(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost(i, j) = params.b * space(i, j);
  detail::BipartiteFlow<T> flow(mu.weights(), nu.weights(), cost);
  const T threshold = params.a + params.a;
  const T slack = tolerance<T>(1e-12) * (T(1) + threshold);
  while (auto path = flow.shortest_path()) {
    if (path->path_cost >= threshold - slack) break;
    flow.augment(*path);
  }
  return detail::finish_w1_report(mu, nu, params, flow.plan());
}

}  // namespace genwass
