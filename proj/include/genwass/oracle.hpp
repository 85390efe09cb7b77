#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genwass/error.hpp"
#include "genwass/matrix.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/spaces.hpp"
#include "genwass/transport.hpp"

// Brute-force reference values for integer-mass instances.
//
// Why enumeration is exact: the objective a(|mu| + |nu| - 2 sum gamma) +
// b (sum d^p gamma)^(1/p) is a linear term plus a concave increasing root of a
// linear form, so it is concave on the sub-marginal polytope
// {gamma >= 0, row sums <= mu, column sums <= nu}. A concave
// function attains its minimum over a polytope at a vertex. The constraint matrix
// of that polytope is the incidence matrix of a bipartite graph plus identity
// rows, hence totally unimodular, so every vertex is integral whenever mu and nu
// are. Enumerating all integer plans therefore visits every vertex.
//
// Nothing here calls the flow, simplex or duality code.
namespace genwass::oracle {

inline constexpr std::uint64_t default_cap = 10'000'000;

namespace detail {

template <Scalar T>
std::vector<long> integer_weights(const DiscreteMeasure<T>& m, const char* name) {
  std::vector<long> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const T& w = m[i];
    if (!is_integer(w))
      throw Error(ErrorCode::NotInteger, {i},
                  genwass::detail::witness(ErrorCode::NotInteger, {name, m.space().label(i)},
                                           "weight " + format_scalar(w) + " is not an integer"));
    out[i] = static_cast<long>(to_double(w));
  }
  return out;
}

// Product over cells of (min(mu_i, nu_j) + 1), saturating at cap + 1.
inline std::uint64_t plan_bound(const std::vector<long>& mu, const std::vector<long>& nu, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (long r : mu)
    for (long c : nu) {
      total *= static_cast<std::uint64_t>(std::min(r, c) + 1);
      if (total > cap) return cap + 1;
    }
  return total;
}

// Depth-first over cells in row-major order; each cell ranges over
// 0..min(remaining row, remaining column).
class Odometer {
 public:
  Odometer(std::vector<long> mu, std::vector<long> nu) : rows_(std::move(mu)), cols_(std::move(nu)) {
    cells_.assign(rows_.size() * cols_.size(), 0);
  }

  // visit(cell, value) fires when a cell is set; leaf() fires once per complete plan.
  template <class OnSet, class OnLeaf>
  void run(OnSet&& on_set, OnLeaf&& leaf) {
    descend(0, on_set, leaf);
  }

  const std::vector<long>& cells() const { return cells_; }

 private:
  template <class OnSet, class OnLeaf>
  void descend(std::size_t cell, OnSet& on_set, OnLeaf& leaf) {
    if (cell == cells_.size()) {
      leaf();
      return;
    }
    const std::size_t i = cell / cols_.size();
    const std::size_t j = cell % cols_.size();
    const long upper = std::min(rows_[i], cols_[j]);
    for (long k = 0; k <= upper; ++k) {
      cells_[cell] = k;
      rows_[i] -= k;
      cols_[j] -= k;
      on_set(cell, k, +1);
      descend(cell + 1, on_set, leaf);
      on_set(cell, k, -1);
      rows_[i] += k;
      cols_[j] += k;
    }
    cells_[cell] = 0;
  }

  std::vector<long> rows_;
  std::vector<long> cols_;
  std::vector<long> cells_;
};

// d^p by repeated multiplication for integer p, std::pow otherwise.
template <Scalar T>
T own_power(const T& d, double p) {
  if (std::floor(p) == p) {
    T out(1);
    for (long k = 0; k < static_cast<long>(p); ++k) out = out * d;
    return out;
  }
  return from_double<T>(std::pow(to_double(d), p));
}

}  // namespace detail

/// Calls `visit` with every integer gamma >= 0 whose row sums are at most mu and
/// column sums at most nu, each exactly once.
template <Scalar T>
void for_each_integer_plan(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                           const std::function<void(const DenseMatrix<T>&)>& visit,
                           std::uint64_t cap = default_cap) {
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  auto rows = detail::integer_weights(mu, "mu");
  auto cols = detail::integer_weights(nu, "nu");
  if (detail::plan_bound(rows, cols, cap) > cap)
    throw Error(ErrorCode::TooLarge, "TooLarge: enumeration bound exceeds " + std::to_string(cap) + " plans");
  const std::size_t n = rows.size();
  detail::Odometer odo(rows, cols);
  DenseMatrix<T> gamma(n, n);
  odo.run([](std::size_t, long, int) {},
          [&] {
            for (std::size_t c = 0; c < odo.cells().size(); ++c) gamma(c / n, c % n) = T(odo.cells()[c]);
            visit(gamma);
          });
}

template <Scalar T>
std::vector<TransportPlan<T>> enumerate_integer_plans(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                                                      std::uint64_t cap = default_cap) {
  std::vector<TransportPlan<T>> out;
  for_each_integer_plan<T>(mu, nu, [&](const DenseMatrix<T>& g) { out.push_back({mu.space(), g}); }, cap);
  return out;
}

/// Minimum of a(|mu| + |nu| - 2|gamma|) + b (sum d^p gamma)^(1/p) over all
/// integer plans. Keeps the cheapest cost per transported mass, then evaluates
/// the objective once per mass level. Exact for p = 1; for p > 1 the root is
/// taken in floating point.
template <Scalar T>
T brute_force_value(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const EntropyParams<T>& params,
                    std::uint64_t cap = default_cap) {
  params.validate();
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  auto rows = detail::integer_weights(mu, "mu");
  auto cols = detail::integer_weights(nu, "nu");
  if (detail::plan_bound(rows, cols, cap) > cap)
    throw Error(ErrorCode::TooLarge, "TooLarge: enumeration bound exceeds " + std::to_string(cap) + " plans");

  const auto& space = mu.space();
  const std::size_t n = rows.size();
  long max_unit = 0;
  for (long r : rows) max_unit = std::max(max_unit, r);
  // unit_cost[cell][k] = k * d^p for that cell
  std::vector<std::vector<T>> unit_cost(n * n, std::vector<T>(static_cast<std::size_t>(max_unit) + 1));
  for (std::size_t c = 0; c < n * n; ++c) {
    const T dp = detail::own_power(space(c / n, c % n), params.p);
    for (long k = 0; k <= max_unit; ++k) unit_cost[c][static_cast<std::size_t>(k)] = T(k) * dp;
  }

  std::vector<T> partial(n * n + 1, T(0));  // cost accumulated before each cell
  long mass = 0;
  std::map<long, T> best;  // transported mass -> least cost
  detail::Odometer odo(rows, cols);
  odo.run(
      [&](std::size_t cell, long k, int dir) {
        if (dir > 0) {
          partial[cell + 1] = partial[cell] + unit_cost[cell][static_cast<std::size_t>(k)];
          mass += k;
        } else {
          mass -= k;
        }
      },
      [&] {
        const T& cost = partial[n * n];
        auto it = best.find(mass);
        if (it == best.end()) best.emplace(mass, cost);
        else if (cost < it->second) it->second = cost;
      });

  const T total = mu.mass() + nu.mass();
  std::optional<T> answer;
  for (const auto& [m, cost] : best) {
    T transport;
    if (params.p == 1.0) {
      transport = cost;
    } else {
      const double c = std::max(0.0, to_double(cost));
      transport = from_double<T>(std::pow(c, 1.0 / params.p));
    }
    T value = params.a * (total - T(2 * m)) + params.b * transport;
    if (!answer || value < *answer) answer = value;
  }
  return *answer;
}

}  // namespace genwass::oracle
