#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "genwass/duality.hpp"
#include "genwass/error.hpp"
#include "genwass/gh.hpp"
#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/oracle.hpp"
#include "genwass/quotient_isometry.hpp"
#include "genwass/solver_w1.hpp"
#include "genwass/solver_wp.hpp"
#include "genwass/spaces.hpp"
#include "genwass/transport.hpp"

// Seeded property suites shared by the acceptance binary and `genwass selftest`.
namespace genwass::verification {

using Rng = std::mt19937_64;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::size_t instances = 0;
  std::string detail;
  double seconds = 0;
};

// Pinned tolerances.
inline constexpr double kRelTolP = 1e-9;        // p > 1 values, float-mode comparisons
inline constexpr double kGapTolFloat = 1e-9;    // float duality gap, relative to 1 + value
inline constexpr double kTransformTol = 1e-12;  // c-transform checks in float mode

// ---------------------------------------------------------------------------
// Generators

inline long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

template <class V>
const V& pick(Rng& rng, const std::vector<V>& options) {
  return options[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(options.size()) - 1))];
}

template <Scalar T>
T ratio(long num, long den) {
  return T(num) / T(den);
}

/// Shortest-path closure of symmetric positive edge weights.
template <Scalar T>
std::vector<std::vector<T>> shortest_path_closure(std::vector<std::vector<T>> d) {
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Graph metric whose edge weights are k/den with k uniform in [1, max_num].
/// Entries stay within [1/den, max_num/den].
template <Scalar T>
FiniteMetricSpace<T> random_graph_metric(Rng& rng, std::size_t n, long max_num, long den = 1) {
  std::vector<std::vector<T>> d(n, std::vector<T>(n, T(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = ratio<T>(uniform_int(rng, 1, max_num), den);
  return validate_metric<T>(shortest_path_closure(std::move(d)));
}

/// Weights k/den with k uniform in [0, max_num]; each point is left empty with
/// probability zero_prob.
template <Scalar T>
DiscreteMeasure<T> random_measure(Rng& rng, const FiniteMetricSpace<T>& space, long max_num, long den = 1,
                                  double zero_prob = 0.25) {
  std::vector<T> w(space.size(), T(0));
  for (auto& x : w)
    if (uniform_real(rng, 0, 1) >= zero_prob) x = ratio<T>(uniform_int(rng, 0, max_num), den);
  return DiscreteMeasure<T>(space, std::move(w));
}

template <Scalar T>
EntropyParams<T> random_params(Rng& rng, const std::vector<std::pair<long, long>>& choices, double p) {
  EntropyParams<T> params;
  auto a = pick(rng, choices);
  auto b = pick(rng, choices);
  params.a = ratio<T>(a.first, a.second);
  params.b = ratio<T>(b.first, b.second);
  params.p = p;
  return params;
}

/// Same labels and distances with a different scalar type.
template <Scalar To, Scalar From>
FiniteMetricSpace<To> convert_space(const FiniteMetricSpace<From>& space) {
  std::vector<std::vector<To>> d(space.size(), std::vector<To>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = 0; j < space.size(); ++j) d[i][j] = To(to_double(space(i, j)));
  return validate_metric<To>(space.labels(), d);
}

template <Scalar To, Scalar From>
DiscreteMeasure<To> convert_measure(const FiniteMetricSpace<To>& space, const DiscreteMeasure<From>& m) {
  std::vector<To> w(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) w[i] = To(to_double(m[i]));
  return DiscreteMeasure<To>(space, std::move(w));
}

// --- groups ---------------------------------------------------------------

struct GroupSpec {
  std::string name;
  std::size_t orbit_size;                // points moved by one copy of the base action
  std::vector<Permutation> generators;   // on orbit_size points
};

inline std::vector<GroupSpec> small_groups() {
  return {
      {"C2", 2, {{1, 0}}},
      {"C3", 3, {{1, 2, 0}}},
      {"C4", 4, {{1, 2, 3, 0}}},
      {"C5", 5, {{1, 2, 3, 4, 0}}},
      {"C6", 6, {{1, 2, 3, 4, 5, 0}}},
      {"V4", 4, {{1, 0, 3, 2}, {2, 3, 0, 1}}},
      {"S3", 3, {{1, 2, 0}, {1, 0, 2}}},
  };
}

/// All products of the generators, sorted; the identity comes first.
inline std::vector<Permutation> close_group(const std::vector<Permutation>& generators, std::size_t n) {
  Permutation id(n);
  std::iota(id.begin(), id.end(), std::size_t{0});
  std::set<Permutation> seen{id};
  std::vector<Permutation> frontier{id};
  while (!frontier.empty()) {
    std::vector<Permutation> next;
    for (const auto& g : frontier)
      for (const auto& h : generators) {
        auto gh = compose(h, g);
        if (seen.insert(gh).second) next.push_back(gh);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

struct RandomGroup {
  std::string name;
  std::size_t n = 0;
  std::vector<Permutation> elements;
};

/// A group of order at most 6 acting on n <= max_points points: one or more
/// copies of a base action, padded with fixed points and randomly relabelled.
inline RandomGroup random_group(Rng& rng, std::size_t max_points = 8) {
  const auto specs = small_groups();
  for (;;) {
    const auto& spec = pick(rng, specs);
    if (spec.orbit_size > max_points) continue;
    const long max_copies = static_cast<long>(max_points / spec.orbit_size);
    const std::size_t copies = static_cast<std::size_t>(uniform_int(rng, 1, std::min(max_copies, 2L)));
    const std::size_t moved = copies * spec.orbit_size;
    const std::size_t n = moved + static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(max_points - moved)));
    Permutation relabel(n);
    std::iota(relabel.begin(), relabel.end(), std::size_t{0});
    std::shuffle(relabel.begin(), relabel.end(), rng);
    std::vector<Permutation> gens;
    for (const auto& g : spec.generators) {
      Permutation big(n);
      std::iota(big.begin(), big.end(), std::size_t{0});
      for (std::size_t c = 0; c < copies; ++c)
        for (std::size_t i = 0; i < spec.orbit_size; ++i) big[c * spec.orbit_size + i] = c * spec.orbit_size + g[i];
      // conjugate by the relabelling: point relabel[i] goes to relabel[big[i]]
      Permutation conj(n);
      for (std::size_t i = 0; i < n; ++i) conj[relabel[i]] = relabel[big[i]];
      gens.push_back(std::move(conj));
    }
    return {spec.name, n, close_group(gens, n)};
  }
}

/// Orbit id of each unordered pair {i, j}, i < j, under the diagonal action.
inline std::vector<std::vector<std::size_t>> pair_orbits(const std::vector<Permutation>& elements, std::size_t n,
                                                         std::size_t& count) {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> id(n, std::vector<std::size_t>(n, unset));
  count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (id[i][j] != unset) continue;
      for (const auto& g : elements) id[g[i]][g[j]] = id[g[j]][g[i]] = count;
      ++count;
    }
  return id;
}

/// G-invariant metric: one edge weight per pair orbit, then shortest paths. In
/// float mode the closure can round differently inside one orbit, so each orbit
/// is reset to its smallest entry afterwards.
template <Scalar T>
FiniteMetricSpace<T> invariant_metric(const std::vector<Permutation>& elements, std::size_t n,
                                      const std::vector<T>& orbit_weights,
                                      const std::vector<std::vector<std::size_t>>& orbit_of) {
  std::vector<std::vector<T>> d(n, std::vector<T>(n, T(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i][j] = orbit_weights[orbit_of[i][j]];
  d = shortest_path_closure(std::move(d));
  auto canonical = d;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& g : elements) canonical[i][j] = std::min(canonical[i][j], d[g[i]][g[j]]);
  return validate_metric<T>(std::move(canonical));
}

template <Scalar T>
std::vector<GroupElement> labelled(const std::vector<Permutation>& elements) {
  std::vector<GroupElement> out;
  for (std::size_t k = 0; k < elements.size(); ++k) out.push_back({"g" + std::to_string(k), elements[k]});
  return out;
}

// ---------------------------------------------------------------------------
// Criterion helpers

namespace detail {

template <Scalar T>
bool close_rel(const T& x, const T& y, double rel) {
  const double dx = to_double(x), dy = to_double(y);
  return std::abs(dx - dy) <= rel * std::max(1.0, std::max(std::abs(dx), std::abs(dy)));
}

class Tally {
 public:
  void fail(const std::string& what) {
    if (failures_++ < 3) {
      if (!first_.empty()) first_ += "; ";
      first_ += what;
    }
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    return failures_ == 0 ? std::string() : std::to_string(failures_) + " failure(s): " + first_;
  }

 private:
  std::size_t failures_ = 0;
  std::string first_;
};

template <class F>
CriterionResult timed(int id, std::string title, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace detail

template <Scalar T>
struct Instance {
  FiniteMetricSpace<T> space;
  DiscreteMeasure<T> mu;
  DiscreteMeasure<T> nu;
  EntropyParams<T> params;
};

/// Exact instances with n <= 8: half-integer graph metrics and quarter masses.
inline std::vector<Instance<Rational>> duality_instances(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  const std::vector<std::pair<long, long>> ab = {{1, 2}, {1, 1}, {2, 1}, {3, 2}};
  std::vector<Instance<Rational>> out;
  for (std::size_t k = 0; k < count; ++k) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 8));
    auto space = random_graph_metric<Rational>(rng, n, 8, 2);
    auto mu = random_measure<Rational>(rng, space, 8, 4);
    auto nu = random_measure<Rational>(rng, space, 8, 4);
    out.push_back({space, std::move(mu), std::move(nu), random_params<Rational>(rng, ab, 1.0)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence

inline CriterionResult criterion_oracle(std::uint64_t seed, std::size_t count = 600) {
  return detail::timed(1, "oracle equivalence", [&](CriterionResult& r) {
    Rng rng(seed ^ 0x1111);
    const std::vector<std::pair<long, long>> ab = {{1, 2}, {1, 1}, {2, 1}};
    const double ps[3] = {1.0, 2.0, 3.0};
    detail::Tally tally;
    for (std::size_t k = 0; k < count; ++k) {
      const double p = ps[k % 3];
      const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
      auto space = random_graph_metric<Rational>(rng, n, 5);
      auto mu = random_measure<Rational>(rng, space, 3, 1, 0.15);
      auto nu = random_measure<Rational>(rng, space, 3, 1, 0.15);
      auto params = random_params<Rational>(rng, ab, p);
      const Rational expected = oracle::brute_force_value(mu, nu, params);
      const Rational got = solve(mu, nu, params).value;
      const bool ok = p == 1.0 ? got == expected : detail::close_rel(got, expected, kRelTolP);
      if (!ok)
        tally.fail("instance " + std::to_string(k) + " p=" + format_scalar(p) + ": solver " + format_scalar(got) +
                   " vs oracle " + format_scalar(expected));
      if (p == 1.0 && solve_wp(mu, nu, params).value != got)
        tally.fail("instance " + std::to_string(k) + ": breakpoint scan disagrees with the p = 1 solver");
      ++r.instances;
    }
    r.passed = tally.ok();
    r.detail = tally.summary();
  });
}

// ---------------------------------------------------------------------------
// 2. Strong duality

inline CriterionResult criterion_duality(std::uint64_t seed, std::size_t count = 500) {
  return detail::timed(2, "strong duality", [&](CriterionResult& r) {
    detail::Tally tally;
    const auto instances = duality_instances(seed, count);
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const auto& inst = instances[k];
      try {
        auto exact = solve_w1(inst.mu, inst.nu, inst.params);
        if (!exact.duality_gap || *exact.duality_gap != 0)
          tally.fail("instance " + std::to_string(k) + ": exact gap " + format_scalar(*exact.duality_gap));
        auto eval = evaluate_dual(*exact.potentials, inst.mu, inst.nu);
        if (!eval.feasible || !eval.objective.is_finite() || eval.objective.value != exact.value)
          tally.fail("instance " + std::to_string(k) + ": dual objective differs from the primal value");

        auto fspace = convert_space<double>(inst.space);
        EntropyParams<double> fparams{to_double(inst.params.a), to_double(inst.params.b), 1.0};
        auto flt = solve_w1(convert_measure<double>(fspace, inst.mu), convert_measure<double>(fspace, inst.nu), fparams);
        if (std::abs(*flt.duality_gap) > kGapTolFloat * (1 + std::abs(flt.value)))
          tally.fail("instance " + std::to_string(k) + ": float gap " + format_scalar(*flt.duality_gap));
        if (!detail::close_rel(flt.value, to_double(exact.value), kRelTolP))
          tally.fail("instance " + std::to_string(k) + ": float value drifts from the exact value");
      } catch (const Error& e) {
        tally.fail("instance " + std::to_string(k) + ": " + e.what());
      }
      ++r.instances;
    }
    r.passed = tally.ok();
    r.detail = tally.summary();
  });
}

// ---------------------------------------------------------------------------
// 3. Flat-metric equality

inline CriterionResult criterion_flat(std::uint64_t seed, std::size_t count = 500) {
  return detail::timed(3, "flat-metric equality", [&](CriterionResult& r) {
    detail::Tally tally;
    std::size_t pivots = 0;
    const auto instances = duality_instances(seed, count);
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const auto& inst = instances[k];
      const auto w1 = solve_w1(inst.mu, inst.nu, inst.params).value;
      const auto flat = solve_flat(inst.mu, inst.nu, inst.params);
      pivots += flat.pivots;
      if (flat.value != w1)
        tally.fail("instance " + std::to_string(k) + ": flat " + format_scalar(flat.value) + " vs W1 " +
                   format_scalar(w1));
      if (!is_flat_feasible(inst.space, flat.witness.f, inst.params, Rational(0)))
        tally.fail("instance " + std::to_string(k) + ": flat witness infeasible");
      ++r.instances;
    }
    if (pivots == 0) tally.fail("the simplex never pivoted");
    r.passed = tally.ok();
    r.detail = tally.summary();
    if (r.passed) r.detail = std::to_string(pivots) + " simplex pivots";
  });
}

// ---------------------------------------------------------------------------
// 4. Metric axioms and geodesic midpoint

inline CriterionResult criterion_metric(std::uint64_t seed, std::size_t count = 240) {
  return detail::timed(4, "metric axioms and midpoint", [&](CriterionResult& r) {
    Rng rng(seed ^ 0x4444);
    const std::vector<std::pair<long, long>> ab = {{1, 2}, {1, 1}, {2, 1}};
    detail::Tally tally;
    for (std::size_t k = 0; k < count; ++k) {
      const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 6));
      const std::string tag = "triple " + std::to_string(k);
      if (k % 2 == 0) {
        auto space = random_graph_metric<Rational>(rng, n, 6, 2);
        auto mu = random_measure<Rational>(rng, space, 6, 2);
        auto nu = random_measure<Rational>(rng, space, 6, 2);
        auto rho = random_measure<Rational>(rng, space, 6, 2);
        auto params = random_params<Rational>(rng, ab, 1.0);
        auto W = [&](const auto& x, const auto& y) { return solve_w1(x, y, params).value; };
        const Rational mn = W(mu, nu), nm = W(nu, mu), mr = W(mu, rho), nr = W(nu, rho);
        if (mn != nm) tally.fail(tag + ": asymmetric");
        if (W(mu, mu) != 0) tally.fail(tag + ": W(mu, mu) != 0");
        if ((mu == nu) != (mn == 0)) tally.fail(tag + ": positivity");
        if (mr > mn + nr) tally.fail(tag + ": triangle inequality");
        const auto sigma = (mu + nu).scaled(Rational(1, 2));
        if (W(mu, sigma) != mn / 2 || W(sigma, nu) != mn / 2) tally.fail(tag + ": midpoint");
      } else {
        auto space = random_graph_metric<double>(rng, n, 6, 2);
        auto mu = random_measure<double>(rng, space, 6, 2);
        auto nu = random_measure<double>(rng, space, 6, 2);
        auto rho = random_measure<double>(rng, space, 6, 2);
        auto params = random_params<double>(rng, ab, 2.0);
        auto W = [&](const auto& x, const auto& y) { return solve_wp(x, y, params).value; };
        const double mn = W(mu, nu), nm = W(nu, mu), mr = W(mu, rho), nr = W(nu, rho);
        const double tol = kRelTolP * (1 + mn + nr);
        if (std::abs(mn - nm) > tol) tally.fail(tag + ": asymmetric (p = 2)");
        if (std::abs(W(mu, mu)) > tol) tally.fail(tag + ": W(mu, mu) != 0 (p = 2)");
        if (mr > mn + nr + tol) tally.fail(tag + ": triangle inequality (p = 2)");
      }
      ++r.instances;
    }
    r.passed = tally.ok();
    r.detail = tally.summary();
  });
}

// ---------------------------------------------------------------------------
// 5. Translation invariance

inline CriterionResult criterion_translation(std::uint64_t seed, std::size_t count = 240) {
  return detail::timed(5, "translation invariance", [&](CriterionResult& r) {
    Rng rng(seed ^ 0x5555);
    const std::vector<std::pair<long, long>> ab = {{1, 2}, {1, 1}, {2, 1}};
    detail::Tally tally;
    for (std::size_t k = 0; k < count; ++k) {
      const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 7));
      auto space = random_graph_metric<Rational>(rng, n, 6, 2);
      auto mu = random_measure<Rational>(rng, space, 6, 2);
      auto nu = random_measure<Rational>(rng, space, 6, 2);
      auto eta = random_measure<Rational>(rng, space, 6, 2, 0.1);
      auto params = random_params<Rational>(rng, ab, 1.0);
      if (solve_w1(mu + eta, nu + eta, params).value != solve_w1(mu, nu, params).value)
        tally.fail("instance " + std::to_string(k));
      ++r.instances;
    }
    r.passed = tally.ok();
    r.detail = tally.summary();
  });
}

// ---------------------------------------------------------------------------
// 6. Optimality certificate

/// Adds 1/4 on a strictly suboptimal arc (i, j) and trims other arcs in row i
/// and column j so the plan stays sub-marginal. Returns false when no arc with
/// phi1 + phi2 < b d has mu_i, nu_j >= 1/4.
template <Scalar T>
bool tamper_plan(const Instance<T>& inst, const DualPotentials<T>& pots, TransportPlan<T>& plan) {
  const std::size_t n = inst.space.size();
  const T quarter = T(1) / T(4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!(pots.phi1[i] + pots.phi2[j] < inst.params.b * inst.space(i, j))) continue;
      if (inst.mu[i] < quarter || inst.nu[j] < quarter) continue;
      auto& g = plan.gamma;
      g(i, j) += quarter;
      T row_over = g.row_sums()[i] - inst.mu[i];
      for (std::size_t c = 0; c < n && row_over > T(0); ++c) {
        if (c == j) continue;
        T cut = std::min(row_over, g(i, c));
        g(i, c) -= cut;
        row_over -= cut;
      }
      T col_over = g.col_sums()[j] - inst.nu[j];
      for (std::size_t rr = 0; rr < n && col_over > T(0); ++rr) {
        if (rr == i) continue;
        T cut = std::min(col_over, g(rr, j));
        g(rr, j) -= cut;
        col_over -= cut;
      }
      return true;
    }
  return false;
}

inline CriterionResult criterion_certificate(std::uint64_t seed, std::size_t count = 500) {
  return detail::timed(6, "optimality certificate", [&](CriterionResult& r) {
    detail::Tally tally;
    std::size_t tampered = 0;
    const auto instances = duality_instances(seed, count);
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const auto& inst = instances[k];
      auto report = solve_w1(inst.mu, inst.nu, inst.params);
      if (!report.certificate || !report.certificate->passed())
        tally.fail("instance " + std::to_string(k) + ": solver output fails the certificate");
      auto plan = report.plan;
      if (tamper_plan(inst, *report.potentials, plan)) {
        ++tampered;
        auto cert = verify_optimality(inst.mu, inst.nu, inst.params, plan, *report.potentials, Rational(0));
        if (cert.conditions[1] && cert.conditions[2])
          tally.fail("instance " + std::to_string(k) + ": tampered plan still satisfies (ii) and (iii)");
      }
      ++r.instances;
    }
    if (tampered == 0) tally.fail("no instance admitted tampering");
    r.passed = tally.ok();
    r.detail = tally.summary();
    if (r.passed) r.detail = std::to_string(tampered) + " tampered plans rejected";
  });
}

// ---------------------------------------------------------------------------
// 7. Quotient isometry

inline CriterionResult criterion_quotient(std::uint64_t seed, std::size_t count = 120) {
  return detail::timed(7, "quotient isometry", [&](CriterionResult& r) {
    Rng rng(seed ^ 0x7777);
    const std::vector<std::pair<long, long>> ab = {{1, 2}, {1, 1}, {2, 1}};
    detail::Tally tally;
    for (std::size_t k = 0; k < count; ++k) {
      const std::string tag = "instance " + std::to_string(k);
      auto group = random_group(rng, 8);
      std::size_t orbit_count = 0;
      auto orbit_of = pair_orbits(group.elements, group.n, orbit_count);
      std::vector<Rational> weights(orbit_count);
      for (auto& w : weights) w = ratio<Rational>(uniform_int(rng, 1, 8), 2);
      auto space = invariant_metric<Rational>(group.elements, group.n, weights, orbit_of);
      auto action = validate_action(space, labelled<Rational>(group.elements));
      const auto q = build_quotient(action);

      for (double p : {1.0, 2.0}) {
        auto params = random_params<Rational>(rng, ab, p);
        auto mu = random_measure<Rational>(rng, space, 6, 2);
        auto nu = random_measure<Rational>(rng, space, 6, 2);
        if (!check_quotient_contraction(action, mu, nu, params).holds)
          tally.fail(tag + ": contraction fails (" + group.name + ", p=" + format_scalar(p) + ")");
        auto smu = symmetrize(action, mu);
        auto snu = symmetrize(action, nu);
        if (!check_quotient_isometry(action, smu, snu, params).holds)
          tally.fail(tag + ": isometry fails (" + group.name + ", p=" + format_scalar(p) + ")");
        if (p == 1.0 && !check_flat_lift(action, smu, snu, params).holds)
          tally.fail(tag + ": lifted flat witness fails (" + group.name + ")");
      }
      auto nu_star = random_measure<Rational>(rng, q.quotient, 6, 2);
      auto lift = invariant_lift(action, q, nu_star);
      if (!is_invariant(action, lift)) tally.fail(tag + ": lift not invariant");
      if (!(pushforward(q.quotient, q.projection, lift) == nu_star)) tally.fail(tag + ": p# lift != id");
      ++r.instances;
    }
    r.passed = tally.ok();
    r.detail = tally.summary();
  });
}

// ---------------------------------------------------------------------------
// 8. GH stability

namespace detail {

/// Mass `total` spread with random weights over at most five random points.
inline DiscreteMeasure<double> sampled_measure(Rng& rng, const FiniteMetricSpace<double>& space, double total) {
  std::vector<std::size_t> idx(space.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t support =
      static_cast<std::size_t>(uniform_int(rng, 1, static_cast<long>(std::min<std::size_t>(5, space.size()))));
  std::vector<double> raw(support);
  double sum = 0;
  for (auto& x : raw) sum += (x = uniform_real(rng, 0.05, 1.0));
  std::vector<double> w(space.size(), 0.0);
  for (std::size_t k = 0; k < support; ++k) w[idx[k]] = total * raw[k] / sum;
  return DiscreteMeasure<double>(space, std::move(w));
}

inline FiniteMetricSpace<double> euclidean_space(const std::vector<std::array<double, 2>>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i][j] = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
  return validate_metric<double>(d);
}

struct GHTriple {
  FiniteMetricSpace<double> source;
  FiniteMetricSpace<double> target;
  std::vector<std::size_t> table;
};

/// Source: random planar points. Target: noisy copies of some of them plus a few
/// extra points near those copies. The map sends each source point to its
/// nearest target point.
inline GHTriple random_gh_triple(Rng& rng) {
  for (;;) {
    const std::size_t n1 = static_cast<std::size_t>(uniform_int(rng, 2, 7));
    std::vector<std::array<double, 2>> src(n1);
    for (auto& pt : src) pt = {uniform_real(rng, 0, 10), uniform_real(rng, 0, 10)};
    const double noise = uniform_real(rng, 0.01, 1.5);
    const std::size_t keep = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<long>(n1)));
    std::vector<std::array<double, 2>> tgt;
    for (std::size_t k = 0; k < keep; ++k)
      tgt.push_back({src[k][0] + uniform_real(rng, -noise, noise), src[k][1] + uniform_real(rng, -noise, noise)});
    const long extra = uniform_int(rng, 0, 2);
    for (long e = 0; e < extra; ++e) {
      const auto& base = tgt[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(tgt.size()) - 1))];
      tgt.push_back({base[0] + uniform_real(rng, -noise, noise), base[1] + uniform_real(rng, -noise, noise)});
    }
    try {
      auto source = euclidean_space(src);
      auto target = euclidean_space(tgt);
      std::vector<std::size_t> table(n1);
      for (std::size_t x = 0; x < n1; ++x) {
        std::size_t best = 0;
        for (std::size_t y = 1; y < tgt.size(); ++y)
          if (std::hypot(src[x][0] - tgt[y][0], src[x][1] - tgt[y][1]) <
              std::hypot(src[x][0] - tgt[best][0], src[x][1] - tgt[best][1]))
            best = y;
        table[x] = best;
      }
      return {source, target, table};
    } catch (const Error&) {
      // coincident points; draw again
    }
  }
}

}  // namespace detail

inline CriterionResult criterion_gh(std::uint64_t seed, std::size_t count = 120, std::size_t equivariant_count = 60) {
  return detail::timed(8, "GH stability", [&](CriterionResult& r) {
    Rng rng(seed ^ 0x8888);
    detail::Tally tally;
    const std::vector<double> ab = {0.5, 1.0, 2.0};
    std::size_t accepted = 0;
    while (accepted < count) {
      auto triple = detail::random_gh_triple(rng);
      const double eps = gh_defect(triple.table, triple.source, triple.target);
      if (eps > triple.source.diameter() / 2) continue;
      const std::string tag = "triple " + std::to_string(accepted);
      ++accepted;
      EntropyParams<double> params{pick(rng, ab), pick(rng, ab), accepted % 2 ? 1.0 : 2.0};
      const double C = static_cast<double>(uniform_int(rng, 1, 3));
      const double bound =
          pushforward_bound(eps, params, C, triple.source.diameter(), triple.target.diameter());
      for (int rep = 0; rep < 2; ++rep) {
        auto mu = detail::sampled_measure(rng, triple.source, uniform_int(rng, 0, 1) ? C : C / 2);
        auto nu = detail::sampled_measure(rng, triple.source, uniform_int(rng, 0, 1) ? C : C / 2);
        const double up = solve(mu, nu, params).value;
        const double down = solve(pushforward(triple.target, triple.table, mu),
                                  pushforward(triple.target, triple.table, nu), params)
                                .value;
        if (std::abs(down - up) > bound + kRelTolP * (1 + up))
          tally.fail(tag + ": |W(f#mu, f#nu) - W(mu, nu)| = " + format_scalar(std::abs(down - up)) + " exceeds " +
                     format_scalar(bound));
      }
      const auto f = make_gh_map(triple.source, triple.target, triple.table);
      const auto inv = approximate_inverse(f);
      auto mu2 = detail::sampled_measure(rng, triple.target, uniform_int(rng, 0, 1) ? C : C / 2);
      auto back = pushforward(triple.target, triple.table, pushforward(triple.source, inv.table, mu2));
      const double surj = solve(mu2, back, params).value;
      const double surj_bound = 4 * params.b * std::pow(C, 2.0 / params.p) * eps;
      if (surj > surj_bound + kRelTolP * (1 + surj))
        tally.fail(tag + ": W(mu2, f#f'#mu2) = " + format_scalar(surj) + " exceeds " + format_scalar(surj_bound));
      if (inv.epsilon > 3 * eps + 1e-12) tally.fail(tag + ": approximate inverse defect above 3 eps");
    }
    r.instances = accepted;

    std::size_t equivariant = 0;
    while (equivariant < equivariant_count) {
      auto group = random_group(rng, 7);
      std::size_t orbit_count = 0;
      auto orbit_of = pair_orbits(group.elements, group.n, orbit_count);
      std::vector<double> w1(orbit_count), w2(orbit_count);
      for (std::size_t o = 0; o < orbit_count; ++o) {
        w1[o] = uniform_real(rng, 1, 5);
        w2[o] = w1[o] * (1 + uniform_real(rng, -0.15, 0.15));
      }
      auto source = invariant_metric<double>(group.elements, group.n, w1, orbit_of);
      auto target = invariant_metric<double>(group.elements, group.n, w2, orbit_of);
      auto alpha = validate_action(source, labelled<double>(group.elements));
      auto target_elements = labelled<double>(group.elements);
      if (uniform_int(rng, 0, 1)) {  // relabel so that beta_g = alpha_{g^-1}
        for (auto& e : target_elements) e.perm = inverse(e.perm);
      }
      auto beta = validate_action(target, std::move(target_elements));
      std::vector<std::size_t> table(group.n);
      std::iota(table.begin(), table.end(), std::size_t{0});
      const double eps = equivariant_defect(table, alpha, beta);
      if (eps > source.diameter() / 2) continue;
      const std::string tag = "equivariant triple " + std::to_string(equivariant);
      ++equivariant;
      EntropyParams<double> params{pick(rng, ab), pick(rng, ab), equivariant % 2 ? 1.0 : 2.0};
      const double C = static_cast<double>(uniform_int(rng, 1, 3));
      const double bound = pushforward_bound(eps, params, C, source.diameter(), target.diameter());
      auto mu = detail::sampled_measure(rng, source, uniform_int(rng, 0, 1) ? C : C / 2);
      auto inv_mu = symmetrize(alpha, mu);
      for (const auto* m : {&mu, &inv_mu}) {
        for (const auto& g : alpha.elements()) {
          const auto& beta_g = beta.elements()[*beta.find(g.label)].perm;
          auto lhs = pushforward(target, table, pushforward(g.perm, *m));
          auto rhs = pushforward(beta_g, pushforward(target, table, *m));
          const double gap = solve(lhs, rhs, params).value;
          if (gap > bound + kRelTolP * (1 + gap))
            tally.fail(tag + ": equivariant gap " + format_scalar(gap) + " exceeds " + format_scalar(bound));
        }
      }
    }
    r.instances += equivariant;
    r.passed = tally.ok();
    r.detail = tally.summary();
    if (r.passed)
      r.detail = std::to_string(accepted) + " plain and " + std::to_string(equivariant) + " equivariant triples";
  });
}

// ---------------------------------------------------------------------------
// 9. c-transform properties

inline CriterionResult criterion_c_transform(std::uint64_t seed, std::size_t count = 240) {
  return detail::timed(9, "c-transform properties", [&](CriterionResult& r) {
    Rng rng(seed ^ 0x9999);
    const std::vector<std::pair<long, long>> ab = {{1, 2}, {1, 1}, {2, 1}, {3, 2}};
    detail::Tally tally;
    for (std::size_t k = 0; k < count; ++k) {
      const std::string tag = "pair " + std::to_string(k);
      const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 7));
      auto space = random_graph_metric<Rational>(rng, n, 6, 2);
      auto params = random_params<Rational>(rng, ab, 1.0);
      const Rational& a = params.a;
      const Rational& b = params.b;
      auto random_in = [&](const Rational& lo, const Rational& hi) {
        return lo + (hi - lo) * ratio<Rational>(uniform_int(rng, 0, 16), 16);
      };
      DualPotentials<Rational> pots{std::vector<Rational>(n), std::vector<Rational>(n), params};
      for (auto& x : pots.phi2) x = random_in(-a, a);
      for (std::size_t x = 0; x < n; ++x) {
        Rational upper = a;
        for (std::size_t y = 0; y < n; ++y) upper = std::min(upper, Rational(b * space(x, y) - pots.phi2[y]));
        pots.phi1[x] = random_in(-a, upper);
      }
      if (!is_dual_feasible(space, pots, Rational(0))) {
        tally.fail(tag + ": generator produced an infeasible pair");
        continue;
      }
      auto mu = random_measure<Rational>(rng, space, 6, 2);
      auto nu = random_measure<Rational>(rng, space, 6, 2);
      const auto before = evaluate_dual(pots, mu, nu);

      auto t1 = c_transform(space, pots.phi2, params);
      auto t2 = c_transform(space, t1, params);
      DualPotentials<Rational> improved{t1, t2, params};
      const auto after = evaluate_dual(improved, mu, nu);
      if (!after.feasible) tally.fail(tag + ": transformed pair infeasible");
      if (!after.objective.is_finite() || after.objective.value < before.objective.value)
        tally.fail(tag + ": objective decreased");
      for (const auto* out : {&t1, &t2}) {
        if (!is_flat_feasible(space, *out, params, Rational(0))) tally.fail(tag + ": output not in [-a, a] or not b-Lipschitz");
      }
      // t1 is b-Lipschitz with values in [-a, a], so its transform is -t1.
      for (std::size_t x = 0; x < n; ++x)
        if (t2[x] != -t1[x]) {
          tally.fail(tag + ": double transform is not the negation");
          break;
        }
      ++r.instances;
    }
    r.passed = tally.ok();
    r.detail = tally.summary();
  });
}

inline std::vector<CriterionResult> run_all(std::uint64_t seed) {
  return {criterion_oracle(seed),      criterion_duality(seed), criterion_flat(seed),
          criterion_metric(seed),      criterion_translation(seed), criterion_certificate(seed),
          criterion_quotient(seed),    criterion_gh(seed),      criterion_c_transform(seed)};
}

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << " (" << r.title << "): " << r.instances
      << " instances, " << std::fixed;
  out.precision(2);
  out << r.seconds << " s";
  if (!r.detail.empty()) out << "; " << r.detail;
  return out.str();
}

}  // namespace genwass::verification
