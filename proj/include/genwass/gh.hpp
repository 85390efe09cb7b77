#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "genwass/error.hpp"
#include "genwass/numeric.hpp"
#include "genwass/spaces.hpp"
#include "genwass/transport.hpp"

namespace genwass {

/// A point map between finite spaces together with an epsilon it is claimed to meet.
template <Scalar T>
struct GHMap {
  FiniteMetricSpace<T> source;
  FiniteMetricSpace<T> target;
  std::vector<std::size_t> table;
  T epsilon{0};
};

namespace detail {

template <Scalar T>
void check_table(const std::vector<std::size_t>& table, const FiniteMetricSpace<T>& source,
                 const FiniteMetricSpace<T>& target) {
  if (table.size() != source.size())
    throw Error(ErrorCode::IndexOutOfRange, "map has " + std::to_string(table.size()) + " entries for " +
                                                std::to_string(source.size()) + " source points");
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i] >= target.size())
      throw Error(ErrorCode::IndexOutOfRange, {i, table[i]},
                  detail::witness(ErrorCode::IndexOutOfRange, {source.label(i)},
                                  "maps to index " + std::to_string(table[i])));
}

}  // namespace detail

/// max over pairs of |d_Y(f x, f x') - d_X(x, x')|.
template <Scalar T>
T distortion(const std::vector<std::size_t>& table, const FiniteMetricSpace<T>& source,
             const FiniteMetricSpace<T>& target) {
  detail::check_table(table, source, target);
  T worst(0);
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = i + 1; j < source.size(); ++j)
      worst = std::max(worst, abs_value<T>(target(table[i], table[j]) - source(i, j)));
  return worst;
}

/// max over target points of the distance to the image. An empty source with a
/// nonempty target has no finite covering radius; that case is rejected.
template <Scalar T>
T covering_defect(const std::vector<std::size_t>& table, const FiniteMetricSpace<T>& source,
                  const FiniteMetricSpace<T>& target) {
  detail::check_table(table, source, target);
  if (table.empty() && target.size() > 0)
    throw Error(ErrorCode::IndexOutOfRange, "empty map cannot cover a nonempty target");
  T worst(0);
  for (std::size_t y = 0; y < target.size(); ++y) {
    T nearest = target(table[0], y);
    for (auto fx : table) nearest = std::min(nearest, T(target(fx, y)));
    worst = std::max(worst, nearest);
  }
  return worst;
}

/// Least epsilon for which `table` is an epsilon-GH approximation.
template <Scalar T>
T gh_defect(const std::vector<std::size_t>& table, const FiniteMetricSpace<T>& source,
            const FiniteMetricSpace<T>& target) {
  return std::max(distortion(table, source, target), covering_defect(table, source, target));
}

template <Scalar T>
GHMap<T> make_gh_map(const FiniteMetricSpace<T>& source, const FiniteMetricSpace<T>& target,
                     std::vector<std::size_t> table) {
  T eps = gh_defect(table, source, target);
  return GHMap<T>{source, target, std::move(table), std::move(eps)};
}

/// For each target point, the lowest-index source point whose image lies within
/// epsilon. The returned map carries its own measured defect, at most 3 epsilon.
template <Scalar T>
GHMap<T> approximate_inverse(const GHMap<T>& f) {
  detail::check_table(f.table, f.source, f.target);
  const T slack = tolerance<T>(1e-12) * (T(1) + f.epsilon);
  std::vector<std::size_t> back(f.target.size());
  for (std::size_t y = 0; y < f.target.size(); ++y) {
    std::size_t pick = f.source.size();
    for (std::size_t x = 0; x < f.source.size(); ++x)
      if (f.target(f.table[x], y) <= f.epsilon + slack) {
        pick = x;
        break;
      }
    if (pick == f.source.size())
      throw Error(ErrorCode::InvalidParams, {y},
                  "InvalidParams: target point " + f.target.label(y) + " is farther than epsilon from the image");
    back[y] = pick;
  }
  return make_gh_map(f.target, f.source, std::move(back));
}

/// 8 b C^(2/p) eps + b (9 p C (diam1^(p-1) + diam2^(p-1)) eps)^(1/p).
///
/// Exact for p = 1 and for the C^(2/p) factor when 2/p is an integer; other
/// powers and the outer root go through floating point.
template <Scalar T>
T pushforward_bound(const T& epsilon, const EntropyParams<T>& params, const T& C, const T& diam_source,
                    const T& diam_target) {
  params.validate();
  if (epsilon < T(0)) throw Error(ErrorCode::InvalidParams, "InvalidParams: epsilon must be nonnegative");
  if (!(C > T(0))) throw Error(ErrorCode::InvalidParams, "InvalidParams: mass cap C must be positive");
  if (diam_source < T(0) || diam_target < T(0))
    throw Error(ErrorCode::InvalidParams, "InvalidParams: diameters must be nonnegative");
  const double p = params.p;
  const T first = T(8) * params.b * power<T>(C, 2.0 / p) * epsilon;
  const T inner = T(9) * from_double<T>(p) * C *
                  (power<T>(diam_source, p - 1.0) + power<T>(diam_target, p - 1.0)) * epsilon;
  return first + params.b * root<T>(inner, p);
}

/// gh_defect combined with max over g and x of d_Y(f(alpha_g x), beta_g(f x)).
///
/// Elements are matched by label; both actions must carry the same label set.
template <Scalar T>
T equivariant_defect(const std::vector<std::size_t>& table, const FiniteGroupAction<T>& source_action,
                     const FiniteGroupAction<T>& target_action) {
  const auto& source = source_action.space();
  const auto& target = target_action.space();
  T worst = gh_defect(table, source, target);
  std::set<std::string> left, right;
  for (const auto& e : source_action.elements()) left.insert(e.label);
  for (const auto& e : target_action.elements()) right.insert(e.label);
  if (left != right) throw Error(ErrorCode::GroupMismatch, "GroupMismatch: the actions use different element labels");
  for (const auto& g : source_action.elements()) {
    const auto& beta = target_action.elements()[*target_action.find(g.label)].perm;
    for (std::size_t x = 0; x < source.size(); ++x)
      worst = std::max(worst, T(target(table[g.perm[x]], beta[table[x]])));
  }
  return worst;
}

}  // namespace genwass
