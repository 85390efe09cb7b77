#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genwass/error.hpp"
#include "genwass/matrix.hpp"
#include "genwass/numeric.hpp"

namespace genwass {

template <Scalar T>
class FiniteMetricSpace;

template <Scalar T>
FiniteMetricSpace<T> validate_metric(std::vector<std::string> labels,
                                     const std::vector<std::vector<T>>& matrix);

/// Finite point set with a validated distance matrix.
///
/// A cheap handle: copies share the same immutable storage, and only
/// `validate_metric` can create one, so every instance satisfies the metric axioms.
template <Scalar T>
class FiniteMetricSpace {
 public:
  std::size_t size() const noexcept { return data_->labels.size(); }
  const std::vector<std::string>& labels() const noexcept { return data_->labels; }
  const std::string& label(std::size_t i) const { return data_->labels.at(i); }
  const T& operator()(std::size_t i, std::size_t j) const { return data_->dist(i, j); }
  const DenseMatrix<T>& distances() const noexcept { return data_->dist; }
  const T& diameter() const noexcept { return data_->diameter; }

  std::optional<std::size_t> index_of(std::string_view label) const {
    const auto& l = data_->labels;
    auto it = std::find(l.begin(), l.end(), label);
    if (it == l.end()) return std::nullopt;
    return static_cast<std::size_t>(it - l.begin());
  }

  /// Same storage, or identical labels and distances.
  bool same_as(const FiniteMetricSpace& other) const {
    if (data_ == other.data_) return true;
    return data_->labels == other.data_->labels && data_->dist == other.data_->dist;
  }

 private:
  struct Data {
    std::vector<std::string> labels;
    DenseMatrix<T> dist;
    T diameter{0};
  };

  explicit FiniteMetricSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;

  friend FiniteMetricSpace validate_metric<T>(std::vector<std::string>,
                                              const std::vector<std::vector<T>>&);
};

/// Checks the metric axioms and returns the validated space.
///
/// Checks run in the order shape, sign, diagonal, symmetry, positivity, triangle,
/// and the first violation is thrown with its witnessing indices. The triangle check
/// is exact for rationals and allows 1e-12 x diameter slack for doubles.
template <Scalar T>
FiniteMetricSpace<T> validate_metric(std::vector<std::string> labels,
                                     const std::vector<std::vector<T>>& matrix) {
  const std::size_t n = labels.size();
  if (matrix.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "distance matrix has " + std::to_string(matrix.size()) +
                                              " rows for " + std::to_string(n) + " labels");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) {
      throw Error(ErrorCode::ShapeMismatch, {i}, "distance matrix row " + std::to_string(i) + " has " +
                                                     std::to_string(matrix[i].size()) + " entries");
    }
  }
  {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen.insert(labels[i]).second) {
        throw Error(ErrorCode::ShapeMismatch, {i}, "duplicate point label '" + labels[i] + "'");
      }
    }
  }
  auto name = [&](std::size_t i) { return labels[i]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (matrix[i][j] < T(0))
        throw Error(ErrorCode::NegativeEntry, {i, j},
                    detail::witness(ErrorCode::NegativeEntry, {name(i), name(j)}));
  for (std::size_t i = 0; i < n; ++i)
    if (matrix[i][i] != T(0))
      throw Error(ErrorCode::NonzeroDiagonal, {i}, detail::witness(ErrorCode::NonzeroDiagonal, {name(i)}));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (matrix[i][j] != matrix[j][i])
        throw Error(ErrorCode::AsymmetricEntry, {i, j},
                    detail::witness(ErrorCode::AsymmetricEntry, {name(i), name(j)}));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (matrix[i][j] == T(0))
        throw Error(ErrorCode::ZeroOffDiagonal, {i, j},
                    detail::witness(ErrorCode::ZeroOffDiagonal, {name(i), name(j)}));

  T diameter(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, matrix[i][j]);

  const T slack = tolerance<T>(1e-12) * diameter;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        if (matrix[i][k] > matrix[i][j] + matrix[j][k] + slack) {
          throw Error(ErrorCode::TriangleViolation, {i, k, j},
                      detail::witness(ErrorCode::TriangleViolation, {name(i), name(k), name(j)},
                                      "d(" + name(i) + "," + name(k) + ") exceeds the path through " +
                                          name(j)));
        }
      }

  using Data = typename FiniteMetricSpace<T>::Data;
  auto data = std::make_shared<Data>();
  data->labels = std::move(labels);
  data->dist = DenseMatrix<T>(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) data->dist(i, j) = matrix[i][j];
  data->diameter = diameter;
  return FiniteMetricSpace<T>(std::move(data));
}

/// Labels "0", "1", ... for quick construction.
template <Scalar T>
FiniteMetricSpace<T> validate_metric(const std::vector<std::vector<T>>& matrix) {
  std::vector<std::string> labels(matrix.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
  return validate_metric<T>(std::move(labels), matrix);
}

using Permutation = std::vector<std::size_t>;

struct GroupElement {
  std::string label;
  Permutation perm;  // point i maps to perm[i]
};

inline Permutation compose(const Permutation& g, const Permutation& h) {
  // (g o h)(i) = g(h(i))
  Permutation out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = g[h[i]];
  return out;
}

inline Permutation inverse(const Permutation& g) {
  Permutation out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[g[i]] = i;
  return out;
}

inline bool is_identity(const Permutation& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] != i) return false;
  return true;
}

/// Finite group acting on a space by isometries, given by its full element list.
///
/// Elements may repeat a permutation under different labels; that is how a
/// non-faithful action is written down.
template <Scalar T>
class FiniteGroupAction {
 public:
  const FiniteMetricSpace<T>& space() const noexcept { return space_; }
  const std::vector<GroupElement>& elements() const noexcept { return elements_; }
  std::size_t order() const noexcept { return elements_.size(); }

  std::optional<std::size_t> find(std::string_view label) const {
    for (std::size_t k = 0; k < elements_.size(); ++k)
      if (elements_[k].label == label) return k;
    return std::nullopt;
  }

 private:
  FiniteGroupAction(FiniteMetricSpace<T> space, std::vector<GroupElement> elements)
      : space_(std::move(space)), elements_(std::move(elements)) {}

  FiniteMetricSpace<T> space_;
  std::vector<GroupElement> elements_;

  template <Scalar U>
  friend FiniteGroupAction<U> validate_action(const FiniteMetricSpace<U>&, std::vector<GroupElement>);
};

/// Checks bijectivity, identity, closure under composition and inverse, and
/// that every element preserves distances.
template <Scalar T>
FiniteGroupAction<T> validate_action(const FiniteMetricSpace<T>& space, std::vector<GroupElement> elements) {
  const std::size_t n = space.size();
  {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < elements.size(); ++k)
      if (!seen.insert(elements[k].label).second)
        throw Error(ErrorCode::ShapeMismatch, {k}, "duplicate group label '" + elements[k].label + "'");
  }
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const auto& g = elements[k].perm;
    std::vector<bool> hit(n, false);
    bool ok = g.size() == n;
    for (std::size_t i = 0; ok && i < n; ++i) {
      if (g[i] >= n || hit[g[i]]) ok = false;
      else hit[g[i]] = true;
    }
    if (!ok) {
      throw Error(ErrorCode::NotPermutation, {k},
                  detail::witness(ErrorCode::NotPermutation, {elements[k].label},
                                  "not a bijection on " + std::to_string(n) + " points"));
    }
  }
  std::set<Permutation> members;
  for (const auto& e : elements) members.insert(e.perm);
  if (!std::any_of(elements.begin(), elements.end(), [](const auto& e) { return is_identity(e.perm); })) {
    throw Error(ErrorCode::MissingIdentity, "MissingIdentity(): the identity permutation is not listed");
  }
  for (std::size_t g = 0; g < elements.size(); ++g)
    for (std::size_t h = 0; h < elements.size(); ++h)
      if (!members.count(compose(elements[g].perm, elements[h].perm)))
        throw Error(ErrorCode::NotClosed, {g, h},
                    detail::witness(ErrorCode::NotClosed, {elements[g].label, elements[h].label}));
  for (std::size_t g = 0; g < elements.size(); ++g)
    if (!members.count(inverse(elements[g].perm)))
      throw Error(ErrorCode::NotInverseClosed, {g},
                  detail::witness(ErrorCode::NotInverseClosed, {elements[g].label}));
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const auto& g = elements[k].perm;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (space(g[i], g[j]) != space(i, j))
          throw Error(ErrorCode::NotIsometry, {k, i, j},
                      detail::witness(ErrorCode::NotIsometry,
                                      {elements[k].label, space.label(i), space.label(j)}));
  }
  return FiniteGroupAction<T>(space, std::move(elements));
}

/// Permutations only; elements are labelled "g0", "g1", ...
template <Scalar T>
FiniteGroupAction<T> validate_action(const FiniteMetricSpace<T>& space, const std::vector<Permutation>& perms) {
  std::vector<GroupElement> elements;
  elements.reserve(perms.size());
  for (std::size_t k = 0; k < perms.size(); ++k) elements.push_back({"g" + std::to_string(k), perms[k]});
  return validate_action(space, std::move(elements));
}

template <Scalar T>
struct QuotientResult {
  FiniteMetricSpace<T> quotient;
  std::vector<std::size_t> projection;          // parent index -> orbit index
  std::vector<std::vector<std::size_t>> orbits;  // sorted; orbit k sorted ascending
};

/// Orbit space with d*(x*, y*) = min over g of d(g x, y).
///
/// Orbits are numbered by their smallest member; the quotient point takes that
/// member's label with a trailing '*'.
template <Scalar T>
QuotientResult<T> build_quotient(const FiniteGroupAction<T>& action) {
  const auto& space = action.space();
  const std::size_t n = space.size();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> projection(n, unset);
  std::vector<std::vector<std::size_t>> orbits;
  for (std::size_t x = 0; x < n; ++x) {
    if (projection[x] != unset) continue;
    std::set<std::size_t> orbit;
    for (const auto& g : action.elements()) orbit.insert(g.perm[x]);
    for (auto y : orbit) projection[y] = orbits.size();
    orbits.emplace_back(orbit.begin(), orbit.end());
  }
  const std::size_t k = orbits.size();
  std::vector<std::string> labels(k);
  std::vector<std::vector<T>> dist(k, std::vector<T>(k, T(0)));
  for (std::size_t a = 0; a < k; ++a) {
    labels[a] = space.label(orbits[a].front()) + "*";
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const std::size_t x = orbits[a].front();
      const std::size_t y = orbits[b].front();
      T best = space(action.elements().front().perm[x], y);
      for (const auto& g : action.elements()) best = std::min(best, T(space(g.perm[x], y)));
      dist[a][b] = best;
    }
  }
  return QuotientResult<T>{validate_metric<T>(std::move(labels), dist), std::move(projection), std::move(orbits)};
}

}  // namespace genwass
