#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "genwass/error.hpp"
#include "genwass/numeric.hpp"
#include "genwass/spaces.hpp"

namespace genwass {

/// Nonnegative weights over the points of a space. Dense; n is desk-scale.
template <Scalar T>
class DiscreteMeasure {
 public:
  DiscreteMeasure(FiniteMetricSpace<T> space, std::vector<T> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (weights_.size() != space_.size()) {
      throw Error(ErrorCode::ShapeMismatch, "measure has " + std::to_string(weights_.size()) +
                                                " weights for " + std::to_string(space_.size()) + " points");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (weights_[i] < T(0))
        throw Error(ErrorCode::NegativeWeight, {i},
                    detail::witness(ErrorCode::NegativeWeight, {space_.label(i)}));
  }

  static DiscreteMeasure zero(const FiniteMetricSpace<T>& space) {
    return DiscreteMeasure(space, std::vector<T>(space.size(), T(0)));
  }

  static DiscreteMeasure dirac(const FiniteMetricSpace<T>& space, std::size_t i, const T& mass = T(1)) {
    std::vector<T> w(space.size(), T(0));
    w.at(i) = mass;
    return DiscreteMeasure(space, std::move(w));
  }

  const FiniteMetricSpace<T>& space() const noexcept { return space_; }
  const std::vector<T>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  const T& operator[](std::size_t i) const { return weights_[i]; }

  T mass() const {
    T total(0);
    for (const auto& w : weights_) total += w;
    return total;
  }

  DiscreteMeasure scaled(const T& factor) const {
    std::vector<T> w = weights_;
    for (auto& x : w) x *= factor;
    return DiscreteMeasure(space_, std::move(w));
  }

  friend DiscreteMeasure operator+(const DiscreteMeasure& lhs, const DiscreteMeasure& rhs) {
    require_same_space(lhs.space_, rhs.space_);
    std::vector<T> w = lhs.weights_;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += rhs.weights_[i];
    return DiscreteMeasure(lhs.space_, std::move(w));
  }

  friend bool operator==(const DiscreteMeasure& lhs, const DiscreteMeasure& rhs) {
    return lhs.space_.same_as(rhs.space_) && lhs.weights_ == rhs.weights_;
  }

  static void require_same_space(const FiniteMetricSpace<T>& a, const FiniteMetricSpace<T>& b) {
    if (!a.same_as(b)) throw Error(ErrorCode::SpaceMismatch, "measures live on different spaces");
  }

 private:
  FiniteMetricSpace<T> space_;
  std::vector<T> weights_;
};

/// Signed difference, used by the flat-metric side.
template <Scalar T>
std::vector<T> signed_difference(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu) {
  DiscreteMeasure<T>::require_same_space(mu.space(), nu.space());
  std::vector<T> out(mu.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu[i] - nu[i];
  return out;
}

/// sigma <= tau pointwise; exact for rationals, 1e-12 absolute slack for doubles.
template <Scalar T>
bool is_submeasure(const DiscreteMeasure<T>& sigma, const DiscreteMeasure<T>& tau) {
  DiscreteMeasure<T>::require_same_space(sigma.space(), tau.space());
  const T slack = tolerance<T>(1e-12);
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma[i] > tau[i] + slack) return false;
  return true;
}

template <Scalar T>
struct Decomposition {
  std::vector<T> density;
  DiscreteMeasure<T> singular;
};

/// sigma = density * tau + singular, with singular carried by {tau = 0}.
template <Scalar T>
Decomposition<T> lebesgue_decompose(const DiscreteMeasure<T>& sigma, const DiscreteMeasure<T>& tau) {
  DiscreteMeasure<T>::require_same_space(sigma.space(), tau.space());
  const std::size_t n = sigma.size();
  std::vector<T> density(n, T(0));
  std::vector<T> singular(n, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (tau[i] > T(0)) {
      density[i] = sigma[i] / tau[i];
    } else {
      singular[i] = sigma[i];
    }
  }
  return {std::move(density), DiscreteMeasure<T>(sigma.space(), std::move(singular))};
}

/// f#mu for a map given as an index table into `target`.
template <Scalar T>
DiscreteMeasure<T> pushforward(const FiniteMetricSpace<T>& target, const std::vector<std::size_t>& table,
                               const DiscreteMeasure<T>& mu) {
  if (table.size() != mu.size()) {
    throw Error(ErrorCode::ShapeMismatch, "point map has " + std::to_string(table.size()) +
                                              " entries for " + std::to_string(mu.size()) + " source points");
  }
  std::vector<T> w(target.size(), T(0));
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] >= target.size()) {
      throw Error(ErrorCode::TargetIndexOutOfRange, {i, table[i]},
                  "TargetIndexOutOfRange(" + mu.space().label(i) + "): maps to index " +
                      std::to_string(table[i]) + " of a " + std::to_string(target.size()) + "-point space");
    }
    w[table[i]] += mu[i];
  }
  return DiscreteMeasure<T>(target, std::move(w));
}

/// Self-map pushforward (for example a group element).
template <Scalar T>
DiscreteMeasure<T> pushforward(const std::vector<std::size_t>& table, const DiscreteMeasure<T>& mu) {
  return pushforward(mu.space(), table, mu);
}

/// Uniform average of the group translates of mu.
template <Scalar T>
DiscreteMeasure<T> symmetrize(const FiniteGroupAction<T>& action, const DiscreteMeasure<T>& mu) {
  DiscreteMeasure<T>::require_same_space(action.space(), mu.space());
  const std::size_t n = mu.size();
  std::vector<T> w(n, T(0));
  for (const auto& g : action.elements())
    for (std::size_t i = 0; i < n; ++i) w[g.perm[i]] += mu[i];
  const T order(static_cast<long>(action.order()));
  for (auto& x : w) x /= order;
  return DiscreteMeasure<T>(mu.space(), std::move(w));
}

struct InvarianceWitness {
  std::size_t point;
  std::size_t element;
};

/// First (point, element) where mu(g x) != mu(x), or nothing when mu is G-invariant.
template <Scalar T>
std::optional<InvarianceWitness> find_invariance_violation(const FiniteGroupAction<T>& action,
                                                           const DiscreteMeasure<T>& mu) {
  DiscreteMeasure<T>::require_same_space(action.space(), mu.space());
  const T slack = tolerance<T>(1e-12);
  for (std::size_t k = 0; k < action.order(); ++k) {
    const auto& g = action.elements()[k].perm;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (abs_value<T>(mu[g[i]] - mu[i]) > slack) return InvarianceWitness{i, k};
  }
  return std::nullopt;
}

template <Scalar T>
bool is_invariant(const FiniteGroupAction<T>& action, const DiscreteMeasure<T>& mu) {
  return !find_invariance_violation(action, mu).has_value();
}

/// Spreads each quotient atom uniformly over its orbit.
template <Scalar T>
DiscreteMeasure<T> invariant_lift(const FiniteGroupAction<T>& action, const QuotientResult<T>& quotient,
                                  const DiscreteMeasure<T>& nu_star) {
  DiscreteMeasure<T>::require_same_space(quotient.quotient, nu_star.space());
  if (quotient.projection.size() != action.space().size()) {
    throw Error(ErrorCode::SpaceMismatch, "quotient was not built from this action");
  }
  std::vector<T> w(action.space().size(), T(0));
  for (std::size_t k = 0; k < quotient.orbits.size(); ++k) {
    const auto& orbit = quotient.orbits[k];
    const T share = nu_star[k] / T(static_cast<long>(orbit.size()));
    for (auto x : orbit) w[x] = share;
  }
  return DiscreteMeasure<T>(action.space(), std::move(w));
}

}  // namespace genwass
