#pragma once

#include <string>
#include <vector>

#include "genwass/measures.hpp"
#include "genwass/numeric.hpp"
#include "genwass/spaces.hpp"
#include "genwass/transport.hpp"

namespace genwass::testing {

using Q = Rational;

inline Q q(long num, long den = 1) { return Q(num) / Q(den); }

template <Scalar T = Q>
FiniteMetricSpace<T> two_point(const T& d) {
  return validate_metric<T>({"x", "y"}, {{T(0), d}, {d, T(0)}});
}

/// Points on a line at the given coordinates, d = |s - t|.
template <Scalar T = Q>
FiniteMetricSpace<T> line(const std::vector<long>& coords, std::vector<std::string> labels = {}) {
  const std::size_t n = coords.size();
  if (labels.empty())
    for (auto c : coords) labels.push_back(std::to_string(c));
  std::vector<std::vector<T>> d(n, std::vector<T>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = T(coords[i] > coords[j] ? coords[i] - coords[j] : coords[j] - coords[i]);
  return validate_metric<T>(std::move(labels), d);
}

template <Scalar T>
DiscreteMeasure<T> measure(const FiniteMetricSpace<T>& space, std::vector<T> w) {
  return DiscreteMeasure<T>(space, std::move(w));
}

template <Scalar T>
EntropyParams<T> params(const T& a, const T& b, double p = 1.0) {
  EntropyParams<T> out;
  out.a = a;
  out.b = b;
  out.p = p;
  return out;
}

}  // namespace genwass::testing
