#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "genwass/matrix.hpp"
#include "genwass/numeric.hpp"

namespace genwass::detail {

/// Successive shortest paths on the network s -> row i -> column j -> t.
///
/// Row arcs carry capacity supply[i], column arcs demand[j], and the middle arcs
/// cost[i][j] with capacity min(supply[i], demand[j]), which no feasible flow can
/// exceed. Costs must be nonnegative. Node potentials keep every residual reduced
/// cost nonnegative, so each search is a plain O(V^2) Dijkstra; ties resolve to
/// the lowest node index, making the run deterministic.
template <Scalar T>
class BipartiteFlow {
 public:
  struct Augmentation {
    std::vector<std::size_t> path_arcs;  // arc ids from s to t
    T amount;
    T path_cost;  // in original costs
  };

  BipartiteFlow(const std::vector<T>& supply, const std::vector<T>& demand, const DenseMatrix<T>& cost)
      : rows_(supply.size()), cols_(demand.size()) {
    const std::size_t nodes = rows_ + cols_ + 2;
    source_ = 0;
    sink_ = nodes - 1;
    out_.resize(nodes);
    potential_.assign(nodes, T(0));
    T scale(1);
    for (const auto& x : supply) scale += x;
    for (const auto& x : demand) scale += x;
    eps_ = tolerance<T>(1e-12) * scale;
    for (std::size_t i = 0; i < rows_; ++i) add_arc(source_, row_node(i), supply[i], T(0));
    middle_first_ = arcs_.size();
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        add_arc(row_node(i), col_node(j), std::min(supply[i], demand[j]), cost(i, j));
    for (std::size_t j = 0; j < cols_; ++j) add_arc(col_node(j), sink_, demand[j], T(0));
  }

  /// Cheapest augmenting path in the current residual network, not yet applied.
  std::optional<Augmentation> shortest_path() {
    const std::size_t nodes = out_.size();
    std::vector<std::optional<T>> dist(nodes);
    std::vector<std::size_t> via(nodes, npos);
    std::vector<bool> done(nodes, false);
    dist[source_] = T(0);
    for (;;) {
      std::size_t u = npos;
      for (std::size_t v = 0; v < nodes; ++v)
        if (!done[v] && dist[v] && (u == npos || *dist[v] < *dist[u])) u = v;
      if (u == npos) break;
      done[u] = true;
      for (auto a : out_[u]) {
        const Arc& arc = arcs_[a];
        if (arc.cap - arc.flow <= eps_ || done[arc.to]) continue;
        T reduced = arc.cost + potential_[u] - potential_[arc.to];
        if (reduced < T(0)) reduced = T(0);  // float round-off only
        T candidate = *dist[u] + reduced;
        if (!dist[arc.to] || candidate < *dist[arc.to]) {
          dist[arc.to] = candidate;
          via[arc.to] = a;
        }
      }
    }
    if (!dist[sink_]) return std::nullopt;
    for (std::size_t v = 0; v < nodes; ++v)
      if (dist[v]) potential_[v] += *dist[v];

    Augmentation aug;
    std::optional<T> bottleneck;
    for (std::size_t v = sink_; v != source_;) {
      std::size_t a = via[v];
      aug.path_arcs.push_back(a);
      T residual = arcs_[a].cap - arcs_[a].flow;
      if (!bottleneck || residual < *bottleneck) bottleneck = residual;
      v = arcs_[a ^ 1].to;
    }
    std::reverse(aug.path_arcs.begin(), aug.path_arcs.end());
    aug.amount = *bottleneck;
    aug.path_cost = T(0);
    for (auto a : aug.path_arcs) aug.path_cost += arcs_[a].cost;
    return aug;
  }

  void augment(const Augmentation& aug) {
    for (auto a : aug.path_arcs) {
      arcs_[a].flow += aug.amount;
      arcs_[a ^ 1].flow -= aug.amount;
    }
    flow_value_ += aug.amount;
    total_cost_ += aug.amount * aug.path_cost;
  }

  DenseMatrix<T> plan() const {
    DenseMatrix<T> gamma(rows_, cols_);
    std::size_t a = middle_first_;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j, a += 2) {
        T f = arcs_[a].flow;
        gamma(i, j) = f > eps_ ? f : T(0);
      }
    return gamma;
  }

  const T& flow_value() const noexcept { return flow_value_; }
  const T& total_cost() const noexcept { return total_cost_; }
  const T& epsilon() const noexcept { return eps_; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  struct Arc {
    std::size_t to;
    T cap;
    T cost;
    T flow{0};
  };

  std::size_t row_node(std::size_t i) const { return 1 + i; }
  std::size_t col_node(std::size_t j) const { return 1 + rows_ + j; }

  // Forward arc at an even id, its residual twin right after.
  void add_arc(std::size_t from, std::size_t to, const T& cap, const T& cost) {
    out_[from].push_back(arcs_.size());
    arcs_.push_back(Arc{to, cap, cost, T(0)});
    out_[to].push_back(arcs_.size());
    arcs_.push_back(Arc{from, T(0), T(-cost), T(0)});
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t source_ = 0;
  std::size_t sink_ = 0;
  std::size_t middle_first_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<T> potential_;
  T eps_{0};
  T flow_value_{0};
  T total_cost_{0};
};

}  // namespace genwass::detail
