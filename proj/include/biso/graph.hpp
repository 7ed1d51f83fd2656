#ifndef BISO_GRAPH_HPP
#define BISO_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "permutation.hpp"
#include "rng.hpp"

namespace biso {

// Directed graph on {0, ..., n-1}; an edge u -> v means "u is ranked before v".
class ComparisonGraph {
 public:
  explicit ComparisonGraph(std::size_t n = 0) : out_(n), in_degree_(n, 0) {}

  std::size_t size() const noexcept { return out_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }

  void add_edge(std::size_t u, std::size_t v) {
    if (u >= size() || v >= size()) throw std::out_of_range("ComparisonGraph: vertex out of range");
    if (u == v) throw std::invalid_argument("ComparisonGraph: self-loops are not allowed");
    out_[u].push_back(static_cast<std::uint32_t>(v));
    ++in_degree_[v];
    ++edges_;
  }

  const std::vector<std::uint32_t>& successors(std::size_t u) const { return out_[u]; }
  std::size_t in_degree(std::size_t v) const { return in_degree_[v]; }

  // Sorted, de-duplicated edge list; used to compare graphs.
  std::vector<std::pair<std::size_t, std::size_t>> edge_list() const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    e.reserve(edges_);
    for (std::size_t u = 0; u < size(); ++u)
      for (auto v : out_[u]) e.emplace_back(u, v);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
  }

 private:
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::size_t> in_degree_;
  std::size_t edges_ = 0;
};

enum class TopoMode {
  deterministic_min_index,
  // Picks uniformly among the ready vertices at each step.
  uniform_random,
};

// Kahn's algorithm. Returns ranks with rank(u) < rank(v) for every edge u -> v,
// or nullopt when the graph has a cycle.
inline std::optional<Permutation> topological_sort(const ComparisonGraph& g,
                                                   TopoMode mode = TopoMode::deterministic_min_index,
                                                   std::uint64_t seed = 0) {
  const std::size_t n = g.size();
  std::vector<std::size_t> indeg(n);
  for (std::size_t v = 0; v < n; ++v) indeg[v] = g.in_degree(v);

  std::vector<std::size_t> order;
  order.reserve(n);

  if (mode == TopoMode::deterministic_min_index) {
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v)
      if (indeg[v] == 0) ready.push(v);
    while (!ready.empty()) {
      const std::size_t u = ready.top();
      ready.pop();
      order.push_back(u);
      for (auto v : g.successors(u))
        if (--indeg[v] == 0) ready.push(v);
    }
  } else {
    Rng rng = make_rng(seed);
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
      if (indeg[v] == 0) ready.push_back(v);
    while (!ready.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
      const std::size_t k = pick(rng);
      const std::size_t u = ready[k];
      ready[k] = ready.back();
      ready.pop_back();
      order.push_back(u);
      for (auto v : g.successors(u))
        if (--indeg[v] == 0) ready.push_back(v);
    }
  }

  if (order.size() != n) return std::nullopt;
  return Permutation::from_order(order);
}

}  // namespace biso

#endif  // BISO_GRAPH_HPP
