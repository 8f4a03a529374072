#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treeweave/vtree.hpp"

namespace treeweave {

/// Exact fraction over 64-bit integers, normalized (gcd 1, positive
/// denominator). Big enough for boundary/set-size ratios by a wide margin.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) den = 1;
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a.num * b.den <= b.num * a.den;
  }
};

/// Minimizing set and value of the exact node-expansion search.
struct ExpansionResult {
  Rational value;                      // |boundary(S)| / |S| at the minimum
  std::vector<std::uint32_t> witness;  // the minimizing S, sorted ids
};

/// Simple undirected graph over 32-bit vertex ids: symmetric adjacency, no
/// self-loops, no parallel edges. Read-only after construction, so concurrent
/// readers are safe.
class Graph {
 public:
  Graph() = default;
  /// Self-loops in the edge list are dropped, duplicates collapsed. Edge
  /// endpoints must appear in the vertex list.
  Graph(std::vector<std::uint32_t> vertices,
        const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

  std::size_t order() const { return ids_.size(); }
  std::size_t size() const { return edge_count_; }

  /// Sorted vertex ids; index i in all index-based accessors refers to ids()[i].
  const std::vector<std::uint32_t>& ids() const { return ids_; }
  bool contains(std::uint32_t id) const;
  std::size_t index_of(std::uint32_t id) const;

  std::span<const std::uint32_t> neighbor_indices(std::size_t index) const {
    return adj_[index];
  }
  std::size_t degree(std::size_t index) const { return adj_[index].size(); }
  std::size_t max_degree() const;
  bool has_edge(std::uint32_t u, std::uint32_t v) const;

  /// Node boundary of S: vertices outside S adjacent to at least one vertex
  /// of S. S must be a subset of the vertex set. Returns sorted ids.
  std::vector<std::uint32_t> node_boundary(std::span<const std::uint32_t> s) const;

  /// Partition into maximal connected vertex sets, each sorted, ordered by
  /// smallest member.
  std::vector<std::vector<std::uint32_t>> connected_components() const;

  /// Debug dump: one line per edge, "u v" with u < v, lines sorted.
  std::string dump_edges() const;

 private:
  std::vector<std::uint32_t> ids_;                // sorted
  std::vector<std::vector<std::uint32_t>> adj_;   // neighbor indices, sorted
  std::size_t edge_count_ = 0;
};

/// Exact node expansion min |boundary(S)|/|S| over nonempty S with
/// |S| <= floor(|V|/2), by Gray-code subset enumeration with incremental
/// boundary maintenance. Ties break toward the lexicographically smallest
/// witness. Throws CapacityError above max_vertices (the monitoring path
/// should switch to the spectral proxy instead).
ExpansionResult exact_node_expansion(const Graph& g, std::size_t max_vertices = 20);

/// The tree itself viewed as a graph over virtual node ids.
Graph tree_as_graph(const VirtualTree& tree);

}  // namespace treeweave
