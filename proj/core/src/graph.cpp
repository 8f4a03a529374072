#include "treeweave/graph.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "treeweave/errors.hpp"

namespace treeweave {

Graph::Graph(std::vector<std::uint32_t> vertices,
             const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges)
    : ids_(std::move(vertices)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  adj_.resize(ids_.size());
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    const std::size_t iu = index_of(u);
    const std::size_t iv = index_of(v);
    adj_[iu].push_back(static_cast<std::uint32_t>(iv));
    adj_[iv].push_back(static_cast<std::uint32_t>(iu));
  }
  for (auto& nbrs : adj_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    edge_count_ += nbrs.size();
  }
  edge_count_ /= 2;
}

bool Graph::contains(std::uint32_t id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::size_t Graph::index_of(std::uint32_t id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    throw DomainError("vertex " + std::to_string(id) + " is not in the graph");
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (const auto& nbrs : adj_) best = std::max(best, nbrs.size());
  return best;
}

bool Graph::has_edge(std::uint32_t u, std::uint32_t v) const {
  const std::size_t iu = index_of(u);
  const std::uint32_t iv = static_cast<std::uint32_t>(index_of(v));
  return std::binary_search(adj_[iu].begin(), adj_[iu].end(), iv);
}

std::vector<std::uint32_t> Graph::node_boundary(std::span<const std::uint32_t> s) const {
  std::vector<char> in_s(ids_.size(), 0);
  for (const std::uint32_t id : s) in_s[index_of(id)] = 1;

  std::vector<char> in_boundary(ids_.size(), 0);
  for (const std::uint32_t id : s) {
    for (const std::uint32_t nb : adj_[index_of(id)]) {
      if (!in_s[nb]) in_boundary[nb] = 1;
    }
  }
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (in_boundary[i]) out.push_back(ids_[i]);
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> Graph::connected_components() const {
  std::vector<char> seen(ids_.size(), 0);
  std::vector<std::vector<std::uint32_t>> comps;
  for (std::size_t start = 0; start < ids_.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> comp;
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      comp.push_back(ids_[x]);
      for (const std::uint32_t nb : adj_[x]) {
        if (!seen[nb]) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

std::string Graph::dump_edges() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    for (const std::uint32_t nb : adj_[i]) {
      if (i < nb) edges.emplace_back(ids_[i], ids_[nb]);
    }
  }
  std::sort(edges.begin(), edges.end());
  std::ostringstream os;
  for (const auto& [u, v] : edges) os << u << " " << v << "\n";
  return os.str();
}

namespace {

/// True if set a is lexicographically smaller than b when both are read as
/// ascending id sequences.
bool lex_less_mask(std::uint32_t a, std::uint32_t b) {
  while (a != 0 && b != 0) {
    const int la = std::countr_zero(a);
    const int lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

}  // namespace

ExpansionResult exact_node_expansion(const Graph& g, std::size_t max_vertices) {
  const std::size_t n = g.order();
  if (n > max_vertices) {
    throw CapacityError("graph has " + std::to_string(n) + " vertices, above the exact cap of " +
                        std::to_string(max_vertices) + "; use the spectral proxy instead");
  }
  if (n > 26) {
    throw CapacityError("exact enumeration is capped at 26 vertices");
  }
  if (n < 2) {
    throw DomainError("node expansion needs at least 2 vertices");
  }

  std::vector<std::uint32_t> adj_mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const std::uint32_t nb : g.neighbor_indices(i)) adj_mask[i] |= 1u << nb;
  }

  const std::uint32_t half = static_cast<std::uint32_t>(n / 2);
  std::vector<std::uint16_t> nbr_cnt(n, 0);  // per vertex, neighbors inside S
  std::uint32_t s_mask = 0;
  std::uint32_t covered = 0;  // vertices with nbr_cnt > 0
  std::uint32_t s_size = 0;

  bool have_best = false;
  std::uint64_t best_num = 0, best_den = 1;
  std::uint32_t best_mask = 0;

  // Gray-code walk: step t toggles vertex ctz(t), so the boundary bookkeeping
  // updates one vertex's neighborhood at a time.
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t t = 1; t < total; ++t) {
    const int v = std::countr_zero(t);
    const std::uint32_t vbit = 1u << v;
    if (s_mask & vbit) {
      s_mask ^= vbit;
      --s_size;
      std::uint32_t m = adj_mask[v];
      while (m != 0) {
        const int u = std::countr_zero(m);
        m &= m - 1;
        if (--nbr_cnt[u] == 0) covered &= ~(1u << u);
      }
    } else {
      s_mask |= vbit;
      ++s_size;
      std::uint32_t m = adj_mask[v];
      while (m != 0) {
        const int u = std::countr_zero(m);
        m &= m - 1;
        if (nbr_cnt[u]++ == 0) covered |= 1u << u;
      }
    }
    if (s_size == 0 || s_size > half) continue;
    const std::uint32_t boundary = covered & ~s_mask;
    const std::uint64_t bd = static_cast<std::uint64_t>(std::popcount(boundary));
    // Compare bd/s_size against best_num/best_den by cross multiplication.
    const std::uint64_t lhs = bd * best_den;
    const std::uint64_t rhs = best_num * s_size;
    if (!have_best || lhs < rhs ||
        (lhs == rhs && lex_less_mask(s_mask, best_mask))) {
      have_best = true;
      best_num = bd;
      best_den = s_size;
      best_mask = s_mask;
    }
  }

  ExpansionResult res;
  res.value = Rational(static_cast<std::int64_t>(best_num), static_cast<std::int64_t>(best_den));
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) res.witness.push_back(g.ids()[i]);
  }
  return res;
}

Graph tree_as_graph(const VirtualTree& tree) {
  std::vector<std::uint32_t> vertices;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const VirtualNodeId v : tree.nodes()) {
    vertices.push_back(v.value());
    const VirtualNodeId p = tree.parent(v);
    if (p.is_valid()) edges.emplace_back(v.value(), p.value());
  }
  return Graph(std::move(vertices), edges);
}

}  // namespace treeweave
