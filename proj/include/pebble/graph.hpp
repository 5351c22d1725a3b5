#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pebble/vertex_set.hpp"

namespace pebble {

/// Directed copy of an undirected edge.  Pebbling moves travel along arcs.
struct Arc {
  Vertex from = 0;
  Vertex to = 0;
  constexpr bool operator==(const Arc&) const = default;
};

using Edge = std::pair<Vertex, Vertex>;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// All-pairs hop distances of a connected graph.
class DistanceTable {
 public:
  DistanceTable() = default;
  DistanceTable(std::size_t n, std::vector<std::uint32_t> d) : n_(n), d_(std::move(d)) {}

  std::uint32_t operator()(Vertex u, Vertex v) const { return d_[u * n_ + v]; }
  std::size_t order() const { return n_; }

  std::uint32_t eccentricity(Vertex v) const {
    std::uint32_t e = 0;
    for (std::size_t u = 0; u < n_; ++u) e = std::max(e, d_[v * n_ + u]);
    return e;
  }
  std::uint32_t diameter() const {
    return n_ == 0 ? 0 : *std::max_element(d_.begin(), d_.end());
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> d_;
};

/// Immutable simple connected undirected graph on {0..n-1}.
///
/// Arcs (both orientations of each edge) are numbered in lexicographic
/// (from, to) order, so the out-arcs of a vertex occupy a contiguous index
/// range.  Distances are computed once at construction.
class Graph {
 public:
  Graph() = default;

  static Graph from_edge_list(std::size_t n, std::span<const Edge> pairs, std::string name = {}) {
    if (n == 0) throw GraphError("graph must have at least one vertex");
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) {
      if (u >= n || v >= n)
        throw GraphError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                         ") has an endpoint outside 0.." + std::to_string(n - 1));
      if (u == v) throw GraphError("loop at vertex " + std::to_string(u));
      edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.n_ = n;
    g.name_ = std::move(name);
    g.edges_ = std::move(edges);
    g.build();
    return g;
  }

  static Graph from_edge_list(std::size_t n, std::initializer_list<Edge> pairs, std::string name = {}) {
    return from_edge_list(n, std::span<const Edge>(pairs.begin(), pairs.size()), std::move(name));
  }

  std::size_t order() const { return n_; }
  std::size_t size() const { return edges_.size(); }
  const std::string& name() const { return name_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool adjacent(Vertex u, Vertex v) const { return adj_[u * n_ + v] != 0; }
  std::span<const Vertex> neighbors(Vertex v) const {
    check_vertex(v);
    return nbrs_[v];
  }
  std::size_t degree(Vertex v) const { return neighbors(v).size(); }

  std::span<const Arc> arcs() const { return arcs_; }
  std::size_t arc_count() const { return arcs_.size(); }
  const Arc& arc(std::size_t i) const { return arcs_[i]; }

  /// Index of arc (u,v), or npos when {u,v} is not an edge.
  std::size_t arc_index(Vertex u, Vertex v) const {
    if (u >= n_ || v >= n_ || !adjacent(u, v)) return npos;
    const auto& nb = nbrs_[u];
    return out_begin_[u] + static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), v) - nb.begin());
  }

  /// Arc indices leaving v (contiguous).
  std::vector<std::size_t> out_arcs(Vertex v) const {
    check_vertex(v);
    std::vector<std::size_t> out(nbrs_[v].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out_begin_[v] + i;
    return out;
  }
  std::size_t out_begin(Vertex v) const { return out_begin_[v]; }
  std::size_t out_end(Vertex v) const { return out_begin_[v + 1]; }

  /// Arc indices entering v.
  std::span<const std::size_t> in_arcs(Vertex v) const {
    check_vertex(v);
    return in_arcs_[v];
  }

  const DistanceTable& distances() const { return dist_; }
  std::uint32_t distance(Vertex u, Vertex v) const { return dist_(u, v); }
  std::uint32_t eccentricity(Vertex v) const { return dist_.eccentricity(v); }

  void check_vertex(Vertex v) const {
    if (v >= n_)
      throw GraphError("vertex " + std::to_string(v) + " out of range for graph on " + std::to_string(n_) +
                       " vertices");
  }

  /// Same edge set relabelled by `perm` (vertex v becomes perm[v]).
  Graph relabelled(std::span<const Vertex> perm) const {
    std::vector<Edge> e;
    e.reserve(edges_.size());
    for (auto [u, v] : edges_) e.emplace_back(perm[u], perm[v]);
    return from_edge_list(n_, e, name_);
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  void build() {
    adj_.assign(n_ * n_, 0);
    nbrs_.assign(n_, {});
    for (auto [u, v] : edges_) {
      adj_[u * n_ + v] = adj_[v * n_ + u] = 1;
      nbrs_[u].push_back(v);
      nbrs_[v].push_back(u);
    }
    for (auto& nb : nbrs_) std::sort(nb.begin(), nb.end());

    out_begin_.assign(n_ + 1, 0);
    arcs_.clear();
    arcs_.reserve(2 * edges_.size());
    in_arcs_.assign(n_, {});
    for (Vertex u = 0; u < n_; ++u) {
      out_begin_[u] = arcs_.size();
      for (Vertex v : nbrs_[u]) {
        in_arcs_[v].push_back(arcs_.size());
        arcs_.push_back({u, v});
      }
    }
    out_begin_[n_] = arcs_.size();

    constexpr auto unreached = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> d(n_ * n_, unreached);
    std::deque<Vertex> queue;
    for (Vertex s = 0; s < n_; ++s) {
      auto* row = &d[s * n_];
      row[s] = 0;
      queue.assign(1, s);
      while (!queue.empty()) {
        Vertex u = queue.front();
        queue.pop_front();
        for (Vertex w : nbrs_[u])
          if (row[w] == unreached) {
            row[w] = row[u] + 1;
            queue.push_back(w);
          }
      }
      if (std::find(row, row + n_, unreached) != row + n_)
        throw GraphError("graph" + (name_.empty() ? std::string() : " '" + name_ + "'") + " is disconnected");
    }
    dist_ = DistanceTable(n_, std::move(d));
  }

  std::size_t n_ = 0;
  std::string name_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<Vertex>> nbrs_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_begin_;
  std::vector<std::vector<std::size_t>> in_arcs_;
  DistanceTable dist_;
};

/// G □ H with vertex (g, h) flattened to g * |V(H)| + h.
inline Graph cartesian_product(const Graph& g, const Graph& h) {
  const std::size_t m = h.order();
  std::vector<Edge> edges;
  edges.reserve(g.order() * h.size() + m * g.size());
  for (Vertex a = 0; a < g.order(); ++a)
    for (auto [x, y] : h.edges()) edges.emplace_back(a * m + x, a * m + y);
  for (auto [a, b] : g.edges())
    for (Vertex x = 0; x < m; ++x) edges.emplace_back(a * m + x, b * m + x);
  std::string name;
  if (!g.name().empty() && !h.name().empty()) name = "product:" + g.name() + "," + h.name();
  if (g.name().rfind("product:", 0) == 0 && !h.name().empty()) name = g.name() + "," + h.name();
  return Graph::from_edge_list(g.order() * m, edges, std::move(name));
}

}  // namespace pebble
