#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>
#include <vector>

#include "pebble/pebble.hpp"

namespace testing_support {

using namespace pebble;

/// Smallest relabelling of the edge set over all n! permutations.
inline std::vector<Edge> canonical_edges(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  std::vector<Edge> best;
  bool first = true;
  do {
    std::vector<Edge> img;
    for (auto [u, v] : edges) img.emplace_back(std::min(perm[u], perm[v]), std::max(perm[u], perm[v]));
    std::sort(img.begin(), img.end());
    if (first || img < best) best = img;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline bool connected(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<Vertex> parent(n);
  std::iota(parent.begin(), parent.end(), Vertex{0});
  std::function<Vertex(Vertex)> find = [&](Vertex x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (auto [u, v] : edges) parent[find(u)] = find(v);
  for (Vertex v = 0; v < n; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

/// One graph per isomorphism class of connected graphs on n vertices.
inline std::vector<Graph> connected_graphs(std::size_t n) {
  std::vector<Edge> all;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) all.emplace_back(u, v);
  std::set<std::vector<Edge>> seen;
  std::vector<Graph> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < all.size(); ++i)
      if ((mask >> i) & 1u) e.push_back(all[i]);
    if (!connected(n, e)) continue;
    auto canon = canonical_edges(n, e);
    if (!seen.insert(canon).second) continue;
    out.push_back(Graph::from_edge_list(n, canon));
  }
  return out;
}

/// All connected graphs with 1..max_n vertices, up to isomorphism.
inline std::vector<Graph> small_graphs(std::size_t max_n) {
  std::vector<Graph> out;
  for (std::size_t n = 1; n <= max_n; ++n)
    for (auto& g : connected_graphs(n)) out.push_back(std::move(g));
  return out;
}

/// Random connected graph: random spanning tree plus extra random edges.
template <typename Rng>
Graph random_connected_graph(Rng& rng, std::size_t n, std::size_t extra) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(static_cast<Vertex>(rng() % v), v);
  for (std::size_t i = 0; i < extra; ++i) {
    const auto a = static_cast<Vertex>(rng() % n), b = static_cast<Vertex>(rng() % n);
    if (a != b) e.emplace_back(a, b);
  }
  return Graph::from_edge_list(n, e);
}

/// Calls f(Configuration) for every configuration of exactly m pebbles on
/// the listed vertices (all other vertices empty).
template <typename F>
void for_each_configuration(std::size_t n, const std::vector<Vertex>& on, std::uint64_t m, F&& f) {
  Configuration p(n);
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t left) {
    if (i + 1 >= on.size()) {
      if (on.empty()) {
        if (left == 0) f(p);
        return;
      }
      p.set(on[i], static_cast<Count>(left));
      f(p);
      p.set(on[i], 0);
      return;
    }
    for (std::uint64_t x = 0; x <= left; ++x) {
      p.set(on[i], static_cast<Count>(x));
      rec(i + 1, left - x);
    }
    p.set(on[i], 0);
  };
  rec(0, m);
}

/// Independent reachability check by depth-first search over legal moves
/// (any arc, including out of r), stopping at the first pebble on r.
inline bool reaches_root(const Graph& g, const Configuration& p, Vertex r) {
  struct Hash {
    std::size_t operator()(const std::vector<Count>& c) const {
      std::size_t h = 1469598103934665603ull;
      for (Count x : c) h = (h ^ x) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_set<std::vector<Count>, Hash> seen;
  std::vector<std::vector<Count>> stack{p.counts()};
  while (!stack.empty()) {
    auto s = std::move(stack.back());
    stack.pop_back();
    if (s[r] >= 1) return true;
    if (!seen.insert(s).second) continue;
    for (const Arc a : g.arcs()) {
      if (s[a.from] < 2) continue;
      auto t = s;
      t[a.from] -= 2;
      t[a.to] += 1;
      if (!seen.contains(t)) stack.push_back(std::move(t));
    }
  }
  return false;
}

/// Largest r-unsolvable configuration supported inside S, by exhaustive
/// enumeration with the independent checker; 0 if there is none.
inline std::uint64_t brute_max_unsolvable(const Graph& g, Vertex r, const std::vector<Vertex>& support) {
  std::uint64_t best = 0;
  for (std::uint64_t m = 1;; ++m) {
    bool any = false;
    for_each_configuration(g.order(), support, m, [&](const Configuration& p) {
      if (!any && !reaches_root(g, p, r)) any = true;
    });
    if (!any) return best;
    best = m;
  }
}

/// pi(G) by exhaustive enumeration: configurations with a pebble on r are
/// trivially solvable, so only those avoiding r are checked.
inline std::uint64_t brute_pi(const Graph& g) {
  if (g.order() == 1) return 1;
  std::uint64_t worst = 0;
  for (Vertex r = 0; r < g.order(); ++r) {
    std::vector<Vertex> rest;
    for (Vertex v = 0; v < g.order(); ++v)
      if (v != r) rest.push_back(v);
    worst = std::max(worst, brute_max_unsolvable(g, r, rest) + 1);
  }
  return worst;
}

}  // namespace testing_support
