#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "pebble/configuration.hpp"
#include "pebble/graph.hpp"

namespace pebble {

/// Non-negative integer flow on the arcs of a graph, indexed by arc index.
/// z[a] counts the pebbling moves made along arc a.
struct FlowVector {
  std::vector<Count> z;

  FlowVector() = default;
  explicit FlowVector(std::size_t arcs) : z(arcs, 0) {}

  std::uint64_t total() const { return std::accumulate(z.begin(), z.end(), std::uint64_t{0}); }

  std::uint64_t inflow(const Graph& g, Vertex v) const {
    std::uint64_t s = 0;
    for (std::size_t a : g.in_arcs(v)) s += z[a];
    return s;
  }
  std::uint64_t outflow(const Graph& g, Vertex v) const {
    std::uint64_t s = 0;
    for (std::size_t a = g.out_begin(v); a < g.out_end(v); ++a) s += z[a];
    return s;
  }
  bool operator==(const FlowVector&) const = default;
};

/// Feasibility for the flow program: balance at every vertex and nothing
/// leaving the root.
inline bool is_feasible_flow(const Graph& g, const FlowVector& f, const Configuration& p, Vertex r) {
  if (f.z.size() != g.arc_count() || p.order() != g.order()) return false;
  if (f.outflow(g, r) != 0) return false;
  for (Vertex v = 0; v < g.order(); ++v)
    if (2 * f.outflow(g, v) > p[v] + f.inflow(g, v)) return false;
  return true;
}

/// Directed multigraph of pebbling moves: each arc carries a multiplicity.
class MoveMultigraph {
 public:
  struct Entry {
    Arc arc;
    Count multiplicity;
  };

  MoveMultigraph() = default;
  explicit MoveMultigraph(std::size_t n) : n_(n) {}

  /// Arcs may repeat; repeats add up.
  MoveMultigraph(std::size_t n, std::span<const Arc> arcs) : n_(n) {
    for (Arc a : arcs) add(a, 1);
  }

  static MoveMultigraph from_flow(const Graph& g, const FlowVector& f) {
    MoveMultigraph d(g.order());
    for (std::size_t a = 0; a < f.z.size(); ++a)
      if (f.z[a] > 0) d.entries_.push_back({g.arc(a), f.z[a]});
    return d;
  }

  void add(Arc a, Count k) {
    if (a.from >= n_ || a.to >= n_) throw std::out_of_range("arc endpoint outside the multigraph");
    if (k == 0) return;
    for (auto& e : entries_)
      if (e.arc == a) {
        e.multiplicity += k;
        return;
      }
    entries_.push_back({a, k});
  }

  std::size_t order() const { return n_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::uint64_t arc_total() const {
    std::uint64_t s = 0;
    for (const auto& e : entries_) s += e.multiplicity;
    return s;
  }
  std::uint64_t in_degree(Vertex v) const {
    std::uint64_t s = 0;
    for (const auto& e : entries_)
      if (e.arc.to == v) s += e.multiplicity;
    return s;
  }
  std::uint64_t out_degree(Vertex v) const {
    std::uint64_t s = 0;
    for (const auto& e : entries_)
      if (e.arc.from == v) s += e.multiplicity;
    return s;
  }

  /// Vertices in a topological order, or nullopt if a directed cycle exists.
  std::optional<std::vector<Vertex>> topological_order() const {
    std::vector<std::uint32_t> indeg(n_, 0);
    std::vector<std::vector<Vertex>> succ(n_);
    for (const auto& e : entries_) {
      if (e.arc.from == e.arc.to) return std::nullopt;
      succ[e.arc.from].push_back(e.arc.to);
      ++indeg[e.arc.to];
    }
    std::vector<Vertex> order;
    order.reserve(n_);
    for (Vertex v = 0; v < n_; ++v)
      if (indeg[v] == 0) order.push_back(v);
    for (std::size_t i = 0; i < order.size(); ++i)
      for (Vertex w : succ[order[i]])
        if (--indeg[w] == 0) order.push_back(w);
    if (order.size() != n_) return std::nullopt;
    return order;
  }

  bool is_acyclic() const { return topological_order().has_value(); }

 private:
  std::size_t n_ = 0;
  std::vector<Entry> entries_;
};

/// p(v) + indeg(v) - 2 outdeg(v) >= 0 at every vertex.
inline bool balance_check(const MoveMultigraph& d, const Configuration& p) {
  if (p.order() < d.order()) throw std::invalid_argument("configuration smaller than multigraph");
  std::vector<std::int64_t> slack(d.order());
  for (Vertex v = 0; v < d.order(); ++v) slack[v] = p[v];
  for (const auto& e : d.entries()) {
    slack[e.arc.to] += e.multiplicity;
    slack[e.arc.from] -= 2 * static_cast<std::int64_t>(e.multiplicity);
  }
  return std::all_of(slack.begin(), slack.end(), [](std::int64_t s) { return s >= 0; });
}

/// Orders every arc of an acyclic move multigraph into a legal move
/// sequence from p.  Vertices fire in topological order, each emitting all
/// of its out-arcs once all of its in-arcs have been played.  Returns
/// nullopt exactly when the balance condition fails.
inline std::optional<std::vector<Arc>> order_moves(const MoveMultigraph& d, const Configuration& p) {
  auto topo = d.topological_order();
  if (!topo) throw std::invalid_argument("order_moves requires an acyclic multigraph");
  std::vector<std::int64_t> have(d.order());
  for (Vertex v = 0; v < d.order(); ++v) have[v] = p[v];

  std::vector<std::vector<const MoveMultigraph::Entry*>> out(d.order());
  for (const auto& e : d.entries()) out[e.arc.from].push_back(&e);
  for (auto& list : out)
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->arc.to < b->arc.to; });

  std::vector<Arc> seq;
  seq.reserve(d.arc_total());
  for (Vertex v : *topo)
    for (const auto* e : out[v])
      for (Count k = 0; k < e->multiplicity; ++k) {
        if (have[v] < 2) return std::nullopt;
        have[v] -= 2;
        have[e->arc.to] += 1;
        seq.push_back(e->arc);
      }
  return seq;
}

/// Cancels directed cycles in the support of z.  Each cancelled cycle
/// loses one in-arc and one out-arc at each of its vertices, so balance is
/// kept; arcs into r never lie on a cycle because r has no out-arcs.
inline FlowVector purify_flow(const Graph& g, FlowVector z, const Configuration& p, Vertex r) {
  (void)p;
  (void)r;
  const std::size_t n = g.order();
  std::vector<std::uint8_t> colour(n);
  std::vector<std::size_t> via(n);  // arc used to enter a vertex on the DFS stack
  while (true) {
    std::fill(colour.begin(), colour.end(), 0);
    std::vector<std::size_t> cycle;
    // Iterative DFS over arcs with positive flow looking for a back edge.
    for (Vertex s = 0; s < n && cycle.empty(); ++s) {
      if (colour[s] != 0) continue;
      std::vector<std::pair<Vertex, std::size_t>> stack{{s, g.out_begin(s)}};
      colour[s] = 1;
      while (!stack.empty() && cycle.empty()) {
        auto& [u, next] = stack.back();
        if (next == g.out_end(u)) {
          colour[u] = 2;
          stack.pop_back();
          continue;
        }
        std::size_t a = next++;
        if (z.z[a] == 0) continue;
        Vertex w = g.arc(a).to;
        if (colour[w] == 0) {
          colour[w] = 1;
          via[w] = a;
          stack.emplace_back(w, g.out_begin(w));
        } else if (colour[w] == 1) {
          cycle.push_back(a);
          for (Vertex x = u; x != w; x = g.arc(via[x]).from) cycle.push_back(via[x]);
        }
      }
    }
    if (cycle.empty()) return z;
    Count m = z.z[cycle.front()];
    for (std::size_t a : cycle) m = std::min(m, z.z[a]);
    for (std::size_t a : cycle) z.z[a] -= m;
  }
}

/// Pebbles each vertex must start with for flow f to be playable: the
/// smallest configuration q (zero at r) for which f satisfies balance.
inline Configuration flow_demand(const Graph& g, const FlowVector& f, Vertex r) {
  Configuration q(g.order());
  for (Vertex v = 0; v < g.order(); ++v) {
    if (v == r) continue;
    const std::int64_t need =
        2 * static_cast<std::int64_t>(f.outflow(g, v)) - static_cast<std::int64_t>(f.inflow(g, v));
    if (need > 0) q.set(v, static_cast<Count>(need));
  }
  return q;
}

/// Drops moves that do not help bring `keep` pebbles into r.  Works on an
/// acyclic flow in reverse topological order: any vertex receiving more
/// than it forwards (twice its outflow) loses the surplus in-arcs.  The
/// result stays feasible for every configuration the input was feasible for.
inline FlowVector trim_flow(const Graph& g, FlowVector f, Vertex r, std::uint64_t keep) {
  auto topo = MoveMultigraph::from_flow(g, f).topological_order();
  if (!topo) throw std::invalid_argument("trim_flow requires an acyclic flow");
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    const Vertex v = *it;
    const std::uint64_t in = f.inflow(g, v);
    const std::uint64_t wanted = v == r ? keep : 2 * f.outflow(g, v);
    if (in <= wanted) continue;
    std::uint64_t surplus = in - wanted;
    for (std::size_t a : g.in_arcs(v)) {
      const auto cut = static_cast<Count>(std::min<std::uint64_t>(surplus, f.z[a]));
      f.z[a] -= cut;
      surplus -= cut;
      if (surplus == 0) break;
    }
  }
  return f;
}

struct DeliveryResult {
  std::uint64_t delivered = 0;
  FlowVector flow;
  std::vector<Arc> moves;
  std::uint64_t nodes = 0;
};

/// Raised from inside a follower search when its deadline passes.
struct SearchCancelled : std::runtime_error {
  SearchCancelled() : std::runtime_error("follower search cancelled") {}
};

struct FollowerOptions {
  /// Stop as soon as this many pebbles have been moved into r (0 = maximise).
  std::uint64_t target = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

namespace detail {

struct BalanceHash {
  std::size_t operator()(const std::vector<std::int64_t>& c) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::int64_t x : c) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdull;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
  }
};

/// Decides whether t pebbles can be moved into r.
///
/// Moves are taken on credit: a vertex may fire before it holds two
/// pebbles, leaving a debt that later moves into it must repay.  Any
/// feasible flow is reachable by repeatedly repaying one outstanding debt,
/// so the search only branches on which neighbour pays.  Nodes are keyed by
/// the balance vector b = p + in - 2 out.  For every vertex x the weighted
/// balance sum_v b(v) 2^-d(v,x) never increases along a move, and a
/// debt-free state has it non-negative, so a negative value ends a branch
/// (this also bounds the depth).
class DemandSearch {
 public:
  DemandSearch(const Graph& g, const Configuration& p, Vertex r,
               std::optional<std::chrono::steady_clock::time_point> deadline)
      : g_(g), r_(r), p_(p), deadline_(deadline) {
    const auto& d = g.distances();
    const std::uint32_t diam = d.diameter();
    if (diam > 100) throw std::invalid_argument("graph diameter too large for the follower");
    pow_.resize(diam + 1);
    for (std::uint32_t k = 0; k <= diam; ++k) pow_[k] = Wide{1} << (diam - k);
  }

  /// On success the flow moving exactly t pebbles into r is left in flow().
  bool feasible(std::uint64_t t) {
    if (deadline_ && std::chrono::steady_clock::now() > *deadline_) throw SearchCancelled();
    const std::size_t n = g_.order();
    const auto& d = g_.distances();
    bal_.assign(n, 0);
    for (Vertex v = 0; v < n; ++v) bal_[v] = v == r_ ? -static_cast<std::int64_t>(t) : p_[v];
    wsum_.assign(n, 0);
    for (Vertex x = 0; x < n; ++x)
      for (Vertex v = 0; v < n; ++v) wsum_[x] += bal_[v] * pow_[d(v, x)];
    z_.assign(g_.arc_count(), 0);
    seen_.clear();
    return dfs();
  }

  FlowVector flow() const {
    FlowVector f(g_.arc_count());
    f.z = z_;
    return f;
  }
  std::uint64_t nodes() const { return nodes_; }

 private:
  using Wide = __int128;

  void apply(std::size_t a, int s) {
    const Arc arc = g_.arc(a);
    const auto& d = g_.distances();
    bal_[arc.from] -= 2 * s;
    bal_[arc.to] += s;
    z_[a] = static_cast<Count>(static_cast<std::int64_t>(z_[a]) + s);
    for (Vertex x = 0; x < g_.order(); ++x)
      wsum_[x] += s * (pow_[d(arc.to, x)] - 2 * pow_[d(arc.from, x)]);
  }

  bool dfs() {
    if ((++nodes_ & 4095u) == 0 && deadline_ && std::chrono::steady_clock::now() > *deadline_)
      throw SearchCancelled();
    // Repay the debt with the least weighted supply around it first.
    std::optional<Vertex> debtor;
    for (Vertex v = 0; v < g_.order(); ++v) {
      if (wsum_[v] < 0) return false;
      if (bal_[v] < 0 && (!debtor || wsum_[v] < wsum_[*debtor])) debtor = v;
    }
    if (!debtor) return true;
    if (!seen_.insert(bal_).second) return false;

    std::vector<std::size_t> payers;
    for (std::size_t a : g_.in_arcs(*debtor))
      if (g_.arc(a).from != r_) payers.push_back(a);
    std::stable_sort(payers.begin(), payers.end(), [&](std::size_t x, std::size_t y) {
      const Vertex ux = g_.arc(x).from, uy = g_.arc(y).from;
      const bool fx = bal_[ux] >= 2, fy = bal_[uy] >= 2;
      if (fx != fy) return fx;
      return wsum_[ux] > wsum_[uy];
    });
    for (std::size_t a : payers) {
      apply(a, +1);
      if (dfs()) return true;
      apply(a, -1);
    }
    return false;
  }

  const Graph& g_;
  Vertex r_;
  const Configuration& p_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::vector<Wide> pow_;
  std::vector<std::int64_t> bal_;
  std::vector<Wide> wsum_;
  std::vector<Count> z_;
  std::unordered_set<std::vector<std::int64_t>, BalanceHash> seen_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Maximum number of pebbles that can be moved into r from p, with an
/// optimal acyclic flow and a legal move order realising it.  Pebbles
/// already on r stay there; they are not counted.
inline DeliveryResult max_deliverable(const Graph& g, const Configuration& p, Vertex r,
                                      const FollowerOptions& opt = {}) {
  g.check_vertex(r);
  if (p.order() != g.order()) throw PebblingError("configuration does not match graph order");
  Configuration rest = p;
  rest.set(r, 0);
  const std::uint64_t cap = weight(rest, r, g.distances()).floor();
  const std::uint64_t goal = opt.target == 0 ? cap : std::min(cap, opt.target);

  detail::DemandSearch search(g, rest, r, opt.deadline);
  DeliveryResult res;
  res.flow = FlowVector(g.arc_count());
  for (std::uint64_t t = 1; t <= goal && search.feasible(t); ++t) res.flow = search.flow();
  res.nodes = search.nodes();
  res.flow = purify_flow(g, std::move(res.flow), p, r);
  res.flow = trim_flow(g, std::move(res.flow), r, res.flow.inflow(g, r));
  res.delivered = res.flow.inflow(g, r);
  auto moves = order_moves(MoveMultigraph::from_flow(g, res.flow), p);
  if (!moves) throw std::logic_error("follower flow is not orderable");
  res.moves = std::move(*moves);
  return res;
}

/// True iff some sequence of moves puts a pebble on r.
inline bool is_solvable(const Graph& g, const Configuration& p, Vertex r, const FollowerOptions& opt = {}) {
  g.check_vertex(r);
  if (p[r] >= 1) return true;
  if (weight(p, r, g.distances()).below_one()) return false;
  FollowerOptions o = opt;
  o.target = 1;
  return max_deliverable(g, p, r, o).delivered >= 1;
}

}  // namespace pebble
