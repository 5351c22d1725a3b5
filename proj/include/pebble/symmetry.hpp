#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pebble/graph.hpp"
#include "pebble/vertex_set.hpp"

namespace pebble {

/// Bijection on vertex indices; image[v] is where v goes.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Vertex> image) : image_(std::move(image)) {
    std::vector<bool> hit(image_.size(), false);
    for (Vertex v : image_) {
      if (v >= image_.size() || hit[v]) throw std::invalid_argument("not a permutation");
      hit[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<Vertex> im(n);
    std::iota(im.begin(), im.end(), Vertex{0});
    return Permutation(std::move(im));
  }

  std::size_t size() const { return image_.size(); }
  Vertex operator()(Vertex v) const { return image_[v]; }
  const std::vector<Vertex>& image() const { return image_; }

  bool is_identity() const {
    for (Vertex v = 0; v < image_.size(); ++v)
      if (image_[v] != v) return false;
    return true;
  }

  /// (a * b)(v) = a(b(v)).
  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    std::vector<Vertex> im(b.size());
    for (Vertex v = 0; v < b.size(); ++v) im[v] = a.image_[b.image_[v]];
    Permutation p;
    p.image_ = std::move(im);
    return p;
  }

  Permutation inverse() const {
    std::vector<Vertex> im(image_.size());
    for (Vertex v = 0; v < image_.size(); ++v) im[image_[v]] = v;
    Permutation p;
    p.image_ = std::move(im);
    return p;
  }

  bool is_automorphism_of(const Graph& g) const {
    if (image_.size() != g.order()) return false;
    for (auto [u, v] : g.edges())
      if (!g.adjacent(image_[u], image_[v])) return false;
    return true;
  }

  VertexSet apply(VertexSet s) const {
    VertexSet out;
    for (std::uint64_t m = s.mask(); m != 0; m &= m - 1) out.insert(image_[std::countr_zero(m)]);
    return out;
  }

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<Vertex> image_;
};

/// Automorphism group as a stabilizer chain.  transversals[i] holds, for
/// every point of the orbit of base[i] under the pointwise stabilizer of
/// base[0..i), one element mapping base[i] there (identity included).
struct AutGroup {
  static constexpr std::uint64_t kMaterializeLimit = 1'000'000;

  std::size_t n = 0;
  std::vector<Vertex> base;
  std::vector<std::vector<Permutation>> transversals;
  std::vector<Permutation> generators;
  std::uint64_t order = 1;
  std::vector<Permutation> elements;  // filled when order <= kMaterializeLimit

  bool materialized() const { return !elements.empty(); }

  /// Every element of the pointwise stabilizer of base[0..from_level).
  std::vector<Permutation> stabilizer_elements(std::size_t from_level) const {
    std::vector<Permutation> out{Permutation::identity(n)};
    for (std::size_t lvl = transversals.size(); lvl-- > from_level;) {
      std::vector<Permutation> next;
      next.reserve(out.size() * transversals[lvl].size());
      for (const auto& t : transversals[lvl])
        for (const auto& h : out) next.push_back(t * h);
      out = std::move(next);
    }
    return out;
  }

  std::uint64_t stabilizer_order(std::size_t from_level) const {
    std::uint64_t o = 1;
    for (std::size_t lvl = from_level; lvl < transversals.size(); ++lvl) o *= transversals[lvl].size();
    return o;
  }
};

namespace detail {

/// Vertex colouring refined jointly for two sides of a search so colour ids
/// stay comparable.  Colours are canonical: they only depend on the graph
/// and on the sequence of individualised vertices.
class RefinementPair {
 public:
  explicit RefinementPair(const Graph& g) : g_(g), left_(g.order(), 0), right_(g.order(), 0) {
    refine();
  }

  const std::vector<std::uint32_t>& left() const { return left_; }
  const std::vector<std::uint32_t>& right() const { return right_; }
  bool consistent() const { return consistent_; }

  /// Gives x (left) and y (right) a fresh shared colour, then refines.
  void individualize(Vertex x, Vertex y) {
    if (left_[x] != right_[y]) {
      consistent_ = false;
      return;
    }
    const std::uint32_t fresh = colours_;
    left_[x] = fresh;
    right_[y] = fresh;
    ++colours_;
    refine();
  }

  bool discrete() const { return colours_ == g_.order(); }

 private:
  using Signature = std::vector<std::uint32_t>;

  void signatures(const std::vector<std::uint32_t>& col, std::vector<Signature>& out) const {
    const std::size_t n = g_.order();
    out.assign(n, {});
    for (Vertex v = 0; v < n; ++v) {
      auto& s = out[v];
      s.push_back(col[v]);
      for (Vertex w : g_.neighbors(v)) s.push_back(col[w]);
      std::sort(s.begin() + 1, s.end());
    }
  }

  void refine() {
    const std::size_t n = g_.order();
    std::vector<Signature> sl, sr;
    while (consistent_) {
      signatures(left_, sl);
      signatures(right_, sr);
      std::map<Signature, std::pair<std::uint32_t, std::uint32_t>> census;
      for (const auto& s : sl) ++census[s].first;
      for (const auto& s : sr) ++census[s].second;
      std::map<Signature, std::uint32_t> id;
      for (const auto& [sig, cnt] : census) {
        if (cnt.first != cnt.second) {
          consistent_ = false;
          return;
        }
        id.emplace(sig, static_cast<std::uint32_t>(id.size()));
      }
      const auto next = static_cast<std::uint32_t>(id.size());
      for (Vertex v = 0; v < n; ++v) {
        left_[v] = id[sl[v]];
        right_[v] = id[sr[v]];
      }
      if (next == colours_) return;
      colours_ = next;
    }
  }

  const Graph& g_;
  std::vector<std::uint32_t> left_, right_;
  std::uint32_t colours_ = 1;
  bool consistent_ = true;
};

/// Depth-first individualisation search for one automorphism compatible
/// with the refinement state.
inline std::optional<Permutation> extend_to_automorphism(const Graph& g, const RefinementPair& state) {
  if (!state.consistent()) return std::nullopt;
  const std::size_t n = g.order();
  if (state.discrete()) {
    std::vector<Vertex> by_colour(n);
    for (Vertex v = 0; v < n; ++v) by_colour[state.right()[v]] = v;
    std::vector<Vertex> im(n);
    for (Vertex v = 0; v < n; ++v) im[v] = by_colour[state.left()[v]];
    Permutation p(std::move(im));
    if (p.is_automorphism_of(g)) return p;
    return std::nullopt;
  }
  // Smallest non-singleton cell, first vertex in it.
  std::vector<std::uint32_t> cell_size(n, 0);
  for (auto c : state.left()) ++cell_size[c];
  std::uint32_t target = 0, best = std::numeric_limits<std::uint32_t>::max();
  for (std::uint32_t c = 0; c < n; ++c)
    if (cell_size[c] > 1 && cell_size[c] < best) best = cell_size[c], target = c;
  Vertex x = 0;
  while (state.left()[x] != target) ++x;
  for (Vertex y = 0; y < n; ++y) {
    if (state.right()[y] != target) continue;
    RefinementPair next = state;
    next.individualize(x, y);
    if (auto p = extend_to_automorphism(g, next)) return p;
  }
  return std::nullopt;
}

}  // namespace detail

/// Computes Aut(g) as a stabilizer chain.  `base_prefix` fixes the first
/// base points (e.g. a root, so that level 1 onward is its stabilizer).
inline AutGroup automorphisms(const Graph& g, std::span<const Vertex> base_prefix = {}) {
  const std::size_t n = g.order();
  AutGroup grp;
  grp.n = n;
  detail::RefinementPair fixed(g);  // both sides individualised identically
  std::size_t prefix_used = 0;
  unsigned __int128 order = 1;

  while (!fixed.discrete()) {
    Vertex b;
    if (prefix_used < base_prefix.size()) {
      b = base_prefix[prefix_used++];
      g.check_vertex(b);
    } else {
      std::vector<std::uint32_t> cell_size(n, 0);
      for (auto c : fixed.left()) ++cell_size[c];
      b = 0;
      while (cell_size[fixed.left()[b]] == 1) ++b;
    }
    std::vector<Permutation> transversal;
    for (Vertex y = 0; y < n; ++y) {
      if (fixed.left()[y] != fixed.left()[b]) continue;
      if (y == b) {
        transversal.push_back(Permutation::identity(n));
        continue;
      }
      detail::RefinementPair trial = fixed;
      trial.individualize(b, y);
      if (auto p = detail::extend_to_automorphism(g, trial)) {
        transversal.push_back(std::move(*p));
        grp.generators.push_back(transversal.back());
      }
    }
    order *= transversal.size();
    grp.base.push_back(b);
    grp.transversals.push_back(std::move(transversal));
    fixed.individualize(b, b);
  }
  // A fully-fixed prefix still needs its (trivial) levels recorded.
  while (prefix_used < base_prefix.size()) {
    grp.base.push_back(base_prefix[prefix_used++]);
    grp.transversals.push_back({Permutation::identity(n)});
  }
  if (order > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("automorphism group too large");
  grp.order = static_cast<std::uint64_t>(order);
  if (grp.order <= AutGroup::kMaterializeLimit) grp.elements = grp.stabilizer_elements(0);
  return grp;
}

/// Orbits of Aut(g) on vertices, each sorted, listed by smallest member.
inline std::vector<std::vector<Vertex>> vertex_orbits(const Graph& g, const AutGroup& grp) {
  const std::size_t n = g.order();
  std::vector<Vertex> parent(n);
  std::iota(parent.begin(), parent.end(), Vertex{0});
  auto find = [&](Vertex v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& p : grp.generators)
    for (Vertex v = 0; v < n; ++v) {
      Vertex a = find(v), b = find(p(v));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<Vertex>> orbits;
  std::vector<std::int64_t> slot(n, -1);
  for (Vertex v = 0; v < n; ++v) {
    Vertex root = find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(orbits.size());
      orbits.emplace_back();
    }
    orbits[slot[root]].push_back(v);
  }
  return orbits;
}

inline std::vector<std::vector<Vertex>> vertex_orbits(const Graph& g) { return vertex_orbits(g, automorphisms(g)); }

/// One representative (the smallest member) per vertex orbit.
inline std::vector<Vertex> orbit_representatives(const Graph& g) {
  std::vector<Vertex> reps;
  for (const auto& o : vertex_orbits(g)) reps.push_back(o.front());
  return reps;
}

/// Representatives of k-subsets of V \ {r} up to automorphisms fixing r.
struct SupportClasses {
  Vertex root = 0;
  std::size_t k = 0;
  std::vector<VertexSet> reps;  // lexicographically increasing
  std::uint64_t class_count = 0;
};

/// Calls f(VertexSet) for each k-subset of `pool` in lexicographic order.
template <typename F>
void for_each_subset(std::span<const Vertex> pool, std::size_t k, F&& f) {
  const std::size_t m = pool.size();
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    VertexSet s;
    for (auto i : idx) s.insert(pool[i]);
    f(s);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// A subset is its class representative when no stabilizer element maps it
/// to a lexicographically smaller set.
inline SupportClasses support_class_reps(const Graph& g, Vertex r, std::size_t k, bool keep_reps = true) {
  g.check_vertex(r);
  if (g.order() > VertexSet::kMaxVertices) throw std::invalid_argument("support classes need at most 64 vertices");
  if (k < 1 || k + 1 > g.order()) throw std::invalid_argument("k must satisfy 1 <= k <= n-1");
  const Vertex prefix[] = {r};
  const AutGroup grp = automorphisms(g, prefix);
  if (grp.stabilizer_order(1) > AutGroup::kMaterializeLimit)
    throw std::invalid_argument("root stabilizer too large to materialise");
  std::vector<Permutation> stab;
  for (auto& p : grp.stabilizer_elements(1))
    if (!p.is_identity()) stab.push_back(std::move(p));

  std::vector<Vertex> pool;
  for (Vertex v = 0; v < g.order(); ++v)
    if (v != r) pool.push_back(v);

  SupportClasses out;
  out.root = r;
  out.k = k;
  for_each_subset(pool, k, [&](VertexSet s) {
    for (const auto& p : stab)
      if (VertexSet::lex_less(p.apply(s), s)) return;
    ++out.class_count;
    if (keep_reps) out.reps.push_back(s);
  });
  return out;
}

}  // namespace pebble
