#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pebble/covering.hpp"
#include "pebble/follower.hpp"
#include "pebble/leader.hpp"
#include "pebble/symmetry.hpp"

namespace pebble {

enum class Quantity { pi_rooted, pi, pi_k_upper, pi_k_exact };

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::pi_rooted: return "pi_rooted";
    case Quantity::pi: return "pi";
    case Quantity::pi_k_upper: return "pi_k_upper";
    case Quantity::pi_k_exact: return "pi_k_exact";
  }
  return "?";
}

struct RootValue {
  Vertex root = 0;
  std::vector<Vertex> orbit;  // vertices sharing this value by symmetry
  std::uint64_t value = 0;
};

/// One solved upper-level instance inside a support-k computation.
struct InstanceResult {
  Vertex root = 0;
  VertexSet support;
  BilevelOutcome outcome;
  Sense sense_used = Sense::descending;
  bool retried = false;
};

struct PebblingReport {
  std::string graph;
  Quantity quantity = Quantity::pi;
  std::uint64_t value = 0;
  std::vector<RootValue> per_root;
  Configuration certificate;  // largest unsolvable configuration seen
  Vertex certificate_root = 0;
  bool complete = true;
  std::vector<InstanceResult> instances;
};

/// Least m such that every size-m configuration reaches r.
inline std::uint64_t pi_rooted(const Graph& g, Vertex r) {
  g.check_vertex(r);
  if (g.order() == 1) return 1;
  std::vector<Vertex> rest;
  for (Vertex v = 0; v < g.order(); ++v)
    if (v != r) rest.push_back(v);
  return pi_support(g, r, rest);
}

/// Pebbling number with per-orbit breakdown and a worst-case witness.
inline PebblingReport pi_report(const Graph& g) {
  PebblingReport rep;
  rep.graph = g.name();
  rep.quantity = Quantity::pi;
  if (g.order() == 1) {
    rep.value = 1;
    rep.per_root.push_back({0, {0}, 1});
    rep.certificate = Configuration(1);
    return rep;
  }
  for (const auto& orbit : vertex_orbits(g)) {
    const Vertex r = orbit.front();
    BilevelInstance inst;
    inst.root = r;
    for (Vertex v = 0; v < g.order(); ++v)
      if (v != r) inst.support.push_back(v);
    inst.sense = Sense::ascending;
    const BilevelOutcome res = max_unsolvable(g, inst);
    const std::uint64_t value = res.value + 1;
    rep.per_root.push_back({r, orbit, value});
    if (value > rep.value) {
      rep.value = value;
      rep.certificate = res.witness;
      rep.certificate_root = r;
    }
  }
  return rep;
}

/// max over roots of pi(G, r), using one root per automorphism orbit.
inline std::uint64_t pi(const Graph& g) { return pi_report(g).value; }

struct SupportKOptions {
  std::uint64_t lower = 1;              // use |V| for the Class-0 test
  std::optional<std::uint64_t> upper;   // default: per-instance default_upper
  std::optional<std::size_t> sample;    // run only this many random instances
  std::uint64_t sample_seed = 0;
  FamilyOrder order = FamilyOrder::shuffled;
  std::uint64_t order_seed = 0;
  Sense sense = Sense::descending;
  std::optional<std::chrono::duration<double>> time_cap;  // per instance
};

/// One root's covering design over its support classes.
struct RootPlan {
  Vertex root = 0;
  std::vector<Vertex> orbit;
  std::uint64_t class_count = 0;
  CoveringDesign design;
};

/// Orbit representatives, their support classes and covering designs.
inline std::vector<RootPlan> plan_support_k(const Graph& g, std::size_t k, std::size_t c, FamilyOrder order,
                                            std::uint64_t seed) {
  if (k < 1 || k > c || c + 1 > g.order()) throw std::invalid_argument("need 1 <= k <= c <= n-1");
  std::vector<RootPlan> plans;
  for (const auto& orbit : vertex_orbits(g)) {
    RootPlan rp;
    rp.root = orbit.front();
    rp.orbit = orbit;
    SupportClasses sc = support_class_reps(g, rp.root, k);
    rp.class_count = sc.class_count;
    const auto family = ordered_family(std::move(sc.reps), order, seed);
    rp.design = greedy_cover(family, c, rp.root);
    plans.push_back(std::move(rp));
  }
  return plans;
}

/// Upper bound on pi_k(G) from max pi_S over covering blocks; exact when
/// c == k and lower == 1.  An Infeasible block contributes `lower` (no
/// unsolvable configuration of size >= lower exists there).
inline PebblingReport pi_k_upper(const Graph& g, std::size_t k, std::size_t c, const SupportKOptions& opt = {}) {
  PebblingReport rep;
  rep.graph = g.name();
  rep.quantity = (c == k && opt.lower == 1) ? Quantity::pi_k_exact : Quantity::pi_k_upper;

  const auto plans = plan_support_k(g, k, c, opt.order, opt.order_seed);
  std::vector<std::pair<std::size_t, std::size_t>> jobs;  // (plan, block)
  for (std::size_t i = 0; i < plans.size(); ++i)
    for (std::size_t j = 0; j < plans[i].design.sets.size(); ++j) jobs.emplace_back(i, j);
  if (opt.sample && *opt.sample < jobs.size()) {
    std::mt19937_64 rng(opt.sample_seed);
    for (std::size_t j = jobs.size(); j > 1; --j) std::swap(jobs[j - 1], jobs[rng() % j]);
    jobs.resize(*opt.sample);
    std::sort(jobs.begin(), jobs.end());
    rep.complete = false;
  }

  std::vector<std::uint64_t> root_value(plans.size(), 0);
  std::vector<bool> root_seen(plans.size(), false);
  for (auto [pi_idx, blk] : jobs) {
    const RootPlan& rp = plans[pi_idx];
    BilevelInstance inst;
    inst.root = rp.root;
    inst.support = rp.design.sets[blk].to_vector();
    inst.lower = opt.lower;
    // Blocks too small to hold `lower` pebbles unsolvably come back Infeasible at once.
    inst.upper = opt.upper.value_or(std::max(opt.lower, default_upper(g, inst.root, inst.support)));
    inst.sense = opt.sense;
    inst.time_cap = opt.time_cap;
    const FallbackOutcome res = solve_with_fallback(g, inst);
    rep.instances.push_back({rp.root, rp.design.sets[blk], res.outcome, res.sense_used, res.retried});

    std::uint64_t bound = 0;
    switch (res.outcome.status) {
      case Status::optimal: bound = res.outcome.value + 1; break;
      case Status::infeasible: bound = opt.lower; break;
      case Status::timed_out: rep.complete = false; continue;
    }
    root_seen[pi_idx] = true;
    root_value[pi_idx] = std::max(root_value[pi_idx], bound);
    if (res.outcome.status == Status::optimal && bound > rep.value) {
      rep.certificate = res.outcome.witness;
      rep.certificate_root = rp.root;
    }
    rep.value = std::max(rep.value, bound);
  }
  for (std::size_t i = 0; i < plans.size(); ++i)
    if (root_seen[i]) rep.per_root.push_back({plans[i].root, plans[i].orbit, root_value[i]});
  return rep;
}

struct TwoPebblingWitness {
  Configuration config;
  Vertex root = 0;
  std::uint64_t on_root = 0;  // pebbles r can end up with (< 2)
};

struct TwoPebblingResult {
  std::optional<TwoPebblingWitness> witness;
  std::uint64_t pebbling_number = 0;
  std::uint64_t configurations_checked = 0;
  /// Whether the equality slice |p| = 2 pi - |Supp p| + 1 is exhaustive for
  /// this graph (true whenever no all-ones configuration can reach the
  /// threshold, i.e. always, since pi >= n).
  bool complete = true;
};

/// Searches for a configuration of size 2 pi(G) - |Supp(p)| + 1 and a root
/// that cannot receive two pebbles.  Larger violators shrink to this slice
/// by removing pebbles from vertices holding two or more.
inline TwoPebblingResult two_pebbling_witness(const Graph& g, std::optional<std::uint64_t> known_pi = {}) {
  TwoPebblingResult out;
  out.pebbling_number = known_pi ? *known_pi : pi(g);
  const std::uint64_t p_num = out.pebbling_number;
  const std::size_t n = g.order();
  if (n > VertexSet::kMaxVertices) throw std::invalid_argument("two_pebbling_witness needs at most 64 vertices");
  out.complete = p_num >= n;

  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  for (const auto& orbit : vertex_orbits(g)) {
    const Vertex r = orbit.front();
    const Vertex prefix[] = {r};
    const AutGroup grp = automorphisms(g, prefix);
    std::vector<Permutation> stab;
    for (auto& p : grp.stabilizer_elements(1))
      if (!p.is_identity()) stab.push_back(std::move(p));

    for (std::size_t s = 1; s <= n; ++s) {
      if (2 * p_num + 1 < s + s) continue;  // need |p| >= |Supp p|
      const std::uint64_t size = 2 * p_num + 1 - s;
      std::optional<TwoPebblingWitness> found;
      for_each_subset(std::span<const Vertex>(all), s, [&](VertexSet support) {
        if (found) return;
        for (const auto& p : stab)
          if (VertexSet::lex_less(p.apply(support), support)) return;
        const auto sv = support.to_vector();
        // Compositions of `size` into s positive parts.
        std::vector<Count> parts(s, 1);
        std::uint64_t spare = size - s;
        auto visit = [&](auto&& self, std::size_t i, std::uint64_t left) -> void {
          if (found) return;
          if (i + 1 == s) {
            parts[i] = static_cast<Count>(1 + left);
            Configuration p(n);
            for (std::size_t j = 0; j < s; ++j) p.set(sv[j], parts[j]);
            ++out.configurations_checked;
            const std::uint64_t have = p[r];
            if (have >= 2) return;
            FollowerOptions fo;
            fo.target = 2 - have;
            const std::uint64_t got = have + max_deliverable(g, p, r, fo).delivered;
            if (got < 2) found = TwoPebblingWitness{p, r, got};
            return;
          }
          for (std::uint64_t x = 0; x <= left; ++x) {
            parts[i] = static_cast<Count>(1 + x);
            self(self, i + 1, left - x);
            if (found) return;
          }
        };
        visit(visit, 0, spare);
      });
      if (found) {
        out.witness = found;
        return out;
      }
    }
  }
  return out;
}

struct GrahamReport {
  std::uint64_t pi_g = 0;
  std::uint64_t pi_h = 0;
  std::uint64_t bound = 0;  // pi(g) * pi(h)
  PebblingReport support_k;
  /// Every completed instance was Infeasible at lower = bound.
  bool consistent = true;
  std::size_t completed = 0;
  std::size_t infeasible = 0;
};

/// Checks pi_k(G x H) <= pi(G) pi(H) through covering blocks: each block's
/// instance runs with lower = pi(G) pi(H) and must come back Infeasible.
inline GrahamReport graham_support_check(const Graph& g, const Graph& h, std::size_t k, std::size_t c,
                                         SupportKOptions opt = {}) {
  GrahamReport rep;
  rep.pi_g = pi(g);
  rep.pi_h = pi(h);
  rep.bound = rep.pi_g * rep.pi_h;
  const Graph prod = cartesian_product(g, h);
  opt.lower = rep.bound;
  rep.support_k = pi_k_upper(prod, k, c, opt);
  for (const auto& inst : rep.support_k.instances) {
    if (inst.outcome.status == Status::timed_out) continue;
    ++rep.completed;
    if (inst.outcome.status == Status::infeasible)
      ++rep.infeasible;
    else
      rep.consistent = false;
  }
  return rep;
}

}  // namespace pebble
