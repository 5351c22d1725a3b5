#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pebble/configuration.hpp"
#include "pebble/follower.hpp"
#include "pebble/graph.hpp"

namespace pebble {

/// Order in which candidate configuration sizes are scanned.
enum class Sense { descending, ascending };

inline const char* to_string(Sense s) { return s == Sense::descending ? "desc" : "asc"; }
inline Sense flipped(Sense s) { return s == Sense::descending ? Sense::ascending : Sense::descending; }

/// One upper-level problem: find the largest r-unsolvable configuration
/// supported inside `support` whose size lies in [lower, upper].
struct BilevelInstance {
  Vertex root = 0;
  std::vector<Vertex> support;
  std::uint64_t lower = 1;
  std::optional<std::uint64_t> upper;  // defaults to default_upper()
  Sense sense = Sense::descending;
  std::optional<std::chrono::duration<double>> time_cap;
};

enum class Status { infeasible, optimal, timed_out };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::infeasible: return "Infeasible";
    case Status::optimal: return "Optimal";
    case Status::timed_out: return "TimedOut";
  }
  return "?";
}

struct BilevelOutcome {
  Status status = Status::infeasible;
  std::uint64_t value = 0;  // meaningful when optimal
  Configuration witness;    // meaningful when optimal
  std::chrono::duration<double> elapsed{0};
  std::uint64_t nodes = 0;           // configurations tested
  std::uint64_t follower_calls = 0;  // of which needed a search
};

/// Any configuration with 2^dist(v,r) pebbles on a single v reaches r, so an
/// unsolvable configuration has fewer than that on every support vertex.
inline std::uint64_t single_vertex_cap(const Graph& g, Vertex v, Vertex r) {
  const std::uint32_t d = g.distance(v, r);
  return d >= 63 ? std::numeric_limits<std::uint64_t>::max() / 2 : (std::uint64_t{1} << d) - 1;
}

/// Sum over the support of (2^dist(v,r) - 1): no unsolvable configuration
/// with that support is larger.
inline std::uint64_t default_upper(const Graph& g, Vertex r, std::span<const Vertex> support) {
  std::uint64_t u = 0;
  for (Vertex v : support) u = std::min<std::uint64_t>(u + single_vertex_cap(g, v, r), kMaxPebbles);
  return u;
}

namespace detail {

inline void validate_instance(const Graph& g, const BilevelInstance& inst) {
  g.check_vertex(inst.root);
  if (inst.support.empty()) throw std::invalid_argument("support must be non-empty");
  std::vector<Vertex> s = inst.support;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw std::invalid_argument("support lists a vertex twice");
  for (Vertex v : s) {
    g.check_vertex(v);
    if (v == inst.root) throw std::invalid_argument("root must not belong to the support");
  }
  const std::uint64_t upper = inst.upper.value_or(default_upper(g, inst.root, inst.support));
  if (inst.lower < 1 || inst.lower > upper)
    throw std::invalid_argument("bounds must satisfy 1 <= lower <= upper (got " + std::to_string(inst.lower) +
                                ", " + std::to_string(upper) + ")");
}

/// Enumerates configurations of a fixed size supported on S and asks the
/// follower about each.  Solvable answers are remembered as the pebbles
/// their (trimmed) strategy consumes; any later candidate dominating one of
/// those is solvable without another search.
class UnsolvableSearch {
 public:
  UnsolvableSearch(const Graph& g, const BilevelInstance& inst, std::uint64_t upper,
                   std::optional<std::chrono::steady_clock::time_point> deadline)
      : g_(g), r_(inst.root), deadline_(deadline) {
    support_ = inst.support;
    // Largest cap last: the final coordinate is forced by the target size.
    std::sort(support_.begin(), support_.end(), [&](Vertex a, Vertex b) {
      auto ca = single_vertex_cap(g, a, r_), cb = single_vertex_cap(g, b, r_);
      return ca != cb ? ca < cb : a < b;
    });
    for (Vertex v : support_) caps_.push_back(std::min(single_vertex_cap(g, v, r_), upper));
    suffix_caps_.assign(caps_.size() + 1, 0);
    for (std::size_t i = caps_.size(); i-- > 0;) suffix_caps_[i] = suffix_caps_[i + 1] + caps_[i];
    values_.assign(support_.size(), 0);
    config_ = Configuration(g.order());
  }

  std::uint64_t max_size() const { return suffix_caps_[0]; }

  /// An unsolvable configuration of exactly m pebbles, if one exists.
  std::optional<Configuration> find(std::uint64_t m) {
    found_ = false;
    if (deadline_ && std::chrono::steady_clock::now() > *deadline_) throw SearchCancelled();
    if (m > max_size()) return std::nullopt;
    assign(0, m);
    if (!found_) return std::nullopt;
    return witness_;
  }

  std::uint64_t nodes() const { return nodes_; }
  std::uint64_t follower_calls() const { return calls_; }

 private:
  void assign(std::size_t i, std::uint64_t remaining) {
    const std::size_t k = support_.size();
    if (i + 1 == k) {
      values_[i] = static_cast<Count>(remaining);
      test_leaf();
      return;
    }
    const std::uint64_t rest = suffix_caps_[i + 1];
    const std::uint64_t lo = remaining > rest ? remaining - rest : 0;
    const std::uint64_t hi = std::min(caps_[i], remaining);
    for (std::uint64_t x = hi + 1; x-- > lo;) {
      values_[i] = static_cast<Count>(x);
      if (prefix_dominates(i)) continue;
      assign(i + 1, remaining - x);
      if (found_) return;
    }
  }

  /// True when coordinates 0..i alone already cover a certificate.
  bool prefix_dominates(std::size_t i) const {
    for (const auto& q : certificates_) {
      bool ok = true;
      for (std::size_t j = 0; j < q.size() && ok; ++j) ok = j <= i ? values_[j] >= q[j] : q[j] == 0;
      if (ok) return true;
    }
    return false;
  }

  void test_leaf() {
    if ((++nodes_ & 1023u) == 0 && deadline_ && std::chrono::steady_clock::now() > *deadline_)
      throw SearchCancelled();
    for (std::size_t j = 0; j < support_.size(); ++j) config_.set(support_[j], values_[j]);

    if (weight(config_, r_, g_.distances()).below_one()) {
      witness_ = config_;
      found_ = true;
      return;
    }
    if (prefix_dominates(support_.size() - 1)) return;

    ++calls_;
    FollowerOptions opt;
    opt.target = 1;
    opt.deadline = deadline_;
    DeliveryResult res = max_deliverable(g_, config_, r_, opt);
    if (res.delivered == 0) {
      witness_ = config_;
      found_ = true;
      return;
    }
    const Configuration need = flow_demand(g_, trim_flow(g_, res.flow, r_, 1), r_);
    std::vector<Count> q(support_.size());
    for (std::size_t j = 0; j < support_.size(); ++j) q[j] = need[support_[j]];
    certificates_.push_back(std::move(q));
  }

  const Graph& g_;
  Vertex r_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::vector<Vertex> support_;
  std::vector<std::uint64_t> caps_;
  std::vector<std::uint64_t> suffix_caps_;
  std::vector<Count> values_;
  Configuration config_;
  Configuration witness_;
  std::vector<std::vector<Count>> certificates_;
  std::uint64_t nodes_ = 0;
  std::uint64_t calls_ = 0;
  bool found_ = false;
};

}  // namespace detail

/// Solves the upper-level problem: the maximum size of an r-unsolvable
/// configuration with support inside S and size in [lower, upper], or
/// Infeasible when there is none.  Unsolvable configurations are closed
/// under removing pebbles, so each size can be tested independently and the
/// scan direction only affects running time.
inline BilevelOutcome max_unsolvable(const Graph& g, const BilevelInstance& inst) {
  detail::validate_instance(g, inst);
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (inst.time_cap)
    deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(*inst.time_cap);
  const std::uint64_t upper = inst.upper.value_or(default_upper(g, inst.root, inst.support));

  detail::UnsolvableSearch search(g, inst, upper, deadline);
  BilevelOutcome out;
  std::optional<std::pair<std::uint64_t, Configuration>> best;
  try {
    // Nothing unsolvable at size `lower` means nothing larger either, so
    // both senses settle Infeasible instances with one probe.
    if (auto w = search.find(inst.lower)) best.emplace(inst.lower, std::move(*w));
    if (best && inst.sense == Sense::descending) {
      for (std::uint64_t m = std::min(upper, search.max_size()); m > best->first; --m) {
        if (auto w = search.find(m)) {
          best.emplace(m, std::move(*w));
          break;
        }
      }
    } else if (best) {
      for (std::uint64_t m = inst.lower + 1; m <= upper; ++m) {
        auto w = search.find(m);
        if (!w) break;
        best.emplace(m, std::move(*w));
      }
    }
  } catch (const SearchCancelled&) {
    out.status = Status::timed_out;
    out.elapsed = std::chrono::steady_clock::now() - t0;
    out.nodes = search.nodes();
    out.follower_calls = search.follower_calls();
    return out;
  }

  if (best) {
    if (max_deliverable(g, best->second, inst.root).delivered != 0)
      throw std::logic_error("leader witness failed follower certification");
    out.status = Status::optimal;
    out.value = best->first;
    out.witness = std::move(best->second);
  }
  out.elapsed = std::chrono::steady_clock::now() - t0;
  out.nodes = search.nodes();
  out.follower_calls = search.follower_calls();
  return out;
}

/// Runs an instance; on TimedOut, runs it once more with the scan sense
/// flipped.  `retried` reports whether the second attempt happened.
struct FallbackOutcome {
  BilevelOutcome outcome;
  Sense sense_used = Sense::descending;
  bool retried = false;
};

inline FallbackOutcome solve_with_fallback(const Graph& g, BilevelInstance inst) {
  FallbackOutcome res{max_unsolvable(g, inst), inst.sense, false};
  if (res.outcome.status == Status::timed_out) {
    inst.sense = flipped(inst.sense);
    res = {max_unsolvable(g, inst), inst.sense, true};
  }
  return res;
}

/// Smallest m such that every size-m configuration supported in S reaches r.
inline std::uint64_t pi_support(const Graph& g, Vertex r, std::span<const Vertex> support) {
  BilevelInstance inst;
  inst.root = r;
  inst.support.assign(support.begin(), support.end());
  inst.lower = 1;
  inst.sense = Sense::ascending;
  const BilevelOutcome res = max_unsolvable(g, inst);
  return res.status == Status::optimal ? res.value + 1 : 1;
}

}  // namespace pebble
