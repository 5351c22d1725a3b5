#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <stdexcept>
#include <vector>

#include "pebble/configuration.hpp"
#include "pebble/graph.hpp"

namespace pebble {

struct OracleBudgetExceeded : std::runtime_error {
  OracleBudgetExceeded() : std::runtime_error("oracle state budget exceeded") {}
};

/// Exhaustive breadth-first search over every configuration reachable from
/// p by single moves (moves out of r included).  Returns the largest gain
/// in pebbles on r.  Shares nothing with the branch-and-bound follower and
/// exists to check it.
inline std::uint64_t bfs_oracle(const Graph& g, const Configuration& p, Vertex r,
                                std::size_t max_states = 2'000'000) {
  g.check_vertex(r);
  const std::size_t n = g.order();
  std::set<std::vector<Count>> seen{p.counts()};
  std::deque<std::vector<Count>> queue{p.counts()};
  Count best = p[r];
  while (!queue.empty()) {
    std::vector<Count> c = std::move(queue.front());
    queue.pop_front();
    best = std::max(best, c[r]);
    for (Vertex u = 0; u < n; ++u) {
      if (c[u] < 2) continue;
      for (Vertex w : g.neighbors(u)) {
        std::vector<Count> next = c;
        next[u] -= 2;
        next[w] += 1;
        if (seen.insert(next).second) {
          if (seen.size() > max_states) throw OracleBudgetExceeded();
          queue.push_back(std::move(next));
        }
      }
    }
  }
  return best - p[r];
}

}  // namespace pebble
