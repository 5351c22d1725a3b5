#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pebble/vertex_set.hpp"

namespace pebble {

/// Family of blocks of size <= capacity, none containing the root, such that
/// every member of a target family lies inside some block.
struct CoveringDesign {
  Vertex root = 0;
  std::size_t capacity = 0;
  std::vector<VertexSet> sets;
};

/// Order in which the greedy cover visits the family.
enum class FamilyOrder { lexicographic, shuffled };

/// Fisher-Yates over mt19937_64 (whose output sequence is fixed by the
/// standard), so a seed gives the same order on every platform.
inline std::vector<VertexSet> ordered_family(std::vector<VertexSet> family, FamilyOrder order,
                                             std::uint64_t seed = 0) {
  if (order == FamilyOrder::shuffled) {
    std::mt19937_64 rng(seed);
    for (std::size_t j = family.size(); j > 1; --j) std::swap(family[j - 1], family[rng() % j]);
  }
  return family;
}

/// Greedy covering: each round starts from the empty block, sweeps the
/// uncovered family in order absorbing every member that keeps the block
/// within capacity, then discards the members the block now covers.
inline CoveringDesign greedy_cover(std::span<const VertexSet> family, std::size_t capacity, Vertex root = 0) {
  if (family.empty()) throw std::invalid_argument("cannot cover an empty family");
  const std::size_t k = family.front().size();
  for (VertexSet t : family)
    if (t.size() != k) throw std::invalid_argument("family members must share one size");
  if (capacity < k) throw std::invalid_argument("capacity must be at least the member size");

  CoveringDesign out;
  out.root = root;
  out.capacity = capacity;

  // Uncovered members as a doubly linked list in family order; slot m is the sentinel.
  const std::size_t m = family.size();
  const std::size_t head = m;
  std::vector<std::size_t> next(m + 1), prev(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    next[i] = (i + 1) % (m + 1);
    prev[i] = (i + m) % (m + 1);
  }
  std::vector<bool> alive(m, true);
  auto unlink = [&](std::size_t i) {
    if (!alive[i]) return;
    alive[i] = false;
    next[prev[i]] = next[i];
    prev[next[i]] = prev[i];
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> where;
  for (std::size_t i = 0; i < m; ++i) where[family[i].mask()].push_back(i);

  while (next[head] != head) {
    VertexSet block;
    for (std::size_t i = next[head]; i != head; i = next[i]) {
      const VertexSet merged = block | family[i];
      if (merged.size() <= capacity) block = merged;
      // Once full, the block can only absorb its own subsets.
      if (block.size() == capacity) break;
    }
    if (binomial(block.size(), k) < m) {
      for_each_subset_of(block, k, [&](VertexSet s) {
        if (auto it = where.find(s.mask()); it != where.end())
          for (std::size_t i : it->second) unlink(i);
      });
    } else {
      for (std::size_t i = next[head]; i != head;) {
        const std::size_t nx = next[i];
        if (family[i].subset_of(block)) unlink(i);
        i = nx;
      }
    }
    out.sets.push_back(block);
  }
  return out;
}

/// Checks block sizes, root exclusion and that every member is covered.
inline bool validate_cover(const CoveringDesign& design, std::span<const VertexSet> family) {
  for (VertexSet b : design.sets)
    if (b.size() > design.capacity || b.contains(design.root)) return false;
  if (family.empty()) return true;
  const std::size_t k = family.front().size();
  bool uniform = true;
  std::uint64_t lookups = 0;
  for (VertexSet t : family) uniform = uniform && t.size() == k;
  for (VertexSet b : design.sets) lookups += binomial(b.size(), k);

  if (uniform && lookups < family.size() * design.sets.size()) {
    std::unordered_set<std::uint64_t> covered;
    for (VertexSet b : design.sets) for_each_subset_of(b, k, [&](VertexSet s) { covered.insert(s.mask()); });
    for (VertexSet t : family)
      if (!covered.contains(t.mask())) return false;
    return true;
  }
  for (VertexSet t : family) {
    bool ok = false;
    for (VertexSet b : design.sets)
      if (t.subset_of(b)) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

}  // namespace pebble
