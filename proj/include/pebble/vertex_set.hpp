#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace pebble {

using Vertex = std::uint32_t;

/// Set of vertices drawn from {0..63}, stored as a bitmask.
///
/// Support sets, covering-design blocks and subset orbits are all small sets
/// over graphs with at most 64 vertices, so one machine word suffices.
class VertexSet {
 public:
  static constexpr std::size_t kMaxVertices = 64;

  constexpr VertexSet() = default;
  constexpr explicit VertexSet(std::uint64_t mask) : mask_(mask) {}

  VertexSet(std::initializer_list<Vertex> vs) {
    for (Vertex v : vs) insert(v);
  }

  template <typename Range>
  static VertexSet from_range(const Range& vs) {
    VertexSet s;
    for (auto v : vs) s.insert(static_cast<Vertex>(v));
    return s;
  }

  void insert(Vertex v) {
    if (v >= kMaxVertices)
      throw std::out_of_range("vertex " + std::to_string(v) + " exceeds VertexSet capacity");
    mask_ |= std::uint64_t{1} << v;
  }
  void erase(Vertex v) {
    if (v < kMaxVertices) mask_ &= ~(std::uint64_t{1} << v);
  }

  constexpr bool contains(Vertex v) const {
    return v < kMaxVertices && ((mask_ >> v) & 1u) != 0;
  }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::uint64_t mask() const { return mask_; }

  constexpr bool subset_of(VertexSet other) const { return (mask_ & ~other.mask_) == 0; }

  constexpr VertexSet operator|(VertexSet o) const { return VertexSet(mask_ | o.mask_); }
  constexpr VertexSet operator&(VertexSet o) const { return VertexSet(mask_ & o.mask_); }
  constexpr bool operator==(const VertexSet&) const = default;

  std::vector<Vertex> to_vector() const {
    std::vector<Vertex> out;
    out.reserve(size());
    for (std::uint64_t m = mask_; m != 0; m &= m - 1)
      out.push_back(static_cast<Vertex>(std::countr_zero(m)));
    return out;
  }

  /// Lexicographic order on the sorted element lists (for equal-size sets).
  static constexpr bool lex_less(VertexSet a, VertexSet b) {
    const std::uint64_t diff = a.mask_ ^ b.mask_;
    if (diff == 0) return false;
    return (a.mask_ & (diff & (~diff + 1))) != 0;
  }

  std::string to_string(char sep = ',') const {
    std::string out;
    for (Vertex v : to_vector()) {
      if (!out.empty()) out += sep;
      out += std::to_string(v);
    }
    return out;
  }

 private:
  std::uint64_t mask_ = 0;
};

/// Binomial coefficient, saturating at UINT64_MAX.
constexpr std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

/// Calls f(VertexSet) for every k-element subset of s, in lexicographic order.
template <typename F>
void for_each_subset_of(VertexSet s, std::size_t k, F&& f) {
  const std::vector<Vertex> members = s.to_vector();
  const std::size_t m = members.size();
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = j;
  while (true) {
    VertexSet sub;
    for (auto j : idx) sub.insert(members[j]);
    f(sub);
    std::size_t j = k;
    while (j > 0 && idx[j - 1] == m - k + j - 1) --j;
    if (j == 0) return;
    ++idx[j - 1];
    for (std::size_t t = j; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace pebble
