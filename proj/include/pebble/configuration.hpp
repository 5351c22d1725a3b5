#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pebble/catalog.hpp"
#include "pebble/graph.hpp"

namespace pebble {

using Count = std::uint32_t;

/// Largest configuration size accepted anywhere in the library.
inline constexpr std::uint64_t kMaxPebbles = std::uint64_t{1} << 16;

class PebblingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense pebble counts, one entry per vertex.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t n) : counts_(n, 0) {}
  explicit Configuration(std::vector<Count> counts) : counts_(std::move(counts)) { check_size(); }

  std::size_t order() const { return counts_.size(); }
  Count operator[](Vertex v) const { return counts_.at(v); }
  const std::vector<Count>& counts() const { return counts_; }

  void set(Vertex v, Count k) {
    counts_.at(v) = k;
    check_size();
  }
  void add(Vertex v, Count k = 1) {
    counts_.at(v) += k;
    check_size();
  }

  std::uint64_t size() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

  std::vector<Vertex> support() const {
    std::vector<Vertex> s;
    for (Vertex v = 0; v < counts_.size(); ++v)
      if (counts_[v] > 0) s.push_back(v);
    return s;
  }

  /// Pointwise domination: every vertex holds at least as many pebbles as in `other`.
  bool dominates(const Configuration& other) const {
    if (other.order() != order()) return false;
    for (std::size_t i = 0; i < counts_.size(); ++i)
      if (counts_[i] < other.counts_[i]) return false;
    return true;
  }

  bool operator==(const Configuration&) const = default;

  /// `v:k` pairs for non-empty vertices, e.g. "0:4,3:2".
  std::string to_string() const {
    std::string out;
    for (Vertex v = 0; v < counts_.size(); ++v)
      if (counts_[v] > 0) {
        if (!out.empty()) out += ',';
        out += std::to_string(v) + ':' + std::to_string(counts_[v]);
      }
    return out;
  }

 private:
  void check_size() const {
    if (size() > kMaxPebbles) throw PebblingError("configuration exceeds 2^16 pebbles");
  }

  std::vector<Count> counts_;
};

/// Parses the literal `v:k[,v:k]*` for a graph on n vertices.  Repeated
/// vertices accumulate.  The empty string is the empty configuration.
inline Configuration parse_configuration(std::string_view text, std::size_t n) {
  Configuration p(n);
  text = detail::trim(text);
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view item = detail::trim(text.substr(0, comma));
    auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw PebblingError("configuration entry '" + std::string(item) + "' is not of the form v:k");
    std::size_t v, k;
    try {
      v = detail::parse_count(detail::trim(item.substr(0, colon)), "vertex");
      k = detail::parse_count(detail::trim(item.substr(colon + 1)), "count");
    } catch (const GraphError& e) {
      throw PebblingError(e.what());
    }
    if (v >= n) throw PebblingError("configuration vertex " + std::to_string(v) + " out of range");
    if (k > kMaxPebbles) throw PebblingError("configuration exceeds 2^16 pebbles");
    p.add(static_cast<Vertex>(v), static_cast<Count>(k));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return p;
}

/// One pebbling move along `a`: two pebbles leave a.from, one arrives at a.to.
inline Configuration apply_move(const Graph& g, const Configuration& p, Arc a) {
  g.check_vertex(a.from);
  g.check_vertex(a.to);
  if (!g.adjacent(a.from, a.to))
    throw PebblingError("(" + std::to_string(a.from) + "," + std::to_string(a.to) + ") is not an arc");
  if (p[a.from] < 2)
    throw PebblingError("vertex " + std::to_string(a.from) + " holds " + std::to_string(p[a.from]) +
                        " pebble(s); a move needs 2");
  std::vector<Count> c = p.counts();
  c[a.from] -= 2;
  c[a.to] += 1;
  return Configuration(std::move(c));
}

/// Exact pebbling weight sum_v p(v) 2^-dist(v, r), held as
/// numerator / 2^scale with scale = ecc(r).
class PebblingWeight {
 public:
  using Wide = unsigned __int128;

  PebblingWeight(Wide numerator, std::uint32_t scale) : num_(numerator), scale_(scale) {}

  Wide numerator() const { return num_; }
  std::uint32_t scale() const { return scale_; }

  bool below_one() const { return num_ < (Wide{1} << scale_); }
  std::uint64_t floor() const { return static_cast<std::uint64_t>(num_ >> scale_); }
  double approx() const { return static_cast<double>(num_) / static_cast<double>(Wide{1} << scale_); }

  /// Only weights taken against the same root are comparable.
  friend bool operator<=(const PebblingWeight& a, const PebblingWeight& b) {
    if (a.scale_ != b.scale_) throw PebblingError("comparing weights with different scales");
    return a.num_ <= b.num_;
  }
  friend bool operator==(const PebblingWeight&, const PebblingWeight&) = default;

 private:
  Wide num_;
  std::uint32_t scale_;
};

/// Weight of p toward r.  A configuration whose weight is below one cannot
/// reach r: a move never increases the weight.
inline PebblingWeight weight(const Configuration& p, Vertex r, const DistanceTable& d) {
  const std::uint32_t ecc = d.eccentricity(r);
  if (ecc > 100) throw PebblingError("eccentricity too large for exact weight");
  PebblingWeight::Wide num = 0;
  for (Vertex v = 0; v < p.order(); ++v)
    if (p[v] > 0) num += static_cast<PebblingWeight::Wide>(p[v]) << (ecc - d(v, r));
  return {num, ecc};
}

}  // namespace pebble
