#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pebble/graph.hpp"

namespace pebble {

namespace detail {

inline std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw GraphError("malformed " + std::string(what) + " parameter '" + std::string(text) + "'");
  return value;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline Graph path_graph(std::size_t n) {
  if (n == 0) throw GraphError("path:0 has no vertices");
  std::vector<Edge> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edge_list(n, e, "path:" + std::to_string(n));
}

inline Graph cycle_graph(std::size_t n) {
  if (n < 3) throw GraphError("cycle:n requires n >= 3");
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i) e.emplace_back(i, static_cast<Vertex>((i + 1) % n));
  return Graph::from_edge_list(n, e, "cycle:" + std::to_string(n));
}

inline Graph complete_graph(std::size_t n) {
  if (n == 0) throw GraphError("complete:0 has no vertices");
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edge_list(n, e, "complete:" + std::to_string(n));
}

/// Hypercube Q_d; vertices are bit strings, adjacent when they differ in one bit.
inline Graph cube_graph(std::size_t d) {
  if (d > 20) throw GraphError("cube dimension too large");
  const std::size_t n = std::size_t{1} << d;
  std::vector<Edge> e;
  for (Vertex v = 0; v < n; ++v)
    for (std::size_t b = 0; b < d; ++b) {
      Vertex w = v ^ (Vertex{1} << b);
      if (v < w) e.emplace_back(v, w);
    }
  return Graph::from_edge_list(n, e, "cube:" + std::to_string(d));
}

/// The original 8-vertex Lemke graph, with v1..v8 relabelled 0..7.
inline Graph lemke1() {
  static constexpr Edge kEdges[] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7},
                                    {2, 5}, {2, 7}, {3, 6}, {4, 6}, {4, 7}, {0, 6}};
  return Graph::from_edge_list(8, kEdges, "lemke1");
}

/// Reads the edge-list format: a header line `n m`, then m lines `u v`.
/// Everything after `#` on a line is ignored.
inline Graph read_edge_list(std::istream& in, std::string name = {}) {
  std::vector<std::size_t> numbers;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) numbers.push_back(detail::parse_count(tok, "edge-list"));
  }
  if (numbers.size() < 2) throw GraphError("edge list is missing its `n m` header");
  const std::size_t n = numbers[0], m = numbers[1];
  if (numbers.size() != 2 + 2 * m)
    throw GraphError("edge list declares " + std::to_string(m) + " edges but contains " +
                     std::to_string((numbers.size() - 2) / 2) + (numbers.size() % 2 ? " and a dangling vertex" : ""));
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    edges.emplace_back(static_cast<Vertex>(numbers[2 + 2 * i]), static_cast<Vertex>(numbers[3 + 2 * i]));
  return Graph::from_edge_list(n, edges, std::move(name));
}

inline Graph read_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge-list file " + path.string());
  return read_edge_list(in, "file:" + path.string());
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.size() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

/// Builds a graph from a catalog expression:
///   lemke1 | path:<n> | cycle:<n> | complete:<n> | cube:<d> | file:<path>
///   | product:<name>,<name>[,<name>...]   (left-associative)
/// A bare path to an existing file is accepted as an edge-list file.
inline Graph catalog(std::string_view spec) {
  spec = detail::trim(spec);
  if (spec.rfind("product:", 0) == 0) {
    std::string_view rest = spec.substr(8);
    std::vector<std::string_view> parts;
    while (true) {
      auto comma = rest.find(',');
      parts.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (parts.size() < 2) throw GraphError("product needs at least two factors: '" + std::string(spec) + "'");
    Graph acc = catalog(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) acc = cartesian_product(acc, catalog(parts[i]));
    return acc;
  }
  if (spec == "lemke1") return lemke1();
  if (spec.rfind("file:", 0) == 0) return read_edge_list_file(std::string(spec.substr(5)));

  auto colon = spec.find(':');
  if (colon != std::string_view::npos) {
    std::string_view kind = spec.substr(0, colon);
    std::string_view arg = spec.substr(colon + 1);
    if (kind == "path") return path_graph(detail::parse_count(arg, "path"));
    if (kind == "cycle") return cycle_graph(detail::parse_count(arg, "cycle"));
    if (kind == "complete") return complete_graph(detail::parse_count(arg, "complete"));
    if (kind == "cube") return cube_graph(detail::parse_count(arg, "cube"));
  }
  std::error_code ec;
  if (std::filesystem::is_regular_file(std::string(spec), ec)) return read_edge_list_file(std::string(spec));
  throw GraphError("unknown graph '" + std::string(spec) + "'");
}

}  // namespace pebble
