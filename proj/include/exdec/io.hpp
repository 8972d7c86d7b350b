#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "exdec/graph.hpp"

namespace exdec {

struct parse_error : input_error {
  parse_error(const std::string &msg, int line)
      : input_error(msg + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  int line_number;
};

/// Edge-list text format, one edge per line: `tail head capacity`.
/// An optional header line `p <n> <m>` fixes the vertex count; lines starting
/// with `#` are comments. Without a header, n is 1 + the largest id seen.
inline Graph read_edge_list(std::istream &in) {
  std::string line;
  int lineno = 0;
  long long n = -1, declared_m = -1;
  std::vector<Edge> edges;
  long long max_id = -1;
  while (std::getline(in, line)) {
    lineno++;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (line[first] == 'p') {
      char p;
      ls >> p;
      if (!(ls >> n >> declared_m) || n < 0)
        throw parse_error("malformed header", lineno);
      continue;
    }
    long long t, h, c;
    if (!(ls >> t >> h >> c)) throw parse_error("malformed edge line", lineno);
    std::string rest;
    if (ls >> rest) throw parse_error("trailing tokens on edge line", lineno);
    if (t < 0 || h < 0) throw parse_error("negative vertex id", lineno);
    if (t == h) throw parse_error("self-loop", lineno);
    if (c < 1) throw parse_error("non-positive capacity", lineno);
    edges.push_back({static_cast<Vertex>(t), static_cast<Vertex>(h), c});
    max_id = std::max({max_id, t, h});
  }
  if (n < 0) n = max_id + 1;
  if (max_id >= n) throw parse_error("vertex id exceeds declared n", lineno);
  if (declared_m >= 0 && declared_m != static_cast<long long>(edges.size()))
    throw parse_error("edge count does not match header", lineno);
  return Graph::from_edges(static_cast<int>(n), edges);
}

inline Graph read_edge_list_file(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw input_error("cannot open input file: " + path);
  return read_edge_list(f);
}

inline void write_edge_list(std::ostream &out, const Graph &g) {
  out << "p " << g.n() << " " << g.m() << "\n";
  for (const Edge &e : g.edges())
    out << e.tail << " " << e.head << " " << e.cap << "\n";
}

}  // namespace exdec
