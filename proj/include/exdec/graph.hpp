#pragma once

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "exdec/rational.hpp"

namespace exdec {

struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};
struct size_guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vertex = int;
using EdgeId = int;

struct Edge {
  Vertex tail = -1;
  Vertex head = -1;
  i64 cap = 0;
};

/// Directed capacitated multigraph. Vertex ids are dense and 0-based;
/// parallel edges are kept, self-loops are rejected.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : n_(n), out_(n), in_(n) {}

  static Graph from_edges(int n, const std::vector<Edge> &edges) {
    Graph g(n);
    for (const Edge &e : edges) g.add_edge(e.tail, e.head, e.cap);
    return g;
  }

  EdgeId add_edge(Vertex tail, Vertex head, i64 cap) {
    if (tail < 0 || tail >= n_ || head < 0 || head >= n_)
      throw input_error("edge endpoint out of range");
    if (tail == head) throw input_error("self-loops are not allowed");
    if (cap < 1) throw input_error("capacities must be positive");
    EdgeId id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({tail, head, cap});
    out_[tail].push_back(id);
    in_[head].push_back(id);
    return id;
  }

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const Edge &edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<EdgeId> &out(Vertex v) const { return out_[v]; }
  const std::vector<EdgeId> &in(Vertex v) const { return in_[v]; }

  i64 max_capacity() const {
    i64 w = 1;
    for (const Edge &e : edges_) w = std::max(w, e.cap);
    return w;
  }

  i64 total_capacity() const {
    i64 s = 0;
    for (const Edge &e : edges_) s += e.cap;
    return s;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_, in_;
};

/// Non-negative integer weights indexed by vertex id. d[v] defaults to 0 for
/// vertices outside the stored prefix.
using Weighting = std::vector<i64>;

inline i64 weight_of(const Weighting &d, Vertex v) {
  return v < static_cast<int>(d.size()) ? d[v] : 0;
}

inline i64 weight_sum(const Weighting &d) {
  return std::accumulate(d.begin(), d.end(), i64{0});
}

template <typename Set>
inline i64 weight_sum(const Weighting &d, const Set &vs) {
  i64 s = 0;
  for (Vertex v : vs) s += weight_of(d, v);
  return s;
}

inline i64 degree_weighted(const Graph &g, Vertex v) {
  if (v < 0 || v >= g.n()) throw input_error("unknown vertex id");
  i64 s = 0;
  for (EdgeId e : g.out(v)) s += g.edge(e).cap;
  for (EdgeId e : g.in(v)) s += g.edge(e).cap;
  return s;
}

inline Weighting degree_weighting(const Graph &g) {
  Weighting d(g.n(), 0);
  for (const Edge &e : g.edges()) {
    d[e.tail] += e.cap;
    d[e.head] += e.cap;
  }
  return d;
}

inline std::vector<i64> unweighted_degrees(const Graph &g) {
  std::vector<i64> d(g.n(), 0);
  for (const Edge &e : g.edges()) {
    d[e.tail]++;
    d[e.head]++;
  }
  return d;
}

/// Total capacity of edges with tail in S and head in T.
inline i64 cut_capacity_masked(const Graph &g, const std::vector<bool> &in_s,
                               const std::vector<bool> &in_t) {
  i64 s = 0;
  for (const Edge &e : g.edges())
    if (in_s[e.tail] && in_t[e.head]) s += e.cap;
  return s;
}

inline std::vector<bool> make_mask(int n, const std::vector<Vertex> &vs) {
  std::vector<bool> mask(n, false);
  for (Vertex v : vs) {
    if (v < 0 || v >= n) throw input_error("vertex id out of range");
    mask[v] = true;
  }
  return mask;
}

inline i64 cut_capacity(const Graph &g, const std::vector<Vertex> &s,
                        const std::vector<Vertex> &t) {
  return cut_capacity_masked(g, make_mask(g.n(), s), make_mask(g.n(), t));
}

struct degenerate_cut_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct zero_weight_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Conductance of S in g with respect to d:
///   min(delta(S, V\S), delta(V\S, S)) / min(d(S), d(V\S)).
inline Rat conductance_masked(const Graph &g, const Weighting &d,
                              const std::vector<bool> &in_s) {
  i64 fwd = 0, bwd = 0;
  for (const Edge &e : g.edges()) {
    if (in_s[e.tail] && !in_s[e.head]) fwd += e.cap;
    if (!in_s[e.tail] && in_s[e.head]) bwd += e.cap;
  }
  i64 ds = 0, dc = 0;
  bool any_s = false, any_c = false;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (in_s[v]) {
      ds += weight_of(d, v);
      any_s = true;
    } else {
      dc += weight_of(d, v);
      any_c = true;
    }
  }
  if (!any_s || !any_c) throw degenerate_cut_error("cut side is empty");
  i64 den = std::min(ds, dc);
  if (den == 0) throw zero_weight_error("cut side has zero weight");
  return make_rat(std::min(fwd, bwd), den);
}

inline Rat conductance(const Graph &g, const Weighting &d,
                       const std::vector<Vertex> &s) {
  return conductance_masked(g, d, make_mask(g.n(), s));
}

/// d(v) = deg(v) + (udeg(v)/2m) * deg(V), carried exactly as an integer
/// vector `scaled` with scaled[v] = scale * d(v). No rounding: the 2m
/// denominator is divided out as far as the gcd allows and the remainder is
/// kept in `scale`. The identity sum(scaled) == scale * 2 * deg(V) is exact.
struct RegularizedWeighting {
  Weighting scaled;
  i64 scale = 1;
};

inline RegularizedWeighting regularized_weighting_scaled(const Graph &g) {
  if (g.m() == 0) throw input_error("regularized weighting needs an edge");
  Weighting deg = degree_weighting(g);
  std::vector<i64> udeg = unweighted_degrees(g);
  i64 degV = weight_sum(deg);
  i64 two_m = 2 * static_cast<i64>(g.m());
  RegularizedWeighting r;
  r.scale = two_m;
  r.scaled.resize(g.n());
  i64 common = two_m;
  for (Vertex v = 0; v < g.n(); ++v) {
    r.scaled[v] = two_m * deg[v] + udeg[v] * degV;
    common = std::gcd(common, r.scaled[v]);
  }
  if (common > 1) {
    for (auto &x : r.scaled) x /= common;
    r.scale = two_m / common;
  }
  return r;
}

/// Integer form used by the drivers: equal to d itself whenever the gcd
/// cancels the full 2m (unit capacities, and most small instances), and a
/// single global integer multiple of d otherwise. Conductance certificates
/// carry their weighting explicitly, so the multiple never leaks.
inline Weighting regularized_weighting(const Graph &g) {
  return regularized_weighting_scaled(g).scaled;
}

struct Subgraph {
  Graph graph;
  std::vector<Vertex> to_parent;        // new id -> parent id
  std::vector<Vertex> from_parent;      // parent id -> new id or -1
  std::vector<EdgeId> edge_to_parent;   // new edge id -> parent edge id
};

inline Subgraph induced_subgraph(const Graph &g, const std::vector<Vertex> &s) {
  Subgraph sub;
  sub.from_parent.assign(g.n(), -1);
  std::vector<Vertex> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (Vertex v : sorted) {
    if (v < 0 || v >= g.n()) throw input_error("vertex id out of range");
    sub.from_parent[v] = static_cast<Vertex>(sub.to_parent.size());
    sub.to_parent.push_back(v);
  }
  sub.graph = Graph(static_cast<int>(sub.to_parent.size()));
  for (EdgeId e = 0; e < g.m(); ++e) {
    const Edge &ed = g.edge(e);
    Vertex t = sub.from_parent[ed.tail], h = sub.from_parent[ed.head];
    if (t >= 0 && h >= 0) {
      sub.graph.add_edge(t, h, ed.cap);
      sub.edge_to_parent.push_back(e);
    }
  }
  return sub;
}

inline Graph reverse(const Graph &g) {
  Graph r(g.n());
  for (const Edge &e : g.edges()) r.add_edge(e.head, e.tail, e.cap);
  return r;
}

/// Sparsity certificate: S is claimed to satisfy
/// conductance(host graph, weighting, S) <= sparsity_bound.
struct CutCertificate {
  std::vector<Vertex> cut;    // S, ids of the graph the certificate refers to
  std::vector<Vertex> host;   // vertex set the host graph is induced on
  Rat sparsity_bound;         // claimed upper bound
  Weighting weighting;        // d restricted to host (same id space)
};

/// Recompute the certificate's conductance in G[host] and compare.
inline bool certificate_holds(const Graph &root, const CutCertificate &c) {
  Subgraph host = induced_subgraph(root, c.host);
  std::vector<bool> in_s(host.graph.n(), false);
  int inside = 0;
  for (Vertex v : c.cut) {
    Vertex w = host.from_parent[v];
    if (w < 0) return false;
    in_s[w] = true;
    inside++;
  }
  if (inside == 0 || inside == host.graph.n()) return false;
  Weighting d(host.graph.n(), 0);
  for (Vertex v = 0; v < host.graph.n(); ++v)
    d[v] = weight_of(c.weighting, host.to_parent[v]);
  try {
    return conductance_masked(host.graph, d, in_s) <= c.sparsity_bound;
  } catch (const zero_weight_error &) {
    // Zero-weight side: the crossing capacity must vanish for the claim to
    // be meaningful; treat as holding iff the sparse direction is empty.
    i64 fwd = 0, bwd = 0;
    for (const Edge &e : host.graph.edges()) {
      if (in_s[e.tail] && !in_s[e.head]) fwd += e.cap;
      if (!in_s[e.tail] && in_s[e.head]) bwd += e.cap;
    }
    return std::min(fwd, bwd) == 0;
  }
}

}  // namespace exdec
