#pragma once

#include <limits>
#include <queue>
#include <vector>

#include "exdec/graph.hpp"

namespace exdec {

/// Exact max-flow oracle (Dinic). Sources and sinks are vertex functions;
/// internally a super-source/sink pair is attached. This is an oracle, not a
/// performance path: determinism and exactness are what matter.
struct MaxFlowResult {
  i64 value = 0;
  std::vector<i64> flow;          // per host edge
  std::vector<Vertex> min_cut;    // source side of a min cut, host vertices
  std::vector<bool> cut_mask;     // same as min_cut, as a mask
};

class Dinic {
 public:
  explicit Dinic(int n) : n_(n), head_(n, -1) {}

  int add_arc(int u, int v, i64 cap) {
    arcs_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], 0});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
    return static_cast<int>(arcs_.size()) - 2;
  }

  i64 run(int s, int t) {
    i64 total = 0;
    while (bfs(s, t)) {
      cur_ = head_;
      while (i64 f = dfs(s, t, std::numeric_limits<i64>::max())) total += f;
    }
    return total;
  }

  i64 arc_flow(int arc) const { return arcs_[arc + 1].cap; }

  std::vector<bool> reachable(int s) const {
    std::vector<bool> seen(n_, false);
    std::queue<int> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int a = head_[u]; a != -1; a = arcs_[a].next)
        if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = true;
          q.push(arcs_[a].to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    int next;
    i64 cap;
  };

  bool bfs(int s, int t) {
    dist_.assign(n_, -1);
    std::queue<int> q;
    q.push(s);
    dist_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int a = head_[u]; a != -1; a = arcs_[a].next)
        if (arcs_[a].cap > 0 && dist_[arcs_[a].to] == -1) {
          dist_[arcs_[a].to] = dist_[u] + 1;
          q.push(arcs_[a].to);
        }
    }
    return dist_[t] != -1;
  }

  i64 dfs(int u, int t, i64 limit) {
    if (u == t || limit == 0) return limit;
    for (int &a = cur_[u]; a != -1; a = arcs_[a].next) {
      int v = arcs_[a].to;
      if (arcs_[a].cap > 0 && dist_[v] == dist_[u] + 1) {
        i64 f = dfs(v, t, std::min(limit, arcs_[a].cap));
        if (f > 0) {
          arcs_[a].cap -= f;
          arcs_[a ^ 1].cap += f;
          return f;
        }
      }
    }
    dist_[u] = -1;
    return 0;
  }

  int n_;
  std::vector<int> head_;
  std::vector<Arc> arcs_;
  std::vector<int> dist_;
  std::vector<int> cur_;
};

/// Max flow routing `src` into `snk` over g. The min cut is the residual
/// reachable set from the super-source, with all crossing edges saturated.
inline MaxFlowResult exact_max_flow(const Graph &g, const Weighting &src,
                                    const Weighting &snk) {
  const int n = g.n();
  Dinic d(n + 2);
  const int S = n, T = n + 1;
  std::vector<int> earc(g.m());
  for (EdgeId e = 0; e < g.m(); ++e)
    earc[e] = d.add_arc(g.edge(e).tail, g.edge(e).head, g.edge(e).cap);
  for (Vertex v = 0; v < n; ++v) {
    if (weight_of(src, v) > 0) d.add_arc(S, v, weight_of(src, v));
    if (weight_of(snk, v) > 0) d.add_arc(v, T, weight_of(snk, v));
  }
  MaxFlowResult r;
  r.value = d.run(S, T);
  r.flow.resize(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) r.flow[e] = d.arc_flow(earc[e]);
  std::vector<bool> seen = d.reachable(S);
  r.cut_mask.assign(n, false);
  for (Vertex v = 0; v < n; ++v)
    if (seen[v]) {
      r.cut_mask[v] = true;
      r.min_cut.push_back(v);
    }
  return r;
}

/// Brute-force min-cut value over all vertex subsets of the auxiliary
/// network: min over S of src(V\S) + c(E(S, V\S)) + snk(S). Test oracle.
inline i64 min_cut_by_enumeration(const Graph &g, const Weighting &src,
                                  const Weighting &snk) {
  const int n = g.n();
  if (n > 20) throw size_guard_error("min_cut_by_enumeration: n > 20");
  i64 best = std::numeric_limits<i64>::max();
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    i64 cut = 0;
    for (Vertex v = 0; v < n; ++v) {
      if (mask >> v & 1)
        cut += weight_of(snk, v);
      else
        cut += weight_of(src, v);
    }
    for (const Edge &e : g.edges())
      if ((mask >> e.tail & 1) && !(mask >> e.head & 1)) cut += e.cap;
    best = std::min(best, cut);
  }
  return best;
}

}  // namespace exdec
