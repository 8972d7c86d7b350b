#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "exdec/graph.hpp"
#include "exdec/linkcut.hpp"

namespace exdec {

struct PathItem {
  Vertex src;
  Vertex dst;
  i64 amount;
};

/// Path decomposition of a flow, produced with a link-cut forest whose
/// operation sequence is recorded for later crossing replays. Cycles in the
/// flow are cancelled first and contribute neither paths nor transcript ops.
struct PathDecomposition {
  std::vector<PathItem> paths;
  Transcript transcript;
  std::vector<i64> acyclic_flow;  // the decomposed flow, cycles removed
  // Explicit edge lists per path; only filled when requested (test oracle
  // for unweighted graphs, where paths are edge disjoint).
  std::vector<std::vector<EdgeId>> explicit_paths;
};

namespace detail {

/// Removes all cycles from the flow in place. Deterministic: the walk always
/// follows the lowest-id outgoing support edge.
inline void cancel_flow_cycles(const Graph &g, std::vector<i64> &flow) {
  const int n = g.n();
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> color(n, 0);  // 0 fresh, 1 on walk, 2 exhausted
    for (Vertex start = 0; start < n && !changed; ++start) {
      if (color[start]) continue;
      std::vector<std::pair<Vertex, EdgeId>> walk;  // (vertex, edge taken)
      Vertex u = start;
      while (true) {
        color[u] = 1;
        EdgeId next = -1;
        for (EdgeId e : g.out(u))
          if (flow[e] > 0 && color[g.edge(e).head] != 2) {
            next = e;
            break;
          }
        if (next == -1) {
          color[u] = 2;
          if (walk.empty()) break;
          u = walk.back().first;
          walk.pop_back();
          continue;
        }
        Vertex v = g.edge(next).head;
        if (color[v] == 1) {
          size_t jv = walk.size();
          while (jv > 0 && walk[jv - 1].first != v) --jv;
          assert(jv > 0 && "gray vertex must be on the walk");
          i64 c = flow[next];
          for (size_t i = jv - 1; i < walk.size(); ++i)
            c = std::min(c, flow[walk[i].second]);
          flow[next] -= c;
          for (size_t i = jv - 1; i < walk.size(); ++i)
            flow[walk[i].second] -= c;
          changed = true;
          break;
        }
        walk.push_back({u, next});
        u = v;
      }
    }
  }
}

}  // namespace detail

/// Decomposes a flow (cycles are cancelled first) into paths from
/// positive-divergence vertices to negative-divergence vertices; the flow
/// must conserve everywhere else. Per-edge path loads reproduce the acyclic
/// part of the flow exactly.
template <typename Forest = LinkCutForest>
PathDecomposition decompose_flow(const Graph &g, std::vector<i64> flow,
                                 bool want_explicit_paths = false) {
  const int n = g.n();
  if (static_cast<int>(flow.size()) != g.m())
    throw input_error("decompose_flow: flow vector size mismatch");
  for (EdgeId e = 0; e < g.m(); ++e)
    if (flow[e] < 0) throw input_error("decompose_flow: negative flow");

  detail::cancel_flow_cycles(g, flow);

  std::vector<i64> acyclic = flow;
  std::vector<i64> div(n, 0);  // inflow minus outflow
  for (EdgeId e = 0; e < g.m(); ++e) {
    div[g.edge(e).tail] -= flow[e];
    div[g.edge(e).head] += flow[e];
  }

  PathDecomposition out;
  out.transcript.n = n;
  out.acyclic_flow = std::move(acyclic);
  Forest forest(n);
  std::vector<i64> rem = flow;         // remaining flow per off-forest edge
  std::vector<size_t> cursor(n, 0);    // next out-edge candidate per vertex
  std::vector<Vertex> fparent(n, -1);  // real-forest parent, mirrors forest
  std::vector<EdgeId> fedge(n, -1);

  auto clean_zero_edges = [&](Vertex s) {
    while (auto m = forest.find_min(s)) {
      if (m->weight != 0) break;
      forest.cut(m->child);
      out.transcript.record_cut(m->child);
      rem[fedge[m->child]] = 0;
      fparent[m->child] = -1;
      fedge[m->child] = -1;
    }
  };

  for (Vertex s = 0; s < n; ++s) {
    i64 supply = -div[s];
    while (supply > 0) {
      clean_zero_edges(s);
      Vertex r = forest.find_root(s);
      bool extended = false;
      for (size_t &i = cursor[r]; i < g.out(r).size(); ++i) {
        EdgeId e = g.out(r)[i];
        if (rem[e] > 0) {
          forest.link(r, g.edge(e).head, e, rem[e]);
          out.transcript.record_link(r, g.edge(e).head, e, rem[e]);
          fparent[r] = g.edge(e).head;
          fedge[r] = e;
          extended = true;
          break;
        }
      }
      if (extended) continue;
      // r is a terminus: emit the path s -> r
      if (r == s)
        throw input_error("decompose_flow: conservation violated");
      i64 demand = div[r];
      assert(demand > 0 && "terminus must have remaining demand");
      auto m = forest.find_min(s);
      assert(m && m->weight > 0);
      i64 amt = std::min({supply, demand, m->weight});
      out.transcript.record_emit(s, r, amt);
      if (want_explicit_paths) {
        std::vector<EdgeId> pe;
        for (Vertex x = s; x != r; x = fparent[x]) pe.push_back(fedge[x]);
        out.explicit_paths.push_back(std::move(pe));
      }
      out.paths.push_back({s, r, amt});
      forest.add_path(s, -amt);
      out.transcript.record_add(s, -amt);
      supply -= amt;
      div[r] -= amt;
      div[s] += amt;
    }
  }
  out.transcript.seal();
  return out;
}

/// Test oracle: re-sum explicit path loads per edge.
inline std::vector<i64> per_edge_load(const Graph &g,
                                      const PathDecomposition &pd) {
  std::vector<i64> load(g.m(), 0);
  if (pd.explicit_paths.size() != pd.paths.size())
    throw contract_error("per_edge_load requires explicit paths");
  for (size_t i = 0; i < pd.paths.size(); ++i)
    for (EdgeId e : pd.explicit_paths[i]) load[e] += pd.paths[i].amount;
  return load;
}

}  // namespace exdec
