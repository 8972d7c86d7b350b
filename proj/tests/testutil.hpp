#pragma once

#include <vector>

#include "exdec/graph.hpp"
#include "exdec/prng.hpp"

namespace exdec::testutil {

inline Graph bidirected_clique(int n, i64 cap = 1) {
  Graph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) g.add_edge(u, v, cap);
  return g;
}

inline Graph random_graph(Prng &rng, int max_n, int max_m, i64 max_cap) {
  int n = 2 + static_cast<int>(rng.next_below(max_n - 1));
  Graph g(n);
  int m = 1 + static_cast<int>(rng.next_below(max_m));
  for (int i = 0; i < m; ++i) {
    int u = static_cast<int>(rng.next_below(n));
    int v = static_cast<int>(rng.next_below(n));
    if (u == v) continue;
    g.add_edge(u, v, 1 + static_cast<i64>(rng.next_below(max_cap)));
  }
  return g;
}

/// Random DAG: edges always go from lower to higher in a random permutation.
inline Graph random_dag(Prng &rng, int max_n, int max_m, i64 max_cap) {
  int n = 2 + static_cast<int>(rng.next_below(max_n - 1));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.next_below(i + 1)]);
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  Graph g(n);
  int m = 1 + static_cast<int>(rng.next_below(max_m));
  for (int i = 0; i < m; ++i) {
    int u = static_cast<int>(rng.next_below(n));
    int v = static_cast<int>(rng.next_below(n));
    if (u == v) continue;
    if (pos[u] > pos[v]) std::swap(u, v);
    g.add_edge(u, v, 1 + static_cast<i64>(rng.next_below(max_cap)));
  }
  return g;
}

/// Two bidirected cliques joined by one unit edge each way.
inline Graph two_cliques(int k) {
  Graph g(2 * k);
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v)
      if (u != v) {
        g.add_edge(u, v, 1);
        g.add_edge(k + u, k + v, 1);
      }
  g.add_edge(0, k, 1);
  g.add_edge(k, 0, 1);
  return g;
}

inline Graph random_connected_ish(Prng &rng, int n, int extra, i64 max_cap) {
  Graph g(n);
  for (int v = 1; v < n; ++v) {
    int u = static_cast<int>(rng.next_below(v));
    g.add_edge(u, v, 1 + static_cast<i64>(rng.next_below(max_cap)));
    g.add_edge(v, u, 1 + static_cast<i64>(rng.next_below(max_cap)));
  }
  for (int i = 0; i < extra; ++i) {
    int u = static_cast<int>(rng.next_below(n));
    int v = static_cast<int>(rng.next_below(n));
    if (u != v) g.add_edge(u, v, 1 + static_cast<i64>(rng.next_below(max_cap)));
  }
  return g;
}

}  // namespace exdec::testutil
