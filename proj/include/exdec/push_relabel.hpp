#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "exdec/graph.hpp"
#include "exdec/linkcut.hpp"

namespace exdec {

/// A flow problem on a graph whose capacities have already been scaled to
/// integers (e.g. by ceil(1/phi)); height caps the level function.
struct FlowInstance {
  Graph g;
  Weighting src;  // Delta
  Weighting snk;  // nabla
  i64 height = 1;
};

/// Height used for bounded push-relabel in the matching step:
/// h = ceil(100 * kappa * log2(nW) / phi). Batched relabels make the large
/// value harmless; it only needs to be ample.
inline i64 push_relabel_height(int n, i64 w, i64 kappa, const Rat &phi) {
  double lg = std::log2(std::max<double>(2.0, static_cast<double>(n) *
                                                  static_cast<double>(w)));
  double h = 100.0 * static_cast<double>(kappa) * lg / rat_to_double(phi);
  return static_cast<i64>(std::ceil(h)) + 1;
}

struct PrStats {
  i64 pushes = 0;
  i64 saturating_pushes = 0;
  i64 relabel_events = 0;
  i64 relabel_distance = 0;
};

struct PreflowState {
  std::vector<i64> flow;
  std::vector<i64> level;
  std::vector<i64> absorbed;
  std::vector<i64> excess;
  bool feasible = false;
  PrStats stats;

  i64 total_excess() const {
    i64 s = 0;
    for (i64 e : excess) s += e;
    return s;
  }
};

namespace detail {

struct PrCore {
  const Graph &g;
  const Weighting &src, &snk;
  const i64 h;
  std::vector<i64> flow, level, absorbed, excess;
  PrStats stats;

  PrCore(const FlowInstance &inst)
      : g(inst.g),
        src(inst.src),
        snk(inst.snk),
        h(inst.height),
        flow(g.m(), 0),
        level(g.n(), 0),
        absorbed(g.n(), 0),
        excess(g.n(), 0) {
    for (Vertex v = 0; v < g.n(); ++v) arrive(v, weight_of(src, v));
  }

  void arrive(Vertex v, i64 amt) {
    i64 a = std::min(weight_of(snk, v) - absorbed[v], amt);
    absorbed[v] += a;
    excess[v] += amt - a;
  }

  i64 residual(EdgeId e, bool fwd) const {
    return fwd ? g.edge(e).cap - flow[e] : flow[e];
  }

  // Admissible arc out of u with the lowest edge id, or nullopt.
  std::optional<std::pair<EdgeId, bool>> admissible(Vertex u) const {
    std::optional<std::pair<EdgeId, bool>> best;
    for (EdgeId e : g.out(u))
      if (residual(e, true) > 0 && level[u] == level[g.edge(e).head] + 1)
        if (!best || e < best->first) best = {e, true};
    for (EdgeId e : g.in(u))
      if (residual(e, false) > 0 && level[u] == level[g.edge(e).tail] + 1)
        if (!best || e < best->first) best = {e, false};
    return best;
  }

  // Batched relabel: jump straight to the lowest productive level. Identical
  // to repeating unit relabels until an arc becomes admissible or h is hit.
  void relabel(Vertex u) {
    i64 lv = h;
    for (EdgeId e : g.out(u))
      if (residual(e, true) > 0)
        lv = std::min(lv, level[g.edge(e).head] + 1);
    for (EdgeId e : g.in(u))
      if (residual(e, false) > 0)
        lv = std::min(lv, level[g.edge(e).tail] + 1);
    assert(lv > level[u]);
    stats.relabel_events++;
    stats.relabel_distance += lv - level[u];
    level[u] = lv;
  }

  Vertex pick_active() const {
    Vertex best = -1;
    for (Vertex v = 0; v < g.n(); ++v)
      if (excess[v] > 0 && level[v] < h &&
          (best == -1 || level[v] > level[best]))
        best = v;
    return best;
  }
};

}  // namespace detail

/// Bounded-height push-relabel. Returns the terminal preflow: feasible iff
/// no vertex retains excess; otherwise all positive-excess vertices sit at
/// level h. Deterministic: highest-level active vertex, lowest edge id.
inline PreflowState push_relabel_bounded(const FlowInstance &inst,
                                         bool use_linkcut = true) {
  detail::PrCore core(inst);
  const Graph &g = inst.g;

  if (!use_linkcut) {
    while (true) {
      Vertex u = core.pick_active();
      if (u == -1) break;
      auto arc = core.admissible(u);
      if (!arc) {
        core.relabel(u);
        continue;
      }
      auto [e, fwd] = *arc;
      i64 amt = std::min(core.excess[u], core.residual(e, fwd));
      core.flow[e] += fwd ? amt : -amt;
      core.excess[u] -= amt;
      core.arrive(fwd ? g.edge(e).head : g.edge(e).tail, amt);
      core.stats.pushes++;
      if (core.residual(e, fwd) == 0) core.stats.saturating_pushes++;
    }
  } else {
    // Multi-hop sends along a forest of admissible arcs; residual capacities
    // of tree arcs live in the link-cut structure until the arc is cut.
    LinkCutForest lct(g.n());
    std::vector<char> owner(g.m(), 0);  // 0 free, 1 tail owns fwd, 2 head owns bwd
    std::vector<Vertex> fparent(g.n(), -1);
    std::vector<char> fdir(g.n(), 0);
    std::vector<std::set<Vertex>> children(g.n());

    auto write_back = [&](Vertex c) {
      auto [e, w] = lct.cut(c);
      if (fdir[c]) {
        core.flow[e] = g.edge(e).cap - w;
        owner[e] = 0;
      } else {
        core.flow[e] = w;
        owner[e] = 0;
      }
      children[fparent[c]].erase(c);
      fparent[c] = -1;
    };

    auto admissible_free = [&](Vertex u) {
      std::optional<std::pair<EdgeId, bool>> best;
      for (EdgeId e : g.out(u))
        if (!owner[e] && core.residual(e, true) > 0 &&
            core.level[u] == core.level[g.edge(e).head] + 1)
          if (!best || e < best->first) best = {e, true};
      for (EdgeId e : g.in(u))
        if (!owner[e] && core.residual(e, false) > 0 &&
            core.level[u] == core.level[g.edge(e).tail] + 1)
          if (!best || e < best->first) best = {e, false};
      return best;
    };

    while (true) {
      Vertex u = core.pick_active();
      if (u == -1) break;
      if (fparent[u] != -1) {
        Vertex r = lct.find_root(u);
        auto mn = lct.find_min(u);
        assert(mn && mn->weight > 0);
        i64 amt = std::min(core.excess[u], mn->weight);
        lct.add_path(u, -amt);
        core.excess[u] -= amt;
        core.arrive(r, amt);
        core.stats.pushes++;
        while (auto z = lct.find_min(u)) {
          if (z->weight != 0) break;
          core.stats.saturating_pushes++;
          write_back(z->child);
        }
        continue;
      }
      auto arc = admissible_free(u);
      if (arc) {
        auto [e, fwd] = *arc;
        Vertex p = fwd ? g.edge(e).head : g.edge(e).tail;
        lct.link(u, p, e, core.residual(e, fwd));
        owner[e] = fwd ? 1 : 2;
        fparent[u] = p;
        fdir[u] = fwd;
        children[p].insert(u);
        continue;
      }
      // cut all incident tree arcs, then relabel with fresh flow values
      if (fparent[u] != -1) write_back(u);
      while (!children[u].empty()) write_back(*children[u].begin());
      core.relabel(u);
    }
    for (Vertex v = 0; v < g.n(); ++v)
      if (fparent[v] != -1) write_back(v);
  }

  PreflowState out;
  out.flow = std::move(core.flow);
  out.level = std::move(core.level);
  out.absorbed = std::move(core.absorbed);
  out.excess = std::move(core.excess);
  out.stats = core.stats;
  out.feasible = out.total_excess() == 0;
  return out;
}

struct LevelCut {
  std::vector<Vertex> cut;      // S
  std::vector<bool> mask;
  i64 threshold = 0;            // k: S side taken from {l >= k} or {l < k}
  bool high_side = true;        // S == L_{>=k}?
  i64 extra_source_bound = 0;   // 2 * min(b(S), b(complement))
};

/// Shared by the static and the push-pull variants: pick the highest k >= 1
/// whose consecutive-level crossing capacity is at most a tenth of the
/// lighter b-side, then return the side with b(S) <= 2 b(V) / 3.
inline std::optional<LevelCut> find_sparse_level_cut(
    const Graph &g, const std::vector<i64> &level, const Weighting &b) {
  const int n = g.n();
  i64 b_total = 0;
  for (Vertex v = 0; v < n; ++v) b_total += weight_of(b, v);
  if (b_total == 0) return std::nullopt;

  std::vector<i64> distinct;
  for (Vertex v = 0; v < n; ++v)
    if (level[v] > 0) distinct.push_back(level[v]);
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  for (i64 k : distinct) {
    // cut between levels k and k-1
    i64 cross = 0;  // both directions, consecutive levels only
    for (const Edge &e : g.edges()) {
      i64 a = level[e.tail], c = level[e.head];
      if ((a == k && c == k - 1) || (a == k - 1 && c == k)) cross += e.cap;
    }
    i64 b_high = 0;
    for (Vertex v = 0; v < n; ++v)
      if (level[v] >= k) b_high += weight_of(b, v);
    i64 b_low = b_total - b_high;
    if (10 * cross > std::min(b_high, b_low)) continue;
    if (b_high == 0 || b_low == 0) continue;
    LevelCut out;
    out.threshold = k;
    out.high_side = 3 * b_high <= 2 * b_total;
    out.mask.assign(n, false);
    for (Vertex v = 0; v < n; ++v)
      if ((level[v] >= k) == out.high_side) {
        out.mask[v] = true;
        out.cut.push_back(v);
      }
    out.extra_source_bound = 2 * std::min(b_high, b_low);
    return out;
  }
  return std::nullopt;
}

/// Level cut of a stuck bounded-height run. Preconditions per the sparse-cut
/// lemma: src, snk <= b, src(V) <= snk(V), b >= deg/kappa and the height
/// ample; then conductance(host, b, S) <= 1.1 phi against the unscaled host.
inline LevelCut extract_sparse_level_cut(const FlowInstance &inst,
                                         const PreflowState &state,
                                         const Weighting &b) {
  if (state.feasible)
    throw contract_error("extract_sparse_level_cut: state is feasible");
  auto cut = find_sparse_level_cut(inst.g, state.level, b);
  if (!cut)
    throw contract_error(
        "extract_sparse_level_cut: no admissible level (height too small?)");
  return *cut;
}

}  // namespace exdec
