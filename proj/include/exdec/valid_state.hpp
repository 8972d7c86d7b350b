#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "exdec/flow_decompose.hpp"
#include "exdec/graph.hpp"
#include "exdec/linkcut.hpp"
#include "exdec/push_relabel.hpp"

namespace exdec {

struct PprStats {
  i64 pushes = 0;
  i64 pulls = 0;
  i64 saturating_pushes = 0;
  i64 saturating_pulls = 0;
  i64 relabel_up_events = 0;
  i64 relabel_down_events = 0;
  i64 relabel_distance = 0;
  std::vector<i64> flips;  // per-vertex direction reversals of the level

  i64 n_norm1 = 0;  // final ||n||_1, filled by snapshot()
};

/// Dynamic preflow under IncreaseSource and RemoveVertices. Maintains the
/// valid-state conditions: negative excess only at level 0, positive excess
/// only at level h. Positive and negative flow units (p, n) are always
/// tracked; they define the excesses:
///   ex+(v) = max(p-n, 0),  ex-(v) = max(n-p-nabla, 0).
class ValidState {
 public:
  ValidState(Graph g, Weighting delta0, Weighting nabla, i64 h,
             const Weighting &deg_lower_bound, bool use_linkcut = true)
      : g_(std::move(g)),
        delta_(std::move(delta0)),
        nabla_(std::move(nabla)),
        h_(h),
        use_linkcut_(use_linkcut),
        alive_(g_.n(), 1),
        flow_(g_.m(), 0),
        level_(g_.n(), 0),
        p_(g_.n(), 0),
        n_(g_.n(), 0),
        last_dir_(g_.n(), 0) {
    if (h_ < 1) throw contract_error("ValidState: height must be positive");
    delta_.resize(g_.n(), 0);
    nabla_.resize(g_.n(), 0);
    for (Vertex v = 0; v < g_.n(); ++v)
      if (nabla_[v] < weight_of(deg_lower_bound, v))
        throw contract_error("ValidState: sink must dominate the degree");
    for (Vertex v = 0; v < g_.n(); ++v) {
      p_[v] = delta_[v];
      n_[v] = nabla_[v];
    }
    stats_.flips.assign(g_.n(), 0);
    if (use_linkcut_) init_forests();
    push_relabel();
  }

  const Graph &graph() const { return g_; }
  i64 height() const { return h_; }
  bool is_active(Vertex v) const { return alive_[v]; }
  const std::vector<char> &alive() const { return alive_; }
  const std::vector<i64> &flow() const { return flow_; }
  const std::vector<i64> &level() const { return level_; }
  const std::vector<i64> &p() const { return p_; }
  const std::vector<i64> &n() const { return n_; }
  const Weighting &source() const { return delta_; }
  const Weighting &sink() const { return nabla_; }

  i64 ex_plus(Vertex v) const { return std::max<i64>(p_[v] - n_[v], 0); }
  i64 ex_minus(Vertex v) const {
    return std::max<i64>(n_[v] - p_[v] - nabla_[v], 0);
  }
  i64 absorbed(Vertex v) const {
    return std::clamp<i64>(nabla_[v] + p_[v] - n_[v], 0, nabla_[v]);
  }

  const PprStats &stats() {
    stats_.n_norm1 = 0;
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v]) stats_.n_norm1 += n_[v];
    return stats_;
  }

  void increase_source(Vertex v, i64 delta) {
    if (!alive_[v]) throw contract_error("increase_source: removed vertex");
    if (delta < 0) throw contract_error("increase_source: negative delta");
    delta_[v] += delta;
    p_[v] += delta;
    push_relabel();
  }

  void remove_vertices(const std::vector<Vertex> &s) {
    std::vector<char> removing(g_.n(), 0);
    for (Vertex v : s) {
      if (!alive_[v]) throw contract_error("remove_vertices: already removed");
      removing[v] = 1;
    }
    if (use_linkcut_) {
      for (Vertex v : s) detach_everywhere(v);
    }
    for (EdgeId e = 0; e < g_.m(); ++e) {
      if (flow_[e] == 0) continue;
      const Edge &ed = g_.edge(e);
      bool tr = removing[ed.tail], hr = removing[ed.head];
      if (!tr && !hr) continue;
      // flow formerly exchanged with S turns into local units
      if (!tr && hr) p_[ed.tail] += flow_[e];  // f(v, S)
      if (tr && !hr) n_[ed.head] += flow_[e];  // f(S, v)
      flow_[e] = 0;
    }
    for (Vertex v : s) alive_[v] = 0;
    pull_relabel();
    push_relabel();
  }

  /// Loops while some vertex has negative excess above level 0: pulls along
  /// admissible residual arcs, else relabels downward.
  void pull_relabel() {
    while (true) {
      Vertex v = pick_active_minus();
      if (v == -1) break;
      if (use_linkcut_)
        discharge_minus_lct(v);
      else
        discharge_minus_plain(v);
    }
  }

  void push_relabel() {
    while (true) {
      Vertex u = pick_active_plus();
      if (u == -1) break;
      if (use_linkcut_)
        discharge_plus_lct(u);
      else
        discharge_plus_plain(u);
    }
  }

  bool has_positive_excess() const {
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v] && ex_plus(v) > 0) return true;
    return false;
  }

  /// Feasible iff no positive excess. The routed flow is the preflow with
  /// the path mass sourced at negative-excess vertices removed.
  std::optional<std::vector<i64>> feasibility() {
    if (has_positive_excess()) return std::nullopt;
    materialize();
    std::vector<i64> f = flow_;
    auto pd = decompose_flow<NaiveLinkCutForest>(g_, f, true);
    // per-vertex outflow attribution: routed source first, debt last
    std::vector<i64> source_left(g_.n(), 0);
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v]) source_left[v] = delta_[v];
    std::vector<i64> clean = f;
    detail::cancel_flow_cycles(g_, clean);
    // cycles are dropped from the returned flow as well
    std::vector<i64> out = clean;
    for (size_t i = 0; i < pd.paths.size(); ++i) {
      const PathItem &pi = pd.paths[i];
      i64 from_source = std::min(source_left[pi.src], pi.amount);
      source_left[pi.src] -= from_source;
      i64 debt = pi.amount - from_source;
      if (debt > 0)
        for (EdgeId e : pd.explicit_paths[i]) out[e] -= debt;
    }
    return out;
  }

  /// Batch-round support: zero all levels while keeping the flow. The state
  /// must be revalidated afterwards (pull_relabel then push_relabel).
  void reset_levels() {
    if (use_linkcut_) materialize();
    for (Vertex v = 0; v < g_.n(); ++v) {
      if (alive_[v] && level_[v] != 0) note_level_change(v, 0);
      level_[v] = 0;
    }
  }

  void escalate_sinks(const Weighting &extra) {
    for (Vertex v = 0; v < g_.n(); ++v) {
      if (!alive_[v]) continue;
      i64 d = weight_of(extra, v);
      nabla_[v] += d;
      n_[v] += d;
    }
  }

  /// Sparse level cut of a stuck state, against weighting b (live part).
  std::optional<LevelCut> level_cut(const Weighting &b) {
    materialize();
    Weighting bb(g_.n(), 0);
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v]) bb[v] = weight_of(b, v);
    std::vector<i64> lv(g_.n(), 0);
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v]) lv[v] = level_[v];
    Graph live(g_.n());
    for (EdgeId e = 0; e < g_.m(); ++e) {
      const Edge &ed = g_.edge(e);
      if (alive_[ed.tail] && alive_[ed.head])
        live.add_edge(ed.tail, ed.head, ed.cap);
    }
    auto cut = find_sparse_level_cut(live, lv, bb);
    if (cut) {  // removed vertices never belong to the cut
      std::vector<Vertex> filtered;
      for (Vertex v : cut->cut)
        if (alive_[v])
          filtered.push_back(v);
        else
          cut->mask[v] = false;
      cut->cut = std::move(filtered);
    }
    return cut;
  }

  /// Writes all forest-resident residuals back into flow_.
  void materialize() {
    if (!use_linkcut_) return;
    for (Vertex v = 0; v < g_.n(); ++v) {
      if (fparent_[0][v] != -1) write_back(0, v);
      if (fparent_[1][v] != -1) write_back(1, v);
    }
  }

  /// Full-scan validity check (test hook): level-skip saturation on live
  /// residual arcs, excess placement, p/n consistency.
  bool check_valid_state() {
    materialize();
    for (EdgeId e = 0; e < g_.m(); ++e) {
      const Edge &ed = g_.edge(e);
      if (!alive_[ed.tail] || !alive_[ed.head]) {
        if (flow_[e] != 0) return false;
        continue;
      }
      if (flow_[e] < 0 || flow_[e] > ed.cap) return false;
      if (level_[ed.tail] > level_[ed.head] + 1 && flow_[e] != ed.cap)
        return false;
      if (level_[ed.head] > level_[ed.tail] + 1 && flow_[e] != 0) return false;
    }
    for (Vertex v = 0; v < g_.n(); ++v) {
      if (!alive_[v]) continue;
      if (ex_minus(v) > 0 && level_[v] != 0) return false;
      if (ex_plus(v) > 0 && level_[v] != h_) return false;
      if (level_[v] < 0 || level_[v] > h_) return false;
      // p - n == Delta - nabla + inflow - outflow
      i64 in = 0, out = 0;
      for (EdgeId e : g_.in(v)) in += flow_[e];
      for (EdgeId e : g_.out(v)) out += flow_[e];
      if (p_[v] - n_[v] != delta_[v] - nabla_[v] + in - out) return false;
    }
    return true;
  }

 private:
  Graph g_;
  Weighting delta_, nabla_;
  i64 h_;
  bool use_linkcut_;
  std::vector<char> alive_;
  std::vector<i64> flow_, level_, p_, n_;
  std::vector<int> last_dir_;
  PprStats stats_;

  // two forests: index 0 moves positive excess (paths descend), index 1
  // moves negative excess (paths ascend); an edge is resident in at most one
  std::optional<LinkCutForest> lct_[2];
  std::vector<char> owner_;             // 0 free, 1 fwd in T+, 2 bwd in T+,
                                        // 3 fwd in T-, 4 bwd in T-
  std::vector<Vertex> fparent_[2];
  std::vector<char> fdir_[2];           // forward arc?
  std::vector<std::set<Vertex>> children_[2];

  void init_forests() {
    lct_[0].emplace(g_.n());
    lct_[1].emplace(g_.n());
    owner_.assign(g_.m(), 0);
    for (int t = 0; t < 2; ++t) {
      fparent_[t].assign(g_.n(), -1);
      fdir_[t].assign(g_.n(), 0);
      children_[t].assign(g_.n(), {});
    }
  }

  void note_level_change(Vertex v, i64 to) {
    int dir = to > level_[v] ? 1 : (to < level_[v] ? -1 : 0);
    if (dir != 0) {
      if (last_dir_[v] != 0 && dir != last_dir_[v]) stats_.flips[v]++;
      last_dir_[v] = dir;
    }
  }

  i64 residual(EdgeId e, bool fwd) const {
    return fwd ? g_.edge(e).cap - flow_[e] : flow_[e];
  }

  Vertex pick_active_plus() const {
    Vertex best = -1;
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v] && ex_plus(v) > 0 && level_[v] < h_ &&
          (best == -1 || level_[v] > level_[best]))
        best = v;
    return best;
  }

  Vertex pick_active_minus() const {
    Vertex best = -1;
    for (Vertex v = 0; v < g_.n(); ++v)
      if (alive_[v] && ex_minus(v) > 0 && level_[v] > 0 &&
          (best == -1 || level_[v] < level_[best]))
        best = v;
    return best;
  }

  // --- plain discharges ----------------------------------------------------

  // Push-admissible arc out of u: residual toward a live vertex exactly one
  // level down; lowest edge id wins.
  std::optional<std::pair<EdgeId, bool>> push_arc(Vertex u) const {
    std::optional<std::pair<EdgeId, bool>> best;
    for (EdgeId e : g_.out(u)) {
      Vertex w = g_.edge(e).head;
      if (alive_[w] && residual(e, true) > 0 && level_[u] == level_[w] + 1)
        if (!best || e < best->first) best = {e, true};
    }
    for (EdgeId e : g_.in(u)) {
      Vertex w = g_.edge(e).tail;
      if (alive_[w] && residual(e, false) > 0 && level_[u] == level_[w] + 1)
        if (!best || e < best->first) best = {e, false};
    }
    return best;
  }

  // Pull-admissible arc into v: a live provider exactly one level up with
  // residual capacity toward v.
  std::optional<std::pair<EdgeId, bool>> pull_arc(Vertex v) const {
    std::optional<std::pair<EdgeId, bool>> best;
    for (EdgeId e : g_.in(v)) {  // provider pushes forward along e
      Vertex u = g_.edge(e).tail;
      if (alive_[u] && residual(e, true) > 0 && level_[u] == level_[v] + 1)
        if (!best || e < best->first) best = {e, true};
    }
    for (EdgeId e : g_.out(v)) {  // provider returns flow along e
      Vertex u = g_.edge(e).head;
      if (alive_[u] && residual(e, false) > 0 && level_[u] == level_[v] + 1)
        if (!best || e < best->first) best = {e, false};
    }
    return best;
  }

  void apply_flow(EdgeId e, bool fwd, i64 amt) {
    flow_[e] += fwd ? amt : -amt;
  }

  void relabel_up(Vertex u) {
    i64 lv = h_;
    for (EdgeId e : g_.out(u)) {
      Vertex w = g_.edge(e).head;
      if (alive_[w] && residual(e, true) > 0)
        lv = std::min(lv, level_[w] + 1);
    }
    for (EdgeId e : g_.in(u)) {
      Vertex w = g_.edge(e).tail;
      if (alive_[w] && residual(e, false) > 0)
        lv = std::min(lv, level_[w] + 1);
    }
    assert(lv > level_[u]);
    stats_.relabel_up_events++;
    stats_.relabel_distance += lv - level_[u];
    note_level_change(u, lv);
    level_[u] = lv;
  }

  void relabel_down(Vertex v) {
    i64 lv = 0;
    for (EdgeId e : g_.in(v)) {
      Vertex u = g_.edge(e).tail;
      if (alive_[u] && residual(e, true) > 0) lv = std::max(lv, level_[u] - 1);
    }
    for (EdgeId e : g_.out(v)) {
      Vertex u = g_.edge(e).head;
      if (alive_[u] && residual(e, false) > 0) lv = std::max(lv, level_[u] - 1);
    }
    assert(lv < level_[v]);
    stats_.relabel_down_events++;
    stats_.relabel_distance += level_[v] - lv;
    note_level_change(v, lv);
    level_[v] = lv;
  }

  void discharge_plus_plain(Vertex u) {
    while (alive_[u] && ex_plus(u) > 0 && level_[u] < h_) {
      auto arc = push_arc(u);
      if (!arc) {
        relabel_up(u);
        continue;
      }
      auto [e, fwd] = *arc;
      Vertex w = fwd ? g_.edge(e).head : g_.edge(e).tail;
      i64 amt = std::min(ex_plus(u), residual(e, fwd));
      apply_flow(e, fwd, amt);
      p_[u] -= amt;
      p_[w] += amt;
      stats_.pushes++;
      if (residual(e, fwd) == 0) stats_.saturating_pushes++;
      return;  // re-select globally for the highest-level rule
    }
  }

  void discharge_minus_plain(Vertex v) {
    while (alive_[v] && ex_minus(v) > 0 && level_[v] > 0) {
      auto arc = pull_arc(v);
      if (!arc) {
        relabel_down(v);
        continue;
      }
      auto [e, fwd] = *arc;
      Vertex u = fwd ? g_.edge(e).tail : g_.edge(e).head;
      i64 amt = std::min(ex_minus(v), residual(e, fwd));
      apply_flow(e, fwd, amt);
      n_[v] -= amt;
      n_[u] += amt;
      stats_.pulls++;
      if (residual(e, fwd) == 0) stats_.saturating_pulls++;
      return;
    }
  }

  // --- link-cut accelerated discharges -------------------------------------

  void write_back(int t, Vertex c) {
    auto [e, w] = lct_[t]->cut(c);
    flow_[e] = fdir_[t][c] ? g_.edge(e).cap - w : w;
    owner_[e] = 0;
    children_[t][fparent_[t][c]].erase(c);
    fparent_[t][c] = -1;
  }

  void release_edge(EdgeId e) {
    if (owner_[e] == 0) return;
    int t = owner_[e] <= 2 ? 0 : 1;
    // the resident arc's child endpoint owns it
    bool fwd = owner_[e] == 1 || owner_[e] == 3;
    Vertex child;
    if (t == 0)
      child = fwd ? g_.edge(e).tail : g_.edge(e).head;
    else
      child = fwd ? g_.edge(e).head : g_.edge(e).tail;
    write_back(t, child);
  }

  void detach_everywhere(Vertex v) {
    for (int t = 0; t < 2; ++t) {
      if (fparent_[t][v] != -1) write_back(t, v);
      while (!children_[t][v].empty()) write_back(t, *children_[t][v].begin());
    }
  }

  void discharge_plus_lct(Vertex u) {
    while (alive_[u] && ex_plus(u) > 0 && level_[u] < h_) {
      if (fparent_[0][u] != -1) {
        Vertex r = lct_[0]->find_root(u);
        auto mn = lct_[0]->find_min(u);
        assert(mn && mn->weight > 0);
        i64 amt = std::min(ex_plus(u), mn->weight);
        lct_[0]->add_path(u, -amt);
        p_[u] -= amt;
        p_[r] += amt;
        stats_.pushes++;
        while (auto z = lct_[0]->find_min(u)) {
          if (z->weight != 0) break;
          stats_.saturating_pushes++;
          write_back(0, z->child);
        }
        return;
      }
      auto arc = push_arc_true(u);
      if (!arc) {
        detach_everywhere(u);
        relabel_up(u);
        continue;
      }
      auto [e, fwd] = *arc;
      release_edge(e);
      Vertex w = fwd ? g_.edge(e).head : g_.edge(e).tail;
      lct_[0]->link(u, w, e, residual(e, fwd));
      owner_[e] = fwd ? 1 : 2;
      fparent_[0][u] = w;
      fdir_[0][u] = fwd;
      children_[0][w].insert(u);
    }
  }

  void discharge_minus_lct(Vertex v) {
    while (alive_[v] && ex_minus(v) > 0 && level_[v] > 0) {
      if (fparent_[1][v] != -1) {
        Vertex r = lct_[1]->find_root(v);
        auto mn = lct_[1]->find_min(v);
        assert(mn && mn->weight > 0);
        i64 amt = std::min(ex_minus(v), mn->weight);
        lct_[1]->add_path(v, -amt);
        n_[v] -= amt;
        n_[r] += amt;
        stats_.pulls++;
        while (auto z = lct_[1]->find_min(v)) {
          if (z->weight != 0) break;
          stats_.saturating_pulls++;
          write_back(1, z->child);
        }
        return;
      }
      auto arc = pull_arc_true(v);
      if (!arc) {
        detach_everywhere(v);
        relabel_down(v);
        continue;
      }
      auto [e, fwd] = *arc;
      release_edge(e);
      Vertex u = fwd ? g_.edge(e).tail : g_.edge(e).head;
      lct_[1]->link(v, u, e, residual(e, fwd));
      owner_[e] = fwd ? 3 : 4;
      fparent_[1][v] = u;
      fdir_[1][v] = fwd;
      children_[1][u].insert(v);
    }
  }

  i64 true_residual(EdgeId e, bool fwd) {
    if (owner_[e] != 0) release_edge(e);
    return residual(e, fwd);
  }

  std::optional<std::pair<EdgeId, bool>> push_arc_true(Vertex u) {
    std::optional<std::pair<EdgeId, bool>> best;
    for (EdgeId e : g_.out(u)) {
      Vertex w = g_.edge(e).head;
      if (alive_[w] && level_[u] == level_[w] + 1 && true_residual(e, true) > 0)
        if (!best || e < best->first) best = {e, true};
    }
    for (EdgeId e : g_.in(u)) {
      Vertex w = g_.edge(e).tail;
      if (alive_[w] && level_[u] == level_[w] + 1 &&
          true_residual(e, false) > 0)
        if (!best || e < best->first) best = {e, false};
    }
    return best;
  }

  std::optional<std::pair<EdgeId, bool>> pull_arc_true(Vertex v) {
    std::optional<std::pair<EdgeId, bool>> best;
    for (EdgeId e : g_.in(v)) {
      Vertex u = g_.edge(e).tail;
      if (alive_[u] && level_[u] == level_[v] + 1 && true_residual(e, true) > 0)
        if (!best || e < best->first) best = {e, true};
    }
    for (EdgeId e : g_.out(v)) {
      Vertex u = g_.edge(e).head;
      if (alive_[u] && level_[u] == level_[v] + 1 &&
          true_residual(e, false) > 0)
        if (!best || e < best->first) best = {e, false};
    }
    return best;
  }
};

}  // namespace exdec
