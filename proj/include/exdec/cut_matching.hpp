#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "exdec/flow_decompose.hpp"
#include "exdec/flow_matrix.hpp"
#include "exdec/graph.hpp"
#include "exdec/maxflow.hpp"
#include "exdec/prng.hpp"
#include "exdec/push_relabel.hpp"
#include "exdec/witness.hpp"

namespace exdec {

struct CutMatchingConfig {
  Rat phi = make_rat(1, 100);
  i64 tau = 10000;              // early-termination divisor, >= 10^4
  double c_T = 10.0;            // T = ceil(c_T log2(n) log2(nW))
  std::uint64_t seed = 0;
  bool push_relabel_mode = false;  // requires d >= deg/kappa
  i64 kappa = 1;
  int rounds_override = 0;  // tests may pin T directly
};

inline int cut_matching_rounds(int n, i64 w, double c_T) {
  double ln = std::log2(std::max(2.0, static_cast<double>(n)));
  double lnw = std::log2(
      std::max(2.0, static_cast<double>(n) * static_cast<double>(w)));
  return static_cast<int>(std::ceil(c_T * ln * lnw));
}

inline i64 capacity_scale(const Rat &phi) {
  BigInt num = numerator(phi), den = denominator(phi);
  BigInt q = den / num + (den % num == 0 ? 0 : 1);  // ceil(1/phi)
  return q.convert_to<i64>();
}

/// Snapshot handed to per-round observers (test hooks, potential traces).
struct RoundState {
  int t = 0;
  const FlowMatrixImplicit *matrix = nullptr;
  const Weighting *d_prev = nullptr;
  const Weighting *d_cur = nullptr;
  const std::vector<CutCertificate> *cuts = nullptr;
  const std::vector<char> *in_deleted = nullptr;  // D_t mask
  const std::vector<char> *removed = nullptr;     // union of cuts mask
};

struct CutMatchingOutcome {
  enum Tag { kEarlyTermination, kNearExpander } tag = kNearExpander;
  std::vector<CutCertificate> cuts;  // emission order, node-graph ids
  std::vector<Vertex> surviving;     // A* on NearExpander
  Weighting d_final;
  std::vector<Vertex> deleted_outside;  // D at termination
  Witness witness;
  FlowMatrixImplicit matrix{Weighting{}};
  int rounds_run = 0;
  i64 scale = 1;  // integer capacity scale s >= 1/phi
  Rat congestion_bound_main;     // 7 T / phi
  Rat congestion_bound_general;  // 26 T / phi
};

struct BisectionResult {
  std::vector<Vertex> left, right;  // reported bisection (split vertex whole)
  std::vector<double> projections;  // per vertex, actives only meaningful
  double eta = 0.0;
  // flow-instance construction data
  std::vector<Vertex> order;  // actives sorted by projection
  int star_index = -1;        // u*'s position in order
  i64 x = 0, y = 0;           // u*'s fractions (x on the prefix side)
  Vertex slack_vertex = -1;   // z: carries the parity unit, p(z) == eta
  i64 parity = 0;             // rho
};

namespace detail {

/// Random unit-vector projections of the implicit flow matrix rows (first
/// half of the game) or columns (second half), followed by the weighted
/// bisection with at most one fractional vertex.
inline BisectionResult cut_player(const FlowMatrixImplicit &fm,
                                  const Weighting &d, int t, int total_rounds,
                                  std::uint64_t seed) {
  const int n = fm.n();
  Prng rng(seed, static_cast<std::uint64_t>(t));
  std::vector<double> r(2 * n, 0.0);
  for (Vertex v = 0; v < n; ++v)
    if (d[v] > 0)
      r[v] = rng.next_gaussian() / std::sqrt(static_cast<double>(d[v]));
  // normalizing r to unit length would rescale every projection equally and
  // cannot change the bisection, so it is skipped
  std::vector<double> y = 2 * t <= total_rounds
                              ? fm.multiply<double>(r, t - 1)
                              : fm.multiply_transpose<double>(r, t - 1);
  BisectionResult out;
  out.projections.assign(n, 0.0);
  for (Vertex v = 0; v < n; ++v)
    if (d[v] > 0) {
      out.order.push_back(v);
      out.projections[v] = y[v] / static_cast<double>(d[v]);
    }
  std::sort(out.order.begin(), out.order.end(), [&](Vertex a, Vertex b) {
    if (out.projections[a] != out.projections[b])
      return out.projections[a] < out.projections[b];
    return a < b;
  });
  i64 total = 0;
  for (Vertex v : out.order) total += d[v];
  i64 half = total / 2;
  out.parity = total - 2 * half;
  i64 cum = 0;
  for (size_t i = 0; i < out.order.size(); ++i) {
    if (cum + d[out.order[i]] >= half && half > cum) {
      out.star_index = static_cast<int>(i);
      out.x = half - cum;
      out.y = d[out.order[i]] - out.x;
      break;
    }
    cum += d[out.order[i]];
  }
  if (out.star_index < 0) {  // half == 0: single unit of weight
    out.star_index = 0;
    out.x = 0;
    out.y = d[out.order[0]];
  }
  Vertex star = out.order[out.star_index];
  if (out.y >= out.parity) {
    out.slack_vertex = star;
  } else {
    out.slack_vertex = out.order[out.star_index + 1];
  }
  out.eta = out.projections[out.slack_vertex];
  for (size_t i = 0; i < out.order.size(); ++i) {
    Vertex v = out.order[i];
    if (static_cast<int>(i) < out.star_index)
      out.left.push_back(v);
    else if (static_cast<int>(i) > out.star_index)
      out.right.push_back(v);
    else
      (out.x >= out.y ? out.left : out.right).push_back(v);
  }
  return out;
}

struct MatchingFlowResult {
  std::vector<PathItem> paths;
  std::vector<i64> matched;  // absorbed portion per path
  Transcript transcript;     // node ids
  std::vector<i64> flow_node;    // acyclic decomposed flow, node edges
  std::optional<std::vector<Vertex>> cut;  // node ids
  Rat cut_bound;  // claimed sparsity of the cut, when present
};

inline void translate_transcript(Transcript &t, const Subgraph &sub) {
  t.n = static_cast<int>(sub.from_parent.size());
  for (TranscriptOp &op : t.ops) {
    if (op.u >= 0) op.u = sub.to_parent[op.u];
    if (op.v >= 0) op.v = sub.to_parent[op.v];
    if (op.root >= 0) op.root = sub.to_parent[op.root];
    if (op.edge >= 0) op.edge = sub.edge_to_parent[op.edge];
  }
}

/// Solves one matching-step flow problem on the live subgraph and extracts
/// the routed matching plus an optional sparse cut.
inline MatchingFlowResult solve_matching_instance(
    const Graph &node_graph, const Subgraph &sub, const Weighting &delta_node,
    const Weighting &nabla_node, const Weighting &b_node, i64 scale,
    const CutMatchingConfig &cfg, bool reversed_graph = false) {
  const Graph &hsub = sub.graph;
  const int ns = hsub.n();
  Graph flow_graph(ns);
  for (const Edge &e : hsub.edges())
    flow_graph.add_edge(reversed_graph ? e.head : e.tail,
                        reversed_graph ? e.tail : e.head, e.cap * scale);
  Weighting src(ns, 0), snk(ns, 0), b(ns, 0);
  i64 src_total = 0;
  for (Vertex v = 0; v < ns; ++v) {
    src[v] = weight_of(delta_node, sub.to_parent[v]);
    snk[v] = weight_of(nabla_node, sub.to_parent[v]);
    b[v] = weight_of(b_node, sub.to_parent[v]);
    src_total += src[v];
  }

  MatchingFlowResult out;
  std::vector<i64> flow;
  std::vector<i64> budget(ns, 0);  // absorbed per vertex
  if (!cfg.push_relabel_mode) {
    auto mf = exact_max_flow(flow_graph, src, snk);
    flow = mf.flow;
    std::vector<i64> net(ns, 0);
    for (EdgeId e = 0; e < flow_graph.m(); ++e) {
      net[flow_graph.edge(e).tail] -= flow[e];
      net[flow_graph.edge(e).head] += flow[e];
    }
    // no vertex carries both roles (overlaps are pre-absorbed), so the
    // absorbed mass is exactly the positive net inflow
    for (Vertex v = 0; v < ns; ++v) budget[v] = std::max<i64>(net[v], 0);
    if (mf.value < src_total) {
      // minimal min cut: residual-reachable side; flip to the lighter side
      std::vector<Vertex> s = mf.min_cut;
      i64 bs = weight_sum(b, s);
      i64 btot = weight_sum(b);
      if (3 * bs > 2 * btot) {
        std::vector<Vertex> comp;
        for (Vertex v = 0; v < ns; ++v)
          if (!mf.cut_mask[v]) comp.push_back(v);
        s = std::move(comp);
      }
      out.cut = std::move(s);
      out.cut_bound = Rat(1) / Rat(scale);
    }
  } else {
    FlowInstance inst{flow_graph, src, snk,
                      push_relabel_height(node_graph.n(),
                                          node_graph.max_capacity(), cfg.kappa,
                                          cfg.phi)};
    auto st = push_relabel_bounded(inst, true);
    flow = st.flow;
    for (Vertex v = 0; v < ns; ++v) budget[v] = st.absorbed[v];
    if (!st.feasible) {
      LevelCut lc = extract_sparse_level_cut(inst, st, b);
      out.cut = lc.cut;
      out.cut_bound = Rat(11, 10) * cfg.phi;
    }
  }

  auto pd = decompose_flow(flow_graph, flow);
  out.flow_node.assign(node_graph.m(), 0);
  for (EdgeId e = 0; e < hsub.m(); ++e)
    out.flow_node[sub.edge_to_parent[e]] = pd.acyclic_flow[e];
  out.transcript = std::move(pd.transcript);
  translate_transcript(out.transcript, sub);
  for (const PathItem &p : pd.paths) {
    i64 m = std::min(budget[p.dst], p.amount);
    budget[p.dst] -= m;
    out.paths.push_back(
        {sub.to_parent[p.src], sub.to_parent[p.dst], p.amount});
    out.matched.push_back(m);
  }
  if (out.cut) {
    for (Vertex &v : *out.cut) v = sub.to_parent[v];
    std::sort(out.cut->begin(), out.cut->end());
  }
  return out;
}

}  // namespace detail

/// Non-stop cut-matching game. Either certifies that most of d survives as a
/// near expander (with a witness) or produces an early-terminating sequence
/// of sparse cuts; every emitted cut carries an exact certificate.
inline CutMatchingOutcome run_cut_matching(
    const Graph &g, const Weighting &d_in, const CutMatchingConfig &cfg,
    const std::function<void(const RoundState &)> &observer = {}) {
  const int n = g.n();
  if (cfg.phi <= Rat(0) || cfg.phi >= Rat(1))
    throw contract_error("run_cut_matching: phi must lie in (0,1)");
  if (cfg.tau < 10000)
    throw contract_error("run_cut_matching: tau must be at least 10^4");
  Weighting d0 = d_in;
  d0.resize(n, 0);
  for (i64 w : d0)
    if (w < 0) throw contract_error("run_cut_matching: negative weight");

  CutMatchingOutcome out;
  out.matrix = FlowMatrixImplicit(d0);
  out.scale = capacity_scale(cfg.phi);
  const i64 s = out.scale;
  const int T = cfg.rounds_override > 0
                    ? cfg.rounds_override
                    : cut_matching_rounds(n, g.max_capacity(), cfg.c_T);
  out.congestion_bound_main = Rat(7 * T) / cfg.phi;
  out.congestion_bound_general = Rat(26 * T) / cfg.phi;
  out.witness.n = n;
  out.witness.capacity_scale = s;

  const i64 dV0 = weight_sum(d0);
  const Rat theta = Rat(1) - Rat(36) / Rat(cfg.tau);

  Weighting d = d0;
  std::vector<char> removed(n, 0);   // in an appended cut
  std::vector<char> in_deleted(n, 0);  // in D
  auto d_active = [&]() {
    i64 sum = 0;
    for (Vertex v = 0; v < n; ++v) sum += d[v];
    return sum;
  };
  auto support = [&]() {
    int c = 0;
    for (Vertex v = 0; v < n; ++v)
      if (d[v] > 0) c++;
    return c;
  };
  auto live_set = [&]() {
    std::vector<Vertex> live;
    for (Vertex v = 0; v < n; ++v)
      if (!removed[v]) live.push_back(v);
    return live;
  };
  auto append_cut = [&](const std::vector<Vertex> &cut, const Rat &bound) {
    CutCertificate cert;
    cert.cut = cut;
    cert.host = live_set();
    cert.sparsity_bound = bound;
    cert.weighting = d0;
    if (!certificate_holds(g, cert))
      throw contract_error("run_cut_matching: emitted cut fails its bound");
    for (Vertex v : cut) {
      removed[v] = 1;
      in_deleted[v] = 0;
      d[v] = 0;
    }
    out.cuts.push_back(std::move(cert));
  };
  auto early = [&]() { return Rat(d_active()) < theta * Rat(dV0); };
  auto finish_early = [&]() {
    out.tag = CutMatchingOutcome::kEarlyTermination;
    out.d_final = d;
    for (Vertex v = 0; v < n; ++v)
      if (in_deleted[v]) out.deleted_outside.push_back(v);
    return out;
  };

  int t = 0;
  while (!early() && t < T) {
    if (support() <= 1) break;
    t++;
    Weighting d_prev = d;
    auto bis = detail::cut_player(out.matrix, d, t, T, cfg.seed);

    // flow instances: sources on one side, sinks on the other, with the
    // fractional vertex split x/y and the parity unit self-matched at z
    Vertex star = bis.order[bis.star_index];
    Vertex z = bis.slack_vertex;
    i64 rho = bis.parity;
    Weighting d1(n, 0), n1(n, 0), d2(n, 0), n2(n, 0);
    for (size_t i = 0; i < bis.order.size(); ++i) {
      Vertex v = bis.order[i];
      if (static_cast<int>(i) < bis.star_index) {
        d1[v] = d[v];
        n2[v] = d[v];
      } else if (static_cast<int>(i) > bis.star_index) {
        n1[v] = d[v];
        d2[v] = d[v];
      }
    }
    d1[star] = bis.x;
    n2[star] = bis.x;
    n1[star] = bis.y;
    d2[star] = bis.y;
    // parity shave at z (sink of instance 1, source of instance 2)
    n1[z] -= rho;
    d2[z] -= rho;
    std::vector<MatchEntry> self_entries;
    if (rho > 0) self_entries.push_back({z, z, rho});
    // pre-absorb the overlap at the split vertex
    i64 pre1 = std::min(d1[star], n1[star]);
    d1[star] -= pre1;
    n1[star] -= pre1;
    i64 pre2 = std::min(d2[star], n2[star]);
    d2[star] -= pre2;
    n2[star] -= pre2;
    if (pre1 + pre2 > 0) self_entries.push_back({star, star, pre1 + pre2});

    Subgraph sub = induced_subgraph(g, live_set());
    auto m1 = detail::solve_matching_instance(g, sub, d1, n1, d0, s, cfg);
    auto m2 = detail::solve_matching_instance(g, sub, d2, n2, d0, s, cfg);

    // assemble M_t
    MatchingRound round;
    round.d_prev = d_prev;
    round.d_cur.assign(n, 0);
    round.received.assign(n, 0);
    round.sent.assign(n, 0);
    for (auto *mr : {&m1, &m2})
      for (size_t i = 0; i < mr->paths.size(); ++i) {
        if (mr->matched[i] == 0) continue;
        const PathItem &p = mr->paths[i];
        round.entries.push_back({p.dst, p.src, mr->matched[i]});
        round.received[p.dst] += mr->matched[i];
        round.sent[p.src] += mr->matched[i];
      }
    for (const MatchEntry &se : self_entries) {
      round.entries.push_back(se);
      round.received[se.receiver] += se.amount;
      round.sent[se.sender] += se.amount;
    }

    // reconcile this round's sparse cuts (both live in the same host)
    bool stop_early = false;
    if (m1.cut || m2.cut) {
      std::vector<Vertex> s1 = m1.cut.value_or(std::vector<Vertex>{});
      std::vector<Vertex> s2 = m2.cut.value_or(std::vector<Vertex>{});
      Rat b1 = m1.cut_bound, b2 = m2.cut_bound;
      if (s1.empty()) {
        s1 = std::move(s2);
        b1 = b2;
        s2.clear();
      }
      if (!s2.empty() && weight_sum(d0, s2) < weight_sum(d0, s1)) {
        std::swap(s1, s2);
        std::swap(b1, b2);
      }
      auto triggers = [&](const std::vector<Vertex> &cs) {
        i64 rem = d_active() - weight_sum(d, cs);
        return Rat(rem) < theta * Rat(dV0);
      };
      if (s2.empty()) {
        append_cut(s1, b1);
      } else if (triggers(s1)) {
        append_cut(s1, b1);
        stop_early = true;
      } else if (triggers(s2)) {
        append_cut(s2, b2);
        stop_early = true;
      } else {
        std::vector<char> in1(n, 0);
        for (Vertex v : s1) in1[v] = 1;
        std::vector<Vertex> diff21, inter, sym;
        for (Vertex v : s2)
          (in1[v] ? inter : diff21).push_back(v);
        std::vector<char> in2(n, 0);
        for (Vertex v : s2) in2[v] = 1;
        for (Vertex v : s1)
          if (!in2[v]) sym.push_back(v);
        for (Vertex v : diff21) sym.push_back(v);
        if (2 * weight_sum(d0, diff21) >= weight_sum(d0, s2)) {
          append_cut(s1, b1);
          append_cut(diff21, std::min(Rat(2) * b2, Rat(3) * cfg.phi));
        } else {
          append_cut(inter, Rat(3) * cfg.phi);
          for (Vertex v : sym) {  // deferred deletions outside cuts
            if (d[v] > 0) in_deleted[v] = 1;
            d[v] = 0;
          }
        }
      }
    }

    // partial deletions: d_t(u) = min(sent, received); weights that fall
    // below half of the original are deleted outright into D
    for (Vertex v = 0; v < n; ++v) {
      if (removed[v] || d_prev[v] == 0 || d[v] == 0) continue;
      i64 dv = std::min(round.sent[v], round.received[v]);
      if (2 * dv < d0[v]) dv = 0;
      d[v] = dv;
      if (dv == 0) in_deleted[v] = 1;
    }
    round.d_cur = d;
    out.matrix.append(std::move(round));
    out.rounds_run = t;

    // witness contributions of this round
    for (auto *mr : {&m1, &m2}) {
      WitnessRound wr;
      wr.transcript = std::move(mr->transcript);
      wr.paths = std::move(mr->paths);
      wr.matched_portion = std::move(mr->matched);
      wr.flow_snapshot = std::move(mr->flow_node);
      out.witness.rounds.push_back(std::move(wr));
    }

    if (observer) {
      RoundState rs;
      rs.t = t;
      rs.matrix = &out.matrix;
      rs.d_prev = &out.matrix.round(t).d_prev;
      rs.d_cur = &out.matrix.round(t).d_cur;
      rs.cuts = &out.cuts;
      rs.in_deleted = &in_deleted;
      rs.removed = &removed;
      observer(rs);
    }
    if (stop_early) break;
  }

  if (early()) return finish_early();

  // grafting: route the deleted-outside-cuts weight into the survivors, in
  // both orientations, extracting sparse cuts whenever a flow is stuck
  for (int pass = 0; pass < 2; ++pass) {
    bool rev = pass == 1;
    while (true) {
      std::vector<Vertex> dd;
      for (Vertex v = 0; v < n; ++v)
        if (in_deleted[v]) dd.push_back(v);
      if (dd.empty()) break;
      Weighting delta(n, 0), nabla(n, 0);
      for (Vertex v = 0; v < n; ++v) {
        if (in_deleted[v]) delta[v] = d0[v];
        if (d[v] > 0) nabla[v] = d0[v];
      }
      Subgraph sub = induced_subgraph(g, live_set());
      auto mr =
          detail::solve_matching_instance(g, sub, delta, nabla, d0, s, cfg, rev);
      if (rev) {  // report paths in host orientation
        for (PathItem &p : mr.paths) std::swap(p.src, p.dst);
      }
      WitnessRound wr;
      wr.transcript = std::move(mr.transcript);
      wr.paths = std::move(mr.paths);
      wr.matched_portion = std::move(mr.matched);
      wr.flow_snapshot = std::move(mr.flow_node);
      wr.reversed = rev;
      out.witness.rounds.push_back(std::move(wr));
      if (!mr.cut) break;
      append_cut(*mr.cut, mr.cut_bound);
      if (early()) return finish_early();
    }
  }

  out.tag = CutMatchingOutcome::kNearExpander;
  out.d_final = d;
  for (Vertex v = 0; v < n; ++v) {
    if (in_deleted[v]) out.deleted_outside.push_back(v);
    if (d[v] > 0 || in_deleted[v]) out.surviving.push_back(v);
  }
  return out;
}

}  // namespace exdec
