#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "exdec/cut_matching.hpp"
#include "exdec/graph.hpp"
#include "exdec/oracle.hpp"
#include "exdec/valid_state.hpp"
#include "exdec/witness.hpp"

namespace exdec {

/// Trimming scales. C is the measured witness-degree constant of the run:
/// deg_W(v) <= C * log2(n) * log2(nW) * d(v), carried as an exact rational.
struct TrimConfig {
  Rat phi = make_rat(1, 100);
  i64 c0 = 4096;            // early-termination divisor constant
  int max_batch_rounds = 64;

  // derived, filled by make_trim_config
  i64 height = 1;             // ceil(40000 * log2(nW) / phi)
  i64 capacity_scale = 1;     // ceil(200 * C * log2(n) * log2(nW) / phi)
  i64 sink_step = 1;          // ceil(10 * C * log2(n) * log2(nW))
  i64 early_divisor = 10000;  // ceil(c0 * log2(n) * log2(nW))
};

inline TrimConfig make_trim_config(const Graph &g, const Weighting &d,
                                   const Witness &w, const Rat &phi, i64 c0,
                                   int max_batch_rounds = 64) {
  TrimConfig cfg;
  cfg.phi = phi;
  cfg.c0 = c0;
  cfg.max_batch_rounds = max_batch_rounds;
  double ln = std::log2(std::max(2.0, static_cast<double>(g.n())));
  double lnw = std::log2(std::max(
      2.0, static_cast<double>(g.n()) * static_cast<double>(g.max_capacity())));
  cfg.height = static_cast<i64>(std::ceil(40000.0 * lnw / rat_to_double(phi)));
  // measured witness-degree constant: max over v of deg_W(v) / (L d(v))
  Weighting wdeg = witness_degrees(w);
  double c_measured = 1.0;
  for (Vertex v = 0; v < g.n(); ++v)
    if (weight_of(d, v) > 0)
      c_measured = std::max(
          c_measured, static_cast<double>(wdeg[v]) /
                          (ln * lnw * static_cast<double>(weight_of(d, v))));
  cfg.capacity_scale = static_cast<i64>(
      std::ceil(200.0 * c_measured * ln * lnw / rat_to_double(phi)));
  cfg.sink_step = static_cast<i64>(std::ceil(10.0 * c_measured * ln * lnw));
  cfg.early_divisor =
      std::max<i64>(1, static_cast<i64>(std::ceil(
                           static_cast<double>(c0) * ln * lnw)));
  return cfg;
}

struct TrimOutcome {
  enum Tag { kEarlyTermination, kCertifiedExpander } tag = kCertifiedExpander;
  std::vector<CutCertificate> cuts;  // S_0, S_1, ... in emission order
  std::vector<Vertex> expander;      // A' on certification
  Rat certified_phi;                 // 0.0001 / measured congestion
  Rat witness_congestion;            // measured embedding congestion of Pi'
  int batch_rounds = 0;
  std::vector<i64> batch_source_added;  // per batch, for the decay check
  Witness certifying_witness;           // W' paths: surviving + repair flows
};

/// Twin certification flow instances on G[A] and reverse(G[A]): sources are
/// 100x the witness capacity crossing the boundary, sinks are the scaled
/// weighting, capacities are scaled by the config.
struct TrimInstances {
  Subgraph sub;            // induced on A (host ids <-> node ids)
  Graph fwd, rev;          // scaled capacity graphs on sub ids
  Weighting sink_base;     // d per sub vertex (pre-scaling)
  Weighting deg_lower;     // degree lower bound handed to ValidState
};

inline TrimInstances build_instances(const Graph &g,
                                     const std::vector<Vertex> &a,
                                     const Weighting &d,
                                     const TrimConfig &cfg) {
  TrimInstances ti;
  ti.sub = induced_subgraph(g, a);
  const Graph &h = ti.sub.graph;
  ti.fwd = Graph(h.n());
  ti.rev = Graph(h.n());
  for (const Edge &e : h.edges()) {
    ti.fwd.add_edge(e.tail, e.head, e.cap * cfg.capacity_scale);
    ti.rev.add_edge(e.head, e.tail, e.cap * cfg.capacity_scale);
  }
  ti.sink_base.assign(h.n(), 0);
  for (Vertex v = 0; v < h.n(); ++v)
    ti.sink_base[v] = weight_of(d, ti.sub.to_parent[v]);
  ti.deg_lower = degree_weighting(h);
  return ti;
}

/// Trims a near-expander into a certified expander. Maintains two
/// ValidStates (forward and reverse); cuts are removed from both; source
/// increases are applied in batches with level resets and sink escalation.
inline TrimOutcome trim(const Graph &g, const std::vector<Vertex> &a,
                        const Witness &w, const Weighting &d,
                        const TrimConfig &cfg) {
  TrimOutcome out;
  const i64 dV = weight_sum(d);
  std::vector<char> in_a(g.n(), 0);
  for (Vertex v : a) in_a[v] = 1;

  TrimInstances ti = build_instances(g, a, d, cfg);
  const Graph &h = ti.sub.graph;
  const int ns = h.n();
  if (ns == 0) {
    out.tag = TrimOutcome::kCertifiedExpander;
    return out;
  }

  // initial sinks: one sink_step worth of the weighting
  Weighting sink0(ns, 0);
  for (Vertex v = 0; v < ns; ++v) sink0[v] = cfg.sink_step * ti.sink_base[v];
  // sinks must dominate the scaled degrees for the push-pull contract; the
  // regularized weighting guarantees it for the unscaled graph and the
  // scales preserve it whenever sink_step >= capacity_scale fails to hold,
  // so the contract is checked against the unscaled degree
  ValidState fwd(ti.fwd, Weighting(ns, 0), sink0, cfg.height, ti.deg_lower);
  ValidState rev(ti.rev, Weighting(ns, 0), sink0, cfg.height, ti.deg_lower);

  // crossing sources over the current boundary; applied in batches
  std::vector<char> still_in(ns, 1);
  auto alive_nodes = [&]() {
    std::vector<char> mask(g.n(), 0);
    for (Vertex v = 0; v < ns; ++v)
      if (still_in[v]) mask[ti.sub.to_parent[v]] = 1;
    return mask;
  };
  auto boundary_tags = [&]() {
    std::vector<char> alive = alive_nodes();
    std::vector<char> tags(g.m(), 0);
    for (EdgeId e = 0; e < g.m(); ++e) {
      const Edge &ed = g.edge(e);
      if (alive[ed.tail] != alive[ed.head]) tags[e] = 1;
    }
    return tags;
  };

  Weighting applied(ns, 0);  // source already injected per sub vertex
  i64 cut_weight_total = 0;
  std::vector<Vertex> live_sub;  // current A_t in sub ids

  auto emit_cut = [&](const LevelCut &lc) {
    CutCertificate cert;
    for (Vertex v : lc.cut) cert.cut.push_back(ti.sub.to_parent[v]);
    std::sort(cert.cut.begin(), cert.cut.end());
    for (Vertex v = 0; v < ns; ++v)
      if (still_in[v]) cert.host.push_back(ti.sub.to_parent[v]);
    cert.weighting = d;
    // claimed bound: the measured conductance, recorded exactly
    cert.sparsity_bound = conductance(
        induced_subgraph(g, cert.host).graph,
        [&] {
          Subgraph hs = induced_subgraph(g, cert.host);
          Weighting dd(hs.graph.n(), 0);
          for (Vertex v = 0; v < hs.graph.n(); ++v)
            dd[v] = weight_of(d, hs.to_parent[v]);
          return dd;
        }(),
        [&] {
          Subgraph hs = induced_subgraph(g, cert.host);
          std::vector<Vertex> s;
          for (Vertex v : cert.cut) s.push_back(hs.from_parent[v]);
          return s;
        }());
    if (!certificate_holds(g, cert))
      throw contract_error("trim: emitted cut fails its recorded bound");
    for (Vertex v : lc.cut) still_in[v] = 0;
    cut_weight_total += weight_sum(d, cert.cut);
    out.cuts.push_back(std::move(cert));
  };

  auto early_reached = [&]() {
    return cut_weight_total * cfg.early_divisor >= dV;
  };

  int batches = 0;
  while (true) {
    // drain stuck states, removing sparse level cuts from both instances
    bool removed_any = true;
    while (removed_any) {
      removed_any = false;
      for (ValidState *st : {&fwd, &rev}) {
        if (!st->has_positive_excess()) continue;
        auto lc = st->level_cut(ti.sink_base);
        if (!lc)
          throw contract_error("trim: stuck state yields no level cut");
        emit_cut(*lc);
        fwd.remove_vertices(lc->cut);
        rev.remove_vertices(lc->cut);
        removed_any = true;
        if (early_reached()) {
          out.tag = TrimOutcome::kEarlyTermination;
          out.batch_rounds = batches;
          return out;
        }
      }
    }

    // both feasible: compute pending crossing sources for the new boundary
    Weighting want(ns, 0);
    {
      Weighting node_src = crossing_sources(w, boundary_tags(), alive_nodes());
      for (Vertex v = 0; v < ns; ++v)
        if (still_in[v]) want[v] = node_src[ti.sub.to_parent[v]];
    }
    i64 pending = 0;
    for (Vertex v = 0; v < ns; ++v) pending += want[v] - applied[v];
    if (pending == 0) break;  // certified
    if (batches >= cfg.max_batch_rounds)
      throw contract_error("trim: batched source rounds exceeded the cap");
    batches++;
    out.batch_source_added.push_back(pending);

    // batch round: reset levels, escalate sinks, apply the new sources
    Weighting extra(ns, 0);
    for (Vertex v = 0; v < ns; ++v)
      if (still_in[v]) extra[v] = cfg.sink_step * ti.sink_base[v];
    for (ValidState *st : {&fwd, &rev}) {
      st->reset_levels();
      st->escalate_sinks(extra);
      for (Vertex v = 0; v < ns; ++v)
        if (still_in[v] && want[v] > applied[v])
          st->increase_source(v, want[v] - applied[v]);
      st->pull_relabel();
      st->push_relabel();
    }
    for (Vertex v = 0; v < ns; ++v)
      if (still_in[v]) applied[v] = want[v];
  }

  out.tag = TrimOutcome::kCertifiedExpander;
  out.batch_rounds = batches;
  for (Vertex v = 0; v < ns; ++v)
    if (still_in[v]) out.expander.push_back(ti.sub.to_parent[v]);
  std::sort(out.expander.begin(), out.expander.end());

  // certifying witness W': surviving witness edges (non-crossing paths) plus
  // the two certification flows, embedded in G[A'] with measured congestion
  {
    std::vector<char> alive = alive_nodes();
    std::vector<char> tags = boundary_tags();
    Witness wprime;
    wprime.n = g.n();
    wprime.capacity_scale = cfg.capacity_scale;
    for (const WitnessRound &r : w.rounds) {
      auto crossings = replay_crossings(r.transcript, tags);
      WitnessRound keep = r;
      bool outside = false;
      for (size_t i = 0; i < crossings.size(); ++i) {
        if (crossings[i].crosses || !alive[crossings[i].src] ||
            !alive[crossings[i].dst])
          keep.matched_portion[i] = 0, outside = true;
      }
      (void)outside;
      wprime.rounds.push_back(std::move(keep));
    }
    for (ValidState *st : {&fwd, &rev}) {
      auto flow = st->feasibility();
      if (!flow) continue;
      const Graph &fg = st == &fwd ? ti.fwd : ti.rev;
      auto pd = decompose_flow(fg, *flow);
      WitnessRound wr;
      wr.reversed = st == &rev;
      wr.transcript = std::move(pd.transcript);
      detail::translate_transcript(wr.transcript, ti.sub);
      wr.flow_snapshot.assign(g.n() == 0 ? 0 : g.m(), 0);
      for (EdgeId e = 0; e < h.m(); ++e)
        wr.flow_snapshot[ti.sub.edge_to_parent[e]] = pd.acyclic_flow[e];
      for (const PathItem &p : pd.paths) {
        Vertex src = ti.sub.to_parent[p.src], dst = ti.sub.to_parent[p.dst];
        if (wr.reversed) std::swap(src, dst);
        wr.paths.push_back({src, dst, p.amount});
        wr.matched_portion.push_back(p.amount);
      }
      wprime.rounds.push_back(std::move(wr));
    }
    // measured congestion of the combined embedding against G[A'] capacities
    auto load = witness_edge_load(g, wprime);
    Rat cong(0);
    for (EdgeId e = 0; e < g.m(); ++e)
      if (load[e] > 0) {
        Rat c = Rat(load[e]) / Rat(g.edge(e).cap);
        if (c > cong) cong = c;
      }
    if (cong == Rat(0)) cong = Rat(1);
    out.witness_congestion = cong;
    out.certified_phi = make_rat(1, 10000) / cong;
    out.certifying_witness = std::move(wprime);
  }
  return out;
}

/// Exhaustive certification check: every cut of G[A'] has conductance at
/// least phi_prime with respect to d. Guarded at 14 vertices.
inline bool verify_certified_expander(const Graph &g,
                                      const std::vector<Vertex> &a_prime,
                                      const Rat &phi_prime,
                                      const Weighting &d) {
  if (a_prime.size() <= 1) return true;
  if (a_prime.size() > 14)
    throw size_guard_error("verify_certified_expander: |A'| > 14");
  Subgraph sub = induced_subgraph(g, a_prime);
  Weighting dd(sub.graph.n(), 0);
  for (Vertex v = 0; v < sub.graph.n(); ++v)
    dd[v] = weight_of(d, sub.to_parent[v]);
  const int k = sub.graph.n();
  for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
    std::vector<bool> in_s(k, false);
    i64 ds = 0, dc = 0;
    for (int i = 0; i < k; ++i) {
      if (mask >> i & 1) {
        in_s[i] = true;
        ds += dd[i];
      } else {
        dc += dd[i];
      }
    }
    i64 den = std::min(ds, dc);
    if (den == 0) continue;
    i64 fwd = 0, bwd = 0;
    for (const Edge &e : sub.graph.edges()) {
      if (in_s[e.tail] && !in_s[e.head]) fwd += e.cap;
      if (!in_s[e.tail] && in_s[e.head]) bwd += e.cap;
    }
    if (make_rat(std::min(fwd, bwd), den) < phi_prime) return false;
  }
  return true;
}

}  // namespace exdec
