#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exdec/graph.hpp"

namespace exdec {

namespace detail {
inline void guard(int n, int limit, const char *what) {
  if (n > limit)
    throw size_guard_error(std::string(what) + ": size " + std::to_string(n) +
                           " exceeds enumeration guard " +
                           std::to_string(limit));
}
}  // namespace detail

/// Exact minimum of Phi_{G,d}(S) over all proper nonempty S with positive
/// weight on the lighter side, by 2^n enumeration. Guarded at n <= 16.
inline std::pair<Rat, std::vector<Vertex>> min_conductance(const Graph &g,
                                                           const Weighting &d) {
  detail::guard(g.n(), 16, "min_conductance");
  const int n = g.n();
  if (n < 2) throw degenerate_cut_error("graph has fewer than two vertices");
  std::vector<i64> dv(n);
  for (Vertex v = 0; v < n; ++v) dv[v] = weight_of(d, v);
  std::optional<Rat> best;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    i64 ds = 0, dc = 0;
    for (Vertex v = 0; v < n; ++v) (mask >> v & 1 ? ds : dc) += dv[v];
    i64 den = std::min(ds, dc);
    if (den == 0) continue;
    i64 fwd = 0, bwd = 0;
    for (const Edge &e : g.edges()) {
      bool ts = mask >> e.tail & 1, hs = mask >> e.head & 1;
      if (ts && !hs) fwd += e.cap;
      if (!ts && hs) bwd += e.cap;
    }
    Rat phi = make_rat(std::min(fwd, bwd), den);
    if (!best || phi < *best) {
      best = phi;
      best_mask = mask;
    }
  }
  if (!best) throw zero_weight_error("no cut with positive min-side weight");
  std::vector<Vertex> s;
  for (Vertex v = 0; v < n; ++v)
    if (best_mask >> v & 1) s.push_back(v);
  return {*best, s};
}

/// Checks that A is phi-nearly d-expanding in g: for every nonempty proper
/// S subset of A with min(d(S), d(A\S)) > 0,
///   min(delta_G(S, V\S), delta_G(V\S, S)) >= phi * min(d(S), d(A\S)).
inline bool verify_near_expander(const Graph &g, const std::vector<Vertex> &a,
                                 const Rat &phi, const Weighting &d) {
  detail::guard(static_cast<int>(a.size()), 16, "verify_near_expander");
  const int k = static_cast<int>(a.size());
  if (k <= 1) return true;
  for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
    std::vector<bool> in_s(g.n(), false);
    i64 ds = 0, dr = 0;
    for (int i = 0; i < k; ++i) {
      if (mask >> i & 1) {
        in_s[a[i]] = true;
        ds += weight_of(d, a[i]);
      } else {
        dr += weight_of(d, a[i]);
      }
    }
    i64 den = std::min(ds, dr);
    if (den == 0) continue;
    i64 fwd = 0, bwd = 0;
    for (const Edge &e : g.edges()) {
      if (in_s[e.tail] && !in_s[e.head]) fwd += e.cap;
      if (!in_s[e.tail] && in_s[e.head]) bwd += e.cap;
    }
    if (make_rat(std::min(fwd, bwd), den) < phi) return false;
  }
  return true;
}

/// Necessary cut condition for "d mixes in g with congestion kappa": no
/// 1/kappa-sparse cut with respect to d exists.
inline bool verify_no_sparse_cut(const Graph &g, const Weighting &d,
                                 const Rat &kappa) {
  detail::guard(g.n(), 16, "verify_no_sparse_cut");
  if (g.n() < 2) return true;
  try {
    auto [phi, s] = min_conductance(g, d);
    return phi >= Rat(1) / kappa;
  } catch (const zero_weight_error &) {
    return true;  // no cut with positive weight on both sides constrains mixing
  }
}

}  // namespace exdec
