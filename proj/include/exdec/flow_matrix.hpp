#pragma once

#include <vector>

#include "exdec/graph.hpp"

namespace exdec {

/// One entry of the round matching M_t: `amount` units were routed from
/// `sender` to `receiver` (rows index receivers).
struct MatchEntry {
  Vertex receiver;
  Vertex sender;
  i64 amount;
};

/// A matching-step record. The split of M_t over active/deleted halves is
/// implied by the per-vertex fractions:
///   receiver side: alpha(u) = d_cur(u) / received(u)
///   sender side:   beta(v)  = d_cur(v) / sent(v)
/// (zero when the denominator vanishes). These coincide with the four-case
/// split whenever the routed totals equal d_prev, and keep the row/column
/// identities exact in general.
struct MatchingRound {
  std::vector<MatchEntry> entries;
  Weighting d_prev, d_cur;
  std::vector<i64> received, sent;  // row / column sums of M_t

  template <typename S>
  S alpha(Vertex u) const {
    if (received[u] == 0) return S(0);
    return S(d_cur[u]) / S(received[u]);
  }
  template <typename S>
  S beta(Vertex v) const {
    if (sent[v] == 0) return S(0);
    return S(d_cur[v]) / S(sent[v]);
  }

  /// The four split entries of an M_t entry, receiver half a (0 = active),
  /// sender half b.
  Rat split(const MatchEntry &me, int a, int b) const {
    Rat al = alpha<Rat>(me.receiver), be = beta<Rat>(me.sender);
    Rat fa = a == 0 ? al : Rat(1) - al;
    Rat fb = b == 0 ? be : Rat(1) - be;
    return Rat(me.amount) * fa * fb;
  }
};

/// Lazy representation of the flow matrix over split vertices. Index space:
/// v_circ = v, v_times = n + v. Round t's matrix is
///   F_t = L_t * F_{t-1} * K_t,  F_0 = diag(d0) on the active half,
/// where K_t redistributes columns between halves and L_t mixes rows along
/// the matching. Right products replay K backwards, then L forwards.
class FlowMatrixImplicit {
 public:
  explicit FlowMatrixImplicit(Weighting d0) : d0_(std::move(d0)) {
    n_ = static_cast<int>(d0_.size());
  }

  int n() const { return n_; }
  int rounds() const { return static_cast<int>(rounds_.size()); }
  const MatchingRound &round(int t) const { return rounds_[t - 1]; }
  const Weighting &d_at(int t) const {
    return t == 0 ? d0_ : rounds_[t - 1].d_cur;
  }

  void append(MatchingRound r) { rounds_.push_back(std::move(r)); }

  // y = F_t * x
  template <typename S>
  std::vector<S> multiply(std::vector<S> x, int upto) const {
    check_rounds(upto);
    for (int s = upto; s >= 1; --s) apply_k(rounds_[s - 1], x);
    apply_diag(x);
    for (int s = 1; s <= upto; ++s) apply_l(rounds_[s - 1], x);
    return x;
  }

  // y = F_t^T * x
  template <typename S>
  std::vector<S> multiply_transpose(std::vector<S> x, int upto) const {
    check_rounds(upto);
    for (int s = upto; s >= 1; --s) apply_l_transpose(rounds_[s - 1], x);
    apply_diag(x);
    for (int s = 1; s <= upto; ++s) apply_k_transpose(rounds_[s - 1], x);
    return x;
  }

  /// Exact dense flow matrix after `upto` rounds; 2n x 2n, guarded.
  std::vector<std::vector<Rat>> materialize(int upto) const {
    check_rounds(upto);
    if (n_ > 64) throw size_guard_error("materialize: n > 64");
    std::vector<std::vector<Rat>> m(2 * n_, std::vector<Rat>(2 * n_, Rat(0)));
    for (Vertex v = 0; v < n_; ++v) m[v][v] = Rat(d0_[v]);
    for (int s = 1; s <= upto; ++s) {
      const MatchingRound &r = rounds_[s - 1];
      // column redistribution acts on each row from the right: row * K
      for (int i = 0; i < 2 * n_; ++i) apply_k_transpose(r, m[i]);
      // row mixing needs the old rows intact
      std::vector<std::vector<Rat>> old = m;
      for (Vertex u = 0; u < n_; ++u) {
        if (r.d_prev[u] <= 0) continue;
        Rat dp(r.d_prev[u]);
        Rat c = Rat(r.d_cur[u]) / dp;
        Rat recv_o = r.alpha<Rat>(u) * Rat(r.received[u]);
        Rat recv_x = Rat(r.received[u]) - recv_o;
        for (int j = 0; j < 2 * n_; ++j) {
          m[u][j] = c * old[u][j] - recv_o / 2 * old[u][j] / dp;
          m[n_ + u][j] = old[n_ + u][j] + (Rat(1) - c) * old[u][j] -
                         recv_x / 2 * old[u][j] / dp;
        }
      }
      for (const MatchEntry &me : r.entries) {
        Rat coef = Rat(me.amount) / (Rat(2) * Rat(r.d_prev[me.receiver]));
        Rat bo = r.beta<Rat>(me.sender);
        for (int j = 0; j < 2 * n_; ++j) {
          Rat base = coef * old[me.receiver][j];
          m[me.sender][j] += bo * base;
          m[n_ + me.sender][j] += (Rat(1) - bo) * base;
        }
      }
    }
    return m;
  }

  /// psi(t) (rows) or its column analogue, from the exact materialization.
  Rat potential(int t, bool columns) const {
    auto m = materialize(t);
    const Weighting &d = d_at(t);
    i64 dtot = 0;
    std::vector<Vertex> act;
    for (Vertex v = 0; v < n_; ++v)
      if (d[v] > 0) {
        act.push_back(v);
        dtot += d[v];
      }
    if (act.empty()) return Rat(0);
    auto entry = [&](Vertex u, Vertex v) -> const Rat & {
      return columns ? m[v][u] : m[u][v];
    };
    // mu(v) = sum_u F(u_o, v_o) / d(A)
    std::vector<Rat> mu(n_, Rat(0));
    for (Vertex v : act) {
      for (Vertex u : act) mu[v] += entry(u, v);
      mu[v] /= Rat(dtot);
    }
    Rat psi(0);
    for (Vertex u : act) {
      Rat inner(0);
      for (Vertex v : act) {
        Rat diff = entry(u, v) / Rat(d[u]) - mu[v];
        inner += diff * diff / Rat(d[v]);
      }
      psi += Rat(d[u]) * inner;
    }
    return psi;
  }

 private:
  int n_;
  Weighting d0_;
  std::vector<MatchingRound> rounds_;

  void check_rounds(int upto) const {
    if (upto < 0 || upto > rounds())
      throw contract_error("flow matrix: round index out of range");
  }

  template <typename S>
  void apply_diag(std::vector<S> &x) const {
    for (Vertex v = 0; v < n_; ++v) {
      x[v] = x[v] * S(d0_[v]);
      x[n_ + v] = S(0);
    }
  }

  // z = K_s * x : z(vo) = a x(vo) + (1-a) x(vx), z(vx) = x(vx)
  template <typename S>
  void apply_k(const MatchingRound &r, std::vector<S> &x) const {
    for (Vertex v = 0; v < n_; ++v) {
      if (r.d_prev[v] <= 0) continue;
      S a = S(r.d_cur[v]) / S(r.d_prev[v]);
      x[v] = a * x[v] + (S(1) - a) * x[n_ + v];
    }
  }

  // z = K_s^T * y : z(vo) = a y(vo), z(vx) = (1-a) y(vo) + y(vx)
  template <typename S>
  void apply_k_transpose(const MatchingRound &r, std::vector<S> &y) const {
    for (Vertex v = 0; v < n_; ++v) {
      if (r.d_prev[v] <= 0) continue;
      S a = S(r.d_cur[v]) / S(r.d_prev[v]);
      y[n_ + v] = (S(1) - a) * y[v] + y[n_ + v];
      y[v] = a * y[v];
    }
  }

  template <typename S>
  void apply_l(const MatchingRound &r, std::vector<S> &y) const {
    std::vector<S> out = y;
    for (Vertex u = 0; u < n_; ++u) {
      if (r.d_prev[u] <= 0) continue;
      S dp = S(r.d_prev[u]);
      S c = S(r.d_cur[u]) / dp;
      S recv_o = r.alpha<S>(u) * S(r.received[u]);
      S recv_x = S(r.received[u]) - recv_o;
      out[u] = c * y[u] - recv_o / S(2) * y[u] / dp;
      out[n_ + u] = y[n_ + u] + (S(1) - c) * y[u] - recv_x / S(2) * y[u] / dp;
    }
    for (const MatchEntry &me : r.entries) {
      S coef = S(me.amount) / (S(2) * S(r.d_prev[me.receiver]));
      S bo = r.beta<S>(me.sender);
      S base = coef * y[me.receiver];
      out[me.sender] += bo * base;
      out[n_ + me.sender] += (S(1) - bo) * base;
    }
    y = std::move(out);
  }

  template <typename S>
  void apply_l_transpose(const MatchingRound &r, std::vector<S> &x) const {
    std::vector<S> out = x;
    for (Vertex u = 0; u < n_; ++u) {
      if (r.d_prev[u] <= 0) continue;
      S dp = S(r.d_prev[u]);
      S c = S(r.d_cur[u]) / dp;
      S recv_o = r.alpha<S>(u) * S(r.received[u]);
      S recv_x = S(r.received[u]) - recv_o;
      out[u] = (c - recv_o / S(2) / dp) * x[u] +
               (S(1) - c - recv_x / S(2) / dp) * x[n_ + u];
      // x(vx) passes through with coefficient 1 (kept from the copy)
    }
    for (const MatchEntry &me : r.entries) {
      S coef = S(me.amount) / (S(2) * S(r.d_prev[me.receiver]));
      S bo = r.beta<S>(me.sender);
      out[me.receiver] +=
          coef * (bo * x[me.sender] + (S(1) - bo) * x[n_ + me.sender]);
    }
    x = std::move(out);
  }
};

}  // namespace exdec
