#include <catch2/catch_amalgamated.hpp>

#include "exdec/flow_matrix.hpp"
#include "exdec/prng.hpp"

using namespace exdec;

namespace {

// Perfect round: every vertex of L trades its full weight with its partner
// in R, in both directions.
MatchingRound perfect_round(const Weighting &d,
                            const std::vector<std::pair<Vertex, Vertex>> &pairs) {
  MatchingRound r;
  r.d_prev = d;
  r.d_cur = d;
  int n = static_cast<int>(d.size());
  r.received.assign(n, 0);
  r.sent.assign(n, 0);
  for (auto [a, b] : pairs) {
    REQUIRE(d[a] == d[b]);
    r.entries.push_back({b, a, d[a]});
    r.entries.push_back({a, b, d[b]});
    r.received[a] += d[b];
    r.received[b] += d[a];
    r.sent[a] += d[a];
    r.sent[b] += d[b];
  }
  return r;
}

void check_sum_of_flow(const FlowMatrixImplicit &fm, int t) {
  auto m = fm.materialize(t);
  const Weighting &d = fm.d_at(t);
  const int n = fm.n();
  const Weighting &d0 = fm.d_at(0);
  for (Vertex u = 0; u < n; ++u) {
    Rat row(0), col(0), rowx(0), colx(0);
    for (int j = 0; j < 2 * n; ++j) {
      row += m[u][j];
      col += m[j][u];
      rowx += m[n + u][j];
      colx += m[j][n + u];
    }
    if (d[u] > 0) {
      CHECK(row == Rat(d[u]));
      CHECK(col == Rat(d[u]));
    }
    // deleted halves: row sum at most 3(d0 - d)/2, column sum exactly d0 - d
    CHECK(colx == Rat(d0[u] - d[u]));
    CHECK(rowx <= Rat(3) * Rat(d0[u] - d[u]) / Rat(2));
  }
}

}  // namespace

TEST_CASE("round zero materializes the weight diagonal") {
  Weighting d = {3, 5, 0, 2};
  FlowMatrixImplicit fm(d);
  auto m = fm.materialize(0);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(m[i][j] == ((i == j && i < 4) ? Rat(d[i]) : Rat(0)));
  CHECK(fm.potential(0, false) >= Rat(0));
}

TEST_CASE("perfect rounds preserve the flow sums") {
  Weighting d = {2, 2, 2, 2};
  FlowMatrixImplicit fm(d);
  fm.append(perfect_round(d, {{0, 2}, {1, 3}}));
  fm.append(perfect_round(d, {{0, 1}, {2, 3}}));
  check_sum_of_flow(fm, 1);
  check_sum_of_flow(fm, 2);

  // all mass keeps circulating among active halves
  auto m = fm.materialize(2);
  for (int j = 4; j < 8; ++j)
    for (int i = 0; i < 8; ++i) CHECK(m[i][j] == Rat(0));
}

TEST_CASE("partial deletion round satisfies the split identities") {
  // 0 sends 3 but receives only 2; 1 sends 2 but receives 3. Both end with
  // d_cur = 2 (the minimum of sent and received), staying above d/2.
  Weighting d = {3, 3};
  FlowMatrixImplicit fm(d);
  MatchingRound r;
  r.d_prev = d;
  r.d_cur = {2, 2};
  r.entries = {{1, 0, 3}, {0, 1, 2}};  // 0 sends 3 to 1; 1 sends 2 to 0
  r.received = {2, 3};
  r.sent = {3, 2};
  // sender 0 over-sent: beta(0) = 2/3 puts one third of its mass on 0x
  CHECK(r.split({1, 0, 3}, 0, 0) == Rat(4) / Rat(3));  // 3 * alpha(1) * beta(0)
  CHECK(r.split({1, 0, 3}, 1, 0) == Rat(2) / Rat(3));
  CHECK(r.split({1, 0, 3}, 0, 1) == Rat(2) / Rat(3));
  CHECK(r.split({1, 0, 3}, 1, 1) == Rat(1) / Rat(3));
  // the four split entries add back to the M entry
  Rat total = r.split({1, 0, 3}, 0, 0) + r.split({1, 0, 3}, 0, 1) +
              r.split({1, 0, 3}, 1, 0) + r.split({1, 0, 3}, 1, 1);
  CHECK(total == Rat(3));
  // column identity: what the active half of 0 sends equals d_cur(0)
  Rat sent0 = r.split({1, 0, 3}, 0, 0) + r.split({1, 0, 3}, 1, 0);
  CHECK(sent0 == Rat(r.d_cur[0]));
  fm.append(r);
  check_sum_of_flow(fm, 1);
}

TEST_CASE("implicit products match the materialization") {
  Prng rng(91);
  const int n = 5;
  Weighting d = {4, 4, 4, 4, 4};
  FlowMatrixImplicit fm(d);
  // a few rounds with random partial reductions
  Weighting cur = d;
  for (int t = 0; t < 4; ++t) {
    MatchingRound r;
    r.d_prev = cur;
    r.received.assign(n, 0);
    r.sent.assign(n, 0);
    r.d_cur.assign(n, 0);
    // pair up actives arbitrarily; route a random sub-amount both ways
    std::vector<Vertex> act;
    for (Vertex v = 0; v < n; ++v)
      if (cur[v] > 0) act.push_back(v);
    for (size_t i = 0; i + 1 < act.size(); i += 2) {
      Vertex a = act[i], b = act[i + 1];
      i64 m1 = 1 + static_cast<i64>(rng.next_below(std::min(cur[a], cur[b])));
      i64 m2 = 1 + static_cast<i64>(rng.next_below(std::min(cur[a], cur[b])));
      r.entries.push_back({b, a, m1});  // a sends m1 to b
      r.entries.push_back({a, b, m2});
      r.sent[a] += m1;
      r.received[b] += m1;
      r.sent[b] += m2;
      r.received[a] += m2;
    }
    for (Vertex v = 0; v < n; ++v) {
      i64 dv = std::min(r.sent[v], r.received[v]);
      if (2 * dv < d[v]) dv = 0;  // half-threshold against the original d
      r.d_cur[v] = dv;
    }
    fm.append(r);
    cur = r.d_cur;
  }

  for (int t = 0; t <= fm.rounds(); ++t) {
    auto m = fm.materialize(t);
    std::vector<Rat> x(2 * n);
    for (int i = 0; i < 2 * n; ++i)
      x[i] = make_rat(static_cast<i64>(rng.next_below(9)) - 4, 3);
    auto y = fm.multiply<Rat>(x, t);
    auto yt = fm.multiply_transpose<Rat>(x, t);
    for (int i = 0; i < 2 * n; ++i) {
      Rat want(0), wantt(0);
      for (int j = 0; j < 2 * n; ++j) {
        want += m[i][j] * x[j];
        wantt += m[j][i] * x[j];
      }
      CHECK(y[i] == want);
      CHECK(yt[i] == wantt);
    }
    check_sum_of_flow(fm, t);
  }

  // potentials: non-negative, and double products track rational ones
  for (int t = 0; t <= fm.rounds(); ++t) {
    CHECK(fm.potential(t, false) >= Rat(0));
    CHECK(fm.potential(t, true) >= Rat(0));
  }
  std::vector<double> xd(2 * n, 0.0);
  std::vector<Rat> xr(2 * n, Rat(0));
  xd[1] = 1.25;
  xr[1] = make_rat(5, 4);
  auto yd = fm.multiply<double>(xd, fm.rounds());
  auto yr = fm.multiply<Rat>(xr, fm.rounds());
  for (int i = 0; i < 2 * n; ++i)
    CHECK(std::abs(yd[i] - rat_to_double(yr[i])) < 1e-9);
}
