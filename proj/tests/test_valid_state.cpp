#include <catch2/catch_amalgamated.hpp>

#include "exdec/maxflow.hpp"
#include "exdec/valid_state.hpp"
#include "testutil.hpp"

using namespace exdec;

namespace {

// nabla must dominate the degree; build instances that satisfy it
struct PprFixture {
  Graph g;
  Weighting delta, nabla, deg;
  i64 h;
};

PprFixture random_fixture(Prng &rng, int max_n) {
  PprFixture f;
  f.g = testutil::random_graph(rng, max_n, 3 * max_n, 4);
  f.deg = degree_weighting(f.g);
  f.delta.assign(f.g.n(), 0);
  f.nabla.assign(f.g.n(), 0);
  for (Vertex v = 0; v < f.g.n(); ++v) {
    f.nabla[v] = f.deg[v] + static_cast<i64>(rng.next_below(4));
    f.delta[v] = static_cast<i64>(rng.next_below(f.nabla[v] + 3));
  }
  f.h = 6 + static_cast<i64>(rng.next_below(30));
  return f;
}

// From-scratch verdict for the cumulative instance on the remaining set:
// all source routable iff max-flow saturates it.
bool from_scratch_feasible(const Graph &g, const std::vector<char> &alive,
                           const Weighting &delta, const Weighting &nabla) {
  Graph live(g.n());
  for (const Edge &e : g.edges())
    if (alive[e.tail] && alive[e.head]) live.add_edge(e.tail, e.head, e.cap);
  Weighting src(g.n(), 0), snk(g.n(), 0);
  i64 total = 0;
  for (Vertex v = 0; v < g.n(); ++v)
    if (alive[v]) {
      src[v] = delta[v];
      snk[v] = nabla[v];
      total += delta[v];
    }
  return exact_max_flow(live, src, snk).value == total;
}

}  // namespace

TEST_CASE("valid state initialisation") {
  for (bool lct : {false, true}) {
    Graph g(3);
    g.add_edge(0, 1, 2);
    g.add_edge(1, 2, 2);
    Weighting deg = degree_weighting(g);

    // zero sources: nothing moves
    ValidState zero(g, Weighting(3, 0), deg, 5, deg, lct);
    CHECK_FALSE(zero.has_positive_excess());
    for (Vertex v = 0; v < 3; ++v) CHECK(zero.level()[v] == 0);
    CHECK(zero.check_valid_state());

    // source below the local sink: absorbed in place
    Weighting delta = {1, 0, 0};
    ValidState local(g, delta, deg, 5, deg, lct);
    CHECK_FALSE(local.has_positive_excess());
    CHECK(local.level()[0] == 0);
    CHECK(local.absorbed(0) == 1);
    CHECK(local.check_valid_state());

    // sink domination is a contract
    Weighting small = deg;
    small[1] = deg[1] - 1;
    CHECK_THROWS_AS(ValidState(g, delta, small, 5, deg, lct), contract_error);
  }
}

TEST_CASE("increase source") {
  for (bool lct : {false, true}) {
    Graph g(2);
    g.add_edge(0, 1, 3);
    Weighting deg = degree_weighting(g);
    ValidState st(g, Weighting(2, 0), deg, 8, deg, lct);
    st.increase_source(0, 0);
    CHECK(st.check_valid_state());
    CHECK_FALSE(st.has_positive_excess());

    st.increase_source(0, 2);  // fits in the local sink
    CHECK(st.level()[0] == 0);
    CHECK(st.absorbed(0) == 2);

    st.increase_source(0, 4);  // must route across the edge
    CHECK(st.check_valid_state());
    CHECK_FALSE(st.has_positive_excess());

    st.increase_source(0, 100);  // cannot all fit: sticks at h
    CHECK(st.check_valid_state());
    CHECK(st.has_positive_excess());
    CHECK(st.level()[0] == 8);

    st.remove_vertices({1});
    CHECK_THROWS_AS(st.increase_source(1, 1), contract_error);
  }
}

TEST_CASE("remove vertices hand-simulated path") {
  for (bool lct : {false, true}) {
    // u -> v -> w carrying one unit; removing u leaves v in debt, which the
    // pull pass resolves against v's own sink slack
    Graph g(3);
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 1);
    Weighting deg = degree_weighting(g);
    Weighting delta = {3, 0, 0};  // deg[0] = 1... use sink = deg
    ValidState st(g, {1, 0, 0}, {1, 2, 1}, 6, deg, lct);
    // route the unit to w: source 1 at u; sink at u is 1 though, so it is
    // absorbed locally. Instead inject 2: one absorbed at u, one at v.
    st.increase_source(0, 1);
    CHECK_FALSE(st.has_positive_excess());
    CHECK(st.check_valid_state());
    i64 routed = st.flow()[0];
    CHECK(routed == 1);

    st.remove_vertices({0});
    CHECK(st.check_valid_state());
    CHECK(st.is_active(1));
    CHECK_FALSE(st.is_active(0));
    // the unit that arrived from u became a negative unit at v
    CHECK(st.n()[1] == 3);
    (void)delta;
  }
}

TEST_CASE("removal with no incident flow creates no excess") {
  for (bool lct : {false, true}) {
    Graph g(4);
    g.add_edge(0, 1, 2);
    g.add_edge(2, 3, 2);
    Weighting deg = degree_weighting(g);
    ValidState st(g, {1, 0, 0, 0}, deg, 5, deg, lct);
    auto p_before = st.p();
    auto n_before = st.n();
    st.remove_vertices({2});
    CHECK(st.p()[0] == p_before[0]);
    CHECK(st.n()[1] == n_before[1]);
    CHECK(st.check_valid_state());
  }
}

TEST_CASE("pull relabel no-op without negative excess") {
  Graph g(2);
  g.add_edge(0, 1, 1);
  Weighting deg = degree_weighting(g);
  ValidState st(g, {1, 0}, deg, 4, deg, false);
  auto lv = st.level();
  st.pull_relabel();
  CHECK(st.level() == lv);
}

TEST_CASE("random interleavings match from-scratch solves") {
  Prng rng(71);
  for (int it = 0; it < 100; ++it) {
    PprFixture f = random_fixture(rng, 12);
    bool lct = it % 2 == 0;
    ValidState st(f.g, f.delta, f.nabla, 40, f.deg, lct);
    std::vector<char> alive(f.g.n(), 1);
    Weighting cum = f.delta;
    int live_count = f.g.n();

    REQUIRE(st.check_valid_state());
    for (int step = 0; step < 12 && live_count > 1; ++step) {
      if (rng.next_below(2)) {
        Vertex v;
        do {
          v = static_cast<Vertex>(rng.next_below(f.g.n()));
        } while (!alive[v]);
        i64 d = static_cast<i64>(rng.next_below(6));
        st.increase_source(v, d);
        cum[v] += d;
      } else {
        std::vector<Vertex> s;
        for (Vertex v = 0; v < f.g.n() && s.empty(); ++v)
          if (alive[v] && rng.next_below(4) == 0 && live_count > 1)
            s.push_back(v);
        if (s.empty()) continue;
        st.remove_vertices(s);
        for (Vertex v : s) {
          alive[v] = 0;
          live_count--;
        }
      }
      REQUIRE(st.check_valid_state());

      // min(p, n) is non-decreasing over time per vertex is checked by the
      // flip-number machinery; here check the final verdicts agree
    }
    bool scratch = from_scratch_feasible(f.g, alive, cum, f.nabla);
    CHECK(!st.has_positive_excess() == scratch);

    // measured flip numbers obey the claim bound with constant 4
    auto &stats = st.stats();
    for (Vertex v = 0; v < f.g.n(); ++v) {
      if (!alive[v] || f.nabla[v] == 0) continue;
      CHECK(stats.flips[v] <= 4 * st.n()[v] / f.nabla[v] + 2);
    }
  }
}

TEST_CASE("min(p,n) monotonicity under operations") {
  Prng rng(73);
  for (int it = 0; it < 30; ++it) {
    PprFixture f = random_fixture(rng, 8);
    ValidState st(f.g, f.delta, f.nabla, 25, f.deg, it % 2 == 0);
    std::vector<i64> floor_val(f.g.n());
    for (Vertex v = 0; v < f.g.n(); ++v)
      floor_val[v] = std::min(st.p()[v], st.n()[v]);
    std::vector<char> alive(f.g.n(), 1);
    int live = f.g.n();
    for (int step = 0; step < 8 && live > 1; ++step) {
      if (rng.next_below(2)) {
        Vertex v;
        do {
          v = static_cast<Vertex>(rng.next_below(f.g.n()));
        } while (!alive[v]);
        st.increase_source(v, static_cast<i64>(rng.next_below(5)));
      } else {
        Vertex v = -1;
        for (Vertex w = 0; w < f.g.n(); ++w)
          if (alive[w] && rng.next_below(3) == 0) {
            v = w;
            break;
          }
        if (v == -1) continue;
        st.remove_vertices({v});
        alive[v] = 0;
        live--;
      }
      for (Vertex v = 0; v < f.g.n(); ++v) {
        if (!alive[v]) continue;
        i64 cur = std::min(st.p()[v], st.n()[v]);
        CHECK(cur >= floor_val[v]);
        floor_val[v] = cur;
      }
    }
  }
}

TEST_CASE("feasible flow routes surviving sources exactly") {
  Prng rng(79);
  int found = 0;
  for (int it = 0; it < 60; ++it) {
    PprFixture f = random_fixture(rng, 9);
    ValidState st(f.g, f.delta, f.nabla, 50, f.deg, true);
    if (rng.next_below(2) && f.g.n() > 2) {
      st.remove_vertices({0});
    }
    auto flow = st.feasibility();
    if (!flow) continue;
    found++;
    // conservation scan: net outflow == routed source - absorbed portion,
    // all within capacities, zero on removed vertices
    for (EdgeId e = 0; e < f.g.m(); ++e) {
      CHECK((*flow)[e] >= 0);
      CHECK((*flow)[e] <= f.g.edge(e).cap);
      if (!st.is_active(f.g.edge(e).tail) || !st.is_active(f.g.edge(e).head))
        CHECK((*flow)[e] == 0);
    }
    for (Vertex v = 0; v < f.g.n(); ++v) {
      if (!st.is_active(v)) continue;
      i64 in = 0, out = 0;
      for (EdgeId e : f.g.in(v)) in += (*flow)[e];
      for (EdgeId e : f.g.out(v)) out += (*flow)[e];
      i64 net = out - in;
      // sources send at most their strength, nothing overfills the sink
      CHECK(net <= st.source()[v]);
      CHECK(-net <= st.sink()[v]);
    }
  }
  CHECK(found >= 20);
}

TEST_CASE("plain and link-cut variants agree on verdicts") {
  Prng rng(83);
  for (int it = 0; it < 40; ++it) {
    PprFixture f = random_fixture(rng, 10);
    ValidState a(f.g, f.delta, f.nabla, 30, f.deg, false);
    ValidState b(f.g, f.delta, f.nabla, 30, f.deg, true);
    std::vector<char> alive(f.g.n(), 1);
    int live = f.g.n();
    for (int step = 0; step < 6 && live > 1; ++step) {
      if (rng.next_below(2)) {
        Vertex v;
        do {
          v = static_cast<Vertex>(rng.next_below(f.g.n()));
        } while (!alive[v]);
        i64 d = static_cast<i64>(rng.next_below(7));
        a.increase_source(v, d);
        b.increase_source(v, d);
      } else {
        Vertex v = -1;
        for (Vertex w = 0; w < f.g.n(); ++w)
          if (alive[w] && rng.next_below(3) == 0) {
            v = w;
            break;
          }
        if (v == -1) continue;
        a.remove_vertices({v});
        b.remove_vertices({v});
        alive[v] = 0;
        live--;
      }
      CHECK(a.has_positive_excess() == b.has_positive_excess());
      REQUIRE(a.check_valid_state());
      REQUIRE(b.check_valid_state());
    }
  }
}
