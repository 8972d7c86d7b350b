#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "exdec/graph.hpp"
#include "exdec/io.hpp"
#include "exdec/prng.hpp"

using namespace exdec;

namespace {

Graph three_cycle() {
  Graph g(3);
  g.add_edge(0, 1, 1);
  g.add_edge(1, 2, 1);
  g.add_edge(2, 0, 1);
  return g;
}

Graph bidirected_clique(int n, i64 cap = 1) {
  Graph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) g.add_edge(u, v, cap);
  return g;
}

}  // namespace

TEST_CASE("weighted degree") {
  Graph g = three_cycle();
  for (Vertex v = 0; v < 3; ++v) CHECK(degree_weighted(g, v) == 2);

  Graph h(2);
  h.add_edge(0, 1, 5);
  CHECK(degree_weighted(h, 0) == 5);

  Graph iso(1);
  CHECK(degree_weighted(iso, 0) == 0);
  CHECK_THROWS_AS(degree_weighted(iso, 3), input_error);
}

TEST_CASE("cut capacity") {
  Graph g = three_cycle();
  CHECK(cut_capacity(g, {0}, {1, 2}) == 1);

  Graph dag(2);
  dag.add_edge(0, 1, 1);
  CHECK(cut_capacity(dag, {1}, {0}) == 0);

  Graph k3 = bidirected_clique(3);
  CHECK(cut_capacity(k3, {0}, {1, 2}) == 2);
  CHECK(cut_capacity(g, {}, {0, 1, 2}) == 0);
}

TEST_CASE("conductance") {
  Graph g = three_cycle();
  Weighting d = degree_weighting(g);
  CHECK(conductance(g, d, {0}) == make_rat(1, 2));
  CHECK(conductance(g, d, std::vector<Vertex>{0}) == conductance(g, d, std::vector<Vertex>{1, 2}));

  Graph dag(2);
  dag.add_edge(0, 1, 3);
  CHECK(conductance(dag, degree_weighting(dag), std::vector<Vertex>{0}) == Rat(0));

  CHECK_THROWS_AS(conductance(g, d, std::vector<Vertex>{}),
                  degenerate_cut_error);
  Weighting zeros(3, 0);
  CHECK_THROWS_AS(conductance(g, zeros, std::vector<Vertex>{0}), zero_weight_error);
}

TEST_CASE("conductance complement symmetry on random graphs") {
  Prng rng(13);
  for (int it = 0; it < 30; ++it) {
    int n = 3 + static_cast<int>(rng.next_below(6));
    Graph g(n);
    int m = n + static_cast<int>(rng.next_below(static_cast<uint64_t>(2 * n)));
    for (int i = 0; i < m; ++i) {
      int u = static_cast<int>(rng.next_below(n));
      int v = static_cast<int>(rng.next_below(n));
      if (u == v) continue;
      g.add_edge(u, v, 1 + static_cast<i64>(rng.next_below(8)));
    }
    if (g.m() == 0) continue;
    Weighting d = degree_weighting(g);
    std::vector<Vertex> s;
    std::vector<Vertex> cs;
    for (Vertex v = 0; v < n; ++v) (rng.next_below(2) ? s : cs).push_back(v);
    if (s.empty() || cs.empty()) continue;
    if (weight_sum(d, s) == 0 || weight_sum(d, cs) == 0) continue;
    CHECK(conductance(g, d, s) == conductance(g, d, cs));
  }
}

TEST_CASE("regularized weighting") {
  SECTION("unit capacities give twice the degree") {
    Graph g = three_cycle();
    auto r = regularized_weighting_scaled(g);
    Weighting deg = degree_weighting(g);
    REQUIRE(r.scale == 1);
    for (Vertex v = 0; v < g.n(); ++v) CHECK(r.scaled[v] == 2 * deg[v]);
  }
  SECTION("single edge of capacity five") {
    Graph g(2);
    g.add_edge(0, 1, 5);
    auto r = regularized_weighting_scaled(g);
    REQUIRE(r.scale == 1);
    CHECK(r.scaled[0] == 10);
    CHECK(r.scaled[1] == 10);
  }
  SECTION("total is exactly twice the weighted volume") {
    Prng rng(99);
    for (int it = 0; it < 25; ++it) {
      int n = 2 + static_cast<int>(rng.next_below(7));
      Graph g(n);
      int m = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(3 * n)));
      for (int i = 0; i < m; ++i) {
        int u = static_cast<int>(rng.next_below(n));
        int v = static_cast<int>(rng.next_below(n));
        if (u != v) g.add_edge(u, v, 1 + static_cast<i64>(rng.next_below(16)));
      }
      if (g.m() == 0) continue;
      auto r = regularized_weighting_scaled(g);
      i64 deg_total = weight_sum(degree_weighting(g));
      CHECK(weight_sum(r.scaled) == r.scale * 2 * deg_total);
      // pointwise domination of the weighted degree
      Weighting deg = degree_weighting(g);
      for (Vertex v = 0; v < n; ++v)
        CHECK(r.scaled[v] >= r.scale * deg[v]);
    }
  }
  SECTION("edgeless graph is rejected") {
    Graph g(3);
    CHECK_THROWS_AS(regularized_weighting(g), input_error);
  }
}

TEST_CASE("induced subgraph and reverse") {
  Graph g = three_cycle();
  Subgraph all = induced_subgraph(g, {0, 1, 2});
  CHECK(all.graph.n() == 3);
  CHECK(all.graph.m() == 3);

  Subgraph sub = induced_subgraph(g, {0, 1});
  REQUIRE(sub.graph.m() == 1);
  CHECK(sub.graph.edge(0).tail == sub.from_parent[0]);
  CHECK(sub.graph.edge(0).head == sub.from_parent[1]);
  CHECK(sub.edge_to_parent[0] == 0);

  Subgraph empty = induced_subgraph(g, {});
  CHECK(empty.graph.n() == 0);
  CHECK(empty.graph.m() == 0);

  // nested induction equals direct induction under id translation
  Graph k4 = bidirected_clique(4, 2);
  Subgraph s1 = induced_subgraph(k4, {0, 1, 3});
  std::vector<Vertex> inner = {s1.from_parent[0], s1.from_parent[3]};
  Subgraph s2 = induced_subgraph(s1.graph, inner);
  Subgraph direct = induced_subgraph(k4, {0, 3});
  REQUIRE(s2.graph.n() == direct.graph.n());
  REQUIRE(s2.graph.m() == direct.graph.m());
  for (Vertex v = 0; v < s2.graph.n(); ++v)
    CHECK(s1.to_parent[s2.to_parent[v]] == direct.to_parent[v]);

  Graph dag(2);
  dag.add_edge(0, 1, 4);
  Graph rev = reverse(dag);
  CHECK(rev.edge(0).tail == 1);
  CHECK(rev.edge(0).head == 0);
  Graph rr = reverse(rev);
  CHECK(rr.edge(0).tail == 0);
  CHECK(rr.edge(0).head == 1);
}

TEST_CASE("edge list io") {
  std::istringstream in(
      "# comment\n"
      "p 4 3\n"
      "0 1 2\n"
      "1 2 1\n"
      "\n"
      "3 0 5\n");
  Graph g = read_edge_list(in);
  CHECK(g.n() == 4);
  CHECK(g.m() == 3);
  CHECK(g.edge(2).cap == 5);

  std::istringstream bad("0 0 1\n");
  CHECK_THROWS_AS(read_edge_list(bad), parse_error);
  std::istringstream bad2("0 1 x\n");
  CHECK_THROWS_AS(read_edge_list(bad2), parse_error);

  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream back(out.str());
  Graph g2 = read_edge_list(back);
  CHECK(g2.n() == g.n());
  CHECK(g2.m() == g.m());
}
