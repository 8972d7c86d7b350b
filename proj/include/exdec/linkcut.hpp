#pragma once

#include <cassert>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "exdec/graph.hpp"

namespace exdec {

struct structure_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct replay_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MinEdge {
  EdgeId edge;
  i64 weight;
  Vertex child;  // node whose parent edge attains the minimum
};

struct MinMark {
  EdgeId edge;
  int mark;
  Vertex child;
};

/// Reference forest: explicit parent array, O(depth) path walks. Kept for
/// differential tests against the splay version and as the replay engine.
class NaiveLinkCutForest {
 public:
  explicit NaiveLinkCutForest(int n)
      : parent_(n, -1), edge_(n, -1), w_(n, 0), mark_(n, 1) {}

  int size() const { return static_cast<int>(parent_.size()); }
  bool has_parent(Vertex u) const { return parent_[u] != -1; }

  Vertex find_root(Vertex u) const {
    while (parent_[u] != -1) u = parent_[u];
    return u;
  }

  void link(Vertex u, Vertex v, EdgeId e, i64 w, int mark = 1) {
    if (parent_[u] != -1) throw structure_error("link: child is not a root");
    if (find_root(v) == u) throw structure_error("link: same tree");
    parent_[u] = v;
    edge_[u] = e;
    w_[u] = w;
    mark_[u] = mark;
  }

  std::pair<EdgeId, i64> cut(Vertex u) {
    if (parent_[u] == -1) throw structure_error("cut: no parent edge");
    auto out = std::make_pair(edge_[u], w_[u]);
    parent_[u] = -1;
    edge_[u] = -1;
    return out;
  }

  void add_path(Vertex u, i64 delta) {
    for (Vertex x = u; parent_[x] != -1; x = parent_[x]) w_[x] += delta;
  }

  // Minimum parent-edge weight on the path u -> root; ties resolve to the
  // edge closer to the root.
  std::optional<MinEdge> find_min(Vertex u) const {
    std::optional<MinEdge> best;
    for (Vertex x = u; parent_[x] != -1; x = parent_[x])
      if (!best || w_[x] <= best->weight) best = MinEdge{edge_[x], w_[x], x};
    return best;
  }

  std::optional<MinMark> find_min_secondary(Vertex u) const {
    std::optional<MinMark> best;
    for (Vertex x = u; parent_[x] != -1; x = parent_[x])
      if (!best || mark_[x] <= best->mark) best = MinMark{edge_[x], mark_[x], x};
    return best;
  }

  std::pair<EdgeId, i64> parent_edge(Vertex u) const {
    if (parent_[u] == -1) throw structure_error("parent_edge: u is a root");
    return {edge_[u], w_[u]};
  }

  Vertex parent(Vertex u) const { return parent_[u]; }

 private:
  std::vector<Vertex> parent_;
  std::vector<EdgeId> edge_;
  std::vector<i64> w_;
  std::vector<int> mark_;
};

/// Splay-tree link-cut forest over rooted trees (no evert, no subtree
/// aggregates). Each node carries the weight and the boundary mark of its
/// parent edge; path queries aggregate over the exposed preferred path with
/// ties resolved toward the root.
class LinkCutForest {
 public:
  explicit LinkCutForest(int n) : nodes_(n) {}

  int size() const { return static_cast<int>(nodes_.size()); }
  bool has_parent(Vertex u) const { return nodes_[u].has_edge; }

  Vertex find_root(Vertex u) {
    expose(u);
    int x = u;
    push(x);
    while (nodes_[x].ch[0] != -1) {
      x = nodes_[x].ch[0];
      push(x);
    }
    splay(x);
    return x;
  }

  void link(Vertex u, Vertex v, EdgeId e, i64 w, int mark = 1) {
    if (nodes_[u].has_edge) throw structure_error("link: child is not a root");
    if (find_root(v) == u) throw structure_error("link: same tree");
    expose(u);
    Node &nu = nodes_[u];
    assert(nu.ch[0] == -1);
    nu.has_edge = true;
    nu.edge = e;
    nu.val = w;
    nu.mark = mark;
    pull(u);
    nu.fa = v;  // light edge; preferred paths re-form on demand
  }

  std::pair<EdgeId, i64> cut(Vertex u) {
    if (!nodes_[u].has_edge) throw structure_error("cut: no parent edge");
    expose(u);
    Node &nu = nodes_[u];
    int l = nu.ch[0];
    assert(l != -1);
    nodes_[l].fa = -1;
    nu.ch[0] = -1;
    auto out = std::make_pair(nu.edge, nu.val);
    nu.has_edge = false;
    nu.edge = -1;
    pull(u);
    return out;
  }

  void add_path(Vertex u, i64 delta) {
    expose(u);
    apply_add(u, delta);
  }

  std::optional<MinEdge> find_min(Vertex u) {
    expose(u);
    const Node &nu = nodes_[u];
    if (!nu.agg_has) return std::nullopt;
    return MinEdge{nodes_[nu.agg_arg].edge, nu.agg_min, nu.agg_arg};
  }

  std::optional<MinMark> find_min_secondary(Vertex u) {
    expose(u);
    const Node &nu = nodes_[u];
    if (!nu.agg2_has) return std::nullopt;
    return MinMark{nodes_[nu.agg2_arg].edge, nu.agg2_min, nu.agg2_arg};
  }

  std::pair<EdgeId, i64> parent_edge(Vertex u) {
    if (!nodes_[u].has_edge) throw structure_error("parent_edge: u is a root");
    expose(u);
    return {nodes_[u].edge, nodes_[u].val};
  }

 private:
  struct Node {
    int ch[2] = {-1, -1};
    int fa = -1;
    bool has_edge = false;
    EdgeId edge = -1;
    i64 val = 0;
    int mark = 1;
    i64 lazy = 0;
    bool agg_has = false;
    i64 agg_min = 0;
    int agg_arg = -1;
    bool agg2_has = false;
    int agg2_min = 0;
    int agg2_arg = -1;
  };

  std::vector<Node> nodes_;

  bool is_splay_root(int x) const {
    int f = nodes_[x].fa;
    return f == -1 || (nodes_[f].ch[0] != x && nodes_[f].ch[1] != x);
  }

  void apply_add(int x, i64 delta) {
    if (x == -1) return;
    Node &n = nodes_[x];
    if (n.has_edge) n.val += delta;
    if (n.agg_has) n.agg_min += delta;
    n.lazy += delta;
  }

  void push(int x) {
    Node &n = nodes_[x];
    if (n.lazy != 0) {
      apply_add(n.ch[0], n.lazy);
      apply_add(n.ch[1], n.lazy);
      n.lazy = 0;
    }
  }

  // In-order position encodes depth: left means closer to the tree root, so
  // taking the leftmost minimum implements the tie-toward-root rule.
  void pull(int x) {
    Node &n = nodes_[x];
    n.agg_has = false;
    n.agg2_has = false;
    auto consider = [&](bool has, i64 v, int arg) {
      if (!has) return;
      if (!n.agg_has || v < n.agg_min) {
        n.agg_has = true;
        n.agg_min = v;
        n.agg_arg = arg;
      }
    };
    auto consider2 = [&](bool has, int v, int arg) {
      if (!has) return;
      if (!n.agg2_has || v < n.agg2_min) {
        n.agg2_has = true;
        n.agg2_min = v;
        n.agg2_arg = arg;
      }
    };
    if (n.ch[0] != -1) {
      const Node &l = nodes_[n.ch[0]];
      consider(l.agg_has, l.agg_min, l.agg_arg);
      consider2(l.agg2_has, l.agg2_min, l.agg2_arg);
    }
    consider(n.has_edge, n.val, x);
    consider2(n.has_edge, n.mark, x);
    if (n.ch[1] != -1) {
      const Node &r = nodes_[n.ch[1]];
      consider(r.agg_has, r.agg_min, r.agg_arg);
      consider2(r.agg2_has, r.agg2_min, r.agg2_arg);
    }
  }

  void rotate(int x) {
    int p = nodes_[x].fa;
    int g = nodes_[p].fa;
    int side = nodes_[p].ch[1] == x;
    int b = nodes_[x].ch[side ^ 1];
    if (!is_splay_root(p)) nodes_[g].ch[nodes_[g].ch[1] == p] = x;
    nodes_[x].fa = g;
    nodes_[p].ch[side] = b;
    if (b != -1) nodes_[b].fa = p;
    nodes_[x].ch[side ^ 1] = p;
    nodes_[p].fa = x;
    pull(p);
    pull(x);
  }

  void splay(int x) {
    // push pending adds from the splay root down to x first
    static thread_local std::vector<int> stack;
    stack.clear();
    int y = x;
    stack.push_back(y);
    while (!is_splay_root(y)) {
      y = nodes_[y].fa;
      stack.push_back(y);
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) push(*it);
    while (!is_splay_root(x)) {
      int p = nodes_[x].fa;
      if (!is_splay_root(p)) {
        int g = nodes_[p].fa;
        if ((nodes_[g].ch[1] == p) == (nodes_[p].ch[1] == x))
          rotate(p);
        else
          rotate(x);
      }
      rotate(x);
    }
  }

  void expose(int u) {
    int last = -1;
    for (int x = u; x != -1; x = nodes_[x].fa) {
      splay(x);
      nodes_[x].ch[1] = last;
      if (last != -1) nodes_[last].fa = x;
      pull(x);
      last = x;
    }
    splay(u);
  }
};

/// Record of one path-decomposition run over a host graph: enough to replay
/// the same forest-state sequence later with fresh secondary marks. Edge ids
/// refer to the host graph, not to forest internals.
struct TranscriptOp {
  enum Kind { kLink, kCut, kAddPath, kEmit } kind;
  Vertex u = -1;
  Vertex v = -1;    // link target
  EdgeId edge = -1; // link: host edge id
  i64 amount = 0;   // link: initial weight; add: delta; emit: path amount
  Vertex root = -1; // emit: recorded sink endpoint
};

struct Transcript {
  int n = 0;
  std::vector<TranscriptOp> ops;
  bool sealed = false;

  void record_link(Vertex u, Vertex v, EdgeId e, i64 w) {
    ops.push_back({TranscriptOp::kLink, u, v, e, w, -1});
  }
  void record_cut(Vertex u) {
    ops.push_back({TranscriptOp::kCut, u, -1, -1, 0, -1});
  }
  void record_add(Vertex u, i64 delta) {
    ops.push_back({TranscriptOp::kAddPath, u, -1, -1, delta, -1});
  }
  void record_emit(Vertex u, Vertex root, i64 amount) {
    ops.push_back({TranscriptOp::kEmit, u, -1, -1, amount, root});
  }
  void seal() { sealed = true; }
};

struct PathCrossing {
  Vertex src;
  Vertex dst;
  i64 amount;
  bool crosses;
};

/// Re-executes the transcript on a fresh forest whose secondary marks are 0
/// exactly on `tagged` edges; just before each recorded emission, queries
/// whether the emitted path uses a tagged edge. The emitted (endpoints,
/// amount) sequence must match the original run.
template <typename Forest = LinkCutForest>
std::vector<PathCrossing> replay_crossings(const Transcript &t,
                                           const std::vector<char> &tagged) {
  Forest f(t.n);
  std::vector<PathCrossing> out;
  for (const TranscriptOp &op : t.ops) {
    switch (op.kind) {
      case TranscriptOp::kLink: {
        if (op.edge < 0 || op.edge >= static_cast<EdgeId>(tagged.size()))
          throw replay_error("transcript references unknown edge");
        int mark = tagged[op.edge] ? 0 : 1;
        f.link(op.u, op.v, op.edge, op.amount, mark);
        break;
      }
      case TranscriptOp::kCut:
        f.cut(op.u);
        break;
      case TranscriptOp::kAddPath:
        f.add_path(op.u, op.amount);
        break;
      case TranscriptOp::kEmit: {
        Vertex root = f.find_root(op.u);
        if (root != op.root)
          throw replay_error("replayed path endpoint mismatch");
        auto m2 = f.find_min_secondary(op.u);
        bool crosses = m2.has_value() && m2->mark == 0;
        out.push_back({op.u, root, op.amount, crosses});
        break;
      }
    }
  }
  return out;
}

}  // namespace exdec
