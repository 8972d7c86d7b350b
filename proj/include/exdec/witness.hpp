#pragma once

#include <vector>

#include "exdec/flow_decompose.hpp"
#include "exdec/graph.hpp"
#include "exdec/linkcut.hpp"

namespace exdec {

/// One matching (or grafting) round's contribution to the witness: the path
/// decomposition transcript plus the matched portion of each emitted path.
/// Edge ids and endpoints are in the host graph's id space; `reversed` marks
/// grafting passes run on the reversed graph, whose paths traverse host
/// edges against their orientation.
struct WitnessRound {
  Transcript transcript;
  std::vector<PathItem> paths;       // every emission, transcript order
  std::vector<i64> matched_portion;  // witness capacity per emission
  std::vector<i64> flow_snapshot;    // per host edge, the decomposed flow
  bool reversed = false;
};

/// Witness (W, Pi): edges (src, dst, portion) per round embedded as flow
/// paths held implicitly by the transcripts.
struct Witness {
  int n = 0;
  i64 capacity_scale = 1;  // per-round embedding congestion bound
  std::vector<WitnessRound> rounds;
};

/// deg_W(v): total witness capacity incident to each vertex.
inline Weighting witness_degrees(const Witness &w) {
  Weighting deg(w.n, 0);
  for (const WitnessRound &r : w.rounds)
    for (size_t i = 0; i < r.paths.size(); ++i) {
      if (r.matched_portion[i] == 0) continue;
      deg[r.paths[i].src] += r.matched_portion[i];
      deg[r.paths[i].dst] += r.matched_portion[i];
    }
  return deg;
}

/// For every witness edge whose embedded path uses a tagged host edge, add
/// 100 x its capacity to each endpoint lying in `restrict_to`. Computed by
/// replaying each round's transcript against the tag marks.
inline Weighting crossing_sources(const Witness &w,
                                  const std::vector<char> &tagged,
                                  const std::vector<char> &restrict_to) {
  Weighting src(w.n, 0);
  for (const WitnessRound &r : w.rounds) {
    auto crossings = replay_crossings(r.transcript, tagged);
    size_t emit = 0;
    for (const PathCrossing &pc : crossings) {
      i64 portion = r.matched_portion[emit];
      emit++;
      if (!pc.crosses || portion == 0) continue;
      if (restrict_to[pc.src]) src[pc.src] += 100 * portion;
      if (pc.dst != pc.src && restrict_to[pc.dst]) src[pc.dst] += 100 * portion;
    }
  }
  return src;
}

/// Per-host-edge embedding load of the witness (test oracle; recomputed from
/// the flow snapshots, which the transcripts decompose exactly).
inline std::vector<i64> witness_edge_load(const Graph &host,
                                          const Witness &w) {
  std::vector<i64> load(host.m(), 0);
  for (const WitnessRound &r : w.rounds)
    for (EdgeId e = 0; e < host.m(); ++e) load[e] += r.flow_snapshot[e];
  return load;
}

}  // namespace exdec
