#pragma once

#include <span>
#include <vector>

#include "colt/graph.hpp"

namespace colt {

// Distances from one source to an explicit target set; the search stops once
// every target is settled.  Queue ties break toward the smaller vertex id so
// the settle order is deterministic.
struct MultiTargetResult {
    std::vector<Distance> distances;  // aligned with the targets argument
    std::size_t settled = 0;
};
MultiTargetResult dijkstra_multi_target(const RoadGraph& g, Vertex source,
                                        std::span<const Vertex> targets);

// Full single-source shortest paths; unreachable vertices get kInfDistance.
std::vector<Distance> dijkstra_all(const RoadGraph& g, Vertex source,
                                   std::size_t* settled = nullptr);

// Distances from source to the contiguous vertex range [first, last).
struct RangeDistances {
    std::vector<Distance> distances;  // distances[i] = d(source, first + i)
    std::size_t settled = 0;          // vertices expanded by the search
    Distance max_distance = 0;        // max over the range
};
RangeDistances dijkstra_to_range(const RoadGraph& g, Vertex source, Vertex first, Vertex last);

// Read-only view of the distance rows computed from the root landmarks; row l
// holds d(root_landmark_l, v) for every vertex v.
struct RootSdlView {
    const StoredDistance* data = nullptr;
    std::size_t landmark_count = 0;
    std::size_t vertex_count = 0;

    Distance at(std::size_t l, Vertex v) const { return data[l * vertex_count + v]; }
    bool empty() const { return landmark_count == 0; }
};

// Precomputed facts about one subgraph [first,last) that let a distance search
// from an internal source prune external vertices:
//  - border: subgraph vertices with at least one external neighbor
//  - per root landmark, the min/max distance to any border vertex (feeds the
//    toward-the-border heuristic) and the max over the whole range (feeds the
//    prune threshold, which must cover interior vertices too)
//  - intra_ub: an upper bound on the distance between any two subgraph
//    vertices.  Starts unbounded; after a search from an internal source
//    settles the whole range, twice its max distance is such a bound, and
//    tighter values from later runs are kept.
struct BorderContext {
    Vertex first = 0, last = 0;
    std::vector<Vertex> border;
    std::vector<Distance> border_min;  // per root landmark
    std::vector<Distance> border_max;
    std::vector<Distance> range_max;   // per root landmark, over [first,last)
    Distance intra_ub = kInfDistance;

    void absorb_run(Distance max_range_distance) {
        Distance ub = max_range_distance > kInfDistance / 2 ? kInfDistance : 2 * max_range_distance;
        if (ub < intra_ub) intra_ub = ub;
    }
};

BorderContext make_border_context(const RoadGraph& g, Vertex first, Vertex last,
                                  const RootSdlView& root);

// Same contract as dijkstra_to_range (source inside [first,last)), but the
// expansion of an external vertex v is skipped whenever no shortest path to a
// subgraph vertex can pass through it: keys carry an admissible heuristic
// toward the border set (monotonized by pathmax, so extracted keys never
// decrease) and are pruned against min(upper bound on the farthest subgraph
// vertex via the root landmarks, ctx.intra_ub).  Distances returned are exact.
RangeDistances border_restricted_dijkstra(const RoadGraph& g, Vertex source, Vertex first,
                                          Vertex last, const BorderContext& ctx,
                                          const RootSdlView& root,
                                          std::vector<Distance>* extracted_keys = nullptr);

}  // namespace colt
