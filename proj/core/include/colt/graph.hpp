#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "colt/types.hpp"

namespace colt {

struct AdjEntry {
    Vertex to;
    Weight weight;
    bool operator==(const AdjEntry&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

// Undirected road network in CSR form.  After normalize() the graph is
// symmetric (each edge appears in both adjacency rows with equal weight),
// connected, and vertex ids are dense 0-based.  Immutable once built; all
// search routines keep their own scratch state, so concurrent readers are safe.
struct RoadGraph {
    std::vector<std::uint64_t> offsets;  // size vertex_count()+1
    std::vector<AdjEntry> adj;
    std::vector<Point> coords;  // empty when the source had no coordinate file
    double max_speed = 0.0;     // max over edges of euclid(u,v)/weight(u,v)

    std::size_t vertex_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t arc_count() const { return adj.size(); }
    bool has_coords() const { return !coords.empty(); }

    std::span<const AdjEntry> neighbors(Vertex v) const {
        return {adj.data() + offsets[v], adj.data() + offsets[v + 1]};
    }

    // Build from an arc list; duplicate (u,v) arcs keep the smallest weight.
    static RoadGraph from_arcs(std::size_t n, std::vector<std::tuple<Vertex, Vertex, Weight>> arcs);

    // Reorders vertices: position new_to_old[i] holds the old id of new vertex i.
    RoadGraph permuted(const std::vector<Vertex>& new_to_old) const;
};

struct NormalizeResult {
    RoadGraph graph;
    std::vector<Vertex> id_map;  // old id -> new id, kNoVertex for dropped vertices
};

// Symmetrize (min weight per unordered pair), keep the largest connected
// component (ties by smallest original vertex id contained), re-densify ids.
// Idempotent: normalizing a normalized graph yields an identical graph.
NormalizeResult normalize(const RoadGraph& g);

// floor(euclid(u,v)/max_speed): admissible lower bound on network distance.
// Requires coordinates; throws ConfigError otherwise.
Distance euclidean_lower_bound(const RoadGraph& g, Vertex u, Vertex v);
double euclid(const Point& a, const Point& b);

// Double-sweep estimate: SSSP from vertex 0, then from the farthest vertex found.
Distance approximate_diameter(const RoadGraph& g);

// Recomputed after edits to coords or edges.
double compute_max_speed(const std::vector<std::uint64_t>& offsets,
                         const std::vector<AdjEntry>& adj, const std::vector<Point>& coords);

// --- synthetic desk-scale graphs (used by tests and the benchmark harness) ---

// rows x cols lattice, 4-neighbor, uniform random integer weights in
// [min_weight, max_weight] (decorrelated from geometry), coords = lattice positions.
RoadGraph make_grid_graph(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed,
                          Weight min_weight = 1, Weight max_weight = 1000);

// n random points in the unit square (scaled), each joined to its nearest
// neighbors; roughly planar, then normalized to its largest component.
RoadGraph make_random_planar_graph(std::uint32_t n, std::uint64_t seed,
                                   std::uint32_t neighbors = 3, Weight min_weight = 1,
                                   Weight max_weight = 1000);

// --- binary graph container (output of the ingest step) ---

void save_graph(const RoadGraph& g, std::ostream& out);
RoadGraph load_graph(std::istream& in);

}  // namespace colt
