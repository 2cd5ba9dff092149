#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "colt/sultree.hpp"

namespace colt {

// One (object, distance-to-landmark) pair; objects are reordered vertex ids.
struct OdlEntry {
    Vertex object;
    Distance dist;
    bool operator==(const OdlEntry&) const = default;
};

struct LandmarkBand {
    Distance lo = kInfDistance;  // min object distance to the landmark
    Distance hi = 0;             // max object distance to the landmark
};

struct ColNode {
    bool leaf = false;
    std::uint32_t sul_node = 0;  // subgraph this node compacted to
    std::uint32_t parent = kNoNode;
    std::vector<std::uint32_t> children;
    std::vector<LandmarkBand> bands;       // per landmark of the subgraph node
    std::vector<LandmarkBand> root_bands;  // per root landmark
    // Leaves only: one list per subgraph landmark, sorted by (dist, object).
    // Every list holds the same object set.
    std::vector<std::vector<OdlEntry>> odls;
    std::uint32_t object_count = 0;
};

struct ColBuildStats {
    std::uint64_t sdl_lookups = 0;
    std::uint64_t sort_comparisons = 0;
    std::chrono::nanoseconds build_time{0};
    std::uint64_t work() const { return sdl_lookups + sort_comparisons; }
};

// Object hierarchy over a SUL-tree.  Nodes whose object count fits in
// `lambda` become leaves; single-occupied branches are compacted away, so
// depth is logarithmic in the object count.  A subgraph leaf holding more
// than lambda objects is kept as one oversized leaf.
struct ColTree {
    std::vector<ColNode> nodes;  // nodes[0] is the root; empty when no objects
    std::size_t lambda = 0;
    std::size_t object_count = 0;
    std::uint64_t sul_checksum = 0;
    ColBuildStats stats;

    bool empty() const { return nodes.empty(); }
};

// `objects` are vertex ids of the original graph the SUL-tree was built over
// (duplicates are collapsed); the renumbering is applied internally.  Takes
// the tree mutably so lazily deferred leaf SDLs can be filled on first use.
ColTree build_coltree(SulTree& sul, const std::vector<Vertex>& objects, std::size_t lambda);

// Lower bound on d(q,p) over all p whose landmark distance lies in [lo,hi],
// given d(l,q) itself only known to lie in [lb_lq, ub_lq]:
//   d(l,q) at or above the band  ->  lb_lq - hi
//   d(l,q) at or below the band  ->  lo - ub_lq
//   overlapping                  ->  0
inline Distance interval_gap_lb(Distance lb_lq, Distance ub_lq, Distance lo, Distance hi) {
    if (lb_lq >= hi) return lb_lq - hi;
    if (ub_lq <= lo) return lo - ub_lq;
    return 0;
}

// Bounds on d(q, p) valid for every object p under the node; q is a reordered
// vertex id.  Exact landmark-to-query distances are used where an SDL row
// covers q (root landmarks always; subgraph landmarks when q is inside the
// subgraph), otherwise root-landmark bounds stand in.
Distance node_lower_bound(const ColTree& col, const SulTree& sul, std::uint32_t node, Vertex q);
Distance node_upper_bound(const ColTree& col, const SulTree& sul, std::uint32_t node, Vertex q);

// Index whose doubled distance is closest to `target2x` (a distance in
// doubled units, which keeps half-integral targets exact); ties take the
// smaller index.  The list must be sorted ascending.
std::size_t odl_min_index(std::span<const OdlEntry> odl, Distance target2x);

// All objects stored under `node`, ascending reordered id.  The appending
// overload leaves `out` unsorted.
std::vector<Vertex> collect_objects(const ColTree& col, std::uint32_t node);
void collect_objects(const ColTree& col, std::uint32_t node, std::vector<Vertex>& out);

void save_coltree(const ColTree& col, std::ostream& out);
ColTree load_coltree(std::istream& in, const SulTree& sul);

}  // namespace colt
