#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "colt/dijkstra.hpp"
#include "colt/graph.hpp"
#include "colt/partition.hpp"

namespace colt {

enum class LandmarkPolicy : std::uint32_t {
    Random = 0,
    FurthestBorder = 1,       // greedy max-of-min network distance among borders
    SliceFurthestBorder = 2,  // one border per angular sector around the centroid
    BorderMinmax = 3,         // vertices minimizing the max distance to sampled borders
};

const char* to_string(LandmarkPolicy p);
LandmarkPolicy landmark_policy_from_string(const std::string& s);

struct SulParams {
    std::uint32_t branching = 8;        // children per internal node
    std::size_t leaf_cap = 1024;        // max vertices in a leaf subgraph
    std::uint32_t landmarks = 2;        // landmarks per non-root node
    std::uint32_t root_landmarks = 16;  // the root doubles as a global landmark set
    LandmarkPolicy policy = LandmarkPolicy::Random;
    std::uint64_t seed = 0;
    bool lazy_leaf_sdls = false;   // leaf SDLs filled on first use instead of at build
    bool restrict_searches = true; // border-restricted SDL construction
};

// One subgraph in the hierarchy.  Vertices are reordered so each node owns the
// contiguous id range [first,last); an SDL row therefore needs no vertex ids:
// d(landmark_l, v) = sdl[sdl_base + l*(last-first) + (v-first)].
struct SulNode {
    Vertex first = 0, last = 0;
    std::uint32_t parent = kNoNode;
    std::vector<std::uint32_t> children;
    std::vector<Vertex> landmarks;  // reordered ids, inside [first,last)
    std::uint64_t sdl_base = 0;
    bool sdl_ready = false;

    Vertex range_len() const { return last - first; }
    bool is_leaf() const { return children.empty(); }
    bool contains(Vertex v) const { return v >= first && v < last; }
};

struct SulBuildStats {
    std::uint64_t sdl_settled = 0;  // vertices expanded across non-root SDL searches
    std::uint64_t sdl_targets = 0;  // subgraph sizes summed over those searches
    std::chrono::nanoseconds build_time{0};
    double gamma() const {
        return sdl_targets ? static_cast<double>(sdl_settled) / static_cast<double>(sdl_targets)
                           : 0.0;
    }
};

// Subgraph-landmark hierarchy.  Immutable and safe for concurrent readers once
// fully built; with lazy_leaf_sdls set, ensure_sdl() mutates and must finish
// before the tree is shared.
struct SulTree {
    RoadGraph graph;  // reordered copy of the input graph
    std::vector<Vertex> old_to_new, new_to_old;
    std::vector<SulNode> nodes;  // nodes[0] is the root, level order
    std::vector<StoredDistance> sdl;
    SulParams params;
    SulBuildStats stats;

    std::size_t vertex_count() const { return graph.vertex_count(); }

    Distance sdl_at(const SulNode& n, std::size_t landmark_idx, Vertex v) const {
        return sdl[n.sdl_base + landmark_idx * n.range_len() + (v - n.first)];
    }

    RootSdlView root_view() const {
        const SulNode& r = nodes[0];
        return {sdl.data() + r.sdl_base, r.landmarks.size(), vertex_count()};
    }
    Distance root_distance(std::size_t landmark_idx, Vertex v) const {
        return sdl_at(nodes[0], landmark_idx, v);
    }

    // Landmark bounds on d(u,v) via the root landmarks (both ids reordered).
    Distance root_point_lb(Vertex u, Vertex v) const;
    Distance root_point_ub(Vertex u, Vertex v) const;

    void ensure_sdl(std::uint32_t node);
    void ensure_all_sdls();

    // Binds serialized COL-trees to this exact tree (parameters + permutation).
    std::uint64_t identity_checksum() const;
};

// Depth-first traversal of the partition tree; each leaf hands out consecutive
// new ids (ascending old id within the leaf), so every subtree is contiguous.
struct SubgraphOrder {
    std::vector<Vertex> new_to_old, old_to_new;
    std::vector<std::pair<Vertex, Vertex>> node_range;  // per partition-tree node
};
SubgraphOrder assign_subgraph_order(const PartitionTree& pt);

// Select landmarks for one subgraph; exposed separately for tests.  `borders`
// may be empty (the root has none), in which case border-driven policies fall
// back to their padding rules.
std::vector<Vertex> select_landmarks(const RoadGraph& g, Vertex first, Vertex last,
                                     const std::vector<Vertex>& borders, std::uint32_t m,
                                     LandmarkPolicy policy, std::uint64_t seed);

SulTree build_sultree(const RoadGraph& g, const SulParams& params);

void save_sultree(SulTree& tree, std::ostream& out);  // materializes lazy SDLs first
SulTree load_sultree(std::istream& in, const RoadGraph& original_graph);

}  // namespace colt
