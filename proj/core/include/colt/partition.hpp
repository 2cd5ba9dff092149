#pragma once

#include <cstdint>
#include <vector>

#include "colt/graph.hpp"

namespace colt {

// One level of a b-way split: part index per subset position.
struct PartitionAssignment {
    std::vector<std::uint32_t> part;  // aligned with the subset argument
    std::uint32_t parts = 0;
};

// Split `subset` into b balanced parts.  With coordinates this is recursive
// coordinate bisection along the wider bounding-box axis (b must then be a
// power of two); without coordinates, BFS regions grown from spread seeds.
// Every part is non-empty when subset.size() >= b, and no part exceeds
// ceil(subset.size()/b) vertices... plus slack only from rounding at each
// halving step (sibling sizes differ by at most a factor of 2).
PartitionAssignment partition_subgraph(const RoadGraph& g, const std::vector<Vertex>& subset,
                                       std::uint32_t b);

struct PartitionTreeNode {
    std::vector<Vertex> vertices;        // empty for internal nodes once children exist
    std::vector<std::uint32_t> children;
    std::uint32_t parent = kNoNode;
    std::size_t size = 0;  // vertex count under this node
    bool is_leaf() const { return children.empty(); }
};

// Root holds every vertex; internal nodes have exactly b children; leaves
// carry at most `leaf_cap` vertices.  Requires leaf_cap >= b.
struct PartitionTree {
    std::vector<PartitionTreeNode> nodes;  // nodes[0] is the root
    std::uint32_t branching = 0;
    std::size_t leaf_cap = 0;
};

PartitionTree recursive_partition(const RoadGraph& g, std::uint32_t b, std::size_t leaf_cap);

}  // namespace colt
