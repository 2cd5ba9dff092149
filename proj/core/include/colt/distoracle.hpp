#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "colt/graph.hpp"
#include "colt/sultree.hpp"

namespace colt {

// Exact point-to-point distance engine.  Each instance counts the calls made
// and the vertices its searches expanded, so callers can report how much
// exact-distance work a query algorithm triggered.  Instances keep per-call
// scratch only; a fresh instance per thread makes concurrent use safe.
class DistanceBackend {
public:
    virtual ~DistanceBackend() = default;
    virtual Distance exact_distance(Vertex s, Vertex t) = 0;
    virtual const char* name() const = 0;

    std::uint64_t distance_calls = 0;
    std::uint64_t vertices_settled = 0;
};

// Alternating bidirectional Dijkstra; stops once the two frontiers prove the
// best meeting point optimal.
std::unique_ptr<DistanceBackend> make_bidirectional_backend(const RoadGraph& g);

// A* guided by the root-landmark rows of a SUL-tree (consistent heuristic,
// so the target settles with its exact distance).  Operates on the tree's
// reordered graph; pass reordered vertex ids.
std::unique_ptr<DistanceBackend> make_alt_backend(const SulTree& sul);

// Applies an id translation before delegating, so an engine built over a
// reordered graph can serve callers holding original ids.  Counters mirror
// the wrapped engine.
std::unique_ptr<DistanceBackend> make_translated_backend(std::unique_ptr<DistanceBackend> inner,
                                                         std::vector<Vertex> id_map);

enum class BackendKind : std::uint8_t { Bidirectional = 0, AltAStar = 1 };

const char* to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

// `sul` may be null for Bidirectional.  The graph must be the one the caller
// will pass vertex ids for (for trees, the reordered graph).
std::unique_ptr<DistanceBackend> make_backend(BackendKind kind, const RoadGraph& g,
                                              const SulTree* sul);

}  // namespace colt
