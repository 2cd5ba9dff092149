#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "colt/graph.hpp"
#include "colt/query.hpp"
#include "colt/sultree.hpp"

namespace colt {

// Reference competitors.  Brute force doubles as the correctness oracle: it
// evaluates the exact distance to every object with plain Dijkstra runs and
// applies the same (score, id) tie rule as the tree queries.  All functions
// here speak original vertex ids.

std::vector<ResultEntry> brute_aknn(const RoadGraph& g, std::span<const Vertex> objects,
                                    std::span<const Vertex> query_set, std::size_t k,
                                    Aggregate agg, QueryStats* stats = nullptr);
std::vector<ResultEntry> brute_kfn(const RoadGraph& g, std::span<const Vertex> objects, Vertex q,
                                   std::size_t k, QueryStats* stats = nullptr);
std::vector<Vertex> brute_range(const RoadGraph& g, std::span<const Vertex> objects, Vertex q,
                                Distance r, QueryStats* stats = nullptr);
std::vector<ResultEntry> brute_knn(const RoadGraph& g, std::span<const Vertex> objects, Vertex q,
                                   std::size_t k, QueryStats* stats = nullptr);

// Farthest neighbors by filtered brute force: sort candidates by root-landmark
// upper bound, evaluate until the bound can no longer reach the running k-th
// distance.  `backend` must answer in the tree's reordered id space.
std::vector<ResultEntry> aub_kfn(const SulTree& sul, DistanceBackend& backend,
                                 std::span<const Vertex> objects, Vertex q, std::size_t k,
                                 QueryStats* stats = nullptr);

struct Mbr {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};
double mindist(const Mbr& box, const Point& p);

struct RtreeNode {
    Mbr box;
    bool leaf = false;
    std::vector<std::uint32_t> children;  // node indices (internal nodes)
    std::vector<Vertex> objects;          // object vertex ids (leaves)
};

// Sort-tile-recursive packed R-tree over object coordinates.  Packing is
// deterministic: ties in both sort passes fall back to vertex id.
class StrRtree {
  public:
    StrRtree(const RoadGraph& g, std::span<const Vertex> objects, std::size_t leaf_capacity = 32);

    const std::vector<RtreeNode>& nodes() const { return nodes_; }
    std::uint32_t root() const { return root_; }
    std::size_t object_count() const { return object_count_; }

  private:
    std::vector<RtreeNode> nodes_;
    std::uint32_t root_ = 0;
    std::size_t object_count_ = 0;
};

// Incremental Euclidean restriction: branch and bound over the R-tree with
// floor(euclidean/max_speed) lower bounds, exact distances from the backend.
// `backend` must answer in the graph's own (original) id space.
std::vector<ResultEntry> ier_aknn(const RoadGraph& g, const StrRtree& rtree,
                                  DistanceBackend& backend, std::span<const Vertex> query_set,
                                  std::size_t k, Aggregate agg, QueryStats* stats = nullptr);
std::vector<ResultEntry> ier_knn(const RoadGraph& g, const StrRtree& rtree,
                                 DistanceBackend& backend, Vertex q, std::size_t k,
                                 QueryStats* stats = nullptr);
std::vector<Vertex> ier_range(const RoadGraph& g, const StrRtree& rtree, DistanceBackend& backend,
                              Vertex q, Distance r, QueryStats* stats = nullptr);

}  // namespace colt
