#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "colt/coltree.hpp"
#include "colt/distoracle.hpp"

namespace colt {

struct QueryStats {
    std::uint64_t exact_distance_calls = 0;  // backend invocations during the query
    std::uint64_t candidates_retrieved = 0;  // objects drawn individually from lists
    std::uint64_t nodes_visited = 0;         // tree node expansions (incl. repeat leaf visits)
    std::uint64_t vertices_settled = 0;      // summed over the backend's searches
    std::chrono::nanoseconds wall_time{0};
};

struct ResultEntry {
    Vertex object;   // original (pre-reorder) vertex id
    Distance score;  // exact distance, or aggregate for multi-point queries
    bool operator==(const ResultEntry&) const = default;
};

// Test hook: records queue and leaf behaviour so invariants can be checked.
struct LeafInitTrace {
    std::uint32_t node = 0;
    std::size_t landmark_idx = 0;
    std::size_t init_index = 0;
    // query-to-landmark distance constants: exact for aggregate queries,
    // possibly an upper bound for farthest queries (admissible either way)
    std::vector<Distance> constants;
};
struct QueryTrace {
    std::vector<Distance> extracted_keys;
    std::vector<LeafInitTrace> leaf_inits;
    std::vector<std::pair<Distance, Distance>> evaluations;  // (key, exact score)
};

// Running best-k under lexicographic (score, id) order; `largest` flips the
// score comparison for farthest-neighbor queries.  Shared by the tree queries
// and every baseline so ties resolve identically everywhere.
class BestK {
  public:
    BestK(std::size_t k, bool largest) : k_(k), largest_(largest) {}

    bool full() const { return items_.size() == k_; }
    // Score the next candidate must beat; the identity of the running order
    // (infinity for nearest, zero for farthest) until k results exist.
    Distance threshold() const {
        if (k_ == 0) return largest_ ? kInfDistance : 0;  // nothing can qualify
        if (!full()) return largest_ ? 0 : kInfDistance;
        return items_.back().score;
    }
    void offer(Distance score, Vertex object) {
        if (k_ == 0) return;
        ResultEntry e{object, score};
        if (full()) {
            if (!before(e, items_.back())) return;
            items_.pop_back();
        }
        auto pos = std::upper_bound(
            items_.begin(), items_.end(), e,
            [this](const ResultEntry& a, const ResultEntry& b) { return before(a, b); });
        items_.insert(pos, e);
    }
    const std::vector<ResultEntry>& items() const { return items_; }

  private:
    bool before(const ResultEntry& a, const ResultEntry& b) const {
        if (a.score != b.score) return largest_ ? a.score > b.score : a.score < b.score;
        return a.object < b.object;
    }
    std::size_t k_;
    bool largest_;
    std::vector<ResultEntry> items_;
};

// Value x minimizing agg_i |c_i - x|, returned in doubled units so the
// half-integral midpoint of the max case stays exact.  Sum takes the lower
// median; max takes the midrange.
Distance aggregate_minimizer(Aggregate agg, std::span<const Distance> constants);

// agg_i |c_i - x| in plain units.
Distance odl_objective(Aggregate agg, std::span<const Distance> constants, Distance x);

// Aggregate k nearest neighbors: k objects minimizing agg over d(q_i, p),
// ties by object id.  Exact; matches the brute-force oracle bit for bit.
// All tree queries call `backend` with renumbered vertex ids, so it must be
// built over sul.graph; query vertices and results use original ids.
std::vector<ResultEntry> aknn(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                              std::span<const Vertex> query_set, std::size_t k, Aggregate agg,
                              QueryStats* stats = nullptr, QueryTrace* trace = nullptr);

// k objects with the largest d(q, p); ties by object id.
std::vector<ResultEntry> kfn(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                             Vertex q, std::size_t k, QueryStats* stats = nullptr,
                             QueryTrace* trace = nullptr);

// All objects within distance r of q, ascending vertex id.
std::vector<Vertex> range_query(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                                Vertex q, Distance r, QueryStats* stats = nullptr,
                                QueryTrace* trace = nullptr);

// Single-point k nearest neighbors (aggregate search with one query vertex).
std::vector<ResultEntry> knn(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                             Vertex q, std::size_t k, QueryStats* stats = nullptr,
                             QueryTrace* trace = nullptr);

}  // namespace colt
