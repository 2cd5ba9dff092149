#include "colt/query.hpp"

#include <algorithm>
#include <queue>

namespace colt {

namespace {

// Entry kinds order equal-key pops: objects first so results fill before more
// of the tree is opened, then leaves, then internal nodes.
enum Kind : std::uint8_t { kObject = 0, kLeaf = 1, kInternal = 2 };

struct PqEntry {
    Distance key;
    Kind kind;
    std::uint32_t id;  // vertex (reordered) for objects, node index otherwise
};
struct MinOrder {
    bool operator()(const PqEntry& a, const PqEntry& b) const {
        if (a.key != b.key) return a.key > b.key;
        if (a.kind != b.kind) return a.kind > b.kind;
        return a.id > b.id;
    }
};
struct MaxOrder {
    bool operator()(const PqEntry& a, const PqEntry& b) const {
        if (a.key != b.key) return a.key < b.key;
        if (a.kind != b.kind) return a.kind > b.kind;
        return a.id > b.id;
    }
};
template <typename Order>
using Queue = std::priority_queue<PqEntry, std::vector<PqEntry>, Order>;

// One in-progress object distance list scan.  Positions move outward from the
// initialization index; either side may be exhausted independently.
struct LeafCursor {
    bool initialized = false;
    std::size_t landmark_idx = 0;
    std::vector<Distance> constants;  // exact d(q_i, landmark) per query vertex
    std::ptrdiff_t next_left = -1;
    std::size_t next_right = 0;
};

struct Workspace {
    const ColTree& col;
    const SulTree& sul;
    DistanceBackend& backend;
    std::vector<Vertex> query;  // reordered ids
    Aggregate agg;
    QueryStats* stats;
    QueryTrace* trace;

    // Exact distance from reordered q to reordered v, preferring stored lists
    // over a fresh search.
    Distance exact(Vertex q, Vertex v) const {
        const SulNode& root = sul.nodes[0];
        for (std::size_t l = 0; l < root.landmarks.size(); ++l) {
            if (root.landmarks[l] == v) return sul.root_distance(l, q);
            if (root.landmarks[l] == q) return sul.root_distance(l, v);
        }
        return backend.exact_distance(q, v);
    }

    // Exact d(q, landmark of node n); the node's own list answers when q lies
    // in its vertex range.
    Distance exact_to_landmark(Vertex q, std::uint32_t sul_node, std::size_t l) const {
        const SulNode& sn = sul.nodes[sul_node];
        if (sn.contains(q) && sn.sdl_ready) return sul.sdl_at(sn, l, q);
        return exact(q, sn.landmarks[l]);
    }

    Distance score_of(Vertex object) const {
        Distance acc = 0;
        for (Vertex q : query) {
            Distance d = exact(q, object);
            if (agg == Aggregate::Sum) {
                acc += d;
            } else {
                acc = std::max(acc, d);
            }
        }
        return acc;
    }

    Distance object_lb(Vertex object) const {
        Distance acc = 0;
        for (Vertex q : query) {
            Distance d = sul.root_point_lb(q, object);
            if (agg == Aggregate::Sum) {
                acc += d;
            } else {
                acc = std::max(acc, d);
            }
        }
        return acc;
    }

    Distance node_lb_agg(std::uint32_t node) const {
        Distance acc = 0;
        for (Vertex q : query) {
            Distance d = node_lower_bound(col, sul, node, q);
            if (agg == Aggregate::Sum) {
                acc += d;
            } else {
                acc = std::max(acc, d);
            }
        }
        return acc;
    }
};

// Exact per-query distances to the chosen leaf landmark; every SDL hit avoids
// a backend search.
std::vector<Distance> landmark_constants(const Workspace& ws, std::uint32_t sul_node,
                                         std::size_t l) {
    std::vector<Distance> c;
    c.reserve(ws.query.size());
    for (Vertex q : ws.query) c.push_back(ws.exact_to_landmark(q, sul_node, l));
    return c;
}

// Index of the list entry minimizing agg_i |c_i - dist|.  The objective is
// convex in dist, so only the two entries bracketing the continuous minimizer
// can attain the discrete minimum; ties go to the smaller index.
std::size_t init_index(const Workspace& ws, std::span<const OdlEntry> odl,
                       std::span<const Distance> constants) {
    Distance target2 = aggregate_minimizer(ws.agg, constants);
    auto it = std::lower_bound(odl.begin(), odl.end(), target2,
                               [](const OdlEntry& e, Distance t) { return 2 * e.dist < t; });
    std::size_t hi = static_cast<std::size_t>(it - odl.begin());
    if (hi == odl.size()) return odl.size() - 1;
    if (hi == 0) return 0;
    Distance f_lo = odl_objective(ws.agg, constants, odl[hi - 1].dist);
    Distance f_hi = odl_objective(ws.agg, constants, odl[hi].dist);
    return f_lo <= f_hi ? hi - 1 : hi;
}

}  // namespace

Distance aggregate_minimizer(Aggregate agg, std::span<const Distance> constants) {
    if (constants.empty()) throw ConfigError("aggregate minimizer needs at least one constant");
    if (agg == Aggregate::Max) {
        auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
        return *lo + *hi;  // midrange, doubled
    }
    std::vector<Distance> sorted(constants.begin(), constants.end());
    std::sort(sorted.begin(), sorted.end());
    return 2 * sorted[(sorted.size() - 1) / 2];  // lower median, doubled
}

Distance odl_objective(Aggregate agg, std::span<const Distance> constants, Distance x) {
    Distance acc = 0;
    for (Distance c : constants) {
        Distance d = c > x ? c - x : x - c;
        acc = agg == Aggregate::Sum ? acc + d : std::max(acc, d);
    }
    return acc;
}

std::vector<ResultEntry> aknn(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                              std::span<const Vertex> query_set, std::size_t k, Aggregate agg,
                              QueryStats* stats, QueryTrace* trace) {
    if (query_set.empty()) throw ConfigError("aggregate query needs a non-empty query set");
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t calls0 = backend.distance_calls;
    std::uint64_t settled0 = backend.vertices_settled;

    Workspace ws{col, sul, backend, {}, agg, stats, trace};
    ws.query.reserve(query_set.size());
    for (Vertex q : query_set) {
        if (q >= sul.graph.vertex_count()) throw ConfigError("query vertex id out of range");
        ws.query.push_back(sul.old_to_new[q]);
    }

    BestK best(std::min<std::size_t>(k, col.object_count), /*largest=*/false);
    if (!col.empty() && k > 0) {
        Queue<MinOrder> pq;
        std::vector<LeafCursor> cursors(col.nodes.size());
        pq.push({ws.node_lb_agg(0), col.nodes[0].leaf ? kLeaf : kInternal, 0});

        while (!pq.empty() && pq.top().key <= best.threshold()) {
            PqEntry top = pq.top();
            pq.pop();
            if (trace) trace->extracted_keys.push_back(top.key);

            if (top.kind == kObject) {
                Distance score = ws.score_of(top.id);
                if (trace) trace->evaluations.emplace_back(top.key, score);
                // rank under original ids so score ties match the oracle order
                best.offer(score, sul.new_to_old[top.id]);
                continue;
            }
            if (stats) ++stats->nodes_visited;

            if (top.kind == kInternal) {
                for (std::uint32_t c : col.nodes[top.id].children) {
                    // A parent bound holds for every descendant, so keys never
                    // decrease along a root-to-object path.
                    Distance key = std::max(top.key, ws.node_lb_agg(c));
                    pq.push({key, col.nodes[c].leaf ? kLeaf : kInternal, c});
                }
                continue;
            }

            // Leaf: walk one distance list outward from its best entry,
            // releasing objects while they can still beat the queue.
            const ColNode& cn = col.nodes[top.id];
            LeafCursor& cur = cursors[top.id];
            if (!cur.initialized) {
                const SulNode& sn = sul.nodes[cn.sul_node];
                std::size_t pick = 0;
                Distance pick_sum = 0;
                for (std::size_t l = 0; l < sn.landmarks.size(); ++l) {
                    Distance s = 0;
                    for (Vertex q : ws.query) {
                        if (cn.sul_node == 0) {
                            s += sul.root_distance(l, q);
                        } else {
                            s += sul.root_point_lb(q, sn.landmarks[l]);
                        }
                    }
                    if (l == 0 || s > pick_sum) {
                        pick = l;
                        pick_sum = s;
                    }
                }
                cur.landmark_idx = pick;
                cur.constants = landmark_constants(ws, cn.sul_node, pick);
                std::size_t i0 = init_index(ws, cn.odls[pick], cur.constants);
                cur.next_left = static_cast<std::ptrdiff_t>(i0);
                cur.next_right = i0 + 1;
                cur.initialized = true;
                if (trace) trace->leaf_inits.push_back({top.id, pick, i0, cur.constants});
            }

            std::span<const OdlEntry> odl = cn.odls[cur.landmark_idx];
            auto side_objective = [&](std::size_t i) {
                return odl_objective(ws.agg, cur.constants, odl[i].dist);
            };
            while (true) {
                Distance fl = cur.next_left >= 0
                                  ? side_objective(static_cast<std::size_t>(cur.next_left))
                                  : kInfDistance;
                Distance fr =
                    cur.next_right < odl.size() ? side_objective(cur.next_right) : kInfDistance;
                Distance f = std::min(fl, fr);
                if (f == kInfDistance) break;  // list exhausted
                Distance threshold =
                    pq.empty() ? best.threshold() : std::min(best.threshold(), pq.top().key);
                if (f > threshold) {
                    pq.push({std::max(f, top.key), kLeaf, top.id});
                    break;
                }
                std::size_t i;
                if (fl <= fr) {
                    i = static_cast<std::size_t>(cur.next_left);
                    --cur.next_left;
                } else {
                    i = cur.next_right;
                    ++cur.next_right;
                }
                Vertex p = odl[i].object;
                Distance key = std::max({f, ws.object_lb(p), top.key});
                pq.push({key, kObject, p});
                if (stats) ++stats->candidates_retrieved;
            }
        }
    }

    std::vector<ResultEntry> out = best.items();
    if (stats) {
        stats->exact_distance_calls += backend.distance_calls - calls0;
        stats->vertices_settled += backend.vertices_settled - settled0;
        stats->wall_time += std::chrono::steady_clock::now() - t0;
    }
    return out;
}

std::vector<ResultEntry> kfn(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                             Vertex q, std::size_t k, QueryStats* stats, QueryTrace* trace) {
    if (q >= sul.graph.vertex_count()) throw ConfigError("query vertex id out of range");
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t calls0 = backend.distance_calls;
    std::uint64_t settled0 = backend.vertices_settled;
    Vertex qi = sul.old_to_new[q];
    Workspace ws{col, sul, backend, {qi}, Aggregate::Max, stats, trace};

    BestK best(std::min<std::size_t>(k, col.object_count), /*largest=*/true);
    if (!col.empty() && k > 0) {
        Queue<MaxOrder> pq;
        std::vector<LeafCursor> cursors(col.nodes.size());
        pq.push({node_upper_bound(col, sul, 0, qi), col.nodes[0].leaf ? kLeaf : kInternal, 0});

        while (!pq.empty() && pq.top().key >= best.threshold()) {
            PqEntry top = pq.top();
            pq.pop();
            if (trace) trace->extracted_keys.push_back(top.key);

            if (top.kind == kObject) {
                Distance score = ws.exact(qi, top.id);
                if (trace) trace->evaluations.emplace_back(top.key, score);
                // rank under original ids so score ties match the oracle order
                best.offer(score, sul.new_to_old[top.id]);
                continue;
            }
            if (stats) ++stats->nodes_visited;

            if (top.kind == kInternal) {
                for (std::uint32_t c : col.nodes[top.id].children) {
                    Distance key = std::min(top.key, node_upper_bound(col, sul, c, qi));
                    pq.push({key, col.nodes[c].leaf ? kLeaf : kInternal, c});
                }
                continue;
            }

            const ColNode& cn = col.nodes[top.id];
            LeafCursor& cur = cursors[top.id];
            if (!cur.initialized) {
                // The landmark with the smallest upper bound to q keeps the
                // far end of its list closest to the true farthest objects.
                const SulNode& sn = sul.nodes[cn.sul_node];
                std::size_t pick = 0;
                Distance pick_ub = kInfDistance;
                for (std::size_t l = 0; l < sn.landmarks.size(); ++l) {
                    Distance u = cn.sul_node == 0 ? sul.root_distance(l, qi)
                                                  : sul.root_point_ub(qi, sn.landmarks[l]);
                    if (u < pick_ub) {
                        pick = l;
                        pick_ub = u;
                    }
                }
                cur.landmark_idx = pick;
                // Any upper bound on d(q, landmark) keeps c0 + dist admissible
                // for farthest pruning, so never pay a backend search here:
                // stored lists give the exact value, the root landmarks a bound.
                Distance c0;
                if (cn.sul_node == 0) {
                    c0 = sul.root_distance(pick, qi);
                } else if (sn.contains(qi) && sn.sdl_ready) {
                    c0 = sul.sdl_at(sn, pick, qi);
                } else {
                    c0 = sul.root_point_ub(qi, sn.landmarks[pick]);
                }
                cur.constants = {c0};
                cur.next_left = static_cast<std::ptrdiff_t>(cn.odls[pick].size()) - 1;
                cur.initialized = true;
                if (trace) {
                    trace->leaf_inits.push_back({top.id, pick,
                                                 static_cast<std::size_t>(cur.next_left),
                                                 cur.constants});
                }
            }

            std::span<const OdlEntry> odl = cn.odls[cur.landmark_idx];
            Distance c0 = cur.constants[0];
            while (cur.next_left >= 0) {
                std::size_t i = static_cast<std::size_t>(cur.next_left);
                Distance ub = c0 + odl[i].dist;
                Distance threshold =
                    pq.empty() ? best.threshold() : std::max(best.threshold(), pq.top().key);
                if (ub < threshold) {
                    pq.push({std::min(ub, top.key), kLeaf, top.id});
                    break;
                }
                Vertex p = odl[i].object;
                Distance key = std::min({ub, sul.root_point_ub(qi, p), top.key});
                pq.push({key, kObject, p});
                if (stats) ++stats->candidates_retrieved;
                --cur.next_left;
            }
        }
    }

    std::vector<ResultEntry> out = best.items();
    if (stats) {
        stats->exact_distance_calls += backend.distance_calls - calls0;
        stats->vertices_settled += backend.vertices_settled - settled0;
        stats->wall_time += std::chrono::steady_clock::now() - t0;
    }
    return out;
}

std::vector<Vertex> range_query(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                                Vertex q, Distance r, QueryStats* stats, QueryTrace* trace) {
    if (q >= sul.graph.vertex_count()) throw ConfigError("query vertex id out of range");
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t calls0 = backend.distance_calls;
    std::uint64_t settled0 = backend.vertices_settled;
    Vertex qi = sul.old_to_new[q];

    Workspace ws{col, sul, backend, {qi}, Aggregate::Max, stats, trace};
    std::vector<Vertex> hits;  // reordered ids until the end

    if (!col.empty()) {
        std::vector<std::uint32_t> stack{0};
        // Root handled like any node: bounds first, lists only at leaves.
        while (!stack.empty()) {
            std::uint32_t n = stack.back();
            stack.pop_back();
            if (stats) ++stats->nodes_visited;
            const ColNode& cn = col.nodes[n];

            if (!cn.leaf) {
                for (std::uint32_t c : cn.children) {
                    if (node_lower_bound(col, sul, c, qi) > r) continue;
                    if (node_upper_bound(col, sul, c, qi) <= r) {
                        collect_objects(col, c, hits);  // whole subtree qualifies
                    } else {
                        stack.push_back(c);
                    }
                }
                continue;
            }

            // Pick the list maximizing how many objects the in-range prefix
            // reports for free; if no list has such a prefix, fall back to the
            // landmark separating q from the objects best.
            const SulNode& sn = sul.nodes[cn.sul_node];
            std::size_t pick = 0;
            std::size_t best_count = 0;
            for (std::size_t l = 0; l < sn.landmarks.size(); ++l) {
                Distance ub = cn.sul_node == 0 ? sul.root_distance(l, qi)
                                               : sul.root_point_ub(qi, sn.landmarks[l]);
                if (ub > r) continue;
                std::span<const OdlEntry> list = cn.odls[l];
                Distance slack = r - ub;
                auto end = std::upper_bound(
                    list.begin(), list.end(), slack,
                    [](Distance v, const OdlEntry& e) { return v < e.dist; });
                std::size_t count = static_cast<std::size_t>(end - list.begin());
                if (count > best_count) {
                    pick = l;
                    best_count = count;
                }
            }
            if (best_count == 0) {
                Distance pick_lb = 0;
                for (std::size_t l = 0; l < sn.landmarks.size(); ++l) {
                    Distance lb = cn.sul_node == 0 ? sul.root_distance(l, qi)
                                                   : sul.root_point_lb(qi, sn.landmarks[l]);
                    if (l == 0 || lb > pick_lb) {
                        pick = l;
                        pick_lb = lb;
                    }
                }
            }

            std::span<const OdlEntry> odl = cn.odls[pick];
            Distance c0 = ws.exact_to_landmark(qi, cn.sul_node, pick);
            if (trace) trace->leaf_inits.push_back({n, pick, 0, {c0}});

            // Ascending prefix: d(q,l) + d(l,p) <= r needs no verification.
            std::size_t ip = 0;
            while (ip < odl.size() && c0 + odl[ip].dist <= r) {
                hits.push_back(odl[ip].object);
                ++ip;
            }
            // Remaining entries are checked outward while |c0 - d| can stay
            // within r; each direction is monotone in that gap.
            auto decide = [&](std::size_t i) {
                Distance gap = c0 > odl[i].dist ? c0 - odl[i].dist : odl[i].dist - c0;
                Vertex p = odl[i].object;
                Distance lb = std::max(gap, sul.root_point_lb(qi, p));
                if (stats) ++stats->candidates_retrieved;
                if (lb > r) return;
                Distance ub = std::min(c0 + odl[i].dist, sul.root_point_ub(qi, p));
                if (ub <= r) {
                    hits.push_back(p);
                    return;
                }
                Distance d = ws.exact(qi, p);
                if (trace) trace->evaluations.emplace_back(lb, d);
                if (d <= r) hits.push_back(p);
            };
            auto it = std::upper_bound(odl.begin(), odl.end(), c0,
                                       [](Distance v, const OdlEntry& e) { return v < e.dist; });
            std::ptrdiff_t lp = (it - odl.begin()) - 1;  // last entry with dist <= c0
            std::size_t rp = std::max<std::size_t>(ip, static_cast<std::size_t>(lp + 1));
            for (std::ptrdiff_t i = lp; i >= static_cast<std::ptrdiff_t>(ip); --i) {
                if (c0 - odl[static_cast<std::size_t>(i)].dist > r) break;
                decide(static_cast<std::size_t>(i));
            }
            for (std::size_t i = rp; i < odl.size(); ++i) {
                Distance gap = odl[i].dist > c0 ? odl[i].dist - c0 : c0 - odl[i].dist;
                if (gap > r) break;
                decide(i);
            }
        }
    }

    for (Vertex& v : hits) v = sul.new_to_old[v];
    std::sort(hits.begin(), hits.end());
    if (stats) {
        stats->exact_distance_calls += backend.distance_calls - calls0;
        stats->vertices_settled += backend.vertices_settled - settled0;
        stats->wall_time += std::chrono::steady_clock::now() - t0;
    }
    return hits;
}

std::vector<ResultEntry> knn(const ColTree& col, const SulTree& sul, DistanceBackend& backend,
                             Vertex q, std::size_t k, QueryStats* stats, QueryTrace* trace) {
    Vertex qs[1] = {q};
    return aknn(col, sul, backend, qs, k, Aggregate::Max, stats, trace);
}

}  // namespace colt
