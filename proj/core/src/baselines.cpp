#include "colt/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "colt/dijkstra.hpp"

namespace colt {

namespace {

std::vector<Vertex> checked_objects(const RoadGraph& g, std::span<const Vertex> objects) {
    std::vector<Vertex> out(objects.begin(), objects.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (!out.empty() && out.back() >= g.vertex_count()) {
        throw ConfigError("object vertex id out of range");
    }
    return out;
}

// Saturating accumulate so unreachable objects stay at infinity instead of
// wrapping the sum.
Distance accumulate(Aggregate agg, Distance acc, Distance d) {
    if (agg == Aggregate::Max) return std::max(acc, d);
    if (acc == kInfDistance || d == kInfDistance) return kInfDistance;
    return acc + d;
}

struct ScoredObjects {
    std::vector<Distance> scores;  // aligned with the object list
    std::uint64_t settled = 0;
};

ScoredObjects score_all(const RoadGraph& g, std::span<const Vertex> objects,
                        std::span<const Vertex> query_set, Aggregate agg) {
    ScoredObjects out;
    out.scores.assign(objects.size(), 0);
    for (Vertex q : query_set) {
        if (q >= g.vertex_count()) throw ConfigError("query vertex id out of range");
        MultiTargetResult r = dijkstra_multi_target(g, q, objects);
        out.settled += r.settled;
        for (std::size_t i = 0; i < objects.size(); ++i) {
            out.scores[i] = accumulate(agg, out.scores[i], r.distances[i]);
        }
    }
    return out;
}

std::vector<ResultEntry> take_best(std::span<const Vertex> objects,
                                   std::span<const Distance> scores, std::size_t k,
                                   bool largest) {
    BestK best(std::min(k, objects.size()), largest);
    for (std::size_t i = 0; i < objects.size(); ++i) best.offer(scores[i], objects[i]);
    return best.items();
}

void add_brute_stats(QueryStats* stats, std::size_t objects, std::size_t queries,
                     std::uint64_t settled, std::chrono::steady_clock::time_point t0) {
    if (!stats) return;
    stats->exact_distance_calls += objects * queries;
    stats->candidates_retrieved += objects;
    stats->vertices_settled += settled;
    stats->wall_time += std::chrono::steady_clock::now() - t0;
}

}  // namespace

std::vector<ResultEntry> brute_aknn(const RoadGraph& g, std::span<const Vertex> objects,
                                    std::span<const Vertex> query_set, std::size_t k,
                                    Aggregate agg, QueryStats* stats) {
    if (query_set.empty()) throw ConfigError("aggregate query needs a non-empty query set");
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Vertex> p = checked_objects(g, objects);
    ScoredObjects scored = score_all(g, p, query_set, agg);
    auto out = take_best(p, scored.scores, k, /*largest=*/false);
    add_brute_stats(stats, p.size(), query_set.size(), scored.settled, t0);
    return out;
}

std::vector<ResultEntry> brute_kfn(const RoadGraph& g, std::span<const Vertex> objects, Vertex q,
                                   std::size_t k, QueryStats* stats) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Vertex> p = checked_objects(g, objects);
    Vertex qs[1] = {q};
    ScoredObjects scored = score_all(g, p, qs, Aggregate::Max);
    auto out = take_best(p, scored.scores, k, /*largest=*/true);
    add_brute_stats(stats, p.size(), 1, scored.settled, t0);
    return out;
}

std::vector<Vertex> brute_range(const RoadGraph& g, std::span<const Vertex> objects, Vertex q,
                                Distance r, QueryStats* stats) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Vertex> p = checked_objects(g, objects);
    Vertex qs[1] = {q};
    ScoredObjects scored = score_all(g, p, qs, Aggregate::Max);
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (scored.scores[i] <= r) out.push_back(p[i]);
    }
    add_brute_stats(stats, p.size(), 1, scored.settled, t0);
    return out;
}

std::vector<ResultEntry> brute_knn(const RoadGraph& g, std::span<const Vertex> objects, Vertex q,
                                   std::size_t k, QueryStats* stats) {
    Vertex qs[1] = {q};
    return brute_aknn(g, objects, qs, k, Aggregate::Max, stats);
}

std::vector<ResultEntry> aub_kfn(const SulTree& sul, DistanceBackend& backend,
                                 std::span<const Vertex> objects, Vertex q, std::size_t k,
                                 QueryStats* stats) {
    if (q >= sul.graph.vertex_count()) throw ConfigError("query vertex id out of range");
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t calls0 = backend.distance_calls;
    std::uint64_t settled0 = backend.vertices_settled;
    std::vector<Vertex> p = checked_objects(sul.graph, objects);
    Vertex qi = sul.old_to_new[q];

    struct Candidate {
        Distance ub;
        Vertex object;  // original id
        Vertex internal;
    };
    std::vector<Candidate> cands;
    cands.reserve(p.size());
    for (Vertex v : p) {
        Vertex vi = sul.old_to_new[v];
        cands.push_back({sul.root_point_ub(qi, vi), v, vi});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.ub != b.ub ? a.ub > b.ub : a.object < b.object;
    });

    BestK best(std::min(k, p.size()), /*largest=*/true);
    for (const Candidate& c : cands) {
        // An upper bound below the running k-th distance cannot improve the
        // result; at equality the exact distance may still tie and win on id.
        if (c.ub < best.threshold()) break;
        best.offer(backend.exact_distance(qi, c.internal), c.object);
        if (stats) ++stats->candidates_retrieved;
    }

    if (stats) {
        stats->exact_distance_calls += backend.distance_calls - calls0;
        stats->vertices_settled += backend.vertices_settled - settled0;
        stats->wall_time += std::chrono::steady_clock::now() - t0;
    }
    return best.items();
}

double mindist(const Mbr& box, const Point& p) {
    double dx = std::max({box.min_x - p.x, 0.0, p.x - box.max_x});
    double dy = std::max({box.min_y - p.y, 0.0, p.y - box.max_y});
    return std::hypot(dx, dy);
}

namespace {

Mbr point_box(const Point& p) { return {p.x, p.y, p.x, p.y}; }

Mbr merge(const Mbr& a, const Mbr& b) {
    return {std::min(a.min_x, b.min_x), std::min(a.min_y, b.min_y), std::max(a.max_x, b.max_x),
            std::max(a.max_y, b.max_y)};
}

Point center(const Mbr& b) { return {(b.min_x + b.max_x) / 2, (b.min_y + b.max_y) / 2}; }

// Sort-tile-recursive packing of one level: slice by x into vertical runs,
// tile each run by y, cut tiles into groups of `cap`.
std::vector<std::vector<std::uint32_t>> str_pack(std::span<const Point> pts,
                                                 std::span<const std::uint32_t> ids,
                                                 std::size_t cap) {
    std::vector<std::uint32_t> order(ids.begin(), ids.end());
    auto by_x = [&](std::uint32_t a, std::uint32_t b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
        return a < b;
    };
    auto by_y = [&](std::uint32_t a, std::uint32_t b) {
        if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        return a < b;
    };
    std::sort(order.begin(), order.end(), by_x);

    std::size_t n = order.size();
    std::size_t groups = (n + cap - 1) / cap;
    std::size_t slices = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(groups))));
    std::size_t slice_len = slices == 0 ? n : (n + slices - 1) / slices;

    std::vector<std::vector<std::uint32_t>> out;
    for (std::size_t s = 0; s < n; s += slice_len) {
        std::size_t e = std::min(n, s + slice_len);
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(s),
                  order.begin() + static_cast<std::ptrdiff_t>(e), by_y);
        for (std::size_t i = s; i < e; i += cap) {
            std::size_t j = std::min(e, i + cap);
            out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                             order.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }
    return out;
}

}  // namespace

StrRtree::StrRtree(const RoadGraph& g, std::span<const Vertex> objects,
                   std::size_t leaf_capacity) {
    if (!g.has_coords()) throw ConfigError("R-tree construction requires vertex coordinates");
    if (leaf_capacity < 2) throw ConfigError("R-tree leaf capacity must be at least 2");
    std::vector<Vertex> p = checked_objects(g, objects);
    if (p.empty()) throw ConfigError("R-tree construction needs at least one object");
    object_count_ = p.size();

    // Leaf level over the object points.
    std::vector<Point> pts;
    std::vector<std::uint32_t> idx;
    pts.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        pts.push_back(g.coords[p[i]]);
        idx.push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<std::uint32_t> level;
    for (const auto& group : str_pack(pts, idx, leaf_capacity)) {
        RtreeNode node;
        node.leaf = true;
        node.box = point_box(pts[group[0]]);
        for (std::uint32_t gi : group) {
            node.box = merge(node.box, point_box(pts[gi]));
            node.objects.push_back(p[gi]);
        }
        level.push_back(static_cast<std::uint32_t>(nodes_.size()));
        nodes_.push_back(std::move(node));
    }

    // Pack upward on node centers until a single root remains.
    while (level.size() > 1) {
        std::vector<Point> centers;
        std::vector<std::uint32_t> ids;
        centers.reserve(level.size());
        for (std::size_t i = 0; i < level.size(); ++i) {
            centers.push_back(center(nodes_[level[i]].box));
            ids.push_back(static_cast<std::uint32_t>(i));
        }
        std::vector<std::uint32_t> next;
        for (const auto& group : str_pack(centers, ids, leaf_capacity)) {
            RtreeNode node;
            node.box = nodes_[level[group[0]]].box;
            for (std::uint32_t gi : group) {
                node.box = merge(node.box, nodes_[level[gi]].box);
                node.children.push_back(level[gi]);
            }
            next.push_back(static_cast<std::uint32_t>(nodes_.size()));
            nodes_.push_back(std::move(node));
        }
        level = std::move(next);
    }
    root_ = level[0];
}

namespace {

// Network-distance lower bound from a Euclidean gap, matching the graph-wide
// speed normalization.
Distance euclid_lb(const RoadGraph& g, double gap) {
    return static_cast<Distance>(std::floor(gap / g.max_speed));
}

struct IerEntry {
    Distance key;
    std::uint8_t kind;  // 0 object, 1 tree node; objects first on key ties
    std::uint32_t id;
};
struct IerOrder {
    bool operator()(const IerEntry& a, const IerEntry& b) const {
        if (a.key != b.key) return a.key > b.key;
        if (a.kind != b.kind) return a.kind > b.kind;
        return a.id > b.id;
    }
};

}  // namespace

std::vector<ResultEntry> ier_aknn(const RoadGraph& g, const StrRtree& rtree,
                                  DistanceBackend& backend, std::span<const Vertex> query_set,
                                  std::size_t k, Aggregate agg, QueryStats* stats) {
    if (query_set.empty()) throw ConfigError("aggregate query needs a non-empty query set");
    for (Vertex q : query_set) {
        if (q >= g.vertex_count()) throw ConfigError("query vertex id out of range");
    }
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t calls0 = backend.distance_calls;
    std::uint64_t settled0 = backend.vertices_settled;

    auto node_lb = [&](const Mbr& box) {
        Distance acc = 0;
        for (Vertex q : query_set) {
            acc = accumulate(agg, acc, euclid_lb(g, mindist(box, g.coords[q])));
        }
        return acc;
    };
    auto object_lb = [&](Vertex p) {
        Distance acc = 0;
        for (Vertex q : query_set) acc = accumulate(agg, acc, euclidean_lower_bound(g, q, p));
        return acc;
    };

    BestK best(std::min<std::size_t>(k, rtree.object_count()), /*largest=*/false);
    std::priority_queue<IerEntry, std::vector<IerEntry>, IerOrder> pq;
    pq.push({node_lb(rtree.nodes()[rtree.root()].box), 1, rtree.root()});

    while (!pq.empty() && pq.top().key <= best.threshold()) {
        IerEntry top = pq.top();
        pq.pop();
        if (top.kind == 0) {
            Distance score = 0;
            for (Vertex q : query_set) {
                score = accumulate(agg, score, backend.exact_distance(q, top.id));
            }
            best.offer(score, top.id);
            continue;
        }
        if (stats) ++stats->nodes_visited;
        const RtreeNode& node = rtree.nodes()[top.id];
        if (node.leaf) {
            for (Vertex p : node.objects) {
                pq.push({std::max(top.key, object_lb(p)), 0, p});
                if (stats) ++stats->candidates_retrieved;
            }
        } else {
            for (std::uint32_t c : node.children) {
                pq.push({std::max(top.key, node_lb(rtree.nodes()[c].box)), 1, c});
            }
        }
    }

    if (stats) {
        stats->exact_distance_calls += backend.distance_calls - calls0;
        stats->vertices_settled += backend.vertices_settled - settled0;
        stats->wall_time += std::chrono::steady_clock::now() - t0;
    }
    return best.items();
}

std::vector<ResultEntry> ier_knn(const RoadGraph& g, const StrRtree& rtree,
                                 DistanceBackend& backend, Vertex q, std::size_t k,
                                 QueryStats* stats) {
    Vertex qs[1] = {q};
    return ier_aknn(g, rtree, backend, qs, k, Aggregate::Max, stats);
}

std::vector<Vertex> ier_range(const RoadGraph& g, const StrRtree& rtree, DistanceBackend& backend,
                              Vertex q, Distance r, QueryStats* stats) {
    if (q >= g.vertex_count()) throw ConfigError("query vertex id out of range");
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t calls0 = backend.distance_calls;
    std::uint64_t settled0 = backend.vertices_settled;

    std::vector<Vertex> hits;
    std::vector<std::uint32_t> stack{rtree.root()};
    while (!stack.empty()) {
        std::uint32_t n = stack.back();
        stack.pop_back();
        const RtreeNode& node = rtree.nodes()[n];
        if (euclid_lb(g, mindist(node.box, g.coords[q])) > r) continue;
        if (stats) ++stats->nodes_visited;
        if (!node.leaf) {
            stack.insert(stack.end(), node.children.begin(), node.children.end());
            continue;
        }
        for (Vertex p : node.objects) {
            if (stats) ++stats->candidates_retrieved;
            if (euclidean_lower_bound(g, q, p) > r) continue;
            if (backend.exact_distance(q, p) <= r) hits.push_back(p);
        }
    }
    std::sort(hits.begin(), hits.end());

    if (stats) {
        stats->exact_distance_calls += backend.distance_calls - calls0;
        stats->vertices_settled += backend.vertices_settled - settled0;
        stats->wall_time += std::chrono::steady_clock::now() - t0;
    }
    return hits;
}

}  // namespace colt
