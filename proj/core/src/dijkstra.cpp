#include "colt/dijkstra.hpp"

#include <algorithm>
#include <queue>

namespace colt {

namespace {

struct QueueEntry {
    Distance key;
    Vertex vertex;
    // ties settle the smaller vertex id first
    bool operator>(const QueueEntry& o) const {
        return key != o.key ? key > o.key : vertex > o.vertex;
    }
};

using MinHeap = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>>;

}  // namespace

MultiTargetResult dijkstra_multi_target(const RoadGraph& g, Vertex source,
                                        std::span<const Vertex> targets) {
    std::size_t n = g.vertex_count();
    std::vector<Distance> dist(n, kInfDistance);
    std::vector<bool> done(n, false);
    std::vector<bool> wanted(n, false);
    std::size_t remaining = 0;
    for (Vertex t : targets) {
        if (!wanted[t]) ++remaining;
        wanted[t] = true;
    }

    MinHeap heap;
    dist[source] = 0;
    heap.push({0, source});
    MultiTargetResult res;

    while (!heap.empty() && remaining > 0) {
        auto [key, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = true;
        res.settled++;
        if (wanted[u]) --remaining;
        for (const AdjEntry& e : g.neighbors(u)) {
            Distance nd = key + e.weight;
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                heap.push({nd, e.to});
            }
        }
    }

    res.distances.reserve(targets.size());
    for (Vertex t : targets) res.distances.push_back(dist[t]);
    return res;
}

std::vector<Distance> dijkstra_all(const RoadGraph& g, Vertex source, std::size_t* settled) {
    std::size_t n = g.vertex_count();
    std::vector<Distance> dist(n, kInfDistance);
    std::vector<bool> done(n, false);
    MinHeap heap;
    dist[source] = 0;
    heap.push({0, source});
    std::size_t count = 0;
    while (!heap.empty()) {
        auto [key, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = true;
        ++count;
        for (const AdjEntry& e : g.neighbors(u)) {
            Distance nd = key + e.weight;
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                heap.push({nd, e.to});
            }
        }
    }
    if (settled) *settled = count;
    return dist;
}

RangeDistances dijkstra_to_range(const RoadGraph& g, Vertex source, Vertex first, Vertex last) {
    std::vector<Vertex> targets(last - first);
    for (Vertex v = first; v < last; ++v) targets[v - first] = v;
    MultiTargetResult mt = dijkstra_multi_target(g, source, targets);
    RangeDistances res;
    res.distances = std::move(mt.distances);
    res.settled = mt.settled;
    for (Distance d : res.distances)
        if (d != kInfDistance && d > res.max_distance) res.max_distance = d;
    return res;
}

BorderContext make_border_context(const RoadGraph& g, Vertex first, Vertex last,
                                  const RootSdlView& root) {
    BorderContext ctx;
    ctx.first = first;
    ctx.last = last;
    for (Vertex v = first; v < last; ++v) {
        for (const AdjEntry& e : g.neighbors(v)) {
            if (e.to < first || e.to >= last) {
                ctx.border.push_back(v);
                break;
            }
        }
    }
    ctx.border_min.assign(root.landmark_count, kInfDistance);
    ctx.border_max.assign(root.landmark_count, 0);
    ctx.range_max.assign(root.landmark_count, 0);
    for (std::size_t l = 0; l < root.landmark_count; ++l) {
        for (Vertex b : ctx.border) {
            Distance d = root.at(l, b);
            ctx.border_min[l] = std::min(ctx.border_min[l], d);
            ctx.border_max[l] = std::max(ctx.border_max[l], d);
        }
        for (Vertex v = first; v < last; ++v)
            ctx.range_max[l] = std::max(ctx.range_max[l], root.at(l, v));
    }
    return ctx;
}

namespace {

// Lower bound on the distance from v to any border vertex: per root landmark,
// d(l,v) above the border band gives d(l,v)-max, below it gives min-d(l,v).
Distance border_lb(const BorderContext& ctx, const RootSdlView& root, Vertex v) {
    Distance best = 0;
    for (std::size_t l = 0; l < root.landmark_count; ++l) {
        Distance dlv = root.at(l, v);
        Distance lb = 0;
        if (dlv >= ctx.border_max[l])
            lb = dlv - ctx.border_max[l];
        else if (dlv <= ctx.border_min[l])
            lb = ctx.border_min[l] - dlv;
        best = std::max(best, lb);
    }
    return best;
}

// Upper bound on the distance from the source to the farthest subgraph
// vertex; interior vertices can lie beyond every border vertex, so the bound
// must span the whole range or pruning could sever their only shortest path.
Distance range_ub(const BorderContext& ctx, const RootSdlView& root, Vertex source) {
    Distance best = kInfDistance;
    for (std::size_t l = 0; l < root.landmark_count; ++l) {
        Distance d = root.at(l, source);
        if (ctx.range_max[l] == kInfDistance) continue;
        best = std::min(best, d + ctx.range_max[l]);
    }
    return best;
}

struct RestrictedEntry {
    Distance key;  // pathmax-monotonized g + heuristic
    Distance g;
    Vertex vertex;
    bool operator>(const RestrictedEntry& o) const {
        return key != o.key ? key > o.key : vertex > o.vertex;
    }
};

}  // namespace

RangeDistances border_restricted_dijkstra(const RoadGraph& g, Vertex source, Vertex first,
                                          Vertex last, const BorderContext& ctx,
                                          const RootSdlView& root,
                                          std::vector<Distance>* extracted_keys) {
    std::size_t n = g.vertex_count();
    std::size_t range_len = last - first;
    std::vector<Distance> dist(n, kInfDistance);
    std::vector<bool> expanded_at(n, false);  // re-expansion allowed on better g
    std::vector<Distance> expanded_g(n, kInfDistance);

    auto inside = [&](Vertex v) { return v >= first && v < last; };
    Distance admissible_ub = std::min(range_ub(ctx, root, source), ctx.intra_ub);

    std::priority_queue<RestrictedEntry, std::vector<RestrictedEntry>,
                        std::greater<RestrictedEntry>>
        heap;
    dist[source] = 0;
    heap.push({0, 0, source});

    RangeDistances res;
    std::size_t settled_inside = 0;

    while (!heap.empty() && settled_inside < range_len) {
        auto [key, gd, u] = heap.top();
        heap.pop();
        if (gd > dist[u]) continue;                      // superseded by a better path
        if (expanded_at[u] && expanded_g[u] <= gd) continue;  // already expanded at this g
        if (inside(u) && !expanded_at[u]) {
            // an internal vertex is exact at its first expansion (see header note)
            ++settled_inside;
            if (gd > res.max_distance) res.max_distance = gd;
        }
        expanded_at[u] = true;
        expanded_g[u] = gd;
        res.settled++;
        if (extracted_keys) extracted_keys->push_back(key);

        for (const AdjEntry& e : g.neighbors(u)) {
            Distance nd = gd + e.weight;
            if (nd >= dist[e.to]) continue;
            dist[e.to] = nd;
            Distance h = inside(e.to) ? 0 : border_lb(ctx, root, e.to);
            Distance f = nd > kInfDistance - h ? kInfDistance : nd + h;
            // pathmax keeps extracted keys non-decreasing under this heuristic
            Distance child_key = std::max(key, f);
            if (!inside(e.to) && child_key > admissible_ub) continue;  // cannot serve the range
            heap.push({child_key, nd, e.to});
        }
    }

    res.distances.resize(range_len);
    for (Vertex v = first; v < last; ++v) res.distances[v - first] = dist[v];
    return res;
}

}  // namespace colt
