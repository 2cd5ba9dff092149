#include "colt/partition.hpp"

#include <algorithm>
#include <deque>

namespace colt {

namespace {

bool is_pow2(std::uint32_t b) { return b != 0 && (b & (b - 1)) == 0; }

// Recursive bisection along the wider bounding-box axis.  Lower-coordinate
// half receives ceil(s/2) vertices, so repeated halving never produces a part
// above ceil(s/b).
void bisect(const RoadGraph& g, std::vector<Vertex>& subset, std::size_t lo, std::size_t hi,
            std::uint32_t part_lo, std::uint32_t part_count,
            std::vector<std::uint32_t>& part_of) {
    if (part_count == 1) {
        for (std::size_t i = lo; i < hi; ++i) part_of[subset[i]] = part_lo;
        return;
    }
    double min_x = g.coords[subset[lo]].x, max_x = min_x;
    double min_y = g.coords[subset[lo]].y, max_y = min_y;
    for (std::size_t i = lo; i < hi; ++i) {
        const Point& p = g.coords[subset[i]];
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    bool by_x = (max_x - min_x) >= (max_y - min_y);
    std::sort(subset.begin() + lo, subset.begin() + hi, [&](Vertex a, Vertex b) {
        double ca = by_x ? g.coords[a].x : g.coords[a].y;
        double cb = by_x ? g.coords[b].x : g.coords[b].y;
        return ca != cb ? ca < cb : a < b;
    });
    std::size_t left = (hi - lo + 1) / 2;  // ceil
    bisect(g, subset, lo, lo + left, part_lo, part_count / 2, part_of);
    bisect(g, subset, lo + left, hi, part_lo + part_count / 2, part_count / 2, part_of);
}

// Seeds spread via greedy k-center on BFS hop distance inside the induced
// subgraph; first seed is the smallest id.
std::vector<Vertex> spread_seeds(const std::vector<Vertex>& subset,
                                 const std::vector<std::vector<std::uint32_t>>& nbr,
                                 std::uint32_t b) {
    std::size_t s = subset.size();
    std::vector<std::uint32_t> hop(s, kNoNode);
    std::vector<Vertex> seeds;
    std::deque<std::uint32_t> queue;
    std::uint32_t next = 0;  // position of the smallest id (subset is sorted)
    for (std::uint32_t round = 0; round < b; ++round) {
        seeds.push_back(subset[next]);
        hop[next] = 0;
        queue.push_back(next);
        while (!queue.empty()) {
            std::uint32_t u = queue.front();
            queue.pop_front();
            for (std::uint32_t v : nbr[u]) {
                if (hop[v] > hop[u] + 1) {
                    hop[v] = hop[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        std::uint32_t far = 0;
        for (std::uint32_t i = 1; i < s; ++i)
            if (hop[i] > hop[far]) far = i;  // unreached (kNoNode) wins; ties keep smaller id
        next = far;
    }
    return seeds;
}

PartitionAssignment grow_regions(const RoadGraph& g, const std::vector<Vertex>& subset,
                                 std::uint32_t b) {
    std::size_t s = subset.size();
    // induced adjacency in subset positions
    std::vector<std::uint32_t> pos(g.vertex_count(), kNoNode);
    for (std::uint32_t i = 0; i < s; ++i) pos[subset[i]] = i;
    std::vector<std::vector<std::uint32_t>> nbr(s);
    for (std::uint32_t i = 0; i < s; ++i)
        for (const AdjEntry& e : g.neighbors(subset[i]))
            if (pos[e.to] != kNoNode) nbr[i].push_back(pos[e.to]);

    std::vector<Vertex> seeds = spread_seeds(subset, nbr, b);

    PartitionAssignment out;
    out.parts = b;
    out.part.assign(s, kNoNode);
    std::size_t cap = (s + b - 1) / b;
    std::vector<std::size_t> size(b, 0);
    std::vector<std::deque<std::uint32_t>> frontier(b);
    for (std::uint32_t r = 0; r < b; ++r) {
        std::uint32_t p = pos[seeds[r]];
        out.part[p] = r;
        size[r] = 1;
        frontier[r].push_back(p);
    }

    // round-robin growth, one vertex per region per round, bounded by cap
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::uint32_t r = 0; r < b; ++r) {
            if (frontier[r].empty()) continue;
            std::uint32_t u = frontier[r].front();
            frontier[r].pop_front();
            progress = true;
            for (std::uint32_t v : nbr[u]) {
                if (out.part[v] != kNoNode || size[r] >= cap) continue;
                out.part[v] = r;
                size[r]++;
                frontier[r].push_back(v);
            }
        }
    }

    // leftovers (capped off or disconnected) go to the currently smallest part
    for (std::uint32_t i = 0; i < s; ++i) {
        if (out.part[i] != kNoNode) continue;
        std::uint32_t best = 0;
        for (std::uint32_t r = 1; r < b; ++r)
            if (size[r] < size[best]) best = r;
        out.part[i] = best;
        size[best]++;
    }
    return out;
}

}  // namespace

PartitionAssignment partition_subgraph(const RoadGraph& g, const std::vector<Vertex>& subset,
                                       std::uint32_t b) {
    if (b < 2) throw ConfigError("partition branching must be at least 2");
    if (subset.size() < b)
        throw ConfigError("cannot split " + std::to_string(subset.size()) + " vertices into " +
                          std::to_string(b) + " parts");

    if (g.has_coords() && is_pow2(b)) {
        std::vector<Vertex> order = subset;
        std::vector<std::uint32_t> part_of(g.vertex_count(), kNoNode);
        bisect(g, order, 0, order.size(), 0, b, part_of);
        PartitionAssignment out;
        out.parts = b;
        out.part.resize(subset.size());
        for (std::size_t i = 0; i < subset.size(); ++i) out.part[i] = part_of[subset[i]];
        return out;
    }
    return grow_regions(g, subset, b);
}

PartitionTree recursive_partition(const RoadGraph& g, std::uint32_t b, std::size_t leaf_cap) {
    if (leaf_cap < b) throw ConfigError("leaf capacity must be at least the branching factor");
    PartitionTree tree;
    tree.branching = b;
    tree.leaf_cap = leaf_cap;

    std::vector<Vertex> all(g.vertex_count());
    for (Vertex v = 0; v < g.vertex_count(); ++v) all[v] = v;

    struct Pending {
        std::uint32_t node;
        std::vector<Vertex> vertices;
    };
    tree.nodes.push_back({});
    tree.nodes[0].size = all.size();
    std::vector<Pending> stack;
    stack.push_back({0, std::move(all)});

    while (!stack.empty()) {
        Pending cur = std::move(stack.back());
        stack.pop_back();
        if (cur.vertices.size() <= leaf_cap) {
            std::sort(cur.vertices.begin(), cur.vertices.end());
            tree.nodes[cur.node].vertices = std::move(cur.vertices);
            continue;
        }
        PartitionAssignment asg = partition_subgraph(g, cur.vertices, b);
        std::vector<std::vector<Vertex>> groups(b);
        for (std::size_t i = 0; i < cur.vertices.size(); ++i)
            groups[asg.part[i]].push_back(cur.vertices[i]);
        for (std::uint32_t r = 0; r < b; ++r) {
            std::uint32_t child = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.push_back({});
            tree.nodes[child].parent = cur.node;
            tree.nodes[child].size = groups[r].size();
            tree.nodes[cur.node].children.push_back(child);
            stack.push_back({child, std::move(groups[r])});
        }
    }
    return tree;
}

}  // namespace colt
