#include "colt/sultree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <numbers>
#include <ostream>

#include "colt/binary_io.hpp"
#include "colt/rng.hpp"

namespace colt {

const char* to_string(LandmarkPolicy p) {
    switch (p) {
        case LandmarkPolicy::Random: return "random";
        case LandmarkPolicy::FurthestBorder: return "furthest-border";
        case LandmarkPolicy::SliceFurthestBorder: return "slice";
        case LandmarkPolicy::BorderMinmax: return "minmax";
    }
    return "?";
}

LandmarkPolicy landmark_policy_from_string(const std::string& s) {
    if (s == "random") return LandmarkPolicy::Random;
    if (s == "furthest-border") return LandmarkPolicy::FurthestBorder;
    if (s == "slice") return LandmarkPolicy::SliceFurthestBorder;
    if (s == "minmax") return LandmarkPolicy::BorderMinmax;
    throw ConfigError("unknown landmark policy: " + s);
}

SubgraphOrder assign_subgraph_order(const PartitionTree& pt) {
    SubgraphOrder ord;
    ord.node_range.resize(pt.nodes.size());

    // iterative DFS; children visited in stored order
    struct Frame {
        std::uint32_t node;
        std::size_t next_child = 0;
    };
    std::vector<Frame> stack{{0, 0}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        const PartitionTreeNode& n = pt.nodes[f.node];
        if (f.next_child == 0) {
            ord.node_range[f.node].first = static_cast<Vertex>(ord.new_to_old.size());
            if (n.is_leaf()) {
                for (Vertex v : n.vertices) ord.new_to_old.push_back(v);
            }
        }
        if (f.next_child < n.children.size()) {
            std::uint32_t child = n.children[f.next_child++];
            stack.push_back({child, 0});
        } else {
            ord.node_range[f.node].second = static_cast<Vertex>(ord.new_to_old.size());
            stack.pop_back();
        }
    }

    ord.old_to_new.assign(ord.new_to_old.size(), kNoVertex);
    for (std::size_t i = 0; i < ord.new_to_old.size(); ++i)
        ord.old_to_new[ord.new_to_old[i]] = static_cast<Vertex>(i);
    return ord;
}

namespace {

void pad_with_random(std::vector<Vertex>& chosen, Vertex first, Vertex last, std::uint32_t m,
                     std::mt19937_64& rng) {
    if (chosen.size() >= m) {
        chosen.resize(m);
        return;
    }
    std::vector<bool> taken(last - first, false);
    for (Vertex v : chosen) taken[v - first] = true;
    std::vector<Vertex> pool;
    for (Vertex v = first; v < last; ++v)
        if (!taken[v - first]) pool.push_back(v);
    std::vector<Vertex> extra =
        sample_from_pool(rng, pool, static_cast<std::uint32_t>(m - chosen.size()));
    chosen.insert(chosen.end(), extra.begin(), extra.end());
}

std::vector<Vertex> pick_furthest_border(const RoadGraph& g, Vertex first, Vertex last,
                                         const std::vector<Vertex>& borders, std::uint32_t m,
                                         std::mt19937_64& rng) {
    std::vector<Vertex> chosen;
    if (!borders.empty()) {
        std::vector<bool> used(borders.size(), false);
        std::size_t pick = bounded(rng, borders.size());
        used[pick] = true;
        chosen.push_back(borders[pick]);
        std::vector<Distance> closest =
            dijkstra_multi_target(g, borders[pick], borders).distances;
        while (chosen.size() < m && chosen.size() < borders.size()) {
            std::size_t far = borders.size();
            for (std::size_t i = 0; i < borders.size(); ++i) {
                if (used[i]) continue;
                if (far == borders.size() || closest[i] > closest[far]) far = i;
            }
            used[far] = true;
            chosen.push_back(borders[far]);
            std::vector<Distance> d = dijkstra_multi_target(g, borders[far], borders).distances;
            for (std::size_t i = 0; i < borders.size(); ++i)
                closest[i] = std::min(closest[i], d[i]);
        }
    }
    pad_with_random(chosen, first, last, m, rng);
    return chosen;
}

std::vector<Vertex> pick_slice(const RoadGraph& g, Vertex first, Vertex last,
                               const std::vector<Vertex>& borders, std::uint32_t m,
                               std::mt19937_64& rng) {
    if (!g.has_coords()) throw ConfigError("slice landmark policy requires coordinates");
    Point center{0.0, 0.0};
    for (Vertex v = first; v < last; ++v) {
        center.x += g.coords[v].x;
        center.y += g.coords[v].y;
    }
    center.x /= static_cast<double>(last - first);
    center.y /= static_cast<double>(last - first);

    // sector 0 opens eastward, numbering runs counterclockwise
    auto sector_of = [&](Vertex v) {
        double a = std::atan2(g.coords[v].y - center.y, g.coords[v].x - center.x);
        if (a < 0.0) a += 2.0 * std::numbers::pi;
        auto s = static_cast<std::uint32_t>(a / (2.0 * std::numbers::pi) * m);
        return std::min(s, m - 1);
    };

    std::vector<Vertex> best_border(m, kNoVertex), best_vertex(m, kNoVertex);
    std::vector<double> border_d(m, -1.0), vertex_d(m, -1.0);
    for (Vertex v = first; v < last; ++v) {
        std::uint32_t s = sector_of(v);
        double d = euclid(g.coords[v], center);
        if (d > vertex_d[s]) {
            vertex_d[s] = d;
            best_vertex[s] = v;
        }
    }
    for (Vertex b : borders) {
        std::uint32_t s = sector_of(b);
        double d = euclid(g.coords[b], center);
        if (d > border_d[s]) {
            border_d[s] = d;
            best_border[s] = b;
        }
    }

    std::vector<Vertex> chosen;
    for (std::uint32_t s = 0; s < m; ++s) {
        if (best_border[s] != kNoVertex)
            chosen.push_back(best_border[s]);
        else if (best_vertex[s] != kNoVertex)
            chosen.push_back(best_vertex[s]);
        // empty sector: leave the slot to the random padding below
    }
    pad_with_random(chosen, first, last, m, rng);
    return chosen;
}

std::vector<Vertex> pick_border_minmax(const RoadGraph& g, Vertex first, Vertex last,
                                       const std::vector<Vertex>& borders, std::uint32_t m,
                                       std::mt19937_64& rng) {
    std::vector<Vertex> chosen;
    if (!borders.empty()) {
        auto s = static_cast<std::uint32_t>(std::min<std::size_t>(16, borders.size()));
        std::vector<Vertex> sample = sample_from_pool(rng, borders, s);
        std::vector<Distance> worst(last - first, 0);
        for (Vertex b : sample) {
            RangeDistances rd = dijkstra_to_range(g, b, first, last);
            for (Vertex v = first; v < last; ++v)
                worst[v - first] = std::max(worst[v - first], rd.distances[v - first]);
        }
        std::vector<Vertex> order(last - first);
        for (Vertex v = first; v < last; ++v) order[v - first] = v;
        std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
            return worst[a - first] < worst[b - first];  // stable keeps id order on ties
        });
        chosen.assign(order.begin(), order.begin() + std::min<std::size_t>(m, order.size()));
    }
    pad_with_random(chosen, first, last, m, rng);
    return chosen;
}

}  // namespace

std::vector<Vertex> select_landmarks(const RoadGraph& g, Vertex first, Vertex last,
                                     const std::vector<Vertex>& borders, std::uint32_t m,
                                     LandmarkPolicy policy, std::uint64_t seed) {
    if (m > last - first)
        throw ConfigError("subgraph of " + std::to_string(last - first) +
                          " vertices cannot supply " + std::to_string(m) + " landmarks");
    std::mt19937_64 rng(seed);
    switch (policy) {
        case LandmarkPolicy::Random: {
            std::vector<Vertex> chosen;
            pad_with_random(chosen, first, last, m, rng);
            return chosen;
        }
        case LandmarkPolicy::FurthestBorder:
            return pick_furthest_border(g, first, last, borders, m, rng);
        case LandmarkPolicy::SliceFurthestBorder:
            return pick_slice(g, first, last, borders, m, rng);
        case LandmarkPolicy::BorderMinmax:
            return pick_border_minmax(g, first, last, borders, m, rng);
    }
    throw ConfigError("unknown landmark policy");
}

namespace {

void store_sdl_row(SulTree& t, const SulNode& n, std::size_t landmark_idx,
                   const std::vector<Distance>& distances) {
    for (Vertex v = n.first; v < n.last; ++v) {
        Distance d = distances[v - n.first];
        if (d == kInfDistance)
            throw ConfigError("subgraph vertex unreachable; normalize the graph first");
        if (d > std::numeric_limits<StoredDistance>::max())
            throw ConfigError("distance exceeds 32-bit SDL storage");
        t.sdl[n.sdl_base + landmark_idx * n.range_len() + (v - n.first)] =
            static_cast<StoredDistance>(d);
    }
}

void fill_node_sdls(SulTree& t, std::uint32_t idx, BorderContext& ctx) {
    SulNode& n = t.nodes[idx];
    for (std::size_t l = 0; l < n.landmarks.size(); ++l) {
        RangeDistances rd =
            t.params.restrict_searches
                ? border_restricted_dijkstra(t.graph, n.landmarks[l], n.first, n.last, ctx,
                                             t.root_view())
                : dijkstra_to_range(t.graph, n.landmarks[l], n.first, n.last);
        store_sdl_row(t, n, l, rd.distances);
        ctx.absorb_run(rd.max_distance);
        t.stats.sdl_settled += rd.settled;
        t.stats.sdl_targets += n.range_len();
    }
    n.sdl_ready = true;
}

}  // namespace

SulTree build_sultree(const RoadGraph& g, const SulParams& params) {
    if (params.branching < 2) throw ConfigError("branching must be at least 2");
    if (params.landmarks == 0 || params.root_landmarks == 0)
        throw ConfigError("landmark count must be positive");
    if (g.vertex_count() == 0) throw ConfigError("cannot index an empty graph");
    auto t0 = std::chrono::steady_clock::now();

    PartitionTree pt = recursive_partition(g, params.branching, params.leaf_cap);
    SubgraphOrder ord = assign_subgraph_order(pt);

    SulTree t;
    t.params = params;
    t.new_to_old = std::move(ord.new_to_old);
    t.old_to_new = std::move(ord.old_to_new);
    t.graph = g.permuted(t.new_to_old);

    // level-order node layout: the root's SDLs must exist before any deeper
    // node runs its border-restricted searches
    std::vector<std::uint32_t> pt_of_sul;
    std::deque<std::uint32_t> bfs{0};
    std::vector<std::uint32_t> sul_of_pt(pt.nodes.size(), kNoNode);
    while (!bfs.empty()) {
        std::uint32_t p = bfs.front();
        bfs.pop_front();
        sul_of_pt[p] = static_cast<std::uint32_t>(pt_of_sul.size());
        pt_of_sul.push_back(p);
        for (std::uint32_t c : pt.nodes[p].children) bfs.push_back(c);
    }

    t.nodes.resize(pt_of_sul.size());
    std::uint64_t base = 0;
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        std::uint32_t p = pt_of_sul[i];
        SulNode& n = t.nodes[i];
        n.first = ord.node_range[p].first;
        n.last = ord.node_range[p].second;
        if (pt.nodes[p].parent != kNoNode) n.parent = sul_of_pt[pt.nodes[p].parent];
        for (std::uint32_t c : pt.nodes[p].children) n.children.push_back(sul_of_pt[c]);
        std::uint32_t m = i == 0 ? params.root_landmarks : params.landmarks;
        if (m > n.range_len())
            throw ConfigError("subgraph of " + std::to_string(n.range_len()) +
                              " vertices cannot supply " + std::to_string(m) + " landmarks");
        n.sdl_base = base;
        base += static_cast<std::uint64_t>(m) * n.range_len();
    }
    t.sdl.assign(base, 0);

    // root landmarks and their full-graph SDL rows
    SulNode& root = t.nodes[0];
    root.landmarks = select_landmarks(t.graph, root.first, root.last, {}, params.root_landmarks,
                                      params.policy, derive_seed(params.seed, 0));
    for (std::size_t l = 0; l < root.landmarks.size(); ++l) {
        RangeDistances rd = dijkstra_to_range(t.graph, root.landmarks[l], root.first, root.last);
        store_sdl_row(t, root, l, rd.distances);
    }
    root.sdl_ready = true;

    for (std::uint32_t i = 1; i < t.nodes.size(); ++i) {
        SulNode& n = t.nodes[i];
        BorderContext ctx = make_border_context(t.graph, n.first, n.last, t.root_view());
        n.landmarks = select_landmarks(t.graph, n.first, n.last, ctx.border, params.landmarks,
                                       params.policy, derive_seed(params.seed, i));
        if (params.lazy_leaf_sdls && n.is_leaf()) continue;
        fill_node_sdls(t, i, ctx);
    }

    t.stats.build_time = std::chrono::steady_clock::now() - t0;
    return t;
}

Distance SulTree::root_point_lb(Vertex u, Vertex v) const {
    const SulNode& r = nodes[0];
    Distance best = 0;
    for (std::size_t l = 0; l < r.landmarks.size(); ++l) {
        Distance du = sdl_at(r, l, u), dv = sdl_at(r, l, v);
        best = std::max(best, du > dv ? du - dv : dv - du);
    }
    return best;
}

Distance SulTree::root_point_ub(Vertex u, Vertex v) const {
    const SulNode& r = nodes[0];
    Distance best = kInfDistance;
    for (std::size_t l = 0; l < r.landmarks.size(); ++l)
        best = std::min(best, sdl_at(r, l, u) + sdl_at(r, l, v));
    return best;
}

void SulTree::ensure_sdl(std::uint32_t node) {
    SulNode& n = nodes[node];
    if (n.sdl_ready) return;
    BorderContext ctx = make_border_context(graph, n.first, n.last, root_view());
    fill_node_sdls(*this, node, ctx);
}

void SulTree::ensure_all_sdls() {
    for (std::uint32_t i = 0; i < nodes.size(); ++i) ensure_sdl(i);
}

std::uint64_t SulTree::identity_checksum() const {
    Fnv1a h;
    h.add_u32(params.branching);
    h.add_u64(params.leaf_cap);
    h.add_u32(params.landmarks);
    h.add_u32(params.root_landmarks);
    h.add_u32(static_cast<std::uint32_t>(params.policy));
    h.add_u64(params.seed);
    h.add_u64(vertex_count());
    h.add_u64(nodes.size());
    for (Vertex v : old_to_new) h.add_u32(v);
    return h.value();
}

void save_sultree(SulTree& tree, std::ostream& out) {
    tree.ensure_all_sdls();
    BinaryWriter w(out);
    w.magic("SULT");
    w.u32(1);
    w.u32(tree.params.branching);
    w.u64(tree.params.leaf_cap);
    w.u32(tree.params.landmarks);
    w.u32(tree.params.root_landmarks);
    w.u32(static_cast<std::uint32_t>(tree.params.policy));
    w.u64(tree.params.seed);
    w.u64(tree.vertex_count());
    w.u64(tree.nodes.size());
    for (Vertex v : tree.old_to_new) w.u32(v);
    for (const SulNode& n : tree.nodes) {
        w.u32(n.first);
        w.u32(n.last);
        w.u32(static_cast<std::uint32_t>(n.landmarks.size()));
        for (Vertex l : n.landmarks) w.u32(l);
        w.u64(n.sdl_base);
        w.u32(static_cast<std::uint32_t>(n.children.size()));
        for (std::uint32_t c : n.children) w.u32(c);
    }
    w.u64(tree.sdl.size());
    for (StoredDistance d : tree.sdl) w.u32(d);
}

SulTree load_sultree(std::istream& in, const RoadGraph& original_graph) {
    BinaryReader r(in);
    r.expect_magic("SULT", "SUL-tree file");
    if (r.u32() != 1) throw FormatError("SUL-tree file: unsupported version");
    SulTree t;
    t.params.branching = r.u32();
    t.params.leaf_cap = r.u64();
    t.params.landmarks = r.u32();
    t.params.root_landmarks = r.u32();
    t.params.policy = static_cast<LandmarkPolicy>(r.u32());
    t.params.seed = r.u64();
    std::uint64_t n = r.u64();
    std::uint64_t node_count = r.u64();
    if (n != original_graph.vertex_count())
        throw FormatError("SUL-tree file: vertex count does not match the graph");

    t.old_to_new.resize(n);
    for (auto& v : t.old_to_new) v = r.u32();
    t.new_to_old.assign(n, kNoVertex);
    for (Vertex old_id = 0; old_id < n; ++old_id) t.new_to_old[t.old_to_new[old_id]] = old_id;

    t.nodes.resize(node_count);
    for (SulNode& nd : t.nodes) {
        nd.first = r.u32();
        nd.last = r.u32();
        nd.landmarks.resize(r.u32());
        for (Vertex& l : nd.landmarks) l = r.u32();
        nd.sdl_base = r.u64();
        nd.children.resize(r.u32());
        for (std::uint32_t& c : nd.children) c = r.u32();
        nd.sdl_ready = true;
    }
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i)
        for (std::uint32_t c : t.nodes[i].children) t.nodes[c].parent = i;

    t.sdl.resize(r.u64());
    for (StoredDistance& d : t.sdl) d = r.u32();

    t.graph = original_graph.permuted(t.new_to_old);
    return t;
}

}  // namespace colt
