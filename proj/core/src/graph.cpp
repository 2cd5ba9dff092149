#include "colt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <tuple>

#include "colt/binary_io.hpp"
#include "colt/dijkstra.hpp"
#include "colt/rng.hpp"

namespace colt {

RoadGraph RoadGraph::from_arcs(std::size_t n, std::vector<std::tuple<Vertex, Vertex, Weight>> arcs) {
    std::sort(arcs.begin(), arcs.end());
    // duplicate ordered pairs keep the smallest weight (sort puts it first)
    arcs.erase(std::unique(arcs.begin(), arcs.end(),
                           [](const auto& a, const auto& b) {
                               return std::get<0>(a) == std::get<0>(b) &&
                                      std::get<1>(a) == std::get<1>(b);
                           }),
               arcs.end());

    RoadGraph g;
    g.offsets.assign(n + 1, 0);
    for (const auto& [u, v, w] : arcs) {
        (void)v;
        (void)w;
        g.offsets[u + 1]++;
    }
    for (std::size_t i = 1; i <= n; ++i) g.offsets[i] += g.offsets[i - 1];
    g.adj.reserve(arcs.size());
    for (const auto& [u, v, w] : arcs) {
        (void)u;
        g.adj.push_back({v, w});
    }
    return g;
}

RoadGraph RoadGraph::permuted(const std::vector<Vertex>& new_to_old) const {
    std::size_t n = vertex_count();
    std::vector<Vertex> old_to_new(n);
    for (std::size_t i = 0; i < n; ++i) old_to_new[new_to_old[i]] = static_cast<Vertex>(i);

    std::vector<std::tuple<Vertex, Vertex, Weight>> arcs;
    arcs.reserve(adj.size());
    for (Vertex nu = 0; nu < n; ++nu) {
        Vertex ou = new_to_old[nu];
        for (const AdjEntry& e : neighbors(ou)) arcs.emplace_back(nu, old_to_new[e.to], e.weight);
    }
    RoadGraph g = from_arcs(n, std::move(arcs));
    if (has_coords()) {
        g.coords.resize(n);
        for (std::size_t i = 0; i < n; ++i) g.coords[i] = coords[new_to_old[i]];
        g.max_speed = max_speed;
    }
    return g;
}

double euclid(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double compute_max_speed(const std::vector<std::uint64_t>& offsets,
                         const std::vector<AdjEntry>& adj, const std::vector<Point>& coords) {
    double best = 0.0;
    for (std::size_t u = 0; u + 1 < offsets.size(); ++u) {
        for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
            double d = euclid(coords[u], coords[adj[i].to]);
            if (d <= 0.0) continue;  // coincident endpoints give no speed information
            best = std::max(best, d / static_cast<double>(adj[i].weight));
        }
    }
    return best;
}

namespace {

// Component ids by BFS over the symmetrized arc set; deterministic because
// roots are taken in ascending id order.
std::vector<std::uint32_t> components(std::size_t n,
                                      const std::vector<std::uint64_t>& offsets,
                                      const std::vector<AdjEntry>& adj) {
    std::vector<std::uint32_t> comp(n, kNoNode);
    std::vector<Vertex> queue;
    std::uint32_t c = 0;
    for (Vertex root = 0; root < n; ++root) {
        if (comp[root] != kNoNode) continue;
        comp[root] = c;
        queue.assign(1, root);
        while (!queue.empty()) {
            Vertex u = queue.back();
            queue.pop_back();
            for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
                Vertex v = adj[i].to;
                if (comp[v] == kNoNode) {
                    comp[v] = c;
                    queue.push_back(v);
                }
            }
        }
        ++c;
    }
    return comp;
}

}  // namespace

NormalizeResult normalize(const RoadGraph& g) {
    std::size_t n = g.vertex_count();

    // symmetrize: min weight per unordered pair, then both directions
    std::vector<std::tuple<Vertex, Vertex, Weight>> pairs;
    pairs.reserve(g.adj.size());
    for (Vertex u = 0; u < n; ++u) {
        for (const AdjEntry& e : g.neighbors(u)) {
            if (u == e.to) continue;  // self loops never lie on a shortest path
            Vertex a = std::min(u, e.to), b = std::max(u, e.to);
            pairs.emplace_back(a, b, e.weight);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end(),
                            [](const auto& x, const auto& y) {
                                return std::get<0>(x) == std::get<0>(y) &&
                                       std::get<1>(x) == std::get<1>(y);
                            }),
                pairs.end());

    std::vector<std::tuple<Vertex, Vertex, Weight>> arcs;
    arcs.reserve(pairs.size() * 2);
    for (const auto& [a, b, w] : pairs) {
        arcs.emplace_back(a, b, w);
        arcs.emplace_back(b, a, w);
    }
    RoadGraph sym = RoadGraph::from_arcs(n, std::move(arcs));

    // largest component; ties go to the one containing the smallest original id
    std::vector<std::uint32_t> comp = components(n, sym.offsets, sym.adj);
    std::size_t comp_count = 0;
    for (std::uint32_t c : comp) comp_count = std::max<std::size_t>(comp_count, c + 1);
    std::vector<std::size_t> size(comp_count, 0);
    for (std::uint32_t c : comp) size[c]++;
    std::uint32_t keep = 0;
    for (std::uint32_t c = 1; c < comp_count; ++c)
        if (size[c] > size[keep]) keep = c;  // equal sizes keep the earlier root

    NormalizeResult res;
    res.id_map.assign(n, kNoVertex);
    std::vector<Vertex> new_to_old;
    for (Vertex v = 0; v < n; ++v) {
        if (comp[v] == keep) {
            res.id_map[v] = static_cast<Vertex>(new_to_old.size());
            new_to_old.push_back(v);
        }
    }

    std::size_t nn = new_to_old.size();
    std::vector<std::tuple<Vertex, Vertex, Weight>> kept;
    for (Vertex u = 0; u < n; ++u) {
        if (res.id_map[u] == kNoVertex) continue;
        for (const AdjEntry& e : sym.neighbors(u))
            kept.emplace_back(res.id_map[u], res.id_map[e.to], e.weight);
    }
    res.graph = RoadGraph::from_arcs(nn, std::move(kept));
    if (g.has_coords()) {
        res.graph.coords.resize(nn);
        for (std::size_t i = 0; i < nn; ++i) res.graph.coords[i] = g.coords[new_to_old[i]];
        res.graph.max_speed =
            compute_max_speed(res.graph.offsets, res.graph.adj, res.graph.coords);
    }
    return res;
}

Distance euclidean_lower_bound(const RoadGraph& g, Vertex u, Vertex v) {
    if (!g.has_coords()) throw ConfigError("euclidean lower bound requires coordinates");
    if (u == v) return 0;
    if (g.max_speed <= 0.0) return 0;
    // floor keeps the bound admissible in the integer distance domain
    return static_cast<Distance>(std::floor(euclid(g.coords[u], g.coords[v]) / g.max_speed));
}

Distance approximate_diameter(const RoadGraph& g) {
    if (g.vertex_count() == 0) return 0;
    std::vector<Distance> d = dijkstra_all(g, 0);
    Vertex far = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (d[v] != kInfDistance && d[v] > d[far]) far = v;
    d = dijkstra_all(g, far);
    Distance best = 0;
    for (Distance x : d)
        if (x != kInfDistance && x > best) best = x;
    return best;
}

RoadGraph make_grid_graph(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed,
                          Weight min_weight, Weight max_weight) {
    std::mt19937_64 rng(seed);
    std::size_t n = static_cast<std::size_t>(rows) * cols;
    auto id = [cols](std::uint32_t r, std::uint32_t c) { return r * cols + c; };

    std::vector<std::tuple<Vertex, Vertex, Weight>> arcs;
    auto draw = [&]() {
        return static_cast<Weight>(min_weight + bounded(rng, max_weight - min_weight + 1));
    };
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                Weight w = draw();
                arcs.emplace_back(id(r, c), id(r, c + 1), w);
                arcs.emplace_back(id(r, c + 1), id(r, c), w);
            }
            if (r + 1 < rows) {
                Weight w = draw();
                arcs.emplace_back(id(r, c), id(r + 1, c), w);
                arcs.emplace_back(id(r + 1, c), id(r, c), w);
            }
        }
    }
    RoadGraph g = RoadGraph::from_arcs(n, std::move(arcs));
    g.coords.resize(n);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c)
            g.coords[id(r, c)] = {static_cast<double>(c), static_cast<double>(r)};
    g.max_speed = compute_max_speed(g.offsets, g.adj, g.coords);
    return g;
}

RoadGraph make_random_planar_graph(std::uint32_t n, std::uint64_t seed, std::uint32_t neighbors,
                                   Weight min_weight, Weight max_weight) {
    std::mt19937_64 rng(seed);
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        p.x = static_cast<double>(bounded(rng, 1000000)) / 1000.0;
        p.y = static_cast<double>(bounded(rng, 1000000)) / 1000.0;
    }

    // connect each point to its nearest neighbors; short links keep crossings rare
    std::vector<std::tuple<Vertex, Vertex, Weight>> arcs;
    std::vector<std::pair<double, Vertex>> dist(n);
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = 0; v < n; ++v) dist[v] = {euclid(pts[u], pts[v]), v};
        std::sort(dist.begin(), dist.end());
        std::uint32_t take = std::min(neighbors + 1, n);  // skip self at rank 0
        for (std::uint32_t i = 1; i < take; ++i) {
            Vertex v = dist[i].second;
            Weight w = static_cast<Weight>(min_weight + bounded(rng, max_weight - min_weight + 1));
            arcs.emplace_back(u, v, w);
            arcs.emplace_back(v, u, w);
        }
    }
    RoadGraph g = RoadGraph::from_arcs(n, std::move(arcs));
    g.coords = std::move(pts);
    g.max_speed = compute_max_speed(g.offsets, g.adj, g.coords);
    // nearest-neighbor graphs can fall apart; queries need one component
    return normalize(g).graph;
}

void save_graph(const RoadGraph& g, std::ostream& out) {
    BinaryWriter w(out);
    w.magic("COLG");
    w.u32(1);
    w.u64(g.vertex_count());
    w.u64(g.adj.size());
    for (std::uint64_t off : g.offsets) w.u64(off);
    for (const AdjEntry& e : g.adj) {
        w.u32(e.to);
        w.u32(e.weight);
    }
    w.u8(g.has_coords() ? 1 : 0);
    if (g.has_coords()) {
        for (const Point& p : g.coords) {
            w.f64(p.x);
            w.f64(p.y);
        }
    }
}

RoadGraph load_graph(std::istream& in) {
    BinaryReader r(in);
    r.expect_magic("COLG", "graph file");
    std::uint32_t version = r.u32();
    if (version != 1) throw FormatError("graph file: unsupported version");
    std::uint64_t n = r.u64();
    std::uint64_t m = r.u64();
    RoadGraph g;
    g.offsets.resize(n + 1);
    for (auto& off : g.offsets) off = r.u64();
    g.adj.resize(m);
    for (auto& e : g.adj) {
        e.to = r.u32();
        e.weight = r.u32();
    }
    if (r.u8()) {
        g.coords.resize(n);
        for (auto& p : g.coords) {
            p.x = r.f64();
            p.y = r.f64();
        }
        g.max_speed = compute_max_speed(g.offsets, g.adj, g.coords);
    }
    return g;
}

}  // namespace colt
