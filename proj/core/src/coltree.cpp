#include "colt/coltree.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "colt/binary_io.hpp"

namespace colt {

namespace {

struct Builder {
    SulTree& sul;
    ColTree& col;
    std::size_t lambda;

    Distance lookup(const SulNode& n, std::size_t l, Vertex v) {
        col.stats.sdl_lookups++;
        return sul.sdl_at(n, l, v);
    }

    void fill_bands(ColNode& node, std::span<const Vertex> objects) {
        const SulNode& sn = sul.nodes[node.sul_node];
        node.bands.assign(sn.landmarks.size(), {});
        if (node.leaf) {
            // sorted lists make the min/max free
            for (std::size_t l = 0; l < node.odls.size(); ++l) {
                node.bands[l].lo = node.odls[l].front().dist;
                node.bands[l].hi = node.odls[l].back().dist;
            }
        } else {
            for (std::size_t l = 0; l < sn.landmarks.size(); ++l) {
                for (Vertex p : objects) {
                    Distance d = lookup(sn, l, p);
                    node.bands[l].lo = std::min(node.bands[l].lo, d);
                    node.bands[l].hi = std::max(node.bands[l].hi, d);
                }
            }
        }
        std::size_t m_root = sul.nodes[0].landmarks.size();
        node.root_bands.assign(m_root, {});
        for (std::size_t l = 0; l < m_root; ++l) {
            for (Vertex p : objects) {
                col.stats.sdl_lookups++;
                Distance d = sul.root_distance(l, p);
                node.root_bands[l].lo = std::min(node.root_bands[l].lo, d);
                node.root_bands[l].hi = std::max(node.root_bands[l].hi, d);
            }
        }
    }

    void fill_odls(ColNode& node, std::span<const Vertex> objects) {
        const SulNode& sn = sul.nodes[node.sul_node];
        sul.ensure_sdl(node.sul_node);
        node.odls.resize(sn.landmarks.size());
        for (std::size_t l = 0; l < sn.landmarks.size(); ++l) {
            auto& odl = node.odls[l];
            odl.clear();
            odl.reserve(objects.size());
            for (Vertex p : objects) odl.push_back({p, lookup(sn, l, p)});
            std::sort(odl.begin(), odl.end(), [this](const OdlEntry& a, const OdlEntry& b) {
                col.stats.sort_comparisons++;
                return a.dist != b.dist ? a.dist < b.dist : a.object < b.object;
            });
        }
    }

    // objects: sorted ascending, within the subgraph of sul_node
    std::uint32_t build(std::uint32_t sul_node, std::span<const Vertex> objects,
                        std::uint32_t parent) {
        // compact single-occupied branches: hop to the only child holding objects
        while (objects.size() > lambda && !sul.nodes[sul_node].is_leaf()) {
            std::uint32_t occupied = kNoNode;
            std::size_t occupied_count = 0;
            for (std::uint32_t c : sul.nodes[sul_node].children) {
                const SulNode& ch = sul.nodes[c];
                auto lo = std::lower_bound(objects.begin(), objects.end(), ch.first);
                auto hi = std::lower_bound(objects.begin(), objects.end(), ch.last);
                if (lo != hi) {
                    ++occupied_count;
                    occupied = c;
                }
            }
            if (occupied_count != 1) break;
            sul_node = occupied;
        }

        std::uint32_t id = static_cast<std::uint32_t>(col.nodes.size());
        col.nodes.emplace_back();
        col.nodes[id].sul_node = sul_node;
        col.nodes[id].parent = parent;
        col.nodes[id].object_count = static_cast<std::uint32_t>(objects.size());

        if (objects.size() <= lambda || sul.nodes[sul_node].is_leaf()) {
            col.nodes[id].leaf = true;  // subgraph leaves keep oversized lists when needed
            fill_odls(col.nodes[id], objects);
            fill_bands(col.nodes[id], objects);
            return id;
        }

        fill_bands(col.nodes[id], objects);
        for (std::uint32_t c : sul.nodes[sul_node].children) {
            const SulNode& ch = sul.nodes[c];
            auto lo = std::lower_bound(objects.begin(), objects.end(), ch.first);
            auto hi = std::lower_bound(objects.begin(), objects.end(), ch.last);
            if (lo == hi) continue;  // empty children are pruned
            std::uint32_t child =
                build(c, {objects.data() + (lo - objects.begin()),
                          static_cast<std::size_t>(hi - lo)},
                      id);
            col.nodes[id].children.push_back(child);
        }
        return id;
    }
};

}  // namespace

ColTree build_coltree(SulTree& sul, const std::vector<Vertex>& objects, std::size_t lambda) {
    if (lambda == 0) throw ConfigError("leaf object capacity must be positive");
    auto t0 = std::chrono::steady_clock::now();

    std::vector<Vertex> objs;
    objs.reserve(objects.size());
    for (Vertex p : objects) {
        if (p >= sul.vertex_count()) throw ConfigError("object vertex id out of range");
        objs.push_back(sul.old_to_new[p]);
    }
    std::sort(objs.begin(), objs.end());
    objs.erase(std::unique(objs.begin(), objs.end()), objs.end());

    ColTree col;
    col.lambda = lambda;
    col.object_count = objs.size();
    col.sul_checksum = sul.identity_checksum();
    if (!objs.empty()) {
        Builder b{sul, col, lambda};
        b.build(0, objs, kNoNode);
    }
    col.stats.build_time = std::chrono::steady_clock::now() - t0;
    return col;
}

namespace {

// Exact d(l,q) when an SDL row covers q, else root-landmark bounds.
void landmark_query_interval(const SulTree& sul, const SulNode& sn, std::size_t l, Vertex q,
                             Distance& lb, Distance& ub) {
    if (sn.parent == kNoNode) {  // subgraph landmark is a root landmark
        lb = ub = sul.root_distance(l, q);
    } else if (sn.contains(q) && sn.sdl_ready) {
        lb = ub = sul.sdl_at(sn, l, q);
    } else {
        Vertex lm = sn.landmarks[l];
        lb = sul.root_point_lb(lm, q);
        ub = sul.root_point_ub(lm, q);
    }
}

}  // namespace

Distance node_lower_bound(const ColTree& col, const SulTree& sul, std::uint32_t node, Vertex q) {
    const ColNode& n = col.nodes[node];
    const SulNode& sn = sul.nodes[n.sul_node];
    Distance best = 0;
    for (std::size_t l = 0; l < n.bands.size(); ++l) {
        Distance lb, ub;
        landmark_query_interval(sul, sn, l, q, lb, ub);
        best = std::max(best, interval_gap_lb(lb, ub, n.bands[l].lo, n.bands[l].hi));
    }
    for (std::size_t l = 0; l < n.root_bands.size(); ++l) {
        Distance dq = sul.root_distance(l, q);
        best = std::max(best, interval_gap_lb(dq, dq, n.root_bands[l].lo, n.root_bands[l].hi));
    }
    return best;
}

Distance node_upper_bound(const ColTree& col, const SulTree& sul, std::uint32_t node, Vertex q) {
    const ColNode& n = col.nodes[node];
    const SulNode& sn = sul.nodes[n.sul_node];
    Distance best = kInfDistance;
    for (std::size_t l = 0; l < n.bands.size(); ++l) {
        Distance lb, ub;
        landmark_query_interval(sul, sn, l, q, lb, ub);
        best = std::min(best, ub + n.bands[l].hi);
    }
    for (std::size_t l = 0; l < n.root_bands.size(); ++l)
        best = std::min(best, sul.root_distance(l, q) + n.root_bands[l].hi);
    return best;
}

std::size_t odl_min_index(std::span<const OdlEntry> odl, Distance target2x) {
    auto it = std::lower_bound(odl.begin(), odl.end(), target2x,
                               [](const OdlEntry& e, Distance t) { return 2 * e.dist < t; });
    if (it == odl.begin()) return 0;
    std::size_t pick;
    if (it == odl.end()) {
        pick = odl.size() - 1;
    } else {
        std::size_t right = static_cast<std::size_t>(it - odl.begin());
        std::size_t left = right - 1;
        Distance dl = target2x - 2 * odl[left].dist;
        Distance dr = 2 * odl[right].dist - target2x;
        if (dr < dl) return right;  // lower_bound already found its run's first entry
        pick = left;
    }
    // equal distances share the gap; the tie rule wants the smallest index
    while (pick > 0 && odl[pick - 1].dist == odl[pick].dist) --pick;
    return pick;
}

void collect_objects(const ColTree& col, std::uint32_t node, std::vector<Vertex>& out) {
    std::vector<std::uint32_t> stack{node};
    while (!stack.empty()) {
        std::uint32_t id = stack.back();
        stack.pop_back();
        const ColNode& n = col.nodes[id];
        if (n.leaf) {
            for (const OdlEntry& e : n.odls.front()) out.push_back(e.object);
        } else {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
        }
    }
}

std::vector<Vertex> collect_objects(const ColTree& col, std::uint32_t node) {
    std::vector<Vertex> out;
    collect_objects(col, node, out);
    std::sort(out.begin(), out.end());
    return out;
}

void save_coltree(const ColTree& col, std::ostream& out) {
    BinaryWriter w(out);
    w.magic("COLT");
    w.u32(1);
    w.u64(col.sul_checksum);
    w.u64(col.lambda);
    w.u64(col.object_count);
    w.u64(col.nodes.size());
    for (const ColNode& n : col.nodes) {
        w.u8(n.leaf ? 1 : 0);
        w.u32(n.sul_node);
        w.u32(n.object_count);
        w.u32(static_cast<std::uint32_t>(n.children.size()));
        for (std::uint32_t c : n.children) w.u32(c);
        w.u32(static_cast<std::uint32_t>(n.bands.size()));
        for (const LandmarkBand& b : n.bands) {
            w.u64(b.lo);
            w.u64(b.hi);
        }
        w.u32(static_cast<std::uint32_t>(n.root_bands.size()));
        for (const LandmarkBand& b : n.root_bands) {
            w.u64(b.lo);
            w.u64(b.hi);
        }
        if (n.leaf) {
            w.u32(static_cast<std::uint32_t>(n.odls.size()));
            w.u64(n.odls.empty() ? 0 : n.odls.front().size());
            for (const auto& odl : n.odls) {
                for (const OdlEntry& e : odl) {
                    w.u32(e.object);
                    w.u64(e.dist);
                }
            }
        }
    }
}

ColTree load_coltree(std::istream& in, const SulTree& sul) {
    BinaryReader r(in);
    r.expect_magic("COLT", "COL-tree file");
    if (r.u32() != 1) throw FormatError("COL-tree file: unsupported version");
    ColTree col;
    col.sul_checksum = r.u64();
    if (col.sul_checksum != sul.identity_checksum())
        throw FormatError("COL-tree file was built over a different SUL-tree");
    col.lambda = r.u64();
    col.object_count = r.u64();
    col.nodes.resize(r.u64());
    for (ColNode& n : col.nodes) {
        n.leaf = r.u8() != 0;
        n.sul_node = r.u32();
        n.object_count = r.u32();
        n.children.resize(r.u32());
        for (std::uint32_t& c : n.children) c = r.u32();
        n.bands.resize(r.u32());
        for (LandmarkBand& b : n.bands) {
            b.lo = r.u64();
            b.hi = r.u64();
        }
        n.root_bands.resize(r.u32());
        for (LandmarkBand& b : n.root_bands) {
            b.lo = r.u64();
            b.hi = r.u64();
        }
        if (n.leaf) {
            n.odls.resize(r.u32());
            std::uint64_t len = r.u64();
            for (auto& odl : n.odls) {
                odl.resize(len);
                for (OdlEntry& e : odl) {
                    e.object = r.u32();
                    e.dist = r.u64();
                }
            }
        }
    }
    for (std::uint32_t i = 0; i < col.nodes.size(); ++i)
        for (std::uint32_t c : col.nodes[i].children) col.nodes[c].parent = i;
    return col;
}

}  // namespace colt
