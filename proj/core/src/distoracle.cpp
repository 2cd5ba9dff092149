#include "colt/distoracle.hpp"

#include <algorithm>
#include <queue>

namespace colt {

namespace {

struct HeapEntry {
    Distance key;
    Vertex vertex;
    bool operator>(const HeapEntry& o) const {
        return key != o.key ? key > o.key : vertex > o.vertex;
    }
};
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

// Distance labels with generation stamps; reusing the arrays across calls
// avoids an O(|V|) reset per distance computation.
struct Labels {
    std::vector<Distance> dist;
    std::vector<std::uint32_t> seen_gen, done_gen;
    std::uint32_t gen = 0;

    void reset(std::size_t n) {
        if (dist.size() != n) {
            dist.assign(n, kInfDistance);
            seen_gen.assign(n, 0);
            done_gen.assign(n, 0);
            gen = 0;
        }
        ++gen;
    }
    Distance get(Vertex v) const { return seen_gen[v] == gen ? dist[v] : kInfDistance; }
    void set(Vertex v, Distance d) {
        dist[v] = d;
        seen_gen[v] = gen;
    }
    bool done(Vertex v) const { return done_gen[v] == gen; }
    void mark_done(Vertex v) { done_gen[v] = gen; }
};

class BidirectionalDijkstra final : public DistanceBackend {
public:
    explicit BidirectionalDijkstra(const RoadGraph& g) : g_(g) {}
    const char* name() const override { return "bidirectional"; }

    Distance exact_distance(Vertex s, Vertex t) override {
        ++distance_calls;
        if (s == t) return 0;
        std::size_t n = g_.vertex_count();
        lab_[0].reset(n);
        lab_[1].reset(n);
        MinHeap heap[2];
        lab_[0].set(s, 0);
        lab_[1].set(t, 0);
        heap[0].push({0, s});
        heap[1].push({0, t});

        Distance best = kInfDistance;
        int side = 0;  // alternate sides; the graph is undirected, so the
                       // reverse search is a plain forward one from t
        while (!heap[0].empty() || !heap[1].empty()) {
            if (heap[side].empty()) side ^= 1;
            Distance fwd_top = heap[0].empty() ? kInfDistance : heap[0].top().key;
            Distance bwd_top = heap[1].empty() ? kInfDistance : heap[1].top().key;
            // no undiscovered meeting can beat `best` once the frontier keys say so
            if (fwd_top == kInfDistance || bwd_top == kInfDistance) {
                if (std::min(fwd_top, bwd_top) >= best) break;
            } else if (fwd_top + bwd_top >= best) {
                break;
            }

            auto [key, u] = heap[side].top();
            heap[side].pop();
            if (lab_[side].done(u)) continue;
            lab_[side].mark_done(u);
            ++vertices_settled;
            for (const AdjEntry& e : g_.neighbors(u)) {
                Distance nd = key + e.weight;
                if (nd < lab_[side].get(e.to)) {
                    lab_[side].set(e.to, nd);
                    heap[side].push({nd, e.to});
                    Distance other = lab_[side ^ 1].get(e.to);
                    if (other != kInfDistance) best = std::min(best, nd + other);
                }
            }
            side ^= 1;
        }
        return best;
    }

private:
    const RoadGraph& g_;
    Labels lab_[2];
};

class AltAStar final : public DistanceBackend {
public:
    explicit AltAStar(const SulTree& sul) : sul_(sul) {}
    const char* name() const override { return "alt-astar"; }

    // max over root landmarks of |d(l,v) - d(l,t)|: admissible and consistent
    Distance heuristic(Vertex v, Vertex t) const { return sul_.root_point_lb(v, t); }

    Distance exact_distance(Vertex s, Vertex t) override {
        ++distance_calls;
        if (s == t) return 0;
        const RoadGraph& g = sul_.graph;
        lab_.reset(g.vertex_count());
        MinHeap heap;
        lab_.set(s, 0);
        heap.push({heuristic(s, t), s});
        while (!heap.empty()) {
            auto [key, u] = heap.top();
            (void)key;
            heap.pop();
            if (lab_.done(u)) continue;
            lab_.mark_done(u);
            ++vertices_settled;
            Distance du = lab_.get(u);
            if (u == t) return du;
            for (const AdjEntry& e : g.neighbors(u)) {
                Distance nd = du + e.weight;
                if (nd < lab_.get(e.to)) {
                    lab_.set(e.to, nd);
                    heap.push({nd + heuristic(e.to, t), e.to});
                }
            }
        }
        return kInfDistance;
    }

private:
    const SulTree& sul_;
    Labels lab_;
};

class TranslatedBackend final : public DistanceBackend {
public:
    TranslatedBackend(std::unique_ptr<DistanceBackend> inner, std::vector<Vertex> id_map)
        : inner_(std::move(inner)), id_map_(std::move(id_map)) {}
    const char* name() const override { return inner_->name(); }

    Distance exact_distance(Vertex s, Vertex t) override {
        Distance d = inner_->exact_distance(id_map_[s], id_map_[t]);
        distance_calls = inner_->distance_calls;
        vertices_settled = inner_->vertices_settled;
        return d;
    }

private:
    std::unique_ptr<DistanceBackend> inner_;
    std::vector<Vertex> id_map_;
};

}  // namespace

std::unique_ptr<DistanceBackend> make_bidirectional_backend(const RoadGraph& g) {
    return std::make_unique<BidirectionalDijkstra>(g);
}

std::unique_ptr<DistanceBackend> make_alt_backend(const SulTree& sul) {
    return std::make_unique<AltAStar>(sul);
}

std::unique_ptr<DistanceBackend> make_translated_backend(std::unique_ptr<DistanceBackend> inner,
                                                         std::vector<Vertex> id_map) {
    return std::make_unique<TranslatedBackend>(std::move(inner), std::move(id_map));
}

const char* to_string(BackendKind kind) {
    return kind == BackendKind::AltAStar ? "alt-astar" : "bidirectional";
}

BackendKind backend_kind_from_string(std::string_view name) {
    if (name == "bidirectional") return BackendKind::Bidirectional;
    if (name == "alt-astar") return BackendKind::AltAStar;
    throw ConfigError("unknown distance backend: " + std::string(name));
}

std::unique_ptr<DistanceBackend> make_backend(BackendKind kind, const RoadGraph& g,
                                              const SulTree* sul) {
    if (kind == BackendKind::AltAStar) {
        if (!sul) throw ConfigError("alt-astar backend needs a SUL-tree");
        return make_alt_backend(*sul);
    }
    return make_bidirectional_backend(g);
}

}  // namespace colt
