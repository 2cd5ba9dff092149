#include "colt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "colt/baselines.hpp"
#include "colt/binary_io.hpp"
#include "colt/coltree.hpp"
#include "colt/query.hpp"
#include "colt/rng.hpp"

namespace colt {

std::vector<Vertex> generate_objects(const RoadGraph& g, double density, std::uint64_t seed) {
    if (density <= 0.0 || density > 1.0) throw ConfigError("object density must be in (0, 1]");
    auto n = static_cast<std::uint32_t>(g.vertex_count());
    auto count = static_cast<std::uint64_t>(density * static_cast<double>(n));
    if (count < 1) throw ConfigError("object density too low: yields no objects");
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> ids =
        sample_without_replacement(rng, n, static_cast<std::uint32_t>(count));
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<Vertex> generate_query_set(const RoadGraph& g, std::size_t count, double area_pct,
                                       std::uint64_t seed) {
    if (count < 1) throw ConfigError("query set size must be at least 1");
    if (area_pct <= 0.0 || area_pct > 100.0) {
        throw ConfigError("query area must be in (0, 100] percent");
    }
    auto n = static_cast<std::uint32_t>(g.vertex_count());
    auto target = static_cast<std::size_t>(
        std::ceil(area_pct / 100.0 * static_cast<double>(n)));
    target = std::max<std::size_t>(target, 1);

    std::mt19937_64 rng(seed);
    auto center = static_cast<Vertex>(bounded(rng, n));

    // Grow a BFS region around the center; adjacency order keeps it
    // deterministic.
    std::vector<Vertex> region;
    std::vector<bool> seen(n, false);
    region.push_back(center);
    seen[center] = true;
    for (std::size_t head = 0; head < region.size() && region.size() < target; ++head) {
        for (const AdjEntry& e : g.neighbors(region[head])) {
            if (seen[e.to]) continue;
            seen[e.to] = true;
            region.push_back(e.to);
            if (region.size() == target) break;
        }
    }
    if (count > region.size()) throw ConfigError("query set larger than the sampled region");
    return sample_from_pool(rng, region, static_cast<std::uint32_t>(count));
}

RoadGraph make_spec_graph(const std::string& desc) {
    auto parse_tail = [&](std::size_t prefix_len) {
        std::vector<std::uint64_t> parts;
        std::size_t pos = prefix_len;
        while (pos <= desc.size()) {
            std::size_t next = desc.find_first_of(":x", pos);
            std::string tok = desc.substr(pos, next == std::string::npos ? next : next - pos);
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) {
                throw ConfigError("bad synthetic graph description: " + desc);
            }
            parts.push_back(v);
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return parts;
    };
    if (desc.rfind("grid:", 0) == 0) {
        auto p = parse_tail(5);
        if (p.size() != 3) throw ConfigError("grid graph wants grid:<rows>x<cols>:<seed>");
        return make_grid_graph(static_cast<std::uint32_t>(p[0]), static_cast<std::uint32_t>(p[1]),
                               p[2]);
    }
    if (desc.rfind("planar:", 0) == 0) {
        auto p = parse_tail(7);
        if (p.size() != 2) throw ConfigError("planar graph wants planar:<n>:<seed>");
        return make_random_planar_graph(static_cast<std::uint32_t>(p[0]), p[1]);
    }
    std::ifstream in(desc, std::ios::binary);
    if (!in) throw ConfigError("cannot open graph file: " + desc);
    return load_graph(in);
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
        throw ConfigError("invalid integer for spec key " + key + ": " + value);
    }
    return v;
}

double parse_f64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for spec key " + key + ": " + value);
    }
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentSpec ExperimentSpec::parse(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("spec line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("spec line " + std::to_string(line_no) + ": expected key = value");
        }

        if (key == "graph") {
            spec.graph = value;
        } else if (key == "kind") {
            spec.kind = value;
        } else if (key == "methods") {
            spec.methods.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) spec.methods.push_back(tok);
            }
        } else if (key == "k") {
            spec.k = parse_u64(key, value);
        } else if (key == "density") {
            spec.density = parse_f64(key, value);
        } else if (key == "query_size") {
            spec.query_size = parse_u64(key, value);
        } else if (key == "area_pct") {
            spec.area_pct = parse_f64(key, value);
        } else if (key == "agg") {
            spec.agg = aggregate_from_string(value);
        } else if (key == "radius_pct") {
            spec.radius_pct = parse_f64(key, value);
        } else if (key == "object_sets") {
            spec.object_sets = parse_u64(key, value);
        } else if (key == "query_sets") {
            spec.query_sets = parse_u64(key, value);
        } else if (key == "seed") {
            spec.seed = parse_u64(key, value);
        } else if (key == "b") {
            spec.sul.branching = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "alpha") {
            spec.sul.leaf_cap = parse_u64(key, value);
        } else if (key == "m") {
            spec.sul.landmarks = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "m_root") {
            spec.sul.root_landmarks = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "policy") {
            spec.sul.policy = landmark_policy_from_string(value);
        } else if (key == "restrict") {
            spec.sul.restrict_searches = parse_u64(key, value) != 0;
        } else if (key == "lambda") {
            spec.lambda = parse_u64(key, value);
        } else if (key == "backend") {
            spec.backend = backend_kind_from_string(value);
        } else if (key == "oracle_sample_pct") {
            spec.oracle_sample_pct = parse_f64(key, value);
        } else if (key == "parallel_workers") {
            spec.parallel_workers = parse_u64(key, value);
        } else {
            throw ConfigError("unknown spec key: " + key);
        }
    }
    if (spec.graph.empty()) throw ConfigError("spec is missing the graph key");
    return spec;
}

ExperimentSpec ExperimentSpec::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path);
    return parse(in);
}

namespace {

enum class QueryKind : std::uint8_t { Aknn, Kfn, Range, Knn };

QueryKind kind_from_string(const std::string& s) {
    if (s == "aknn") return QueryKind::Aknn;
    if (s == "kfn") return QueryKind::Kfn;
    if (s == "range") return QueryKind::Range;
    if (s == "knn") return QueryKind::Knn;
    throw ConfigError("unknown query kind: " + s);
}

bool method_supports(const std::string& method, QueryKind kind) {
    if (method == "ier") return kind != QueryKind::Kfn;
    if (method == "aub") return kind == QueryKind::Kfn;
    return true;  // coltree, brute
}

// Uniform result shape across query kinds, for hashing and oracle comparison.
struct QueryOutput {
    std::vector<ResultEntry> ranked;  // aknn/kfn/knn
    std::vector<Vertex> members;      // range
    bool operator==(const QueryOutput&) const = default;

    std::uint64_t hash() const {
        Fnv1a h;
        h.add_u64(ranked.size());
        for (const ResultEntry& e : ranked) {
            h.add_u32(e.object);
            h.add_u64(e.score);
        }
        h.add_u64(members.size());
        for (Vertex v : members) h.add_u32(v);
        return h.value();
    }
};

struct MethodAccum {
    bool supported = true;
    std::uint64_t queries = 0;
    std::uint64_t calls = 0;
    std::uint64_t candidates = 0;
    std::uint64_t nodes = 0;
    std::uint64_t settled = 0;
    std::uint64_t result_hash_sum = 0;  // order-independent across workers
    std::vector<double> times_us;

    void merge(const MethodAccum& o) {
        queries += o.queries;
        calls += o.calls;
        candidates += o.candidates;
        nodes += o.nodes;
        settled += o.settled;
        result_hash_sum += o.result_hash_sum;
        times_us.insert(times_us.end(), o.times_us.begin(), o.times_us.end());
    }
};

struct WorkerResult {
    std::vector<MethodAccum> per_method;
    double col_build_ms = 0;
    std::uint64_t col_bytes = 0;
    std::uint64_t col_builds = 0;
    std::exception_ptr error;
};

std::string format_mean(double sum, std::uint64_t n) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", n == 0 ? 0.0 : sum / static_cast<double>(n));
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string run_experiment(const ExperimentSpec& spec) {
    QueryKind kind = kind_from_string(spec.kind);
    if (spec.methods.empty()) throw ConfigError("spec lists no methods");
    for (const std::string& m : spec.methods) {
        if (m != "coltree" && m != "brute" && m != "aub" && m != "ier") {
            throw ConfigError("unknown method: " + m);
        }
    }
    if (kind != QueryKind::Range && spec.k < 1) throw ConfigError("k must be at least 1");
    if (spec.object_sets < 1 || spec.query_sets < 1) {
        throw ConfigError("object_sets and query_sets must be at least 1");
    }

    RoadGraph g = make_spec_graph(spec.graph);
    SulParams sp = spec.sul;
    sp.seed = spec.seed;
    sp.lazy_leaf_sdls = false;  // workers share the tree read-only

    auto wall_ms = [](auto f) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    SulTree sul;
    double sul_build_ms = wall_ms([&] { sul = build_sultree(g, sp); });
    std::uint64_t sul_bytes = 0;
    {
        std::ostringstream os;
        save_sultree(sul, os);
        sul_bytes = os.str().size();
    }

    Distance radius = 0;
    if (kind == QueryKind::Range) {
        radius = static_cast<Distance>(spec.radius_pct / 100.0 *
                                       static_cast<double>(approximate_diameter(g)));
    }

    std::vector<std::vector<Vertex>> object_sets(spec.object_sets);
    for (std::size_t os = 0; os < spec.object_sets; ++os) {
        object_sets[os] = generate_objects(g, spec.density, derive_seed(spec.seed, 1000 + os));
    }
    std::vector<std::vector<Vertex>> query_sets(spec.query_sets);
    for (std::size_t qs = 0; qs < spec.query_sets; ++qs) {
        // Locality applies to aggregate query sets; single query vertices are
        // drawn uniformly.
        std::uint64_t s = derive_seed(spec.seed, 2000 + qs);
        query_sets[qs] = kind == QueryKind::Aknn
                             ? generate_query_set(g, spec.query_size, spec.area_pct, s)
                             : generate_query_set(g, 1, 100.0, s);
    }

    // A (object set, query set) pair is re-checked against brute force when
    // its derived hash lands under the sampling percentage.
    auto sampled = [&](std::size_t os, std::size_t qs) {
        std::uint64_t h = derive_seed(spec.seed, 3000, os * 1000003 + qs);
        return static_cast<double>(h % 10000) < spec.oracle_sample_pct * 100.0;
    };

    auto run_brute = [&](std::span<const Vertex> objs, std::span<const Vertex> q,
                         QueryStats* stats) {
        QueryOutput out;
        switch (kind) {
            case QueryKind::Aknn:
                out.ranked = brute_aknn(g, objs, q, spec.k, spec.agg, stats);
                break;
            case QueryKind::Kfn:
                out.ranked = brute_kfn(g, objs, q[0], spec.k, stats);
                break;
            case QueryKind::Range:
                out.members = brute_range(g, objs, q[0], radius, stats);
                break;
            case QueryKind::Knn:
                out.ranked = brute_knn(g, objs, q[0], spec.k, stats);
                break;
        }
        return out;
    };

    std::size_t workers =
        std::max<std::size_t>(1, std::min(spec.parallel_workers, spec.object_sets));
    std::vector<WorkerResult> results(workers);

    auto worker_main = [&](std::size_t w) {
        WorkerResult& res = results[w];
        res.per_method.resize(spec.methods.size());
        try {
            // Per-worker engines keep the call counters race-free.
            auto tree_backend = make_backend(spec.backend, sul.graph, &sul);
            auto ier_backend = make_translated_backend(
                make_backend(spec.backend, sul.graph, &sul), sul.old_to_new);

            for (std::size_t os = w; os < spec.object_sets; os += workers) {
                const std::vector<Vertex>& objs = object_sets[os];
                ColTree col;
                res.col_build_ms += wall_ms([&] { col = build_coltree(sul, objs, spec.lambda); });
                res.col_builds += 1;
                {
                    std::ostringstream osx;
                    save_coltree(col, osx);
                    res.col_bytes += osx.str().size();
                }
                std::unique_ptr<StrRtree> rtree;
                bool want_ier = false;
                for (const std::string& m : spec.methods) want_ier |= m == "ier";
                if (want_ier && method_supports("ier", kind)) {
                    rtree = std::make_unique<StrRtree>(g, objs);
                }

                for (std::size_t qs = 0; qs < spec.query_sets; ++qs) {
                    const std::vector<Vertex>& q = query_sets[qs];
                    bool check = sampled(os, qs);
                    QueryOutput oracle;
                    if (check) oracle = run_brute(objs, q, nullptr);

                    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
                        const std::string& method = spec.methods[mi];
                        MethodAccum& acc = res.per_method[mi];
                        if (!method_supports(method, kind)) {
                            acc.supported = false;
                            continue;
                        }
                        QueryStats stats;
                        QueryOutput out;
                        if (method == "coltree") {
                            switch (kind) {
                                case QueryKind::Aknn:
                                    out.ranked =
                                        aknn(col, sul, *tree_backend, q, spec.k, spec.agg, &stats);
                                    break;
                                case QueryKind::Kfn:
                                    out.ranked = kfn(col, sul, *tree_backend, q[0], spec.k, &stats);
                                    break;
                                case QueryKind::Range:
                                    out.members =
                                        range_query(col, sul, *tree_backend, q[0], radius, &stats);
                                    break;
                                case QueryKind::Knn:
                                    out.ranked = knn(col, sul, *tree_backend, q[0], spec.k, &stats);
                                    break;
                            }
                        } else if (method == "brute") {
                            out = run_brute(objs, q, &stats);
                        } else if (method == "aub") {
                            out.ranked = aub_kfn(sul, *tree_backend, objs, q[0], spec.k, &stats);
                        } else {  // ier
                            switch (kind) {
                                case QueryKind::Aknn:
                                    out.ranked = ier_aknn(g, *rtree, *ier_backend, q, spec.k,
                                                          spec.agg, &stats);
                                    break;
                                case QueryKind::Range:
                                    out.members =
                                        ier_range(g, *rtree, *ier_backend, q[0], radius, &stats);
                                    break;
                                default:
                                    out.ranked =
                                        ier_knn(g, *rtree, *ier_backend, q[0], spec.k, &stats);
                                    break;
                            }
                        }

                        acc.queries += 1;
                        acc.calls += stats.exact_distance_calls;
                        acc.candidates += stats.candidates_retrieved;
                        acc.nodes += stats.nodes_visited;
                        acc.settled += stats.vertices_settled;
                        acc.result_hash_sum += out.hash();
                        acc.times_us.push_back(
                            std::chrono::duration<double, std::micro>(stats.wall_time).count());

                        if (check && !(out == oracle)) {
                            throw OracleMismatch("method " + method + " disagrees with brute force"
                                                 " (object set " + std::to_string(os) +
                                                 ", query set " + std::to_string(qs) + ")");
                        }
                    }
                }
            }
        } catch (...) {
            res.error = std::current_exception();
        }
    };

    if (workers == 1) {
        worker_main(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker_main, w);
        for (std::thread& t : pool) t.join();
    }
    for (WorkerResult& res : results) {
        if (res.error) std::rethrow_exception(res.error);
    }

    std::vector<MethodAccum> merged(spec.methods.size());
    double col_build_ms = 0;
    std::uint64_t col_bytes = 0, col_builds = 0;
    for (WorkerResult& res : results) {
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
            merged[mi].merge(res.per_method[mi]);
            merged[mi].supported = merged[mi].supported && res.per_method[mi].supported;
        }
        col_build_ms += res.col_build_ms;
        col_bytes += res.col_bytes;
        col_builds += res.col_builds;
    }

    std::ostringstream csv;
    csv << "# graph=" << spec.graph << " vertices=" << g.vertex_count()
        << " arcs=" << g.arc_count() << "\n";
    csv << "# sul nodes=" << sul.nodes.size() << " sdl_entries=" << sul.sdl.size()
        << " gamma=" << format_double(sul.stats.gamma()) << "\n";
    csv << "kind,method,status,object_sets,query_sets,queries,k,agg,radius,"
           "mean_exact_distance_calls,mean_candidates_retrieved,mean_nodes_visited,"
           "mean_vertices_settled,result_hash,gamma,sdl_entries,sul_index_bytes,"
           "col_index_bytes,sul_build_ms,col_build_ms,mean_time_us,median_time_us\n";

    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        MethodAccum& acc = merged[mi];
        csv << spec.kind << ',' << spec.methods[mi] << ','
            << (acc.supported ? "ok" : "unsupported") << ',' << spec.object_sets << ','
            << spec.query_sets << ',' << acc.queries << ',' << spec.k << ','
            << to_string(spec.agg) << ',' << radius << ',';
        csv << format_mean(static_cast<double>(acc.calls), acc.queries) << ','
            << format_mean(static_cast<double>(acc.candidates), acc.queries) << ','
            << format_mean(static_cast<double>(acc.nodes), acc.queries) << ','
            << format_mean(static_cast<double>(acc.settled), acc.queries) << ',';
        char hash_buf[32];
        std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                      static_cast<unsigned long long>(acc.result_hash_sum));
        csv << hash_buf << ',' << format_double(sul.stats.gamma()) << ',' << sul.sdl.size() << ','
            << sul_bytes << ',' << (col_builds == 0 ? 0 : col_bytes / col_builds) << ',';

        double mean_us = 0, median_us = 0;
        if (!acc.times_us.empty()) {
            std::vector<double> t = acc.times_us;
            std::sort(t.begin(), t.end());
            for (double v : t) mean_us += v;
            mean_us /= static_cast<double>(t.size());
            median_us = t[(t.size() - 1) / 2];
        }
        csv << format_double(sul_build_ms) << ','
            << format_double(col_builds == 0 ? 0.0 : col_build_ms / static_cast<double>(col_builds))
            << ',' << format_double(mean_us) << ',' << format_double(median_us) << "\n";
    }
    return csv.str();
}

}  // namespace colt
