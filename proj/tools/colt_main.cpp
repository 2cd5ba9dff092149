// Command-line front end: graph ingestion, index construction, query
// execution, and the experiment harness.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "colt/baselines.hpp"
#include "colt/bench.hpp"
#include "colt/coltree.hpp"
#include "colt/dimacs.hpp"
#include "colt/query.hpp"

namespace {

colt::RoadGraph load_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw colt::ConfigError("cannot open graph file: " + path);
    return colt::load_graph(in);
}

colt::SulTree load_sultree_file(const std::string& path, const colt::RoadGraph& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw colt::ConfigError("cannot open SUL-tree file: " + path);
    return colt::load_sultree(in, g);
}

colt::ColTree load_coltree_file(const std::string& path, const colt::SulTree& sul) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw colt::ConfigError("cannot open COL-tree file: " + path);
    return colt::load_coltree(in, sul);
}

template <typename SaveFn>
void save_to_file(const std::string& path, SaveFn save) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw colt::ConfigError("cannot open output file: " + path);
    save(out);
    if (!out) throw colt::ConfigError("failed writing output file: " + path);
}

std::vector<colt::Vertex> read_query_file(const std::string& path, std::size_t vertex_count) {
    std::ifstream in(path);
    if (!in) throw colt::ConfigError("cannot open query file: " + path);
    return colt::parse_vertex_list(in, vertex_count);
}

struct QueryArgs {
    std::string graph, sultree, coltree, objects, q_file;
    std::string method = "coltree";
    std::string backend = "bidirectional";
    std::string agg = "max";
    std::size_t k = 10;
    double radius = -1;
    double radius_pct = -1;
    bool verify = false;
    bool stats = false;
};

// Object list: explicit file wins; otherwise pull the set out of the COL-tree.
std::vector<colt::Vertex> resolve_objects(const QueryArgs& a, const colt::RoadGraph& g,
                                          const colt::SulTree& sul, const colt::ColTree* col) {
    if (!a.objects.empty()) return colt::load_vertex_list(a.objects, g.vertex_count());
    if (col && !col->empty()) {
        std::vector<colt::Vertex> internal = colt::collect_objects(*col, 0);
        std::vector<colt::Vertex> out;
        out.reserve(internal.size());
        for (colt::Vertex v : internal) out.push_back(sul.new_to_old[v]);
        std::sort(out.begin(), out.end());
        return out;
    }
    throw colt::ConfigError("no object set: pass --objects or --coltree");
}

void print_stats(const colt::QueryStats& stats, std::size_t queries) {
    std::fprintf(stderr,
                 "queries=%zu exact_distance_calls=%llu candidates_retrieved=%llu "
                 "nodes_visited=%llu vertices_settled=%llu\n",
                 queries, static_cast<unsigned long long>(stats.exact_distance_calls),
                 static_cast<unsigned long long>(stats.candidates_retrieved),
                 static_cast<unsigned long long>(stats.nodes_visited),
                 static_cast<unsigned long long>(stats.vertices_settled));
}

int run_query(const std::string& kind, const QueryArgs& a) {
    colt::RoadGraph g = load_graph_file(a.graph);
    if (a.sultree.empty()) throw colt::ConfigError("query needs --sultree");
    colt::SulTree sul = load_sultree_file(a.sultree, g);

    std::optional<colt::ColTree> col;
    if (!a.coltree.empty()) col = load_coltree_file(a.coltree, sul);
    if (a.method == "coltree" && !col) throw colt::ConfigError("method coltree needs --coltree");

    std::vector<colt::Vertex> objects = resolve_objects(a, g, sul, col ? &*col : nullptr);
    std::vector<colt::Vertex> input = read_query_file(a.q_file, g.vertex_count());
    if (input.empty()) throw colt::ConfigError("query file is empty: " + a.q_file);
    colt::Aggregate agg = colt::aggregate_from_string(a.agg);
    colt::BackendKind bk = colt::backend_kind_from_string(a.backend);

    colt::Distance radius = 0;
    if (kind == "range") {
        if (a.radius >= 0 && a.radius_pct >= 0) {
            throw colt::ConfigError("pass either --radius or --radius-pct, not both");
        }
        if (a.radius >= 0) {
            radius = static_cast<colt::Distance>(a.radius);
        } else if (a.radius_pct >= 0) {
            radius = static_cast<colt::Distance>(
                a.radius_pct / 100.0 * static_cast<double>(colt::approximate_diameter(g)));
        } else {
            throw colt::ConfigError("range query needs --radius or --radius-pct");
        }
    }

    auto tree_backend = colt::make_backend(bk, sul.graph, &sul);
    auto orig_backend =
        colt::make_translated_backend(colt::make_backend(bk, sul.graph, &sul), sul.old_to_new);
    std::optional<colt::StrRtree> rtree;
    if (a.method == "ier") {
        if (kind == "kfn") throw colt::ConfigError("ier does not support kfn queries");
        rtree.emplace(g, objects);
    }

    // aknn treats the whole file as one query set; the other kinds run one
    // query per listed vertex.
    std::vector<std::vector<colt::Vertex>> batches;
    if (kind == "aknn") {
        batches.push_back(input);
    } else {
        for (colt::Vertex v : input) batches.push_back({v});
    }

    colt::QueryStats stats;
    bool mismatch = false;
    for (std::size_t i = 0; i < batches.size(); ++i) {
        const std::vector<colt::Vertex>& q = batches[i];
        std::vector<colt::ResultEntry> ranked;
        std::vector<colt::Vertex> members;

        if (a.method == "coltree") {
            if (kind == "aknn") {
                ranked = colt::aknn(*col, sul, *tree_backend, q, a.k, agg, &stats);
            } else if (kind == "kfn") {
                ranked = colt::kfn(*col, sul, *tree_backend, q[0], a.k, &stats);
            } else if (kind == "range") {
                members = colt::range_query(*col, sul, *tree_backend, q[0], radius, &stats);
            } else {
                ranked = colt::knn(*col, sul, *tree_backend, q[0], a.k, &stats);
            }
        } else if (a.method == "brute") {
            if (kind == "aknn") {
                ranked = colt::brute_aknn(g, objects, q, a.k, agg, &stats);
            } else if (kind == "kfn") {
                ranked = colt::brute_kfn(g, objects, q[0], a.k, &stats);
            } else if (kind == "range") {
                members = colt::brute_range(g, objects, q[0], radius, &stats);
            } else {
                ranked = colt::brute_knn(g, objects, q[0], a.k, &stats);
            }
        } else if (a.method == "aub") {
            if (kind != "kfn") throw colt::ConfigError("method aub only supports kfn queries");
            ranked = colt::aub_kfn(sul, *tree_backend, objects, q[0], a.k, &stats);
        } else if (a.method == "ier") {
            if (kind == "aknn") {
                ranked = colt::ier_aknn(g, *rtree, *orig_backend, q, a.k, agg, &stats);
            } else if (kind == "range") {
                members = colt::ier_range(g, *rtree, *orig_backend, q[0], radius, &stats);
            } else {
                ranked = colt::ier_knn(g, *rtree, *orig_backend, q[0], a.k, &stats);
            }
        } else {
            throw colt::ConfigError("unknown method: " + a.method);
        }

        if (a.verify) {
            bool ok = true;
            if (kind == "aknn") {
                ok = ranked == colt::brute_aknn(g, objects, q, a.k, agg);
            } else if (kind == "kfn") {
                ok = ranked == colt::brute_kfn(g, objects, q[0], a.k);
            } else if (kind == "range") {
                ok = members == colt::brute_range(g, objects, q[0], radius);
            } else {
                ok = ranked == colt::brute_knn(g, objects, q[0], a.k);
            }
            if (!ok) {
                std::fprintf(stderr, "verification failed for query %zu\n", i);
                mismatch = true;
            }
        }

        if (kind == "range") {
            for (colt::Vertex v : members) std::printf("%zu\t%u\n", i, v);
        } else {
            for (const colt::ResultEntry& e : ranked) {
                std::printf("%zu\t%u\t%llu\n", i, e.object,
                            static_cast<unsigned long long>(e.score));
            }
        }
    }
    if (a.stats) print_stats(stats, batches.size());
    return mismatch ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"landmark-hierarchy object search over road networks"};
    app.require_subcommand(1);

    // ingest
    std::string in_gr, in_co, in_out, in_idmap;
    CLI::App* ingest = app.add_subcommand("ingest", "parse DIMACS files into a binary graph");
    ingest->add_option("--gr", in_gr, "DIMACS .gr arc file")->required();
    ingest->add_option("--co", in_co, "DIMACS .co coordinate file");
    ingest->add_option("--out", in_out, "output graph path")->required();
    ingest->add_option("--id-map", in_idmap, "write old->new vertex id map here");

    // gen-graph
    std::string gg_grid, gg_out;
    std::uint64_t gg_planar = 0, gg_seed = 1;
    CLI::App* gen_graph = app.add_subcommand("gen-graph", "generate a synthetic graph");
    gen_graph->add_option("--grid", gg_grid, "grid size as <rows>x<cols>");
    gen_graph->add_option("--planar", gg_planar, "random planar graph with N vertices");
    gen_graph->add_option("--seed", gg_seed, "rng seed");
    gen_graph->add_option("--out", gg_out, "output graph path")->required();

    // build-sultree
    std::string bs_graph, bs_out, bs_policy = "random";
    colt::SulParams bs_params;
    CLI::App* build_sul = app.add_subcommand("build-sultree", "build the vertex hierarchy");
    build_sul->add_option("--graph", bs_graph)->required();
    build_sul->add_option("--out", bs_out)->required();
    build_sul->add_option("--b", bs_params.branching, "partition fan-out");
    build_sul->add_option("--alpha", bs_params.leaf_cap, "leaf subgraph capacity");
    build_sul->add_option("--m", bs_params.landmarks, "landmarks per node");
    build_sul->add_option("--m-root", bs_params.root_landmarks, "landmarks at the root");
    build_sul->add_option("--policy", bs_policy,
                          "landmark policy: random|furthest-border|slice|minmax");
    build_sul->add_option("--seed", bs_params.seed, "rng seed");
    build_sul->add_flag("--lazy-leaf-sdls", bs_params.lazy_leaf_sdls,
                        "defer leaf distance lists until first use");
    bool bs_no_restrict = false;
    build_sul->add_flag("--no-restrict", bs_no_restrict,
                        "disable border-pruned subgraph searches");

    // build-coltree
    std::string bc_graph, bc_sul, bc_objects, bc_out;
    std::size_t bc_lambda = 256;
    CLI::App* build_col = app.add_subcommand("build-coltree", "compact the hierarchy over objects");
    build_col->add_option("--graph", bc_graph)->required();
    build_col->add_option("--sultree", bc_sul)->required();
    build_col->add_option("--objects", bc_objects, "object list, one vertex id per line")
        ->required();
    build_col->add_option("--lambda", bc_lambda, "leaf object capacity");
    build_col->add_option("--out", bc_out)->required();

    // gen-objects
    std::string go_graph, go_out;
    double go_density = 0.001;
    std::uint64_t go_seed = 1;
    CLI::App* gen_obj = app.add_subcommand("gen-objects", "sample a random object set");
    gen_obj->add_option("--graph", go_graph)->required();
    gen_obj->add_option("--density", go_density, "|P| / |V|");
    gen_obj->add_option("--seed", go_seed);
    gen_obj->add_option("--out", go_out)->required();

    // query
    QueryArgs qa;
    CLI::App* query = app.add_subcommand("query", "run queries against built indexes");
    query->require_subcommand(1);
    std::vector<CLI::App*> kinds;
    for (const char* kind : {"aknn", "kfn", "range", "knn"}) {
        CLI::App* sub = query->add_subcommand(kind);
        sub->add_option("--graph", qa.graph)->required();
        sub->add_option("--sultree", qa.sultree)->required();
        sub->add_option("--coltree", qa.coltree);
        sub->add_option("--objects", qa.objects, "object list file");
        sub->add_option("--q-file", qa.q_file, "query vertices, one id per line")->required();
        sub->add_option("--method", qa.method, "coltree|brute|ier|aub");
        sub->add_option("--backend", qa.backend, "bidirectional|alt-astar");
        sub->add_flag("--verify", qa.verify, "cross-check against brute force (exit 2 on mismatch)");
        sub->add_flag("--stats", qa.stats, "print counters to stderr");
        if (std::string(kind) != "range") sub->add_option("--k", qa.k);
        if (std::string(kind) == "aknn") sub->add_option("--agg", qa.agg, "sum|max");
        if (std::string(kind) == "range") {
            sub->add_option("--radius", qa.radius, "network distance radius");
            sub->add_option("--radius-pct", qa.radius_pct, "radius as % of estimated diameter");
        }
        kinds.push_back(sub);
    }

    // bench
    std::string be_spec, be_out;
    CLI::App* bench = app.add_subcommand("bench", "run an experiment spec");
    bench->add_option("--spec", be_spec, "key=value experiment file")->required();
    bench->add_option("--out", be_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // pin usage failures to exit code 1
    }

    try {
        if (*ingest) {
            colt::RoadGraph raw = colt::load_dimacs(in_gr, in_co);
            colt::NormalizeResult norm = colt::normalize(raw);
            save_to_file(in_out, [&](std::ostream& o) { colt::save_graph(norm.graph, o); });
            if (!in_idmap.empty()) {
                save_to_file(in_idmap, [&](std::ostream& o) { colt::write_id_map(o, norm.id_map); });
            }
            std::printf("vertices=%zu arcs=%zu\n", norm.graph.vertex_count(),
                        norm.graph.arc_count());
        } else if (*gen_graph) {
            if (gg_grid.empty() == (gg_planar == 0)) {
                throw colt::ConfigError("pass exactly one of --grid or --planar");
            }
            colt::RoadGraph g;
            if (!gg_grid.empty()) {
                auto x = gg_grid.find('x');
                if (x == std::string::npos) throw colt::ConfigError("--grid wants <rows>x<cols>");
                g = colt::make_grid_graph(
                    static_cast<std::uint32_t>(std::stoul(gg_grid.substr(0, x))),
                    static_cast<std::uint32_t>(std::stoul(gg_grid.substr(x + 1))), gg_seed);
            } else {
                g = colt::make_random_planar_graph(static_cast<std::uint32_t>(gg_planar), gg_seed);
            }
            save_to_file(gg_out, [&](std::ostream& o) { colt::save_graph(g, o); });
            std::printf("vertices=%zu arcs=%zu\n", g.vertex_count(), g.arc_count());
        } else if (*build_sul) {
            colt::RoadGraph g = load_graph_file(bs_graph);
            bs_params.policy = colt::landmark_policy_from_string(bs_policy);
            bs_params.restrict_searches = !bs_no_restrict;
            colt::SulTree sul = colt::build_sultree(g, bs_params);
            save_to_file(bs_out, [&](std::ostream& o) { colt::save_sultree(sul, o); });
            std::printf("nodes=%zu sdl_entries=%zu gamma=%.4f build_ms=%.1f\n", sul.nodes.size(),
                        sul.sdl.size(), sul.stats.gamma(),
                        std::chrono::duration<double, std::milli>(sul.stats.build_time).count());
        } else if (*build_col) {
            colt::RoadGraph g = load_graph_file(bc_graph);
            colt::SulTree sul = load_sultree_file(bc_sul, g);
            std::vector<colt::Vertex> objects =
                colt::load_vertex_list(bc_objects, g.vertex_count());
            colt::ColTree col = colt::build_coltree(sul, objects, bc_lambda);
            save_to_file(bc_out, [&](std::ostream& o) { colt::save_coltree(col, o); });
            std::printf("nodes=%zu objects=%zu build_ms=%.1f\n", col.nodes.size(),
                        static_cast<std::size_t>(col.object_count),
                        std::chrono::duration<double, std::milli>(col.stats.build_time).count());
        } else if (*gen_obj) {
            colt::RoadGraph g = load_graph_file(go_graph);
            std::vector<colt::Vertex> objects = colt::generate_objects(g, go_density, go_seed);
            save_to_file(go_out, [&](std::ostream& o) {
                for (colt::Vertex v : objects) o << v << "\n";
            });
            std::printf("objects=%zu\n", objects.size());
        } else if (*query) {
            const char* names[] = {"aknn", "kfn", "range", "knn"};
            for (std::size_t i = 0; i < kinds.size(); ++i) {
                if (*kinds[i]) return run_query(names[i], qa);
            }
        } else if (*bench) {
            colt::ExperimentSpec spec = colt::ExperimentSpec::parse_file(be_spec);
            std::string csv = colt::run_experiment(spec);
            if (be_out.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                save_to_file(be_out, [&](std::ostream& o) { o << csv; });
            }
        }
    } catch (const colt::OracleMismatch& e) {
        std::fprintf(stderr, "oracle mismatch: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
