#include <memory>
#include <random>
#include <vector>

#include "colt/baselines.hpp"
#include "colt/coltree.hpp"
#include "colt/distoracle.hpp"
#include "colt/graph.hpp"
#include "colt/query.hpp"
#include "colt/rng.hpp"
#include "colt/sultree.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace colt;

namespace {

// Everything a tree query needs, built from one graph and object set.
struct Fixture {
    RoadGraph g;
    SulTree sul;
    ColTree col;
    std::unique_ptr<DistanceBackend> backend;
    std::vector<Vertex> objects;  // original ids

    Fixture(RoadGraph graph, SulParams params, std::vector<Vertex> objs, std::size_t lambda)
        : g(std::move(graph)), sul(build_sultree(g, params)), objects(std::move(objs)) {
        col = build_coltree(sul, objects, lambda);
        backend = make_bidirectional_backend(sul.graph);
    }
};

SulParams deep_params(std::uint64_t seed) {
    SulParams p;
    p.branching = 2;
    p.leaf_cap = 4;
    p.landmarks = 1;
    p.root_landmarks = 3;
    p.seed = seed;
    return p;
}

SulParams wide_params(std::uint64_t seed) {
    SulParams p;
    p.branching = 4;
    p.leaf_cap = 16;
    p.landmarks = 2;
    p.root_landmarks = 4;
    p.seed = seed;
    return p;
}

Fixture path5_fixture() {
    SulParams p = deep_params(3);
    p.leaf_cap = 2;
    p.root_landmarks = 2;
    return Fixture(test::path5(), p, {0, 4}, 1);
}

std::vector<Vertex> draw_vertices(std::mt19937_64& rng, std::size_t universe,
                                  std::uint32_t count) {
    auto s = sample_without_replacement(rng, static_cast<std::uint32_t>(universe), count);
    return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("aggregate_minimizer: frozen values and optimality") {
    std::vector<Distance> c = {3, 7, 20};
    CHECK(aggregate_minimizer(Aggregate::Sum, c) == 14);  // lower median 7, doubled
    CHECK(aggregate_minimizer(Aggregate::Max, c) == 23);  // midrange 11.5, doubled
    std::vector<Distance> one = {5};
    CHECK(aggregate_minimizer(Aggregate::Sum, one) == 10);
    CHECK(aggregate_minimizer(Aggregate::Max, one) == 10);
    CHECK_THROWS_AS(aggregate_minimizer(Aggregate::Sum, {}), ConfigError);

    // the returned point minimizes the doubled objective over a dense sweep
    std::mt19937_64 rng(11);
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 1 + bounded(rng, 6);
        std::vector<Distance> cs(n);
        for (auto& v : cs) v = bounded(rng, 30);
        for (Aggregate agg : {Aggregate::Sum, Aggregate::Max}) {
            auto doubled = [&](Distance x2) {
                Distance acc = 0;
                for (Distance ci : cs) {
                    Distance d = 2 * ci > x2 ? 2 * ci - x2 : x2 - 2 * ci;
                    acc = agg == Aggregate::Sum ? acc + d : std::max(acc, d);
                }
                return acc;
            };
            Distance at_min = doubled(aggregate_minimizer(agg, cs));
            for (Distance x2 = 0; x2 <= 60; ++x2) CHECK(at_min <= doubled(x2));
        }
    }
}

TEST_CASE("odl_objective aggregates absolute gaps") {
    std::vector<Distance> c = {3, 7, 20};
    CHECK(odl_objective(Aggregate::Sum, c, 7) == 17);
    CHECK(odl_objective(Aggregate::Max, c, 11) == 9);
    CHECK(odl_objective(Aggregate::Max, c, 3) == 17);
}

TEST_CASE("best-k keeps lexicographic (score, id) order") {
    BestK nearest(2, false);
    nearest.offer(9, 4);
    nearest.offer(5, 9);
    nearest.offer(5, 2);  // same score, smaller id wins
    nearest.offer(7, 1);
    REQUIRE(nearest.items().size() == 2);
    CHECK(nearest.items()[0] == ResultEntry{2, 5});
    CHECK(nearest.items()[1] == ResultEntry{9, 5});
    CHECK(nearest.threshold() == 5);

    BestK farthest(2, true);
    CHECK(farthest.threshold() == 0);
    farthest.offer(3, 7);
    farthest.offer(8, 5);
    farthest.offer(8, 1);
    REQUIRE(farthest.items().size() == 2);
    CHECK(farthest.items()[0] == ResultEntry{1, 8});
    CHECK(farthest.items()[1] == ResultEntry{5, 8});

    BestK none(0, false);
    none.offer(1, 1);
    CHECK(none.items().empty());
}

TEST_CASE("path graph: aggregate nearest neighbors by hand") {
    Fixture f = path5_fixture();
    std::vector<Vertex> q = {1, 3};

    auto sum1 = aknn(f.col, f.sul, *f.backend, q, 1, Aggregate::Sum);
    REQUIRE(sum1.size() == 1);
    CHECK(sum1[0] == ResultEntry{0, 8});  // 2 + 6 beats 8 + 4

    auto sum2 = aknn(f.col, f.sul, *f.backend, q, 2, Aggregate::Sum);
    REQUIRE(sum2.size() == 2);
    CHECK(sum2[0] == ResultEntry{0, 8});
    CHECK(sum2[1] == ResultEntry{4, 12});

    auto max1 = aknn(f.col, f.sul, *f.backend, q, 1, Aggregate::Max);
    REQUIRE(max1.size() == 1);
    CHECK(max1[0] == ResultEntry{0, 6});  // max(2,6) beats max(8,4)

    CHECK_THROWS_AS(aknn(f.col, f.sul, *f.backend, {}, 1, Aggregate::Sum), ConfigError);
    std::vector<Vertex> bad = {7};
    CHECK_THROWS_AS(aknn(f.col, f.sul, *f.backend, bad, 1, Aggregate::Sum), ConfigError);
    CHECK(aknn(f.col, f.sul, *f.backend, q, 0, Aggregate::Sum).empty());
}

TEST_CASE("path graph: farthest neighbors by hand") {
    SulParams p = deep_params(3);
    p.leaf_cap = 2;
    p.root_landmarks = 2;
    Fixture f(test::path5(), p, {0, 3, 4}, 1);

    auto far1 = kfn(f.col, f.sul, *f.backend, 2, 1);
    REQUIRE(far1.size() == 1);
    CHECK(far1[0] == ResultEntry{0, 5});  // 0 and 4 tie at 5; smaller id first

    auto far3 = kfn(f.col, f.sul, *f.backend, 2, 3);
    REQUIRE(far3.size() == 3);
    CHECK(far3[0] == ResultEntry{0, 5});
    CHECK(far3[1] == ResultEntry{4, 5});
    CHECK(far3[2] == ResultEntry{3, 1});

    CHECK(kfn(f.col, f.sul, *f.backend, 2, 9).size() == 3);  // k beyond |P| returns all
    CHECK_THROWS_AS(kfn(f.col, f.sul, *f.backend, 5, 1), ConfigError);
}

TEST_CASE("path graph: range by hand") {
    SulParams p = deep_params(3);
    p.leaf_cap = 2;
    p.root_landmarks = 2;
    Fixture f(test::path5(), p, {0, 3, 4}, 1);

    CHECK(range_query(f.col, f.sul, *f.backend, 2, 5) == std::vector<Vertex>{0, 3, 4});
    CHECK(range_query(f.col, f.sul, *f.backend, 2, 1) == std::vector<Vertex>{3});
    CHECK(range_query(f.col, f.sul, *f.backend, 2, 0).empty());
    CHECK(range_query(f.col, f.sul, *f.backend, 3, 4) == std::vector<Vertex>{3, 4});
    CHECK(range_query(f.col, f.sul, *f.backend, 3, 0) == std::vector<Vertex>{3});
}

TEST_CASE("path graph: nearest neighbors by hand") {
    Fixture f = path5_fixture();
    auto two = knn(f.col, f.sul, *f.backend, 1, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == ResultEntry{0, 2});
    CHECK(two[1] == ResultEntry{4, 8});

    auto self = knn(f.col, f.sul, *f.backend, 0, 1);
    REQUIRE(self.size() == 1);
    CHECK(self[0] == ResultEntry{0, 0});  // the query vertex is an object
}

TEST_CASE("tree queries match brute force everywhere") {
    struct Config {
        RoadGraph g;
        SulParams params;
        std::size_t lambda;
    };
    std::vector<Config> configs;
    configs.push_back({make_grid_graph(6, 6, 2, 1, 8), deep_params(1), 2});  // many distance ties
    configs.push_back({make_grid_graph(5, 7, 4), wide_params(2), 8});
    configs.push_back({make_random_planar_graph(140, 6), deep_params(3), 4});
    configs.push_back({test::star(12), deep_params(4), 2});

    std::mt19937_64 rng(2024);
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        CAPTURE(ci);
        Config& cfg = configs[ci];
        std::size_t n = cfg.g.vertex_count();
        SulTree sul = build_sultree(cfg.g, cfg.params);
        auto backend = make_bidirectional_backend(sul.graph);

        for (std::uint32_t object_count :
             {std::uint32_t{1}, std::uint32_t{7}, static_cast<std::uint32_t>(n / 3)}) {
            if (object_count == 0 || object_count > n) continue;
            CAPTURE(object_count);
            std::vector<Vertex> objects = draw_vertices(rng, n, object_count);
            ColTree col = build_coltree(sul, objects, cfg.lambda);

            for (int round = 0; round < 6; ++round) {
                Vertex q = bounded(rng, static_cast<std::uint32_t>(n));
                CAPTURE(round);
                CAPTURE(q);

                for (std::size_t k : {std::size_t{1}, std::size_t{3}, objects.size() + 2}) {
                    for (Aggregate agg : {Aggregate::Sum, Aggregate::Max}) {
                        for (std::uint32_t qs : {2u, 5u}) {
                            std::vector<Vertex> query_set = draw_vertices(rng, n, qs);
                            auto got = aknn(col, sul, *backend, query_set, k, agg);
                            auto want = brute_aknn(cfg.g, objects, query_set, k, agg);
                            CHECK(got == want);
                        }
                    }
                    CHECK(kfn(col, sul, *backend, q, k) == brute_kfn(cfg.g, objects, q, k));
                    CHECK(knn(col, sul, *backend, q, k) == brute_knn(cfg.g, objects, q, k));
                }

                // radii that land exactly on an object distance stress the
                // boundary: results are inclusive on both sides
                Distance d0 = brute_knn(cfg.g, objects, q, 1)[0].score;
                Distance dmax = brute_kfn(cfg.g, objects, q, 1)[0].score;
                for (Distance r : {Distance{0}, d0, (d0 + dmax) / 2, dmax, dmax + 50}) {
                    CHECK(range_query(col, sul, *backend, q, r) ==
                          brute_range(cfg.g, objects, q, r));
                }
            }
        }
    }
}

TEST_CASE("results shrink consistently as k shrinks") {
    RoadGraph g = make_grid_graph(7, 7, 9);
    SulTree sul = build_sultree(g, wide_params(9));
    std::mt19937_64 rng(5);
    std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 15);
    ColTree col = build_coltree(sul, objects, 4);
    auto backend = make_bidirectional_backend(sul.graph);

    std::vector<Vertex> q = {3, 21, 40};
    auto full = aknn(col, sul, *backend, q, 15, Aggregate::Sum);
    REQUIRE(full.size() == 15);
    for (std::size_t k = 1; k < 15; ++k) {
        auto part = aknn(col, sul, *backend, q, k, Aggregate::Sum);
        REQUIRE(part.size() == k);
        for (std::size_t i = 0; i < k; ++i) CHECK(part[i] == full[i]);
    }

    auto far_full = kfn(col, sul, *backend, 10, 15);
    for (std::size_t k = 1; k < 15; k += 3) {
        auto part = kfn(col, sul, *backend, 10, k);
        REQUIRE(part.size() == k);
        for (std::size_t i = 0; i < k; ++i) CHECK(part[i] == far_full[i]);
    }
}

TEST_CASE("queries draw no more candidates than there are objects") {
    RoadGraph g = make_grid_graph(8, 8, 14);
    SulTree sul = build_sultree(g, wide_params(14));
    std::mt19937_64 rng(8);
    std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 20);
    ColTree col = build_coltree(sul, objects, 4);
    auto backend = make_bidirectional_backend(sul.graph);

    std::vector<Vertex> q = {5, 50};
    QueryStats s1;
    aknn(col, sul, *backend, q, 3, Aggregate::Max, &s1);
    CHECK(s1.candidates_retrieved <= objects.size());
    CHECK(s1.nodes_visited > 0);

    QueryStats s2;
    kfn(col, sul, *backend, 17, 3, &s2);
    CHECK(s2.candidates_retrieved <= objects.size());

    QueryStats s3;
    range_query(col, sul, *backend, 17, 40, &s3);
    CHECK(s3.candidates_retrieved <= objects.size());
}

TEST_CASE("queue and list traces obey their invariants") {
    RoadGraph g = make_grid_graph(8, 8, 25, 1, 9);
    SulParams params = deep_params(7);
    SulTree sul = build_sultree(g, params);
    std::mt19937_64 rng(13);
    std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 22);
    ColTree col = build_coltree(sul, objects, 2);
    auto backend = make_bidirectional_backend(sul.graph);

    SUBCASE("aggregate nearest: keys rise, bounds hold, list starts at the minimum") {
        for (Aggregate agg : {Aggregate::Sum, Aggregate::Max}) {
            QueryTrace trace;
            std::vector<Vertex> q = {9, 33, 60};
            aknn(col, sul, *backend, q, 4, agg, nullptr, &trace);

            for (std::size_t i = 1; i < trace.extracted_keys.size(); ++i)
                CHECK(trace.extracted_keys[i - 1] <= trace.extracted_keys[i]);
            for (auto [key, score] : trace.evaluations) CHECK(key <= score);

            REQUIRE(!trace.leaf_inits.empty());
            for (const LeafInitTrace& li : trace.leaf_inits) {
                const auto& odl = col.nodes[li.node].odls[li.landmark_idx];
                Distance at_init = odl_objective(agg, li.constants, odl[li.init_index].dist);
                for (const OdlEntry& e : odl)
                    CHECK(at_init <= odl_objective(agg, li.constants, e.dist));
            }
        }
    }

    SUBCASE("farthest: keys fall and stay above the exact score") {
        QueryTrace trace;
        kfn(col, sul, *backend, 12, 4, nullptr, &trace);
        for (std::size_t i = 1; i < trace.extracted_keys.size(); ++i)
            CHECK(trace.extracted_keys[i - 1] >= trace.extracted_keys[i]);
        for (auto [key, score] : trace.evaluations) CHECK(key >= score);
        for (const LeafInitTrace& li : trace.leaf_inits)
            CHECK(li.init_index == col.nodes[li.node].odls[li.landmark_idx].size() - 1);
    }

    SUBCASE("range: verified objects respect their lower bound") {
        QueryTrace trace;
        auto hits = range_query(col, sul, *backend, 30, 25, nullptr, &trace);
        CHECK(std::is_sorted(hits.begin(), hits.end()));
        for (auto [lb, exact] : trace.evaluations) CHECK(lb <= exact);
    }
}

TEST_CASE("repeated queries are bit-identical") {
    RoadGraph g = make_random_planar_graph(130, 17);
    SulTree sul = build_sultree(g, wide_params(17));
    std::mt19937_64 rng(20);
    std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 30);
    ColTree col = build_coltree(sul, objects, 8);
    auto backend = make_bidirectional_backend(sul.graph);

    std::vector<Vertex> q = {4, 77};
    auto a = aknn(col, sul, *backend, q, 6, Aggregate::Sum);
    auto b = aknn(col, sul, *backend, q, 6, Aggregate::Sum);
    CHECK(a == b);
    CHECK(kfn(col, sul, *backend, 50, 5) == kfn(col, sul, *backend, 50, 5));
    CHECK(range_query(col, sul, *backend, 50, 90) == range_query(col, sul, *backend, 50, 90));
}

TEST_CASE("an empty object hierarchy yields empty answers") {
    RoadGraph g = make_grid_graph(5, 5, 6);
    SulTree sul = build_sultree(g, wide_params(6));
    ColTree col = build_coltree(sul, {}, 4);
    auto backend = make_bidirectional_backend(sul.graph);

    std::vector<Vertex> q = {2, 12};
    CHECK(aknn(col, sul, *backend, q, 3, Aggregate::Sum).empty());
    CHECK(kfn(col, sul, *backend, 2, 3).empty());
    CHECK(range_query(col, sul, *backend, 2, 1000).empty());
}
