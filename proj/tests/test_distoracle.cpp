#include <random>

#include "colt/distoracle.hpp"
#include "colt/graph.hpp"
#include "colt/rng.hpp"
#include "colt/sultree.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace colt;

namespace {

SulParams tiny_params(std::uint64_t seed) {
    SulParams p;
    p.branching = 4;
    p.leaf_cap = 16;
    p.landmarks = 2;
    p.root_landmarks = 4;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("backend kind names round-trip") {
    CHECK(backend_kind_from_string(to_string(BackendKind::Bidirectional)) ==
          BackendKind::Bidirectional);
    CHECK(backend_kind_from_string(to_string(BackendKind::AltAStar)) == BackendKind::AltAStar);
    CHECK_THROWS_AS(backend_kind_from_string("dial"), ConfigError);
}

TEST_CASE("both engines return exact distances on varied graphs") {
    std::vector<RoadGraph> graphs;
    graphs.push_back(test::path5());
    graphs.push_back(test::star(6));
    graphs.push_back(make_grid_graph(7, 7, 3));
    graphs.push_back(make_random_planar_graph(120, 9));

    for (const RoadGraph& g : graphs) {
        auto fw = test::floyd_warshall(g);
        SulTree sul = g.has_coords() ? build_sultree(g, tiny_params(1)) : SulTree{};

        auto bidi = make_bidirectional_backend(g);
        std::mt19937_64 rng(42);
        for (int i = 0; i < 200; ++i) {
            Vertex s = bounded(rng, static_cast<std::uint32_t>(g.vertex_count()));
            Vertex t = bounded(rng, static_cast<std::uint32_t>(g.vertex_count()));
            CHECK(bidi->exact_distance(s, t) == fw[s][t]);
        }

        if (g.has_coords()) {
            // the guided engine works on the tree's renumbered graph
            auto fw_new = test::floyd_warshall(sul.graph);
            auto alt = make_alt_backend(sul);
            std::mt19937_64 rng2(43);
            for (int i = 0; i < 200; ++i) {
                Vertex s = bounded(rng2, static_cast<std::uint32_t>(g.vertex_count()));
                Vertex t = bounded(rng2, static_cast<std::uint32_t>(g.vertex_count()));
                CHECK(alt->exact_distance(s, t) == fw_new[s][t]);
            }
        }
    }
}

TEST_CASE("self-distance is zero and costs no search") {
    RoadGraph g = make_grid_graph(5, 5, 7);
    auto b = make_bidirectional_backend(g);
    CHECK(b->exact_distance(13, 13) == 0);
    CHECK(b->distance_calls == 1);
}

TEST_CASE("backends count calls and expanded vertices") {
    RoadGraph g = make_grid_graph(6, 6, 5);
    auto b = make_bidirectional_backend(g);
    CHECK(b->distance_calls == 0);
    b->exact_distance(0, 35);
    b->exact_distance(3, 30);
    CHECK(b->distance_calls == 2);
    CHECK(b->vertices_settled > 0);

    SulTree sul = build_sultree(g, tiny_params(5));
    auto alt = make_alt_backend(sul);
    alt->exact_distance(0, 35);
    CHECK(alt->distance_calls == 1);
    CHECK(alt->vertices_settled > 0);
    CHECK(alt->vertices_settled <= g.vertex_count());
}

TEST_CASE("translated backend maps ids and mirrors counters") {
    RoadGraph g = make_grid_graph(6, 6, 15);
    SulTree sul = build_sultree(g, tiny_params(15));
    auto fw = test::floyd_warshall(g);  // original ids

    // inner engine speaks reordered ids; the wrapper accepts original ids
    auto wrapped = make_translated_backend(make_bidirectional_backend(sul.graph), sul.old_to_new);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        Vertex s = bounded(rng, static_cast<std::uint32_t>(g.vertex_count()));
        Vertex t = bounded(rng, static_cast<std::uint32_t>(g.vertex_count()));
        CHECK(wrapped->exact_distance(s, t) == fw[s][t]);
    }
    CHECK(wrapped->distance_calls == 100);
    CHECK(wrapped->vertices_settled > 0);
}

TEST_CASE("make_backend dispatches and validates") {
    RoadGraph g = make_grid_graph(5, 5, 3);
    SulTree sul = build_sultree(g, tiny_params(3));
    auto a = make_backend(BackendKind::Bidirectional, g, nullptr);
    auto b = make_backend(BackendKind::AltAStar, sul.graph, &sul);
    CHECK(a->exact_distance(0, 24) == b->exact_distance(sul.old_to_new[0], sul.old_to_new[24]));
    CHECK_THROWS_AS(make_backend(BackendKind::AltAStar, g, nullptr), ConfigError);
}
