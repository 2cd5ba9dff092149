#include <algorithm>
#include <random>
#include <vector>

#include "colt/baselines.hpp"
#include "colt/distoracle.hpp"
#include "colt/graph.hpp"
#include "colt/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace colt;

namespace {

std::vector<Vertex> draw_vertices(std::mt19937_64& rng, std::size_t universe,
                                  std::uint32_t count) {
    auto s = sample_without_replacement(rng, static_cast<std::uint32_t>(universe), count);
    return {s.begin(), s.end()};
}

// Reference ranking straight off the all-pairs matrix; shares nothing with
// BestK or the Dijkstra runs inside the baselines.
std::vector<ResultEntry> rank_by_matrix(const std::vector<std::vector<Distance>>& fw,
                                        std::span<const Vertex> objects,
                                        std::span<const Vertex> query_set, std::size_t k,
                                        Aggregate agg, bool largest) {
    std::vector<ResultEntry> all;
    for (Vertex p : objects) {
        Distance score = 0;
        for (Vertex q : query_set)
            score = agg == Aggregate::Sum ? score + fw[q][p] : std::max(score, fw[q][p]);
        all.push_back({p, score});
    }
    std::sort(all.begin(), all.end(), [&](const ResultEntry& a, const ResultEntry& b) {
        if (a.score != b.score) return largest ? a.score > b.score : a.score < b.score;
        return a.object < b.object;
    });
    all.resize(std::min(k, all.size()));
    return all;
}

}  // namespace

TEST_CASE("brute force agrees with the all-pairs matrix") {
    RoadGraph g = make_grid_graph(6, 6, 3, 1, 9);
    auto fw = test::floyd_warshall(g);
    std::mt19937_64 rng(1);

    for (int round = 0; round < 10; ++round) {
        std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 10);
        std::vector<Vertex> qset = draw_vertices(rng, g.vertex_count(), 3);
        Vertex q = qset[0];

        for (Aggregate agg : {Aggregate::Sum, Aggregate::Max}) {
            CHECK(brute_aknn(g, objects, qset, 4, agg) ==
                  rank_by_matrix(fw, objects, qset, 4, agg, false));
        }
        CHECK(brute_kfn(g, objects, q, 4) ==
              rank_by_matrix(fw, objects, {&q, 1}, 4, Aggregate::Max, true));
        CHECK(brute_knn(g, objects, q, 4) ==
              rank_by_matrix(fw, objects, {&q, 1}, 4, Aggregate::Max, false));

        std::vector<Vertex> expect;
        for (Vertex p : objects)
            if (fw[q][p] <= 30) expect.push_back(p);
        std::sort(expect.begin(), expect.end());
        CHECK(brute_range(g, objects, q, 30) == expect);
    }
}

TEST_CASE("brute force handles hand-checked path cases") {
    RoadGraph g = test::path5();
    std::vector<Vertex> p = {0, 3, 4};

    auto near2 = brute_knn(g, p, 2, 2);
    REQUIRE(near2.size() == 2);
    CHECK(near2[0] == ResultEntry{3, 1});
    CHECK(near2[1] == ResultEntry{0, 5});  // 0 and 4 tie at 5

    auto far2 = brute_kfn(g, p, 2, 2);
    CHECK(far2[0] == ResultEntry{0, 5});
    CHECK(far2[1] == ResultEntry{4, 5});

    CHECK(brute_range(g, p, 2, 4) == std::vector<Vertex>{3});
    CHECK(brute_range(g, p, 2, 0).empty());
    std::vector<Vertex> out_of_range{9};
    CHECK_THROWS_AS(brute_knn(g, out_of_range, 0, 1), ConfigError);

    QueryStats stats;
    brute_knn(g, p, 2, 2, &stats);
    CHECK(stats.exact_distance_calls == p.size());
    CHECK(stats.candidates_retrieved == p.size());
    CHECK(stats.vertices_settled > 0);
}

TEST_CASE("filtered farthest search equals brute force") {
    std::mt19937_64 rng(7);
    for (std::uint64_t seed : {11ULL, 12ULL}) {
        RoadGraph g = make_grid_graph(7, 7, seed, 1, 50);
        SulParams sp;
        sp.branching = 4;
        sp.leaf_cap = 16;
        sp.landmarks = 2;
        sp.root_landmarks = 6;
        sp.seed = seed;
        SulTree sul = build_sultree(g, sp);
        auto backend = make_bidirectional_backend(sul.graph);

        for (int round = 0; round < 8; ++round) {
            std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 14);
            Vertex q = bounded(rng, static_cast<std::uint32_t>(g.vertex_count()));
            for (std::size_t k : {std::size_t{1}, std::size_t{4}, std::size_t{20}}) {
                QueryStats stats;
                auto got = aub_kfn(sul, *backend, objects, q, k, &stats);
                CHECK(got == brute_kfn(g, objects, q, k));
                CHECK(stats.exact_distance_calls <= objects.size());
            }
        }
    }
}

TEST_CASE("filtered farthest search on a star evaluates every object") {
    RoadGraph g = test::star(12);
    SulParams sp;
    sp.branching = 2;
    sp.leaf_cap = 4;
    sp.landmarks = 1;
    sp.root_landmarks = 3;
    SulTree sul = build_sultree(g, sp);
    auto backend = make_bidirectional_backend(sul.graph);

    std::vector<Vertex> objects;
    for (Vertex v = 1; v <= 12; ++v) objects.push_back(v);

    QueryStats stats;
    auto got = aub_kfn(sul, *backend, objects, 0, 3, &stats);
    REQUIRE(got.size() == 3);
    CHECK(got[0] == ResultEntry{1, 1});  // every spoke ties at 1; ids decide
    CHECK(got[1] == ResultEntry{2, 1});
    CHECK(got[2] == ResultEntry{3, 1});
    // no upper bound can drop below a tie with the k-th distance here
    CHECK(stats.exact_distance_calls == objects.size());
}

TEST_CASE("mindist: zero inside, exact corner gap outside") {
    Mbr box{0, 0, 2, 2};
    CHECK(mindist(box, {1, 1}) == 0.0);
    CHECK(mindist(box, {2, 2}) == 0.0);  // boundary counts as inside
    CHECK(mindist(box, {5, 6}) == doctest::Approx(5.0));
    CHECK(mindist(box, {-3, 1}) == doctest::Approx(3.0));
    CHECK(mindist(box, {1, 7}) == doctest::Approx(5.0));
}

TEST_CASE("packed r-tree structure invariants") {
    RoadGraph g = make_grid_graph(9, 9, 5);
    std::mt19937_64 rng(3);
    std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 37);
    StrRtree tree(g, objects, 4);

    CHECK(tree.object_count() == objects.size());
    REQUIRE(!tree.nodes().empty());
    CHECK(tree.root() < tree.nodes().size());

    std::vector<Vertex> seen;
    std::vector<char> is_child(tree.nodes().size(), 0);
    for (std::uint32_t id = 0; id < tree.nodes().size(); ++id) {
        const RtreeNode& n = tree.nodes()[id];
        CHECK(n.box.min_x <= n.box.max_x);
        CHECK(n.box.min_y <= n.box.max_y);
        if (n.leaf) {
            CHECK(!n.objects.empty());
            CHECK(n.objects.size() <= 4);
            CHECK(n.children.empty());
            for (Vertex p : n.objects) {
                seen.push_back(p);
                CHECK(mindist(n.box, g.coords[p]) == 0.0);  // box covers its points
            }
        } else {
            CHECK(!n.children.empty());
            CHECK(n.objects.empty());
            for (std::uint32_t c : n.children) {
                is_child[c] = 1;
                const Mbr& inner = tree.nodes()[c].box;
                CHECK(inner.min_x >= n.box.min_x);
                CHECK(inner.min_y >= n.box.min_y);
                CHECK(inner.max_x <= n.box.max_x);
                CHECK(inner.max_y <= n.box.max_y);
            }
        }
    }
    std::sort(seen.begin(), seen.end());
    std::vector<Vertex> expect = objects;
    std::sort(expect.begin(), expect.end());
    CHECK(seen == expect);  // each object in exactly one leaf
    for (std::uint32_t id = 0; id < tree.nodes().size(); ++id)
        CHECK((is_child[id] != 0) == (id != tree.root()));

    // deterministic packing
    StrRtree again(g, objects, 4);
    REQUIRE(again.nodes().size() == tree.nodes().size());
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
        CHECK(again.nodes()[i].leaf == tree.nodes()[i].leaf);
        CHECK(again.nodes()[i].objects == tree.nodes()[i].objects);
        CHECK(again.nodes()[i].children == tree.nodes()[i].children);
    }
}

TEST_CASE("r-tree construction validates input") {
    RoadGraph flat = test::path5();  // no coordinates
    CHECK_THROWS_AS(StrRtree(flat, std::vector<Vertex>{0, 1}), ConfigError);

    RoadGraph g = make_grid_graph(4, 4, 1);
    CHECK_THROWS_AS(StrRtree(g, std::vector<Vertex>{0, 1}, 1), ConfigError);
    CHECK_THROWS_AS(StrRtree(g, std::vector<Vertex>{}), ConfigError);

    StrRtree single(g, std::vector<Vertex>{7});
    CHECK(single.object_count() == 1);
    CHECK(single.nodes()[single.root()].leaf);
}

TEST_CASE("euclidean-filtered queries equal brute force") {
    std::mt19937_64 rng(9);
    for (auto [rows, cols, seed] : {std::tuple{7u, 7u, 2ULL}, std::tuple{5u, 9u, 8ULL}}) {
        RoadGraph g = make_grid_graph(rows, cols, seed);
        auto backend = make_bidirectional_backend(g);

        for (int round = 0; round < 6; ++round) {
            std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 12);
            StrRtree rtree(g, objects, 4);
            Vertex q = bounded(rng, static_cast<std::uint32_t>(g.vertex_count()));
            std::vector<Vertex> qset = draw_vertices(rng, g.vertex_count(), 3);

            for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{30}}) {
                for (Aggregate agg : {Aggregate::Sum, Aggregate::Max}) {
                    CHECK(ier_aknn(g, rtree, *backend, qset, k, agg) ==
                          brute_aknn(g, objects, qset, k, agg));
                }
                CHECK(ier_knn(g, rtree, *backend, q, k) == brute_knn(g, objects, q, k));
            }

            Distance d0 = brute_knn(g, objects, q, 1)[0].score;
            Distance dmax = brute_kfn(g, objects, q, 1)[0].score;
            for (Distance r : {Distance{0}, d0, dmax, dmax + 9}) {
                CHECK(ier_range(g, rtree, *backend, q, r) == brute_range(g, objects, q, r));
            }
        }
    }
}

TEST_CASE("euclidean filtering skips work the bounds rule out") {
    // Lattice whose weights equal the geometric edge length, so the euclidean
    // lower bound carries real information (random-weight grids defeat it).
    std::vector<std::tuple<Vertex, Vertex, Weight>> arcs;
    auto id = [](Vertex r, Vertex c) { return r * 10 + c; };
    for (Vertex r = 0; r < 10; ++r) {
        for (Vertex c = 0; c < 10; ++c) {
            if (c + 1 < 10) arcs.push_back({id(r, c), id(r, c + 1), 10});
            if (r + 1 < 10) arcs.push_back({id(r, c), id(r + 1, c), 10});
        }
    }
    RoadGraph g = RoadGraph::from_arcs(100, arcs);
    g = normalize(g).graph;
    g.coords.resize(100);
    for (Vertex r = 0; r < 10; ++r)
        for (Vertex c = 0; c < 10; ++c) g.coords[id(r, c)] = {10.0 * c, 10.0 * r};
    g.max_speed = compute_max_speed(g.offsets, g.adj, g.coords);

    std::mt19937_64 rng(6);
    std::vector<Vertex> objects = draw_vertices(rng, g.vertex_count(), 40);
    StrRtree rtree(g, objects, 4);
    auto backend = make_bidirectional_backend(g);

    QueryStats stats;
    ier_knn(g, rtree, *backend, 0, 2, &stats);
    CHECK(stats.nodes_visited > 0);
    CHECK(stats.exact_distance_calls < objects.size());  // far boxes never open
    CHECK(ier_knn(g, rtree, *backend, 0, 2) == brute_knn(g, objects, 0, 2));
}
