#include <algorithm>
#include <sstream>

#include "colt/binary_io.hpp"
#include "colt/dijkstra.hpp"
#include "colt/dimacs.hpp"
#include "colt/graph.hpp"
#include "colt/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace colt;

TEST_CASE("rng: deterministic bounded draws and distinct samples") {
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(bounded(a, 1000) == bounded(b, 1000));

    std::mt19937_64 rng(7);
    auto sample = sample_without_replacement(rng, 50, 20);
    CHECK(sample.size() == 20);
    auto sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(sorted.back() < 50);

    std::mt19937_64 rng2(7);
    CHECK(sample == sample_without_replacement(rng2, 50, 20));
}

TEST_CASE("binary io: scalars round-trip and magic is checked") {
    std::ostringstream os(std::ios::binary);
    BinaryWriter w(os);
    w.magic("TEST");
    w.u8(7);
    w.u32(123456789);
    w.u64(0x1122334455667788ULL);
    w.f64(2.5);

    std::istringstream is(os.str(), std::ios::binary);
    BinaryReader r(is);
    r.expect_magic("TEST", "test stream");
    CHECK(r.u8() == 7);
    CHECK(r.u32() == 123456789);
    CHECK(r.u64() == 0x1122334455667788ULL);
    CHECK(r.f64() == 2.5);

    std::istringstream bad("XXXXrest", std::ios::binary);
    BinaryReader br(bad);
    CHECK_THROWS_AS(br.expect_magic("TEST", "test stream"), FormatError);

    std::istringstream trunc("TE", std::ios::binary);
    BinaryReader tr(trunc);
    CHECK_THROWS_AS(tr.expect_magic("TEST", "test stream"), FormatError);
}

TEST_CASE("from_arcs keeps the minimum weight per duplicate arc") {
    RoadGraph g = RoadGraph::from_arcs(3, {{0, 1, 5}, {0, 1, 3}, {1, 0, 3}, {1, 2, 2}, {2, 1, 2}});
    REQUIRE(g.vertex_count() == 3);
    auto n0 = g.neighbors(0);
    REQUIRE(n0.size() == 1);
    CHECK(n0[0].to == 1);
    CHECK(n0[0].weight == 3);
}

TEST_CASE("normalize symmetrizes to the minimum and keeps the largest component") {
    // Component A: 0-1 (asymmetric weights 5/9 -> min 5).  Component B: 2-3-4.
    RoadGraph g =
        RoadGraph::from_arcs(5, {{0, 1, 5}, {1, 0, 9}, {2, 3, 1}, {3, 2, 1}, {3, 4, 2}, {4, 3, 2}});
    NormalizeResult r = normalize(g);
    CHECK(r.graph.vertex_count() == 3);  // component {2,3,4} wins on size
    CHECK(r.id_map[0] == kNoVertex);
    CHECK(r.id_map[1] == kNoVertex);
    CHECK(r.id_map[2] == 0);
    CHECK(r.id_map[3] == 1);
    CHECK(r.id_map[4] == 2);

    // Asymmetric pair collapses to the smaller weight.
    RoadGraph h = RoadGraph::from_arcs(2, {{0, 1, 5}, {1, 0, 9}});
    NormalizeResult rh = normalize(h);
    CHECK(rh.graph.neighbors(0)[0].weight == 5);
    CHECK(rh.graph.neighbors(1)[0].weight == 5);

    // Equal-size components: the one containing the smallest vertex id stays.
    RoadGraph t = RoadGraph::from_arcs(4, {{0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 2, 1}});
    NormalizeResult rt = normalize(t);
    CHECK(rt.graph.vertex_count() == 2);
    CHECK(rt.id_map[0] == 0);
    CHECK(rt.id_map[2] == kNoVertex);

    // Idempotence.
    NormalizeResult again = normalize(r.graph);
    CHECK(again.graph.vertex_count() == r.graph.vertex_count());
    for (Vertex v = 0; v < again.graph.vertex_count(); ++v) CHECK(again.id_map[v] == v);
}

TEST_CASE("euclidean lower bound divides by the fastest edge speed") {
    // Two vertices at Euclidean distance 5.
    RoadGraph g = RoadGraph::from_arcs(2, {{0, 1, 5}, {1, 0, 5}});
    g.coords = {{0, 0}, {3, 4}};
    g.max_speed = compute_max_speed(g.offsets, g.adj, g.coords);
    CHECK(g.max_speed == doctest::Approx(1.0));
    CHECK(euclidean_lower_bound(g, 0, 1) == 5);

    // Heavier edge over the same geometry: speed 0.5, so the bound doubles.
    RoadGraph h = RoadGraph::from_arcs(2, {{0, 1, 10}, {1, 0, 10}});
    h.coords = {{0, 0}, {3, 4}};
    h.max_speed = compute_max_speed(h.offsets, h.adj, h.coords);
    CHECK(h.max_speed == doctest::Approx(0.5));
    CHECK(euclidean_lower_bound(h, 0, 1) == 10);

    RoadGraph bare = RoadGraph::from_arcs(2, {{0, 1, 1}, {1, 0, 1}});
    CHECK_THROWS_AS(euclidean_lower_bound(bare, 0, 1), ConfigError);
}

TEST_CASE("euclidean lower bound never exceeds the network distance") {
    RoadGraph g = make_grid_graph(8, 8, 3);
    auto d0 = dijkstra_all(g, 0);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        CHECK(euclidean_lower_bound(g, 0, v) <= d0[v]);
    }
}

TEST_CASE("dimacs parsing: the documented errors fire with line numbers") {
    auto parse = [](const char* text) {
        std::istringstream in(text);
        return parse_dimacs_gr(in);
    };
    CHECK_THROWS_AS(parse("a 1 2 3\n"), ParseError);                  // arc before header
    CHECK_THROWS_AS(parse("p sp 2 1\np sp 2 1\n"), ParseError);       // duplicate header
    CHECK_THROWS_AS(parse("p sp x 1\n"), ParseError);                 // malformed header
    CHECK_THROWS_AS(parse("p sp 2 1\na 1 3 5\n"), ParseError);        // vertex out of range
    CHECK_THROWS_AS(parse("p sp 2 1\na 1 2 0\n"), ParseError);        // non-positive weight
    CHECK_THROWS_AS(parse("p sp 2 1\na 1 2\n"), ParseError);          // malformed arc
    CHECK_THROWS_AS(parse("p sp 2 1\nq foo\n"), ParseError);          // unknown line type
    CHECK_THROWS_AS(parse("c only a comment\n"), ParseError);         // missing header

    try {
        parse("p sp 2 1\na 1 2 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    std::istringstream ok("c demo\np sp 3 2\na 1 2 4\na 2 3 6\n");
    RoadGraph g = parse_dimacs_gr(ok);
    CHECK(g.vertex_count() == 3);
    CHECK(g.neighbors(0)[0].weight == 4);
}

TEST_CASE("dimacs coordinates: full cover required, max speed computed") {
    RoadGraph g;
    {
        std::istringstream gr("p sp 2 1\na 1 2 5\n");
        g = parse_dimacs_gr(gr);
    }
    std::istringstream co("v 1 0 0\nv 2 3 4\n");
    parse_dimacs_co(co, g);
    CHECK(g.has_coords());
    CHECK(g.max_speed == doctest::Approx(1.0));

    {
        std::istringstream dup("v 1 0 0\nv 1 1 1\n");
        RoadGraph h = RoadGraph::from_arcs(2, {{0, 1, 5}, {1, 0, 5}});
        CHECK_THROWS_AS(parse_dimacs_co(dup, h), ParseError);
    }
    {
        std::istringstream missing("v 1 0 0\n");
        RoadGraph h = RoadGraph::from_arcs(2, {{0, 1, 5}, {1, 0, 5}});
        CHECK_THROWS_AS(parse_dimacs_co(missing, h), ParseError);
    }
}

TEST_CASE("vertex list parsing") {
    std::istringstream in("0\n3 # trailing comment\n\n7\n");
    auto v = parse_vertex_list(in, 10);
    CHECK(v == std::vector<Vertex>{0, 3, 7});

    std::istringstream bad("12\n");
    CHECK_THROWS_AS(parse_vertex_list(bad, 10), ParseError);
    std::istringstream trail("3 4\n");
    CHECK_THROWS_AS(parse_vertex_list(trail, 10), ParseError);
}

TEST_CASE("dijkstra against Floyd-Warshall on random planar graphs") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        RoadGraph g = make_random_planar_graph(60, seed);
        auto fw = test::floyd_warshall(g);
        for (Vertex s : {Vertex(0), Vertex(7), Vertex(23)}) {
            auto row = dijkstra_all(g, s);
            for (Vertex v = 0; v < g.vertex_count(); ++v) CHECK(row[v] == fw[s][v]);
        }
    }
}

TEST_CASE("path graph distances match hand-computed values") {
    RoadGraph g = test::path5();
    auto row = dijkstra_all(g, 0);
    CHECK(row == std::vector<Distance>{0, 2, 5, 6, 10});

    Vertex targets[] = {2, 4};
    MultiTargetResult r = dijkstra_multi_target(g, 0, targets);
    CHECK(r.distances == std::vector<Distance>{5, 10});

    CHECK(approximate_diameter(g) == 10);
}

TEST_CASE("graph generators produce connected deterministic graphs") {
    RoadGraph g1 = make_grid_graph(6, 7, 9);
    RoadGraph g2 = make_grid_graph(6, 7, 9);
    CHECK(g1.vertex_count() == 42);
    CHECK(g1.adj.size() == g2.adj.size());
    for (std::size_t i = 0; i < g1.adj.size(); ++i) {
        CHECK(g1.adj[i].to == g2.adj[i].to);
        CHECK(g1.adj[i].weight == g2.adj[i].weight);
    }
    CHECK(g1.has_coords());

    // Connectivity: every vertex reachable from 0.
    auto row = dijkstra_all(g1, 0);
    for (Vertex v = 0; v < g1.vertex_count(); ++v) CHECK(row[v] != kInfDistance);

    RoadGraph p = make_random_planar_graph(80, 4);
    auto prow = dijkstra_all(p, 0);
    for (Vertex v = 0; v < p.vertex_count(); ++v) CHECK(prow[v] != kInfDistance);
    CHECK(p.has_coords());
}

TEST_CASE("graph serialization round-trips byte-exactly") {
    RoadGraph g = make_grid_graph(5, 5, 11);
    std::ostringstream os1(std::ios::binary);
    save_graph(g, os1);
    std::istringstream is(os1.str(), std::ios::binary);
    RoadGraph h = load_graph(is);
    CHECK(h.vertex_count() == g.vertex_count());
    CHECK(h.max_speed == doctest::Approx(g.max_speed));
    std::ostringstream os2(std::ios::binary);
    save_graph(h, os2);
    CHECK(os1.str() == os2.str());

    std::istringstream junk("not a graph", std::ios::binary);
    CHECK_THROWS_AS(load_graph(junk), FormatError);
}

TEST_CASE("permuted relabels arcs and coordinates consistently") {
    RoadGraph g = test::path5();
    g.coords = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    std::vector<Vertex> new_to_old = {4, 3, 2, 1, 0};
    RoadGraph p = g.permuted(new_to_old);
    auto row = dijkstra_all(p, 4);  // old vertex 0 now sits at id 4
    CHECK(row == std::vector<Distance>{10, 6, 5, 2, 0});
    CHECK(p.coords[0].x == doctest::Approx(4.0));
}
