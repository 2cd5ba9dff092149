#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "colt/distoracle.hpp"
#include "colt/graph.hpp"
#include "colt/sultree.hpp"

namespace colt {

// A sampled query's output disagreed with the brute-force oracle.  Always a
// bug somewhere; experiments abort rather than emit wrong numbers.
struct OracleMismatch : std::runtime_error {
    explicit OracleMismatch(const std::string& what) : std::runtime_error(what) {}
};

// floor(density * |V|) distinct vertices, uniform without replacement.
std::vector<Vertex> generate_objects(const RoadGraph& g, double density, std::uint64_t seed);

// `count` distinct vertices sampled from a BFS region grown to
// ceil(area_pct% * |V|) vertices around a random center; area_pct = 100
// degenerates to uniform sampling.
std::vector<Vertex> generate_query_set(const RoadGraph& g, std::size_t count, double area_pct,
                                       std::uint64_t seed);

struct ExperimentSpec {
    std::string graph;          // file path, "grid:<rows>x<cols>:<seed>", or "planar:<n>:<seed>"
    std::string kind = "aknn";  // aknn | kfn | range | knn
    std::vector<std::string> methods = {"coltree", "brute"};

    std::size_t k = 10;
    double density = 0.001;
    std::size_t query_size = 8;  // |Q| for aknn
    double area_pct = 15.0;      // query-set locality, % of |V|
    Aggregate agg = Aggregate::Max;
    double radius_pct = 2.5;  // range radius, % of the double-sweep diameter

    std::size_t object_sets = 20;
    std::size_t query_sets = 50;
    std::uint64_t seed = 1;

    SulParams sul;  // b, alpha, m, m_root, policy, restrict; seed is taken from `seed`
    std::size_t lambda = 256;
    BackendKind backend = BackendKind::Bidirectional;

    double oracle_sample_pct = 5.0;  // share of queries re-checked against brute force
    std::size_t parallel_workers = 1;

    // Flat key=value text, '#' comments; unknown keys are errors.
    static ExperimentSpec parse(std::istream& in);
    static ExperimentSpec parse_file(const std::string& path);
};

// Builds or loads the graph an experiment runs on.
RoadGraph make_spec_graph(const std::string& desc);

// Runs the full matrix (object_sets x query_sets queries per method) and
// returns CSV text: '#' comment lines with build/index figures, a header, one
// row per method.  Time columns come last so reruns can be compared without
// them.  Throws OracleMismatch if a sampled query disagrees with brute force.
std::string run_experiment(const ExperimentSpec& spec);

}  // namespace colt
