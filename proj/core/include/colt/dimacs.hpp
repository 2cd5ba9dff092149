#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "colt/graph.hpp"

namespace colt {

// DIMACS shortest-path graph file:
//   c <comment>
//   p sp <n> <m>
//   a <u> <v> <w>       (1-based ids, positive integer weight)
// Arcs are returned as parsed (directed, deduplicated to the minimum weight
// per ordered pair); symmetrization happens in normalize().
RoadGraph parse_dimacs_gr(std::istream& in);

// DIMACS coordinate file: "v <id> <x> <y>" per vertex, ids 1-based.
// Attaches coords to g and computes max_speed.  Every vertex must appear
// exactly once.
void parse_dimacs_co(std::istream& in, RoadGraph& g);

RoadGraph load_dimacs(const std::string& gr_path, const std::string& co_path = "");

// Object set file: one 0-based vertex id per line, '#' starts a comment.
std::vector<Vertex> parse_vertex_list(std::istream& in, std::size_t vertex_count);
std::vector<Vertex> load_vertex_list(const std::string& path, std::size_t vertex_count);

// Two-column "old new" text export of a normalization id map.
void write_id_map(std::ostream& out, const std::vector<Vertex>& id_map);

}  // namespace colt
