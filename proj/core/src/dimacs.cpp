#include "colt/dimacs.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace colt {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

RoadGraph parse_dimacs_gr(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t n = 0;
    bool have_header = false;
    std::vector<std::tuple<Vertex, Vertex, Weight>> arcs;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        char kind;
        ls >> kind;
        if (kind == 'p') {
            std::string sp;
            std::uint64_t m = 0;
            if (!(ls >> sp >> n >> m) || sp != "sp") fail(line_no, "malformed problem header");
            if (have_header) fail(line_no, "duplicate problem header");
            have_header = true;
        } else if (kind == 'a') {
            if (!have_header) fail(line_no, "arc before problem header");
            std::uint64_t u, v;
            std::int64_t w;
            if (!(ls >> u >> v >> w)) fail(line_no, "malformed arc");
            if (u < 1 || u > n || v < 1 || v > n) fail(line_no, "vertex id out of range");
            if (w <= 0) fail(line_no, "non-positive arc weight");
            if (static_cast<std::uint64_t>(w) > std::numeric_limits<Weight>::max())
                fail(line_no, "arc weight too large");
            arcs.emplace_back(static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1),
                              static_cast<Weight>(w));
        } else {
            fail(line_no, std::string("unknown line type '") + kind + "'");
        }
    }
    if (!have_header) throw ParseError("missing problem header");
    return RoadGraph::from_arcs(n, std::move(arcs));
}

void parse_dimacs_co(std::istream& in, RoadGraph& g) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t n = g.vertex_count();
    std::vector<Point> coords(n);
    std::vector<bool> seen(n, false);
    std::size_t count = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c' || line[0] == 'p') continue;
        std::istringstream ls(line);
        char kind;
        ls >> kind;
        if (kind != 'v') fail(line_no, std::string("unknown line type '") + kind + "'");
        std::uint64_t id;
        double x, y;
        if (!(ls >> id >> x >> y)) fail(line_no, "malformed coordinate line");
        if (id < 1 || id > n) fail(line_no, "vertex id out of range");
        if (seen[id - 1]) fail(line_no, "duplicate vertex");
        seen[id - 1] = true;
        coords[id - 1] = {x, y};
        ++count;
    }
    if (count != n)
        throw ParseError("coordinate count mismatch: got " + std::to_string(count) +
                         ", expected " + std::to_string(n));
    g.coords = std::move(coords);
    g.max_speed = compute_max_speed(g.offsets, g.adj, g.coords);
}

RoadGraph load_dimacs(const std::string& gr_path, const std::string& co_path) {
    std::ifstream gr(gr_path);
    if (!gr) throw ConfigError("cannot open " + gr_path);
    RoadGraph g = parse_dimacs_gr(gr);
    if (!co_path.empty()) {
        std::ifstream co(co_path);
        if (!co) throw ConfigError("cannot open " + co_path);
        parse_dimacs_co(co, g);
    }
    return g;
}

std::vector<Vertex> parse_vertex_list(std::istream& in, std::size_t vertex_count) {
    std::vector<Vertex> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::uint64_t id;
        if (!(ls >> id)) continue;  // blank or comment-only line
        if (id >= vertex_count) fail(line_no, "vertex id out of range");
        out.push_back(static_cast<Vertex>(id));
        std::string rest;
        if (ls >> rest) fail(line_no, "trailing tokens after vertex id");
    }
    return out;
}

std::vector<Vertex> load_vertex_list(const std::string& path, std::size_t vertex_count) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return parse_vertex_list(in, vertex_count);
}

void write_id_map(std::ostream& out, const std::vector<Vertex>& id_map) {
    for (std::size_t old_id = 0; old_id < id_map.size(); ++old_id) {
        if (id_map[old_id] == kNoVertex) continue;  // dropped by normalization
        out << old_id << ' ' << id_map[old_id] << '\n';
    }
}

}  // namespace colt
