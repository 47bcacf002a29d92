// Graph builders, boundary partitions and the text serialization format.

#include "rcm/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace rcm {

const char* kind_name(GraphKind k) {
    switch (k) {
        case GraphKind::Box: return "box";
        case GraphKind::Rect: return "rect";
        case GraphKind::Dual: return "dual";
        case GraphKind::SlitBox: return "slit_box";
        case GraphKind::CoverBox: return "cover_box";
        case GraphKind::Medial: return "medial";
        case GraphKind::Custom: return "custom";
    }
    return "custom";
}

GraphKind kind_from_name(const std::string& name) {
    if (name == "box") return GraphKind::Box;
    if (name == "rect") return GraphKind::Rect;
    if (name == "dual") return GraphKind::Dual;
    if (name == "slit_box") return GraphKind::SlitBox;
    if (name == "cover_box") return GraphKind::CoverBox;
    if (name == "medial") return GraphKind::Medial;
    if (name == "custom") return GraphKind::Custom;
    throw IoError("unknown graph kind '" + name + "'");
}

int FiniteGraph::require_vertex(const Coord& c) const {
    int v = vertex(c);
    if (v < 0)
        throw GeometryOutOfRange("no vertex at (" + std::to_string(c.x) + "," +
                                 std::to_string(c.y) + "," + std::to_string(c.z) +
                                 ") in " + kind_name(kind) + " graph");
    return v;
}

int FiniteGraph::edge_between(int u, int v) const {
    for (int e : incident[u])
        if (other_end(e, u) == v) return e;
    return -1;
}

int FiniteGraph::add_vertex(const Coord& c) {
    auto [it, fresh] = index_of.try_emplace(c, n_vertices());
    if (fresh) {
        coords.push_back(c);
        incident.emplace_back();
    }
    return it->second;
}

int FiniteGraph::add_edge(int u, int v) {
    if (u > v) std::swap(u, v);
    int e = n_edges();
    edges.push_back({u, v});
    incident[u].push_back(e);
    incident[v].push_back(e);
    return e;
}

void FiniteGraph::boundary_by_degree(int full_degree) {
    boundary.clear();
    for (int v = 0; v < n_vertices(); ++v)
        if (degree(v) < full_degree) boundary.push_back(v);
}

FiniteGraph build_rect(int x0, int y0, int x1, int y1) {
    if (x0 > x1 || y0 > y1) throw InvalidRange("build_rect: empty range");
    FiniteGraph g;
    g.kind = GraphKind::Rect;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) g.add_vertex(primal(x, y));
    for (int v = 0; v < g.n_vertices(); ++v) {
        Coord c = g.coords[v];
        int east = g.vertex({c.x + 2, c.y, 0});
        if (east >= 0) g.add_edge(v, east);
        int north = g.vertex({c.x, c.y + 2, 0});
        if (north >= 0) g.add_edge(v, north);
    }
    g.boundary_by_degree();
    return g;
}

FiniteGraph build_box(int n) {
    if (n < 0) throw InvalidRange("build_box: n must be nonnegative");
    FiniteGraph g = build_rect(-n, -n, n, n);
    g.kind = GraphKind::Box;
    return g;
}

SlitBox build_slit_box(int n) {
    if (n < 1) throw InvalidRange("build_slit_box: n must be positive");
    FiniteGraph g;
    g.kind = GraphKind::SlitBox;
    for (int y = -n; y <= n; ++y)
        for (int x = -n; x <= n; ++x) g.add_vertex(primal(x, y));
    for (int v = 0; v < g.n_vertices(); ++v) {
        Coord c = g.coords[v];
        int east = g.vertex({c.x + 2, c.y, 0});
        if (east >= 0) g.add_edge(v, east);
        // the slit removes the vertical edges along {0} x [0,n]
        bool slit = (c.x == 0 && c.y >= 0 && c.y < 2 * n);
        int north = g.vertex({c.x, c.y + 2, 0});
        if (north >= 0 && !slit) g.add_edge(v, north);
    }
    g.boundary_by_degree();
    std::vector<int> arc;
    for (int k = 0; k <= n; ++k) arc.push_back(g.require_vertex(primal(0, k)));
    BoundaryPartition bc =
        BoundaryPartition::single_block(g, std::move(arc), "dobrushin");
    return {std::move(g), std::move(bc)};
}

FiniteGraph build_cover_box(int n, int h) {
    if (n < 1 || h < 1) throw InvalidRange("build_cover_box: n, h must be positive");
    FiniteGraph g;
    g.kind = GraphKind::CoverBox;
    for (int z = -h; z <= h; ++z)
        for (int y = -n; y <= n; ++y)
            for (int x = -n; x <= n; ++x) g.add_vertex(cover_vertex(x, y, z));
    for (int v = 0; v < g.n_vertices(); ++v) {
        Coord c = g.coords[v];
        // northward edges exist on every sheet
        int north = g.vertex({c.x, c.y + 2, c.z});
        if (north >= 0) g.add_edge(v, north);
        // eastward edges cross the branch cut between columns 0 and 1:
        // below the branch face (x2 < 0) they climb one sheet
        Coord east = {c.x + 2, c.y, c.z};
        if (c.x == 0 && c.y < 0) east.z = c.z + 1;
        int e = g.vertex(east);
        if (e >= 0) g.add_edge(v, e);
    }
    g.boundary_by_degree();
    return g;
}

namespace {

// dual endpoints of one primal edge of a planar graph, both in doubled units
std::pair<Coord, Coord> planar_dual_ends(const Coord& a, const Coord& b) {
    Coord mid = {(a.x + b.x) / 2, (a.y + b.y) / 2, 0};
    if (a.y == b.y)  // horizontal edge, dual runs vertically
        return {Coord{mid.x, mid.y - 1, 0}, Coord{mid.x, mid.y + 1, 0}};
    return {Coord{mid.x - 1, mid.y, 0}, Coord{mid.x + 1, mid.y, 0}};
}

// Faces of the cover are labeled by the sheet of their two left corners;
// the branch face collapses to the single label (1,-1,0).
constexpr Coord kBranchFace = {1, -1, 0};

Coord cover_face(int fx, int fy, int sheet) {
    Coord c = {2 * fx + 1, 2 * fy + 1, sheet};
    if (c.x == kBranchFace.x && c.y == kBranchFace.y) return kBranchFace;
    return c;
}

std::pair<Coord, Coord> cover_dual_ends(const Coord& a, const Coord& b) {
    // recover lattice coordinates of the lower-left endpoint
    if (a.y != b.y) {  // vertical edge (2x,2y,z)-(2x,2y+2,z)
        int x = a.x / 2, y = std::min(a.y, b.y) / 2, z = a.z;
        // right face (x,y): its left corners are this edge, label z;
        // left face (x-1,y): in the cut column its left corners sit one
        // sheet below the right corners on this edge
        int left_sheet = (x - 1 == 0 && y < 0) ? z - 1 : z;
        return {cover_face(x, y, z), cover_face(x - 1, y, left_sheet)};
    }
    if (a.z == b.z) {  // same-sheet horizontal edge
        int x = std::min(a.x, b.x) / 2, y = a.y / 2, z = a.z;
        return {cover_face(x, y, z), cover_face(x, y - 1, z)};
    }
    // cut-crossing horizontal edge (0,y,z)-(1,y,z+1); both faces carry the
    // sheet of the left endpoint
    const Coord& left = (a.x < b.x) ? a : b;
    int y = left.y / 2, z = left.z;
    return {cover_face(0, y, z), cover_face(0, y - 1, z)};
}

}  // namespace

FiniteGraph build_dual(const FiniteGraph& g) {
    if (g.kind == GraphKind::Medial) throw NoDual("medial graphs have no dual here");
    if (g.kind == GraphKind::Custom) throw NoDual("custom graphs have no dual");
    FiniteGraph d;
    d.kind = GraphKind::Dual;
    for (const Edge& e : g.edges) {
        const Coord& a = g.coords[e.u];
        const Coord& b = g.coords[e.v];
        auto [da, db] = (g.kind == GraphKind::CoverBox) ? cover_dual_ends(a, b)
                                                        : planar_dual_ends(a, b);
        int u = d.add_vertex(da);
        int v = d.add_vertex(db);
        d.add_edge(u, v);  // same index as the primal edge
    }
    d.boundary_by_degree();
    return d;
}

FiniteGraph build_medial(const FiniteGraph& g) {
    FiniteGraph m;
    m.kind = GraphKind::Medial;
    // one medial vertex per primal edge, at its midpoint; cut-crossing cover
    // edges take the sheet of their column-zero endpoint
    std::vector<int> mid_of(g.n_edges());
    for (int e = 0; e < g.n_edges(); ++e) {
        const Coord& a = g.coords[g.edges[e].u];
        const Coord& b = g.coords[g.edges[e].v];
        int z = (a.x < b.x) ? a.z : b.z;
        if (a.x == b.x) z = a.z;
        mid_of[e] = m.add_vertex({(a.x + b.x) / 2, (a.y + b.y) / 2, z});
    }
    // connect midpoints of bonds one quarter turn apart around a shared
    // endpoint; the pair spans one quadrant face
    for (int v = 0; v < g.n_vertices(); ++v) {
        const Coord c = g.coords[v];
        auto edge_to = [&](int dx, int dy) {
            for (int e : g.incident[v]) {
                const Coord& o = g.coords[g.other_end(e, v)];
                if (o.x - c.x == dx && o.y - c.y == dy) return e;
            }
            return -1;
        };
        int east = edge_to(2, 0), north = edge_to(0, 2);
        int west = edge_to(-2, 0), south = edge_to(0, -2);
        auto link = [&](int e1, int e2) {
            if (e1 >= 0 && e2 >= 0) m.add_edge(mid_of[e1], mid_of[e2]);
        };
        link(east, north);
        link(north, west);
        link(west, south);
        link(south, east);
    }
    m.boundary_by_degree();
    return m;
}

FiniteGraph make_custom(std::vector<Coord> coords,
                        const std::vector<std::pair<int, int>>& edge_list,
                        std::vector<int> boundary_vertices) {
    FiniteGraph g;
    g.kind = GraphKind::Custom;
    for (const Coord& c : coords) g.add_vertex(c);
    if (g.n_vertices() != static_cast<int>(coords.size()))
        throw InvalidRange("make_custom: duplicate vertex coordinates");
    for (auto [u, v] : edge_list) {
        if (u < 0 || v < 0 || u >= g.n_vertices() || v >= g.n_vertices() || u == v)
            throw InvalidRange("make_custom: bad edge endpoints");
        g.add_edge(u, v);
    }
    g.boundary = std::move(boundary_vertices);
    std::sort(g.boundary.begin(), g.boundary.end());
    return g;
}

FiniteGraph make_k2() {
    return make_custom({primal(0, 0), primal(1, 0)}, {{0, 1}}, {0, 1});
}

BoundaryPartition BoundaryPartition::free_bc(const FiniteGraph&) {
    BoundaryPartition bc;
    bc.label = "free";
    return bc;
}

BoundaryPartition BoundaryPartition::wired_bc(const FiniteGraph& g) {
    BoundaryPartition bc;
    bc.label = "wired";
    if (!g.boundary.empty()) bc.blocks.push_back(g.boundary);
    return bc;
}

BoundaryPartition BoundaryPartition::mixed_bc(const FiniteGraph& g) {
    int ymin = 0, ymax = 0;
    for (const Coord& c : g.coords) {
        ymin = std::min(ymin, c.y);
        ymax = std::max(ymax, c.y);
    }
    std::vector<int> top, bottom;
    for (int v : g.boundary) {
        if (g.coords[v].y == ymax) top.push_back(v);
        if (g.coords[v].y == ymin) bottom.push_back(v);
    }
    BoundaryPartition bc;
    bc.label = "mixed";
    bc.blocks = {std::move(top), std::move(bottom)};
    bc.validate(g);
    return bc;
}

BoundaryPartition BoundaryPartition::single_block(const FiniteGraph& g,
                                                  std::vector<int> block,
                                                  std::string label) {
    BoundaryPartition bc;
    bc.label = std::move(label);
    std::sort(block.begin(), block.end());
    bc.blocks.push_back(std::move(block));
    bc.validate(g);
    return bc;
}

void BoundaryPartition::validate(const FiniteGraph& g) const {
    std::set<int> bset(g.boundary.begin(), g.boundary.end());
    std::set<int> seen;
    for (const auto& block : blocks) {
        for (int v : block) {
            if (!bset.count(v))
                throw PartitionMismatch("block vertex " + std::to_string(v) +
                                        " is not a boundary vertex");
            if (!seen.insert(v).second)
                throw PartitionMismatch("vertex " + std::to_string(v) +
                                        " appears in two blocks");
        }
    }
}

bool partition_refines(const BoundaryPartition& coarse,
                       const BoundaryPartition& fine) {
    for (const auto& fb : fine.blocks) {
        if (fb.size() < 2) continue;
        bool contained = false;
        for (const auto& cb : coarse.blocks) {
            if (std::includes(cb.begin(), cb.end(), fb.begin(), fb.end())) {
                contained = true;
                break;
            }
        }
        if (!contained) return false;
    }
    return true;
}

void write_graph(std::ostream& out, const FiniteGraph& g,
                 const BoundaryPartition* bc) {
    bool with_z = g.kind == GraphKind::CoverBox;
    for (const Coord& c : g.coords) with_z = with_z || c.z != 0;
    out << "graph " << kind_name(g.kind) << ' ' << g.n_vertices() << ' '
        << g.n_edges() << '\n';
    for (int v = 0; v < g.n_vertices(); ++v) {
        const Coord& c = g.coords[v];
        out << "v " << v << ' ' << c.x << ' ' << c.y;
        if (with_z) out << ' ' << c.z;
        out << '\n';
    }
    for (int e = 0; e < g.n_edges(); ++e)
        out << "e " << e << ' ' << g.edges[e].u << ' ' << g.edges[e].v << '\n';
    out << "boundary";
    for (int v : g.boundary) out << ' ' << v;
    out << '\n';
    if (bc) {
        out << "partition ";
        for (std::size_t i = 0; i < bc->blocks.size(); ++i) {
            if (i) out << ';';
            const auto& block = bc->blocks[i];
            for (std::size_t j = 0; j < block.size(); ++j) {
                if (j) out << ',';
                out << block[j];
            }
        }
        out << '\n';
    }
}

FiniteGraph read_graph(std::istream& in, BoundaryPartition* bc) {
    std::string line, tag, kind;
    int nv = 0, ne = 0;
    if (!std::getline(in, line)) throw IoError("read_graph: empty input");
    {
        std::istringstream h(line);
        if (!(h >> tag >> kind >> nv >> ne) || tag != "graph")
            throw IoError("read_graph: bad header '" + line + "'");
    }
    FiniteGraph g;
    g.kind = kind_from_name(kind);
    for (int i = 0; i < nv; ++i) {
        if (!std::getline(in, line)) throw IoError("read_graph: truncated vertices");
        std::istringstream ls(line);
        int idx = 0;
        Coord c;
        if (!(ls >> tag >> idx >> c.x >> c.y) || tag != "v" || idx != i)
            throw IoError("read_graph: bad vertex line '" + line + "'");
        ls >> c.z;  // optional sheet index
        if (g.add_vertex(c) != i) throw IoError("read_graph: duplicate vertex");
    }
    for (int i = 0; i < ne; ++i) {
        if (!std::getline(in, line)) throw IoError("read_graph: truncated edges");
        std::istringstream ls(line);
        int idx = 0, u = 0, v = 0;
        if (!(ls >> tag >> idx >> u >> v) || tag != "e" || idx != i)
            throw IoError("read_graph: bad edge line '" + line + "'");
        if (u < 0 || v < 0 || u >= nv || v >= nv)
            throw IoError("read_graph: edge endpoint out of range");
        g.add_edge(u, v);
    }
    if (!std::getline(in, line)) throw IoError("read_graph: missing boundary");
    {
        std::istringstream ls(line);
        if (!(ls >> tag) || tag != "boundary")
            throw IoError("read_graph: bad boundary line '" + line + "'");
        int v = 0;
        while (ls >> v) g.boundary.push_back(v);
    }
    if (bc && std::getline(in, line) && line.rfind("partition", 0) == 0) {
        bc->blocks.clear();
        bc->label = "custom";
        std::istringstream ls(line.substr(9));
        std::string blocks_text;
        ls >> blocks_text;
        std::istringstream bs(blocks_text);
        std::string block_text;
        while (std::getline(bs, block_text, ';')) {
            std::vector<int> block;
            std::istringstream vs(block_text);
            std::string num;
            while (std::getline(vs, num, ',')) block.push_back(std::stoi(num));
            bc->blocks.push_back(std::move(block));
        }
    }
    return g;
}

}  // namespace rcm
