#pragma once
// Finite graphs: boxes and rectangles of Z^2, their duals and medial graphs,
// slit boxes, universal-cover boxes, and hand-built custom graphs.
//
// Vertex coordinates are stored in doubled units (see geometry.hpp), so
// primal vertices have even x and y and dual vertices odd x and y. Vertices
// and edges carry dense construction-order indices; edge endpoints are
// stored with u < v. The dual of a graph reuses the primal edge indices, so
// edge i of the dual crosses edge i of the primal.

#include "rcm/errors.hpp"
#include "rcm/geometry.hpp"

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rcm {

enum class GraphKind { Box, Rect, Dual, SlitBox, CoverBox, Medial, Custom };

const char* kind_name(GraphKind k);
GraphKind kind_from_name(const std::string& name);

struct Edge {
    int u = -1;
    int v = -1;
};

struct FiniteGraph {
    GraphKind kind = GraphKind::Custom;
    std::vector<Coord> coords;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> incident;  // vertex -> incident edge ids
    std::vector<int> boundary;               // ascending vertex ids
    std::unordered_map<Coord, int, CoordHash> index_of;

    int n_vertices() const { return static_cast<int>(coords.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
    int degree(int v) const { return static_cast<int>(incident[v].size()); }

    // -1 when the coordinate is not a vertex
    int vertex(const Coord& c) const {
        auto it = index_of.find(c);
        return it == index_of.end() ? -1 : it->second;
    }
    int require_vertex(const Coord& c) const;

    int other_end(int e, int v) const {
        return edges[e].u == v ? edges[e].v : edges[e].u;
    }
    // -1 when u and v are not adjacent
    int edge_between(int u, int v) const;

    int add_vertex(const Coord& c);
    int add_edge(int u, int v);

    // boundary = vertices of degree < full_degree, ascending
    void boundary_by_degree(int full_degree = 4);
};

FiniteGraph build_box(int n);
// primal-unit rectangle [x0,x1] x [y0,y1]
FiniteGraph build_rect(int x0, int y0, int x1, int y1);
FiniteGraph build_cover_box(int n, int h);
// edge i of the result crosses edge i of g; see NoDual for rejected kinds
FiniteGraph build_dual(const FiniteGraph& g);
// one vertex per edge of g at its midpoint; edges pair bonds sharing an
// endpoint and a face, oriented counterclockwise around primal vertices
FiniteGraph build_medial(const FiniteGraph& g);
FiniteGraph make_custom(std::vector<Coord> coords,
                        const std::vector<std::pair<int, int>>& edge_list,
                        std::vector<int> boundary_vertices);
// two vertices, one edge; the smallest nontrivial test graph
FiniteGraph make_k2();

// A boundary condition is a partition of the boundary vertex set; blocks
// with two or more vertices are treated as pre-connected when counting
// clusters. Vertices of the boundary not listed in any block are free.
struct BoundaryPartition {
    std::vector<std::vector<int>> blocks;  // disjoint, each sorted ascending
    std::string label = "custom";

    static BoundaryPartition free_bc(const FiniteGraph& g);
    static BoundaryPartition wired_bc(const FiniteGraph& g);
    // top and bottom rows of a box wired as two separate blocks
    static BoundaryPartition mixed_bc(const FiniteGraph& g);
    static BoundaryPartition single_block(const FiniteGraph& g,
                                          std::vector<int> block,
                                          std::string label = "custom");

    // throws PartitionMismatch unless blocks are disjoint boundary vertices
    void validate(const FiniteGraph& g) const;
};

// partial order used by the comparison inequalities: xi >= psi when every
// block of psi is contained in one block of xi
bool partition_refines(const BoundaryPartition& coarse,
                       const BoundaryPartition& fine);

// the box with the vertical edges along {0} x [0,n] removed, together with
// the boundary condition wiring the slit vertices into one block
struct SlitBox {
    FiniteGraph graph;
    BoundaryPartition bc;
};
SlitBox build_slit_box(int n);

// line-oriented text format; see README for the grammar
void write_graph(std::ostream& out, const FiniteGraph& g,
                 const BoundaryPartition* bc = nullptr);
FiniteGraph read_graph(std::istream& in, BoundaryPartition* bc = nullptr);

}  // namespace rcm
