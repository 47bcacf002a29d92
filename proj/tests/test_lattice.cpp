// Lattice construction tests: boxes, duals, medial graphs, slit boxes,
// cover boxes, boundary partitions, and the text serialization.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rcm/geometry.hpp"
#include "rcm/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

using namespace rcm;

TEST_CASE("box counts and boundary") {
    FiniteGraph b0 = build_box(0);
    CHECK(b0.n_vertices() == 1);
    CHECK(b0.n_edges() == 0);
    REQUIRE(b0.boundary.size() == 1);
    CHECK(b0.coords[b0.boundary[0]] == Coord{0, 0, 0});

    FiniteGraph b1 = build_box(1);
    CHECK(b1.n_vertices() == 9);
    CHECK(b1.n_edges() == 12);
    CHECK(b1.boundary.size() == 8);

    FiniteGraph b2 = build_box(2);
    CHECK(b2.n_vertices() == 25);
    CHECK(b2.n_edges() == 40);

    for (int n = 1; n <= 4; ++n) {
        FiniteGraph g = build_box(n);
        CHECK(g.n_vertices() == (2 * n + 1) * (2 * n + 1));
        CHECK(g.n_edges() == 2 * 2 * n * (2 * n + 1));
        // boundary rule: exactly the vertices of degree < 4
        std::set<int> expect;
        for (int v = 0; v < g.n_vertices(); ++v)
            if (g.degree(v) < 4) expect.insert(v);
        CHECK(std::set<int>(g.boundary.begin(), g.boundary.end()) == expect);
        CHECK(static_cast<int>(g.boundary.size()) == 8 * n);
    }
}

TEST_CASE("dual of the unit box") {
    FiniteGraph g = build_box(1);
    FiniteGraph d = build_dual(g);
    CHECK(d.n_edges() == 12);
    CHECK(d.n_vertices() == 12);
    // 4 inner faces plus 8 outer faces, in doubled units
    std::set<std::pair<int, int>> got;
    for (const Coord& c : d.coords) got.insert({c.x, c.y});
    std::set<std::pair<int, int>> want = {
        {1, 1},  {1, -1}, {-1, 1}, {-1, -1}, {3, 1},  {3, -1},
        {-3, 1}, {-3, -1}, {1, 3},  {-1, 3}, {1, -3}, {-1, -3}};
    CHECK(got == want);

    // edge {(0,0),(1,0)} crosses the dual edge {(1,-1),(1,1)} (doubled)
    int u = g.require_vertex(primal(0, 0));
    int v = g.require_vertex(primal(1, 0));
    int e = g.edge_between(u, v);
    REQUIRE(e >= 0);
    std::set<std::pair<int, int>> de = {
        {d.coords[d.edges[e].u].x, d.coords[d.edges[e].u].y},
        {d.coords[d.edges[e].v].x, d.coords[d.edges[e].v].y}};
    CHECK(de == std::set<std::pair<int, int>>{{1, -1}, {1, 1}});
}

TEST_CASE("dual involution on boxes") {
    for (int n = 1; n <= 4; ++n) {
        FiniteGraph g = build_box(n);
        FiniteGraph dd = build_dual(build_dual(g));
        REQUIRE(dd.n_edges() == g.n_edges());
        for (int e = 0; e < g.n_edges(); ++e) {
            std::set<Coord> a = {g.coords[g.edges[e].u], g.coords[g.edges[e].v]};
            std::set<Coord> b = {dd.coords[dd.edges[e].u], dd.coords[dd.edges[e].v]};
            CHECK(a == b);
        }
    }
}

TEST_CASE("dual rejects medial and custom graphs") {
    CHECK_THROWS_AS((void)build_dual(build_medial(build_box(1))), NoDual);
    CHECK_THROWS_AS((void)build_dual(make_k2()), NoDual);
}

TEST_CASE("medial graphs") {
    // a single edge has one midpoint and no medial edges
    FiniteGraph m2 = build_medial(make_k2());
    CHECK(m2.n_vertices() == 1);
    CHECK(m2.n_edges() == 0);

    FiniteGraph m = build_medial(build_box(1));
    CHECK(m.n_vertices() == 12);
    CHECK(m.n_edges() == 16);
    for (const Coord& c : m.coords) CHECK(is_medial(c));

    // interior medial vertices have degree exactly 4; each primal vertex of
    // full degree is surrounded by a counterclockwise directed 4-cycle
    FiniteGraph g3 = build_box(3);
    FiniteGraph m3 = build_medial(g3);
    for (int v = 0; v < m3.n_vertices(); ++v) {
        CHECK(m3.degree(v) <= 4);
        const Coord c = m3.coords[v];
        bool interior = true;
        auto [pa, pb] = primal_endpoints(c);
        for (const Coord& pc : {pa, pb})
            interior = interior && g3.degree(g3.require_vertex(pc)) == 4;
        if (interior) CHECK(m3.degree(v) == 4);
    }
    for (int v = 0; v < g3.n_vertices(); ++v) {
        if (g3.degree(v) != 4) continue;
        const Coord c = g3.coords[v];
        Coord east = {c.x + 1, c.y, 0}, north = {c.x, c.y + 1, 0};
        Coord west = {c.x - 1, c.y, 0}, south = {c.x, c.y - 1, 0};
        const Coord cyc[4] = {east, north, west, south};
        for (int i = 0; i < 4; ++i) {
            int a = m3.require_vertex(cyc[i]);
            int b = m3.require_vertex(cyc[(i + 1) % 4]);
            CHECK(m3.edge_between(a, b) >= 0);
            CHECK(medial_oriented(cyc[i], cyc[(i + 1) % 4]));
            CHECK_FALSE(medial_oriented(cyc[(i + 1) % 4], cyc[i]));
        }
    }
}

TEST_CASE("medial turn rule matches hand traces") {
    // open horizontal bond, arriving from below moving northeast: the walker
    // may not cross the bond, so it turns right and stays below
    CHECK(medial_turn({1, 1}, true, true) == -1);
    // closed horizontal bond, same arrival: may not cross the dual, turns left
    CHECK(medial_turn({1, 1}, true, false) == +1);
    // open vertical bond, arriving from the left moving northeast: turns left
    CHECK(medial_turn({1, 1}, false, true) == +1);
    CHECK(turn_left({1, 1}) == Dir{-1, 1});
    CHECK(turn_right({1, 1}) == Dir{1, -1});
}

TEST_CASE("slit boxes") {
    SlitBox s1 = build_slit_box(1);
    CHECK(s1.graph.n_vertices() == 9);
    CHECK(s1.graph.n_edges() == 11);

    SlitBox s2 = build_slit_box(2);
    CHECK(s2.graph.n_vertices() == 25);
    CHECK(s2.graph.n_edges() == 40 - 2);
    REQUIRE(s2.bc.blocks.size() == 1);
    std::set<Coord> arc;
    for (int v : s2.bc.blocks[0]) arc.insert(s2.graph.coords[v]);
    CHECK(arc == std::set<Coord>{primal(0, 0), primal(0, 1), primal(0, 2)});
    // slit interior vertices keep their horizontal edges only
    CHECK(s2.graph.degree(s2.graph.require_vertex(primal(0, 1))) == 2);
    CHECK(s2.graph.degree(s2.graph.require_vertex(primal(0, 0))) == 3);
    s2.bc.validate(s2.graph);

    // removed edges leave both endpoints in place
    for (int k = 0; k < 2; ++k) {
        int u = s2.graph.require_vertex(primal(0, k));
        int v = s2.graph.require_vertex(primal(0, k + 1));
        CHECK(s2.graph.edge_between(u, v) == -1);
    }
}

TEST_CASE("cover box structure") {
    FiniteGraph c11 = build_cover_box(1, 1);
    CHECK(c11.n_vertices() == 27);

    FiniteGraph c = build_cover_box(2, 2);
    CHECK(c.n_vertices() == 25 * 5);
    // the cut shifts sheets only below the branch face
    int a = c.require_vertex(cover_vertex(0, -1, 0));
    int b = c.require_vertex(cover_vertex(1, -1, 1));
    CHECK(c.edge_between(a, b) >= 0);
    int b0 = c.require_vertex(cover_vertex(1, -1, 0));
    CHECK(c.edge_between(a, b0) == -1);
    int t = c.require_vertex(cover_vertex(0, 0, 0));
    int t1 = c.require_vertex(cover_vertex(1, 0, 0));
    CHECK(c.edge_between(t, t1) >= 0);

    // all four rule neighbors inside the cutoff means degree 4
    for (int v = 0; v < c.n_vertices(); ++v) {
        const Coord co = c.coords[v];
        int x1 = co.x / 2, x2 = co.y / 2, x3 = co.z;
        bool east_in = x1 + 1 <= 2 && (x1 != 0 || x2 >= 0 || x3 + 1 <= 2);
        bool west_in = x1 - 1 >= -2 && (x1 != 1 || x2 >= 0 || x3 - 1 >= -2);
        bool inside = east_in && west_in && std::abs(x2 + 1) <= 2 &&
                      std::abs(x2 - 1) <= 2;
        if (inside) CHECK(c.degree(v) == 4);
    }
}

TEST_CASE("cover local planarity away from the branch") {
    FiniteGraph c = build_cover_box(5, 2);
    auto ball_profile = [&](int center) {
        std::set<int> layer = {center}, seen = {center};
        std::vector<int> sizes;
        for (int r = 0; r < 2; ++r) {
            std::set<int> next;
            for (int v : layer)
                for (int e : c.incident[v]) {
                    int w = c.other_end(e, v);
                    if (seen.insert(w).second) next.insert(w);
                }
            sizes.push_back(static_cast<int>(next.size()));
            layer = next;
        }
        int edges = 0, squares = 0;
        for (int v : seen)
            for (int e : c.incident[v])
                if (c.other_end(e, v) > v && seen.count(c.other_end(e, v))) ++edges;
        // count 4-cycles inside the ball
        std::vector<int> verts(seen.begin(), seen.end());
        for (int u : verts)
            for (int e1 : c.incident[u])
                for (int e2 : c.incident[u]) {
                    int p = c.other_end(e1, u), q = c.other_end(e2, u);
                    if (p >= q || p <= u) continue;  // u is the cycle minimum
                    if (!seen.count(p) || !seen.count(q)) continue;
                    for (int e3 : c.incident[p]) {
                        int w = c.other_end(e3, p);
                        if (w == u || !seen.count(w) || w <= u) continue;
                        if (c.edge_between(q, w) >= 0) ++squares;
                    }
                }
        return std::tuple{sizes, edges, squares};
    };
    int tested = 0;
    for (int v = 0; v < c.n_vertices(); ++v) {
        const Coord co = c.coords[v];
        int x1 = co.x / 2, x2 = co.y / 2, x3 = co.z;
        if (std::abs(x1) > 3 || std::abs(x2) > 3 || std::abs(x3) > 1) continue;
        // skip centers within reach of the branch face
        if (std::abs(2 * x1 - 1) <= 5 && std::abs(2 * x2 + 1) <= 5) continue;
        auto [sizes, edges, squares] = ball_profile(v);
        CHECK(sizes == std::vector<int>{4, 8});
        CHECK(edges == 16);
        CHECK(squares == 4);
        ++tested;
    }
    CHECK(tested > 0);

    // a ball touching the branch face sees the broken four-cycle
    auto [sizes, edges, squares] =
        ball_profile(c.require_vertex(cover_vertex(0, 0, 0)));
    CHECK(sizes == std::vector<int>{4, 9});
    CHECK(squares == 3);
    (void)edges;
}

TEST_CASE("cover dual collapses the branch face") {
    FiniteGraph c = build_cover_box(2, 2);
    FiniteGraph d = build_dual(c);
    CHECK(d.n_edges() == c.n_edges());
    int branch = d.require_vertex({1, -1, 0});
    // the face's top, left, and right edges exist on all 2h+1 sheets and its
    // bottom edge is one of the 2h cut edges, so the degree is 8h+3
    CHECK(d.degree(branch) == 8 * 2 + 3);
    CHECK(d.vertex({1, -1, 1}) == -1);
    CHECK(d.vertex({1, -1, -1}) == -1);
}

TEST_CASE("boundary partitions") {
    FiniteGraph g = build_box(2);
    BoundaryPartition free = BoundaryPartition::free_bc(g);
    BoundaryPartition wired = BoundaryPartition::wired_bc(g);
    BoundaryPartition mixed = BoundaryPartition::mixed_bc(g);
    free.validate(g);
    wired.validate(g);
    mixed.validate(g);
    CHECK(free.blocks.empty());
    REQUIRE(wired.blocks.size() == 1);
    CHECK(wired.blocks[0].size() == 16);
    REQUIRE(mixed.blocks.size() == 2);
    CHECK(mixed.blocks[0].size() == 5);  // full top row, corners included
    CHECK(mixed.blocks[1].size() == 5);

    CHECK(partition_refines(wired, mixed));
    CHECK(partition_refines(wired, free));
    CHECK(partition_refines(mixed, free));
    CHECK_FALSE(partition_refines(free, wired));
    CHECK_FALSE(partition_refines(mixed, wired));
    CHECK(partition_refines(wired, wired));

    BoundaryPartition bad;
    bad.blocks = {{0, 12}};  // 12 is the center of build_box(2)
    CHECK_THROWS_AS(bad.validate(g), PartitionMismatch);
}

TEST_CASE("serialization round trip") {
    FiniteGraph g = build_box(2);
    BoundaryPartition bc = BoundaryPartition::mixed_bc(g);
    std::stringstream s;
    write_graph(s, g, &bc);
    BoundaryPartition rbc;
    FiniteGraph r = read_graph(s, &rbc);
    CHECK(r.kind == g.kind);
    CHECK(r.coords == g.coords);
    REQUIRE(r.n_edges() == g.n_edges());
    for (int e = 0; e < g.n_edges(); ++e) {
        CHECK(r.edges[e].u == g.edges[e].u);
        CHECK(r.edges[e].v == g.edges[e].v);
    }
    CHECK(r.boundary == g.boundary);
    CHECK(rbc.blocks == bc.blocks);

    FiniteGraph cov = build_cover_box(1, 1);
    std::stringstream s2;
    write_graph(s2, cov);
    FiniteGraph rc = read_graph(s2);
    CHECK(rc.coords == cov.coords);
    CHECK(rc.n_edges() == cov.n_edges());

    std::stringstream bad("graph box 1");
    CHECK_THROWS_AS((void)read_graph(bad), IoError);
}

TEST_CASE("lookup errors") {
    FiniteGraph g = build_box(1);
    CHECK_THROWS_AS((void)g.require_vertex(primal(5, 5)), GeometryOutOfRange);
    CHECK_THROWS_AS((void)build_rect(1, 0, 0, 0), InvalidRange);
    CHECK_THROWS_AS((void)build_slit_box(0), InvalidRange);
    CHECK_THROWS_AS((void)build_cover_box(0, 1), InvalidRange);
}
