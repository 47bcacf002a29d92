#pragma once
// Planar geometry helpers shared by the lattice, loop and observable code.
//
// All coordinates are kept in half-lattice units (doubled integers):
//   primal vertices of Z^2  -> x and y both even
//   dual vertices           -> x and y both odd
//   medial vertices         -> x + y odd (midpoints of primal edges)
// The z field is the sheet index for universal-cover graphs; planar graphs
// keep z = 0 everywhere.

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <utility>

namespace rcm {

struct Coord {
    int x = 0;
    int y = 0;
    int z = 0;
    friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

constexpr Coord primal(int x, int y) { return {2 * x, 2 * y, 0}; }
constexpr Coord cover_vertex(int x1, int x2, int x3) { return {2 * x1, 2 * x2, x3}; }

// parity tests use &1 so they are safe for negative values
constexpr bool is_primal(const Coord& c) { return (c.x & 1) == 0 && (c.y & 1) == 0; }
constexpr bool is_dual_coord(const Coord& c) { return (c.x & 1) != 0 && (c.y & 1) != 0; }
constexpr bool is_medial(const Coord& c) { return ((c.x ^ c.y) & 1) != 0; }

constexpr int linf(const Coord& c) {
    int ax = c.x < 0 ? -c.x : c.x;
    int ay = c.y < 0 ? -c.y : c.y;
    return ax > ay ? ax : ay;
}

struct CoordHash {
    std::size_t operator()(const Coord& c) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
            h ^= h >> 33;
        };
        mix(static_cast<std::uint32_t>(c.x));
        mix(static_cast<std::uint32_t>(c.y));
        mix(static_cast<std::uint32_t>(c.z));
        return static_cast<std::size_t>(h);
    }
};

// Directions are quarter-turn unit steps or diagonal medial steps.
struct Dir {
    int dx = 0;
    int dy = 0;
    friend constexpr auto operator<=>(const Dir&, const Dir&) = default;
};

constexpr Dir turn_left(Dir d) { return {-d.dy, d.dx}; }
constexpr Dir turn_right(Dir d) { return {d.dy, -d.dx}; }

// A medial vertex is the midpoint of a primal edge: odd x means that edge is
// horizontal, odd y means it is vertical.
constexpr bool medial_on_horizontal(const Coord& m) { return (m.x & 1) != 0; }

// Endpoints of the primal edge whose midpoint is m (planar; z copied).
constexpr std::pair<Coord, Coord> primal_endpoints(const Coord& m) {
    if (medial_on_horizontal(m))
        return {Coord{m.x - 1, m.y, m.z}, Coord{m.x + 1, m.y, m.z}};
    return {Coord{m.x, m.y - 1, m.z}, Coord{m.x, m.y + 1, m.z}};
}

// Endpoints of the dual edge crossing that primal edge.
constexpr std::pair<Coord, Coord> dual_endpoints(const Coord& m) {
    if (medial_on_horizontal(m))
        return {Coord{m.x, m.y - 1, m.z}, Coord{m.x, m.y + 1, m.z}};
    return {Coord{m.x - 1, m.y, m.z}, Coord{m.x + 1, m.y, m.z}};
}

// A medial edge joins the midpoint of a horizontal primal edge (odd x) to the
// midpoint of a vertical one (odd y); the primal and dual pivots are the two
// corners of the spanned unit diamond.
constexpr Coord primal_pivot(const Coord& a, const Coord& b) {
    return {(a.x & 1) ? b.x : a.x, (a.y & 1) ? b.y : a.y, a.z};
}
constexpr Coord dual_pivot(const Coord& a, const Coord& b) {
    return {(a.x & 1) ? a.x : b.x, (a.y & 1) ? a.y : b.y, a.z};
}

constexpr long cross2(long ax, long ay, long bx, long by) { return ax * by - ay * bx; }

// Medial edges are oriented counterclockwise around their primal pivot.
constexpr bool medial_oriented(const Coord& a, const Coord& b) {
    Coord v = primal_pivot(a, b);
    return cross2(a.x - v.x, a.y - v.y, b.x - v.x, b.y - v.y) > 0;
}

// Turn taken at a medial vertex entered with diagonal direction `in`.
// The walker may not cross an open primal bond nor a closed bond's dual,
// which pins the exit; returns +1 for a left turn, -1 for a right turn.
constexpr int medial_turn(Dir in, bool horizontal_primal, bool open_bond) {
    bool left = (horizontal_primal == open_bond) ? (in.dx == -in.dy)
                                                 : (in.dx == in.dy);
    return left ? +1 : -1;
}

}  // namespace rcm
