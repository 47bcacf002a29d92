// Event predicates over bond configurations: single-edge opens, connections,
// rectangle crossings (primal and dual), annulus circuits, and one-arm events.
// Events are addressed by stable string ids, e.g.
//   edge_open:5            bond 5 is open
//   conn:0,0:1,1           endpoints joined in the wired configuration
//   conn:0,0,0:0,0,-2      cover-graph endpoints carry a sheet index
//   Ch:-1,-1:1,1           open left-right crossing of the rectangle
//   Cv:x0,y0:x1,y1         open bottom-top crossing
//   Ch*:x0,y0:x1,y1        dual crossing; corners in doubled (odd) coordinates
//   Cv*:x0,y0:x1,y1
//   Annulus:0,0:2          open circuit in the annulus [n,2n] around the center
//   OneArm:4               open path from the origin to distance >= n
// Rectangle and connection coordinates are in primal lattice units; dual
// rectangle corners are in doubled coordinates so they can name dual vertices.

#pragma once

#include "rcm/graph.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rcm {

struct Event {
    enum class Kind {
        EdgeOpen,
        Conn,
        CrossH,
        CrossV,
        CrossHDual,
        CrossVDual,
        Annulus,
        OneArm,
    };

    Kind kind = Kind::EdgeOpen;
    bool increasing = true;  // monotone under opening more bonds
    std::string id;          // canonical text form
    int edge = -1;           // EdgeOpen
    Coord a{0, 0, 0};        // conn endpoint / rect lower corner (doubled)
    Coord b{0, 0, 0};        // conn endpoint / rect upper corner (doubled)
    Coord center{0, 0, 0};   // annulus center (doubled)
    int radius = 0;          // annulus / one-arm radius in lattice units
};

// parses a stable event id; throws IoError on malformed input
Event parse_event(const std::string& id);

// named, versioned event lists; "box1_v1" is the increasing-event catalog
// on build_box(1): twelve edge opens, two connections, two crossings
std::vector<Event> event_catalog(const std::string& name);

// A compiled set of events over one graph and boundary condition.  Geometry
// is validated up front; detection reuses internal scratch buffers, so an
// EventSet must not be shared between threads.
class EventSet {
  public:
    EventSet(const FiniteGraph& g, const BoundaryPartition& bc,
             std::vector<Event> events);

    int size() const { return static_cast<int>(events_.size()); }
    const Event& event(int i) const { return events_[i]; }
    const FiniteGraph& graph() const { return *g_; }
    const BoundaryPartition& boundary() const { return bc_; }

    // evaluates every event on one configuration; bit i reports event i
    std::uint64_t detect_all(const std::vector<std::uint8_t>& open) const;
    bool detect(const std::vector<std::uint8_t>& open, int i) const;

  private:
    struct CrossPre {
        bool on_dual = false;
        std::vector<char> in_rect;    // per vertex of the carrier graph
        std::vector<char> is_target;  // per vertex
        std::vector<int> sources;
    };
    struct AnnulusPre {
        std::vector<std::vector<std::pair<int, int>>> adj;  // dual vertex -> (edge, other)
        std::vector<int> seeds_in;
        std::vector<char> is_outer;  // per dual vertex
    };
    struct OneArmPre {
        int origin = -1;
        std::vector<char> is_far;
    };

    void compile(const Event& ev);
    bool run_cross(const CrossPre& pre, const std::vector<std::uint8_t>& open) const;
    bool run_annulus(const AnnulusPre& pre, const std::vector<std::uint8_t>& open) const;
    bool run_onearm(const OneArmPre& pre, const std::vector<std::uint8_t>& open) const;
    void build_components(const std::vector<std::uint8_t>& open) const;
    int find_root(int v) const;

    const FiniteGraph* g_;
    BoundaryPartition bc_;
    std::vector<Event> events_;
    std::unique_ptr<FiniteGraph> dual_;

    std::vector<int> cross_slot_;    // per event, -1 or index into cross_
    std::vector<int> annulus_slot_;
    std::vector<int> onearm_slot_;
    std::vector<std::pair<int, int>> conn_pair_;  // per event, (-1,-1) if unused
    std::vector<CrossPre> cross_;
    std::vector<AnnulusPre> annulus_;
    std::vector<OneArmPre> onearm_;
    bool any_conn_ = false;

    // scratch; rebuilt per detect_all call
    mutable std::vector<int> parent_;
    mutable std::vector<int> stamp_primal_;
    mutable std::vector<int> stamp_dual_;
    mutable std::vector<int> queue_;
    mutable int stamp_ = 0;
};

// one-shot convenience wrapper
bool detect_event(const FiniteGraph& g, const BoundaryPartition& bc,
                  const std::vector<std::uint8_t>& open, const Event& ev);

}  // namespace rcm
