// Exact computations on small graphs: cluster counting, partition functions
// and event probabilities by full enumeration, planar duality, Potts spin
// enumeration with the cluster-coloring correspondence, and a column transfer
// matrix for grid graphs that reaches sizes enumeration cannot.

#pragma once

#include "rcm/events.hpp"
#include "rcm/graph.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace rcm {

struct FkParams {
    double q = 1.0;  // cluster weight, positive
    double p = 0.5;  // bond probability in [0,1]
};

// throws InvalidQ / InvalidRange when out of range
void validate_params(FkParams par);

// self-dual point sqrt(q)/(1+sqrt(q))
double critical_p(double q);
// dual bond probability q(1-p)/(p+q(1-p))
double dual_p(double p, double q);
FkParams dual_params(FkParams par);

// components of the configuration with each boundary block wired
int cluster_count(const FiniteGraph& g, const std::vector<std::uint8_t>& open,
                  const BoundaryPartition& bc);

// enumeration budget: graphs up to this many edges
inline constexpr int kEnumerationMaxEdges = 26;

double partition_function(const FiniteGraph& g, FkParams par,
                          const BoundaryPartition& bc);

// probability of one configuration under the finite-volume measure
double config_probability(const FiniteGraph& g, FkParams par,
                          const BoundaryPartition& bc,
                          const std::vector<std::uint8_t>& open);

double event_probability(const FiniteGraph& g, FkParams par,
                         const BoundaryPartition& bc, const Event& ev);

// single-pass probabilities and pairwise joint probabilities for a whole set
struct EventStats {
    std::vector<double> prob;
    std::vector<std::vector<double>> joint;  // joint[i][j], i <= j
};
EventStats event_stats(const FiniteGraph& g, FkParams par,
                       const BoundaryPartition& bc, const EventSet& events);

// probability that x and y share a cluster of the wired configuration
double two_point(const FiniteGraph& g, FkParams par, const BoundaryPartition& bc,
                 Coord x, Coord y);

struct DualConfig {
    FiniteGraph graph;
    std::vector<std::uint8_t> open;
    FkParams params;
};
// flips every bond onto the dual graph and maps (p,q) to (p*,q)
DualConfig dual_transform(const FiniteGraph& g,
                          const std::vector<std::uint8_t>& open, FkParams par);

// ---- Potts spins ----

// exact summary of the q-state model at inverse temperature beta; spins of
// the vertices listed in `fixed` are pinned to the given color (0-based),
// everything else is summed over
struct PottsSummary {
    double z = 0;                                  // partition function
    std::vector<std::vector<double>> marginal;     // [vertex][color]
    std::vector<double> pair_agree;                // per requested pair
};
PottsSummary potts_enumerate(const FiniteGraph& g, int q, double beta,
                             const std::vector<std::pair<int, int>>& fixed,
                             const std::vector<std::pair<int, int>>& pairs = {});

// all boundary vertices pinned to one color
std::vector<std::pair<int, int>> monochromatic_boundary(const FiniteGraph& g,
                                                        int color);

// Colors every cluster of the random-cluster measure uniformly (the block
// cluster forced to color 0 when the boundary condition has a wired block)
// and compares the induced spin law, marginals and all pair agreements,
// against the direct spin enumeration at beta = -log(1-p).  Returns the
// largest absolute discrepancy.  Supports free or single-block boundaries.
double coupling_check(const FiniteGraph& g, int q, double p,
                      const BoundaryPartition& bc);

// ---- column transfer matrix on grid graphs ----

enum class TmBc { Free, Wired, Mixed };

// partition function of a Box/Rect graph, exact, column by column
double tm_partition_function(const FiniteGraph& g, FkParams par, TmBc bc);

// probability of an open left-right crossing of the full rectangle
double tm_crossing_probability(const FiniteGraph& g, FkParams par, TmBc bc);

// per-edge open probabilities, indexed like the graph's edges
std::vector<double> tm_edge_marginals(const FiniteGraph& g, FkParams par,
                                      TmBc bc);

}  // namespace rcm
