#pragma once
// Error types thrown by the library. Each carries a short human readable
// message describing the failed precondition.

#include <stdexcept>

namespace rcm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// enumeration or spin budget exceeded
struct TooLarge : Error { using Error::Error; };
// boundary partition does not match the graph boundary
struct PartitionMismatch : Error { using Error::Error; };
// Dobrushin arc pair violates one of its validity properties
struct InvalidArcs : Error { using Error::Error; };
// cluster weight outside the algorithm's validity range
struct InvalidQ : Error { using Error::Error; };
// event geometry does not fit inside the graph
struct GeometryOutOfRange : Error { using Error::Error; };
// contour is not a closed edge-avoiding path in the medial dual
struct InvalidContour : Error { using Error::Error; };
// vertex set contains a vertex without its four incident medial edges
struct InvalidVertexSet : Error { using Error::Error; };
// configuration violates forced edge states
struct InvalidConfiguration : Error { using Error::Error; };
// relative quantity undefined because the reference probability is zero
struct ZeroDenominator : Error { using Error::Error; };
// experiment id not recognized by the dispatcher
struct UnknownExperiment : Error { using Error::Error; };
// file could not be read or written
struct IoError : Error { using Error::Error; };
// dual graph is not defined for this input
struct NoDual : Error { using Error::Error; };
// numeric argument outside the documented range
struct InvalidRange : Error { using Error::Error; };

}  // namespace rcm
