#pragma once

#include <stdexcept>
#include <string>

namespace revlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// size mismatch between operands (different site counts)
struct DimensionError : Error { using Error::Error; };
// operation not available for this state representation
struct RepresentationError : Error { using Error::Error; };
struct ArgumentError : Error { using Error::Error; };
// problem exceeds a solver's dimension/cost limit
struct DimensionLimitError : Error { using Error::Error; };
struct NotConvergedError : Error { using Error::Error; };
// filter parameters require a strictly positive spectral gap
struct GaplessError : Error { using Error::Error; };
// Chebyshev recurrence overflow guard tripped
struct RangeError : Error { using Error::Error; };
// |<psi|Gamma|psi>| below the overlap floor, bound carries no information
struct VacuousBoundError : Error { using Error::Error; };
struct DegenerateGroundStateError : Error { using Error::Error; };
struct NotAProjectorError : Error { using Error::Error; };
// alpha or beta of a witness decomposition is numerically zero
struct DegenerateDecompositionError : Error { using Error::Error; };

}  // namespace revlab
