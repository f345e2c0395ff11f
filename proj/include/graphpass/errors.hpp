#pragma once

#include <stdexcept>
#include <string>

namespace graphpass {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// graph construction / lookup
struct NonSymmetricWeight : Error { using Error::Error; };
struct NonPositiveWeightOrMeasure : Error { using Error::Error; };
struct DisconnectedGraph : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
struct UnknownVertex : Error { using Error::Error; };
struct BadParams : Error { using Error::Error; };

// calculus
struct GraphMismatch : Error { using Error::Error; };
struct BadExponent : Error { using Error::Error; };
struct NonPositivePotential : Error { using Error::Error; };
struct EigenSolverFailure : Error { using Error::Error; };

// model / audit
struct CoefficientOutOfRange : Error { using Error::Error; };
struct MissingMetadata : Error { using Error::Error; };

// solver
struct NoConvergence : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct BadFarPoint : Error { using Error::Error; };
struct MissingSecondPartials : Error { using Error::Error; };
struct SymmetryViolated : Error { using Error::Error; };
struct FoundFewer : Error { using Error::Error; };

// io / cli
struct MalformedFile : Error { using Error::Error; };
struct MissingInput : Error { using Error::Error; };
struct UnknownFlag : Error { using Error::Error; };

}  // namespace graphpass
