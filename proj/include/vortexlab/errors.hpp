#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vortexlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define VORTEXLAB_ERROR(Name)                                                   \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    };

VORTEXLAB_ERROR(BranchCut)
VORTEXLAB_ERROR(SizeLimit)
VORTEXLAB_ERROR(NotLocallyFree)
VORTEXLAB_ERROR(OutsideTube)
VORTEXLAB_ERROR(NewtonDiverged)
VORTEXLAB_ERROR(GridMismatch)
VORTEXLAB_ERROR(NotTemporal)
VORTEXLAB_ERROR(NotNearCritical)
VORTEXLAB_ERROR(AmbiguousStabilizer)
VORTEXLAB_ERROR(ShootingFailed)
VORTEXLAB_ERROR(StiffnessAbort)
VORTEXLAB_ERROR(RangeMismatch)
VORTEXLAB_ERROR(NoWindow)
VORTEXLAB_ERROR(InvalidConfig)
VORTEXLAB_ERROR(PreconditionFailed)

#undef VORTEXLAB_ERROR

/// Raised by the relaxation solver; carries the residual history of the rejected run.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : Error("NonConvergence: " + what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

}  // namespace vortexlab
