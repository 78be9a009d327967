#pragma once

#include <stdexcept>
#include <string>

namespace eitcool {

// Base class for every failure mode this library reports. Catching
// eitcool::Error is enough to translate any domain failure into an exit
// status; the concrete types below exist so callers can branch on cause.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define EITCOOL_ERROR_TYPE(NAME)                                            \
    class NAME : public Error {                                             \
    public:                                                                 \
        using Error::Error;                                                 \
    }

// Hamiltonian / dressed-state construction
EITCOOL_ERROR_TYPE(DegenerateSystem);     // zero coupling where a finite one is required
EITCOOL_ERROR_TYPE(TwoPhotonMismatch);    // analytic dressed states need delta_0 == delta_1

// Steady-state solving and time evolution
EITCOOL_ERROR_TYPE(NonUniqueSteadyState); // Liouvillian null space has dimension > 1
EITCOOL_ERROR_TYPE(NoConvergence);        // iteration failed to reach tolerance
EITCOOL_ERROR_TYPE(StepTooLarge);         // integrator step unstable for this generator

// Cooling-limit evaluation and optimization
EITCOOL_ERROR_TYPE(NotCooling);           // sideband balance gives zero/negative cooling rate
EITCOOL_ERROR_TYPE(NoMinimumInWindow);    // every probed detuning heats

// Thermometry and fitting
EITCOOL_ERROR_TYPE(RatioOutOfRange);      // sideband ratio >= 1 is unphysical for a thermal state
EITCOOL_ERROR_TYPE(InconsistentSigns);    // AC-Stark shift and detuning must have equal signs
EITCOOL_ERROR_TYPE(FitDiverged);
EITCOOL_ERROR_TYPE(InsufficientData);

// Ion-chain mechanics
EITCOOL_ERROR_TYPE(UnstableChain);        // transverse confinement too weak: zigzag transition

// Configuration / CLI
EITCOOL_ERROR_TYPE(ConfigError);
EITCOOL_ERROR_TYPE(IoError);

#undef EITCOOL_ERROR_TYPE

} // namespace eitcool
