#pragma once

#include <span>

#include "twoway/attacks.hpp"
#include "twoway/sim.hpp"

namespace twoway {

/// K P / (1 + K P) over the characteristic polynomial: what the controller
/// expects to see at y for a given reference.
Tf nominal_reference_map(const Tf& plant, const Tf& controller);

/// Controller-side residual test. The nominal response to r is replayed with
/// the simulator's integrator on the same grid; the attack is flagged at the
/// first sample where |y - y_nom| > eps (1 + max_{tau <= t} |y_nom|).
///
/// The verdict is DETECTED or STEALTHY: y alone cannot tell a blocked attack
/// from a decayed one. steady_state_deviation is max |e| over the last 10% of
/// the samples.
DetectionVerdict residual_detector(std::span<const double> t, std::span<const double> y_observed,
                                   std::span<const double> r, const Tf& nominal, double eps = 1e-3);

struct AttackAssessment {
    ZeroDynAttack attack;
    DetectionVerdict analytic;
    DetectionVerdict observed;
    SignalLog log;
    /// final plant_state_norm over its initial value, or over its value one
    /// second after the attack starts when the run starts from rest
    double plant_state_growth = 0;
    /// analytic and simulated evidence agree: STEALTHY is not flagged,
    /// DETECTED is flagged, CORRECTED settles below `corrected_tolerance`
    bool consistent = false;
};

inline constexpr double corrected_tolerance = 1e-4;

/// Simulates `scenario` with `attack` added to its injections and runs both
/// the analytic classifier and the residual detector.
AttackAssessment assess_attack(const Scenario& scenario, const ZeroDynAttack& attack);

}  // namespace twoway
