#pragma once

// Exponential injections, zero-dynamics attack synthesis and the analytic
// blocking test that decides whether an attack is seen at the controller.

#include <complex>
#include <optional>
#include <string>

#include "twoway/loop_algebra.hpp"

namespace twoway {

enum class InjectionPoint { forward_w, feedback_z };
enum class AttackTarget { original_plant, attacker_view };

std::string to_string(InjectionPoint p);
std::string to_string(AttackTarget t);

/// amplitude * exp(sigma (t - start)) * cos(omega (t - start) + phase) for
/// t >= start, zero before; the real part of amplitude e^{j phase} e^{s0 (t - start)}.
struct ExpSignal {
    std::complex<double> mode{0, 0};
    double amplitude = 0;
    double phase = 0;
    double start = 0;

    double operator()(double t) const;
    /// Complex phasor U such that the signal is Re(U e^{s0 t}) for t >= start.
    std::complex<double> phasor() const;
};

struct Injection {
    InjectionPoint point = InjectionPoint::forward_w;
    ExpSignal signal;
};

struct ModeSelector {
    bool rightmost = true;
    int index = 0;  ///< into the modes sorted by real part descending, used when !rightmost

    static ModeSelector pick_rightmost() { return {true, 0}; }
    static ModeSelector pick_index(int i) { return {false, i}; }
};

struct ZeroDynAttack {
    InjectionPoint point = InjectionPoint::forward_w;
    std::complex<double> mode{0, 0};  ///< zeta (forward) or lambda (feedback)
    double amplitude = 0;
    double phase = 0;
    double start = 0;
    AttackTarget target = AttackTarget::original_plant;
    bool conjugate_paired = false;  ///< mode is complex; conj(mode) is the paired root

    Injection injection() const { return {point, ExpSignal{mode, amplitude, phase, start}}; }
};

double signal_of(const ZeroDynAttack& attack, double t);

/// Forward attacks sit on a zero of the target model, feedback attacks on a
/// pole. Throws DomainError("no admissible mode ...") when none exists.
ZeroDynAttack synth_attack(const Tf& target_model, InjectionPoint point, ModeSelector selector, double amplitude,
                           AttackTarget target = AttackTarget::original_plant, double phase = 0);

struct BlockingGain {
    std::complex<double> gain;
    double scale = 0;   ///< sum |num_k| |s0|^k / |den(s0)| of the reduced channel
    bool blocked = false;
};

/// Reduced channel map (G_w->y for forward, G_z->y for feedback) evaluated at
/// the attack mode. Throws DomainError("resonant injection ...") when the mode
/// is a pole of the reduced channel.
BlockingGain blocking_gain(const ClosedLoopMaps& maps, const ZeroDynAttack& attack);

enum class Verdict { detected, stealthy, corrected };
std::string to_string(Verdict v);

struct DetectionVerdict {
    Verdict verdict = Verdict::stealthy;
    std::optional<double> detect_time;
    double peak_residual = 0;
    double steady_state_deviation = 0;
};

/// Analytic verdict from the blocking test and the sign of Re(s0). For visible
/// attacks detect_time is where the forced-mode envelope |G(s0)| |amplitude|
/// e^{sigma t} first exceeds eps.
DetectionVerdict classify_attack(const ClosedLoopMaps& maps, const ZeroDynAttack& attack, double eps = 1e-3);

}  // namespace twoway
