#include "twoway/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace twoway {

std::string to_string(InjectionPoint p) { return p == InjectionPoint::forward_w ? "forward_w" : "feedback_z"; }

std::string to_string(AttackTarget t) {
    return t == AttackTarget::original_plant ? "original_P" : "attacker_view_P_bar";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::detected: return "DETECTED";
        case Verdict::stealthy: return "STEALTHY";
        case Verdict::corrected: return "CORRECTED";
    }
    return "?";
}

double ExpSignal::operator()(double t) const {
    if (t < start) return 0.0;
    const double tau = t - start;
    return amplitude * std::exp(mode.real() * tau) * std::cos(mode.imag() * tau + phase);
}

std::complex<double> ExpSignal::phasor() const {
    return amplitude * std::polar(1.0, phase) * std::exp(-mode * start);
}

double signal_of(const ZeroDynAttack& attack, double t) { return attack.injection().signal(t); }

ZeroDynAttack synth_attack(const Tf& target_model, InjectionPoint point, ModeSelector selector, double amplitude,
                           AttackTarget target, double phase) {
    if (!std::isfinite(amplitude) || amplitude == 0) throw DomainError("attack amplitude must be finite and nonzero");
    const Poly& source = point == InjectionPoint::forward_w ? target_model.num() : target_model.den();
    if (source.degree() < 1)
        throw DomainError(point == InjectionPoint::forward_w ? "no admissible mode: target has no finite zero"
                                                             : "no admissible mode: target has no pole");
    if (!coprime(target_model.num(), target_model.den()))
        throw DomainError("attack target model must be coprime: " + target_model.to_string());

    std::vector<std::complex<double>> modes = roots(source);
    std::sort(modes.begin(), modes.end(), [](const auto& x, const auto& y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    const int index = selector.rightmost ? 0 : selector.index;
    if (index < 0 || index >= static_cast<int>(modes.size()))
        throw DomainError("no admissible mode: index " + std::to_string(index) + " out of range");

    ZeroDynAttack attack;
    attack.point = point;
    attack.mode = modes[static_cast<std::size_t>(index)];
    attack.amplitude = amplitude;
    attack.phase = phase;
    attack.target = target;
    attack.conjugate_paired = attack.mode.imag() != 0;
    return attack;
}

namespace {

struct ChannelProbe {
    BlockingGain gain;
    bool resonant = false;
};

ChannelProbe probe(const ClosedLoopMaps& maps, const ZeroDynAttack& attack) {
    const Tf& channel = attack.point == InjectionPoint::forward_w ? maps.w_to_y : maps.z_to_y;
    const Tf reduced = reduce(channel).first;
    const std::complex<double> s0 = attack.mode;
    const std::complex<double> den = reduced.den()(s0);
    ChannelProbe out;
    if (std::abs(den) <= 1e-9 * reduced.den().eval_scale(s0)) {
        out.resonant = true;
        return out;
    }
    const std::complex<double> num = reduced.num()(s0);
    out.gain.gain = num / den;
    out.gain.scale = reduced.num().eval_scale(s0) / std::abs(den);
    out.gain.blocked = std::abs(out.gain.gain) <= 1e-6 * out.gain.scale;
    return out;
}

}  // namespace

BlockingGain blocking_gain(const ClosedLoopMaps& maps, const ZeroDynAttack& attack) {
    const ChannelProbe p = probe(maps, attack);
    if (p.resonant)
        throw DomainError("resonant injection: mode " + format_complex(attack.mode) +
                          " is a pole of the attacked channel and excites the loop directly");
    return p.gain;
}

DetectionVerdict classify_attack(const ClosedLoopMaps& maps, const ZeroDynAttack& attack, double eps) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const ChannelProbe p = probe(maps, attack);
    const double sigma = attack.mode.real();
    const double onset = p.resonant ? inf : std::abs(p.gain.gain) * std::abs(attack.amplitude);

    DetectionVerdict v;
    if (sigma < 0) {
        v.verdict = Verdict::corrected;
        v.peak_residual = onset;
        return v;
    }
    if (!p.resonant && p.gain.blocked) {
        v.verdict = Verdict::stealthy;
        return v;
    }
    v.peak_residual = onset;
    v.steady_state_deviation = sigma > 0 ? inf : onset;
    if (onset > eps) {
        v.verdict = Verdict::detected;
        v.detect_time = attack.start;
    } else if (sigma > 0) {
        v.verdict = Verdict::detected;
        v.detect_time = attack.start + std::log(eps / onset) / sigma;
    } else {
        // persistent but below the detector's resolution
        v.verdict = Verdict::stealthy;
    }
    return v;
}

}  // namespace twoway
