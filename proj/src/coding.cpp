#include "twoway/coding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twoway/loop_algebra.hpp"

namespace twoway {

TwoWayCoding TwoWayCoding::make(double a, double b, double c, double d) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
        throw DomainError("coding entries must be finite");
    if (std::abs(a * d) <= validity_margin) throw DomainError("invalid coding: condition ad != 0 violated");
    if (std::abs(a * d - b * c) <= validity_margin)
        throw DomainError("invalid coding: condition ad - bc != 0 violated");
    return TwoWayCoding(a, b, c, d);
}

Eigen::Matrix2d TwoWayCoding::matrix() const {
    Eigen::Matrix2d m;
    m << a_, b_, c_, d_;
    return m;
}

TwoWayCoding TwoWayCoding::inverse() const {
    return make(d_ / delta_, -b_ / delta_, -c_ / delta_, a_ / delta_);
}

std::string TwoWayCoding::to_string() const {
    std::ostringstream os;
    os.precision(9);
    os << "[" << a_ << ", " << b_ << "; " << c_ << ", " << d_ << "]";
    return os.str();
}

namespace {

void require(bool ok, const std::string& constraint) {
    if (!ok) throw DomainError("coding parameter constraint violated: " + constraint);
}

void require_angle(double theta) {
    require(std::isfinite(theta) && std::abs(std::cos(theta)) > 1e-6,
            "theta must not be an odd multiple of pi/2");
}

void require_gamma(double gamma) { require(std::isfinite(gamma) && gamma > 0, "0 < gamma < inf"); }

}  // namespace

TwoWayCoding catalog(CodingKind kind, const CodingParams& p) {
    switch (kind) {
        case CodingKind::identity: return TwoWayCoding::identity();
        case CodingKind::stretching1:
            require(p.a != 0, "a != 0");
            return TwoWayCoding::make(p.a, 0, 0, 1);
        case CodingKind::stretching2:
            require(p.d != 0, "d != 0");
            return TwoWayCoding::make(1, 0, 0, p.d);
        case CodingKind::stretching3:
            require(p.a * p.d != 0, "ad != 0");
            return TwoWayCoding::make(p.a, 0, 0, p.d);
        case CodingKind::squeezing:
            require(p.a != 0, "a != 0");
            return TwoWayCoding::make(p.a, 0, 0, 1 / p.a);
        case CodingKind::shearing1: return TwoWayCoding::make(1, 0, p.c, 1);
        case CodingKind::shearing2: return TwoWayCoding::make(1, p.b, 0, 1);
        case CodingKind::shearing3:
            require(std::abs(1 - p.b * p.c) > TwoWayCoding::validity_margin, "bc != 1");
            return TwoWayCoding::make(1, p.b, p.c, 1);
        case CodingKind::rotation: {
            require_angle(p.theta);
            const double co = std::cos(p.theta);
            const double si = std::sin(p.theta);
            return TwoWayCoding::make(co, si, -si, co);
        }
        case CodingKind::scattering: {
            require_gamma(p.gamma);
            const double r = std::sqrt(2 * p.gamma);
            return TwoWayCoding::make(r, 1, p.gamma, r);
        }
        case CodingKind::general_scattering: {
            require_gamma(p.gamma);
            require_angle(p.theta);
            const double diag = std::sqrt(p.gamma) / std::cos(p.theta);
            const double t = std::tan(p.theta);
            return TwoWayCoding::make(diag, t, p.gamma * t, diag);
        }
    }
    throw DomainError("unknown coding kind");
}

const std::vector<CodingKind>& all_coding_kinds() {
    static const std::vector<CodingKind> kinds{
        CodingKind::identity,  CodingKind::stretching1, CodingKind::stretching2, CodingKind::stretching3,
        CodingKind::squeezing, CodingKind::shearing1,   CodingKind::shearing2,   CodingKind::shearing3,
        CodingKind::rotation,  CodingKind::scattering,  CodingKind::general_scattering,
    };
    return kinds;
}

std::string to_string(CodingKind kind) {
    switch (kind) {
        case CodingKind::identity: return "identity";
        case CodingKind::stretching1: return "stretching1";
        case CodingKind::stretching2: return "stretching2";
        case CodingKind::stretching3: return "stretching3";
        case CodingKind::squeezing: return "squeezing";
        case CodingKind::shearing1: return "shearing1";
        case CodingKind::shearing2: return "shearing2";
        case CodingKind::shearing3: return "shearing3";
        case CodingKind::rotation: return "rotation";
        case CodingKind::scattering: return "scattering";
        case CodingKind::general_scattering: return "general_scattering";
    }
    return "?";
}

CodingKind parse_coding_kind(const std::string& name) {
    for (CodingKind k : all_coding_kinds())
        if (to_string(k) == name) return k;
    throw SchemaError("unknown coding kind '" + name + "'");
}

Poly static_feedback_polynomial(const Tf& plant, double gain) { return plant.den() + gain * plant.num(); }

SofGain SofGain::certify(const Tf& plant, double gain, SofRole role) {
    const Poly closed = static_feedback_polynomial(plant, gain);
    if (closed.is_zero()) throw DomainError("gain not stabilizing: n_P + F m_P vanishes for F = " + std::to_string(gain));
    if (closed.degree() >= 1 && !is_hurwitz(closed)) {
        std::string which = role == SofRole::pole_placer   ? "F1"
                            : role == SofRole::zero_placer ? "F2"
                                                           : "F";
        throw DomainError("gain not stabilizing: " + which + " = " + std::to_string(gain) +
                          " leaves n_P + F m_P = " + closed.to_string() + " non-Hurwitz");
    }
    return SofGain(gain, role);
}

std::vector<SofGain> sof_search(const Tf& plant, const SofGrid& grid) {
    if (!plant.is_proper()) throw DomainError("static output feedback search needs a proper plant");
    if (!coprime(plant.num(), plant.den())) throw DomainError("static output feedback search needs a coprime plant");
    std::vector<double> candidates{0.0};
    const int n = grid.points_per_sign;
    for (int k = 0; k < n; ++k) {
        const double frac = n > 1 ? double(k) / (n - 1) : 0.0;
        const double mag = grid.min_magnitude * std::pow(grid.max_magnitude / grid.min_magnitude, frac);
        candidates.push_back(mag);
        candidates.push_back(-mag);
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<SofGain> hits;
    for (double f : candidates) {
        try {
            hits.push_back(SofGain::certify(plant, f));
        } catch (const DomainError&) {
        }
    }
    return hits;
}

CodingDesign design_from_gains(const Tf& plant, double f1, double f2) {
    if (f2 == 0) throw DomainError("c undefined: F2 = 0 gives c = -1/F2");
    if (std::abs(1 - f1 / f2) <= TwoWayCoding::validity_margin) throw DomainError("ad would vanish: F1 = F2");
    if (!coprime(plant.num(), plant.den()))
        throw DomainError("plant numerator and denominator must be coprime");

    const SofGain pole_gain = SofGain::certify(plant, f1, SofRole::pole_placer);
    const SofGain zero_gain = SofGain::certify(plant, f2, SofRole::zero_placer);

    const double b = f1;
    const double c = -1 / f2;
    const double ad = 1 - f1 / f2;
    const TwoWayCoding m = TwoWayCoding::make(1, b, c, ad);

    const Tf p_bar = equivalent_plant(plant, m);
    const Classification<double> cls = classify(p_bar);
    if (!cls.stable || !cls.minimum_phase)
        throw DomainError("designed coding failed certification: equivalent plant " + p_bar.to_string());

    CodingDesign design{m,
                        pole_gain,
                        zero_gain,
                        static_feedback_polynomial(plant, f1),
                        static_feedback_polynomial(plant, f2),
                        p_bar,
                        cls,
                        {}};
    if (f1 == 0) design.notes.push_back("F1 = 0 gives b = 0: the attacker sees the plant's own poles");
    return design;
}

}  // namespace twoway
