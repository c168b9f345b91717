#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "twoway/lti.hpp"

namespace twoway {

/// Static two-way coding [q; y] = M [u; v] with M = [a b; c d].
///
/// A valid coding has ad != 0 and ad - bc != 0, both with a 1e-12 margin, and
/// finite entries. The plant side applies the inverse coding, which is again a
/// TwoWayCoding.
class TwoWayCoding {
public:
    static constexpr double validity_margin = 1e-12;

    /// Validates and builds; throws DomainError naming the violated condition.
    static TwoWayCoding make(double a, double b, double c, double d);
    static TwoWayCoding identity() { return make(1, 0, 0, 1); }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }
    double d() const noexcept { return d_; }
    double delta() const noexcept { return delta_; }

    Eigen::Matrix2d matrix() const;
    TwoWayCoding inverse() const;
    std::pair<double, double> apply(double x1, double x2) const { return {a_ * x1 + b_ * x2, c_ * x1 + d_ * x2}; }

    bool is_identity() const noexcept { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }
    std::string to_string() const;

    friend bool operator==(const TwoWayCoding&, const TwoWayCoding&) = default;

private:
    TwoWayCoding(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d), delta_(a * d - b * c) {}

    double a_, b_, c_, d_, delta_;
};

inline TwoWayCoding new_coding(double a, double b, double c, double d) { return TwoWayCoding::make(a, b, c, d); }
inline TwoWayCoding inverse(const TwoWayCoding& m) { return m.inverse(); }
inline std::pair<double, double> apply_coding(const TwoWayCoding& m, double x1, double x2) { return m.apply(x1, x2); }

enum class CodingKind {
    identity,
    stretching1,  // diag(a, 1)
    stretching2,  // diag(1, d)
    stretching3,  // diag(a, d)
    squeezing,    // diag(a, 1/a)
    shearing1,    // [1 0; c 1]
    shearing2,    // [1 b; 0 1]
    shearing3,    // [1 b; c 1], bc != 1
    rotation,     // [cos t, sin t; -sin t, cos t]
    scattering,   // [sqrt(2g) 1; g sqrt(2g)]
    general_scattering,
};

struct CodingParams {
    double a = 1;
    double b = 0;
    double c = 0;
    double d = 1;
    double theta = 0;
    double gamma = 1;
};

TwoWayCoding catalog(CodingKind kind, const CodingParams& params);

std::string to_string(CodingKind kind);
/// Throws SchemaError on an unknown name.
CodingKind parse_coding_kind(const std::string& name);
const std::vector<CodingKind>& all_coding_kinds();

enum class SofRole { unassigned, pole_placer, zero_placer };

/// Static output feedback gain F for which n_P + F m_P is Hurwitz.
class SofGain {
public:
    /// Throws DomainError("gain not stabilizing ...") if the certificate fails.
    static SofGain certify(const Tf& plant, double gain, SofRole role = SofRole::unassigned);

    double gain() const noexcept { return gain_; }
    SofRole role() const noexcept { return role_; }
    SofGain with_role(SofRole role) const { return SofGain(gain_, role); }

private:
    SofGain(double gain, SofRole role) : gain_(gain), role_(role) {}
    double gain_;
    SofRole role_;
};

/// n_P(s) + F m_P(s).
Poly static_feedback_polynomial(const Tf& plant, double gain);

struct SofGrid {
    int points_per_sign = 60;
    double min_magnitude = 1e-3;
    double max_magnitude = 1e3;
};

/// Sign-symmetric log-spaced scan plus F = 0, ascending. An empty result only
/// means nothing on the grid stabilizes.
std::vector<SofGain> sof_search(const Tf& plant, const SofGrid& grid = {});

struct CodingDesign {
    TwoWayCoding coding;
    SofGain pole_gain;
    SofGain zero_gain;
    Poly pole_certificate;  ///< n_P + F1 m_P
    Poly zero_certificate;  ///< n_P + F2 m_P
    Tf equivalent_plant;
    Classification<double> equivalent_class;
    std::vector<std::string> notes;
};

/// Coding with b/(ad - bc) = F1 and c = -1/F2, normalized to a = 1 and
/// ad - bc = 1. The attacker's equivalent plant then has its poles at the
/// roots of n_P + F1 m_P and its zeros at the roots of n_P + F2 m_P.
CodingDesign design_from_gains(const Tf& plant, double f1, double f2);

}  // namespace twoway
