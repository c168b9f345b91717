#include "twoway/loop_algebra.hpp"

#include <algorithm>

namespace twoway {

const Tf& ClosedLoopMaps::channel(LoopInput in, LoopOutput out) const {
    switch (out) {
        case LoopOutput::ybar: return in == LoopInput::r ? r_to_ybar : in == LoopInput::w ? w_to_ybar : z_to_ybar;
        case LoopOutput::y: return in == LoopInput::r ? r_to_y : in == LoopInput::w ? w_to_y : z_to_y;
        case LoopOutput::ubar: return in == LoopInput::r ? r_to_ubar : in == LoopInput::w ? w_to_ubar : z_to_ubar;
    }
    return r_to_y;
}

std::string to_string(LoopInput in) {
    switch (in) {
        case LoopInput::r: return "r";
        case LoopInput::w: return "w";
        case LoopInput::z: return "z";
    }
    return "?";
}

std::string to_string(LoopOutput out) {
    switch (out) {
        case LoopOutput::ybar: return "ybar";
        case LoopOutput::y: return "y";
        case LoopOutput::ubar: return "ubar";
    }
    return "?";
}

ClosedLoopMaps closed_loop_maps(const Tf& plant, const Tf& controller, const TwoWayCoding& m) {
    const Poly& mp = plant.num();
    const Poly& np = plant.den();
    const Poly& kn = controller.num();
    const Poly& kd = controller.den();
    const double a = m.a(), b = m.b(), c = m.c(), delta = m.delta();
    const double inv_a = 1 / a;

    ClosedLoopMaps maps;
    maps.characteristic = kd * np + kn * mp;
    if (maps.characteristic.is_zero()) throw DomainError("1 + K P vanishes identically");
    const Poly& chi = maps.characteristic;

    const Poly forward_gain = kd + c * kn;              // k_d (1 + cK)
    const Poly feedback_gain = b * kd - delta * kn;     // k_d (b - (ad - bc) K)
    const Poly attacker_zero = mp - c * np;             // n_P (P - c)
    const Poly attacker_pole = delta * np + b * mp;     // n_P (ad - bc + bP)

    maps.r_to_ybar = Tf(kn * mp, chi);
    maps.w_to_ybar = Tf(inv_a * (forward_gain * mp), chi);
    maps.z_to_ybar = Tf(inv_a * (feedback_gain * mp), chi);

    maps.r_to_y = Tf(kn * mp, chi);
    maps.w_to_y = Tf(inv_a * (attacker_zero * kd), chi);
    maps.z_to_y = Tf(inv_a * (attacker_pole * kd), chi);

    maps.r_to_ubar = Tf(kn * np, chi);
    maps.w_to_ubar = Tf(inv_a * (forward_gain * np), chi);
    maps.z_to_ubar = Tf(inv_a * (feedback_gain * np), chi);

    maps.nominal_stable = chi.degree() == 0 || is_hurwitz(chi);
    if (!maps.nominal_stable)
        maps.warnings.push_back("nominal closed loop is not stable: characteristic polynomial " + chi.to_string());
    return maps;
}

Tf equivalent_plant(const Tf& plant, const TwoWayCoding& m) {
    return Tf(plant.num() - m.c() * plant.den(), m.delta() * plant.den() + m.b() * plant.num());
}

Tf equivalent_controller(const Tf& controller, const TwoWayCoding& m) {
    const Poly den = controller.den() + m.c() * controller.num();
    if (den.is_zero()) throw DomainError("1 + cK vanishes identically: equivalent controller undefined");
    return Tf(m.b() * controller.den() - m.delta() * controller.num(), den);
}

AttackerView attacker_view(const Tf& plant, const Tf& controller, const TwoWayCoding& m) {
    AttackerView view{plant, controller, m, equivalent_plant(plant, m), equivalent_controller(controller, m), {}};
    const Poly ref_den = m.b() * controller.den() - m.delta() * controller.num();
    if (!ref_den.is_zero()) view.ref_factor = Tf(m.a() * controller.num(), ref_den);
    return view;
}

RelocationPolynomials relocation_polynomials(const Tf& plant, const TwoWayCoding& m) {
    if (!coprime(plant.num(), plant.den()))
        throw DomainError("relocation needs m_P and n_P coprime; plant " + plant.to_string() + " is not");
    return {plant.num() - m.c() * plant.den(), m.delta() * plant.den() + m.b() * plant.num()};
}

DegreeAudit degree_audit(const AttackerView& view) {
    DegreeAudit audit;
    const Poly& mp = view.plant.num();
    const Poly& np = view.plant.den();
    audit.plant_num_degree = mp.degree();
    audit.plant_den_degree = np.degree();
    audit.zero_poly_degree = view.p_bar.num().degree();
    audit.pole_poly_degree = view.p_bar.den().degree();
    audit.expected_zero_poly_degree = view.coding.c() != 0 ? std::max(mp.degree(), np.degree()) : mp.degree();
    audit.expected_pole_poly_degree = view.coding.b() != 0 ? std::max(mp.degree(), np.degree()) : np.degree();
    audit.p_bar_proper = view.p_bar.is_proper();
    audit.p_bar_relative_degree = view.p_bar.relative_degree();
    audit.k_bar_proper = view.k_bar.is_proper();

    if (audit.zero_poly_degree < audit.expected_zero_poly_degree) audit.flags.push_back("ZERO_POLY_DEGREE_DROP");
    if (audit.pole_poly_degree < audit.expected_pole_poly_degree) audit.flags.push_back("POLE_POLY_DEGREE_DROP");
    if (!audit.p_bar_proper) audit.flags.push_back("P_BAR_IMPROPER");
    if (view.p_bar.num().is_constant() && view.p_bar.den().is_constant()) audit.flags.push_back("P_BAR_CONSTANT");
    if (!audit.k_bar_proper) audit.flags.push_back("K_BAR_IMPROPER");
    return audit;
}

}  // namespace twoway
