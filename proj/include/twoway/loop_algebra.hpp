#pragma once

// Closed-loop maps of the coded feedback loop under forward (w) and feedback
// (z) injection, and the loop as the attacker perceives it between the
// channel signals q-bar and v-bar.

#include <optional>
#include <string>
#include <vector>

#include "twoway/coding.hpp"
#include "twoway/lti.hpp"

namespace twoway {

enum class LoopInput { r, w, z };
enum class LoopOutput { ybar, y, ubar };

/// All nine maps share the characteristic polynomial k_d n_P + k_n m_P as
/// denominator and are kept unreduced.
struct ClosedLoopMaps {
    Tf r_to_ybar, w_to_ybar, z_to_ybar;
    Tf r_to_y, w_to_y, z_to_y;
    Tf r_to_ubar, w_to_ubar, z_to_ubar;

    Poly characteristic;
    bool nominal_stable = false;
    std::vector<std::string> warnings;

    const Tf& channel(LoopInput in, LoopOutput out) const;
};

std::string to_string(LoopInput in);
std::string to_string(LoopOutput out);

ClosedLoopMaps closed_loop_maps(const Tf& plant, const Tf& controller, const TwoWayCoding& m);

/// (P - c) / (ad - bc + bP) with numerator m_P - c n_P and denominator
/// (ad - bc) n_P + b m_P.
Tf equivalent_plant(const Tf& plant, const TwoWayCoding& m);

/// (b - (ad - bc) K) / (1 + cK).
Tf equivalent_controller(const Tf& controller, const TwoWayCoding& m);

struct AttackerView {
    Tf plant;
    Tf controller;
    TwoWayCoding coding;

    Tf p_bar;
    Tf k_bar;
    /// aK / (b - (ad - bc) K); empty when b - (ad - bc) K vanishes identically.
    std::optional<Tf> ref_factor;
};

AttackerView attacker_view(const Tf& plant, const Tf& controller, const TwoWayCoding& m);

struct RelocationPolynomials {
    Poly zero_poly;  ///< m_P - c n_P
    Poly pole_poly;  ///< (ad - bc) n_P + b m_P
};

/// Throws DomainError if the plant is not coprime.
RelocationPolynomials relocation_polynomials(const Tf& plant, const TwoWayCoding& m);

struct DegreeAudit {
    int plant_num_degree = 0;
    int plant_den_degree = 0;
    int zero_poly_degree = 0;
    int expected_zero_poly_degree = 0;
    int pole_poly_degree = 0;
    int expected_pole_poly_degree = 0;
    bool p_bar_proper = true;
    int p_bar_relative_degree = 0;
    bool k_bar_proper = true;
    std::vector<std::string> flags;
};

DegreeAudit degree_audit(const AttackerView& view);

}  // namespace twoway
