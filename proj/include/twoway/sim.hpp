#pragma once

// Fixed-step simulation of the coded loop with forward and feedback
// injection points:
//
//   r -> K -> u --[M]-- q -> (+w) -> q-bar --[M^-1]-- u-bar -> P -> y-bar
//        ^         |                                    |
//        y  <------+-- v <- (+z) <- v-bar <-------------+
//
// The memoryless part of the loop is solved exactly at every stage
// evaluation; only the controller and plant states are integrated.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twoway/attacks.hpp"
#include "twoway/loop_algebra.hpp"

namespace twoway {

struct ReferenceSource {
    enum class Kind { zero, step, sine };
    Kind kind = Kind::zero;
    double amplitude = 0;
    double t_on = 0;   ///< step
    double omega = 0;  ///< sine
    double phase = 0;  ///< sine: amplitude sin(omega t + phase)

    static ReferenceSource zero() { return {}; }
    static ReferenceSource step(double amplitude, double t_on = 0) { return {Kind::step, amplitude, t_on, 0, 0}; }
    static ReferenceSource sine(double amplitude, double omega, double phase = 0) {
        return {Kind::sine, amplitude, 0, omega, phase};
    }

    double operator()(double t) const;
};

std::string to_string(ReferenceSource::Kind k);

enum class InitialState {
    zero,
    /// Controller and plant start on the forced exponential response of each
    /// injection that starts at t = 0, so no homogeneous transient is excited.
    attack_aligned,
};

struct Scenario {
    Tf plant;
    Tf controller;
    TwoWayCoding coding = TwoWayCoding::identity();
    ReferenceSource reference;
    std::vector<Injection> injections;
    double horizon = 10;
    double dt = 1e-3;
    double detector_eps = 1e-3;
    InitialState initial_state = InitialState::zero;
};

struct LoopSignals {
    double r = 0, u = 0, q = 0, qbar = 0, ubar = 0, ybar = 0, vbar = 0, v = 0, y = 0, w = 0, z = 0;
};

/// Realized loop: states are [x_K; x_P].
class Interconnection {
public:
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    Interconnection(const Tf& plant, const Tf& controller, const TwoWayCoding& coding);

    Eigen::Index controller_order() const { return ctrl_.order(); }
    Eigen::Index plant_order() const { return plant_.order(); }
    Eigen::Index order() const { return ctrl_.order() + plant_.order(); }
    const TwoWayCoding& coding() const { return coding_; }

    LoopSignals signals(const Vector& x, double r, double w, double z) const;
    Vector derivative(const Vector& x, double r, double w, double z) const;
    Vector derivative(const Vector& x, const LoopSignals& s) const;

    /// dx/dt = A x + B_r r + B_w w + B_z z.
    struct Linear {
        Matrix A;
        Vector Br, Bw, Bz;
    };
    Linear linearize() const;

private:
    StateSpaced plant_;
    StateSpaced ctrl_;
    TwoWayCoding coding_;
    TwoWayCoding inverse_;
    Eigen::Matrix2d static_inverse_;
};

/// Throws DomainError for a plant with feedthrough or when 1 + c D_K = 0.
Interconnection assemble(const Tf& plant, const Tf& controller, const TwoWayCoding& coding);

struct SignalLog {
    static constexpr std::array<const char*, 13> column_names{
        "t", "r", "u", "q", "qbar", "ubar", "ybar", "vbar", "v", "y", "w", "z", "plant_state_norm"};

    std::vector<double> t, r, u, q, qbar, ubar, ybar, vbar, v, y, w, z, plant_state_norm;
    std::optional<double> divergence_time;
    std::vector<std::string> notes;

    std::size_t size() const { return t.size(); }
    const std::vector<double>& column(std::size_t i) const;
    void push(double time, const LoopSignals& s, double state_norm);
};

/// Classical RK4 on the uniform grid k dt. The reference enters as a
/// first-order hold of its grid samples; injections are evaluated exactly at
/// each stage. A non-finite value stops the run and sets divergence_time.
SignalLog simulate(const Scenario& scenario);

/// Uncoded loop u = K(r - y), y = P u, same integrator and reference handling.
SignalLog simulate_baseline(const Tf& plant, const Tf& controller, const ReferenceSource& reference, double horizon,
                            double dt);

/// Initial state that places the loop on the forced response of the given
/// injections. Injections whose mode is a closed-loop eigenvalue are skipped
/// and listed in `skipped`.
Eigen::VectorXd aligned_initial_state(const Interconnection& loop, const std::vector<Injection>& injections,
                                      std::vector<std::string>* skipped = nullptr);

struct ChannelCheck {
    LoopInput input = LoopInput::r;
    LoopOutput output = LoopOutput::y;
    std::complex<double> predicted;
    std::complex<double> measured;
    double amplitude_error = 0;  ///< relative
    double phase_error = 0;      ///< radians
    bool pass = false;
};

struct CrossvalidationReport {
    std::vector<ChannelCheck> channels;
    double max_relative_error = 0;
    bool pass = false;
};

/// Compares the logged ybar, y and ubar against the corresponding closed-loop
/// maps. The scenario must drive exactly one input: a sine reference with no
/// injections, or one injection with Re(s0) <= 0 and zero reference. The
/// response over the last third of the horizon is fitted to Re(X e^{s0 t}).
CrossvalidationReport crossvalidate(const Scenario& scenario, const ClosedLoopMaps& maps);

}  // namespace twoway
