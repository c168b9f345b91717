#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "canonical.hpp"
#include "support.hpp"
#include "twoway/error.hpp"
#include "twoway/rk4.hpp"

using namespace twoway;
using namespace twoway::testing;

namespace {

const TwoWayCoding shear = TwoWayCoding::make(1, 0, 1, 1);

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0;
    for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
}

/// Terminal y error of a step response against the matrix exponential of the
/// augmented system [x; r].
double rk4_terminal_error(const Scenario& sc) {
    const Interconnection loop = assemble(sc.plant, sc.controller, sc.coding);
    const auto lin = loop.linearize();
    const Eigen::Index n = loop.order();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = lin.A;
    aug.topRightCorner(n, 1) = lin.Br;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n + 1);
    x0(n) = sc.reference.amplitude;
    const Eigen::MatrixXd phi = (aug * sc.horizon).exp();
    const Eigen::VectorXd xt = phi * x0;
    const double y_exact = loop.signals(xt.head(n), sc.reference.amplitude, 0, 0).y;
    return std::abs(simulate(sc).y.back() - y_exact);
}

}  // namespace

TEST_CASE("assembly and well-posedness") {
    CHECK_NOTHROW(assemble(P1, K1, TwoWayCoding::identity()));
    CHECK_NOTHROW(assemble(P1, K1, shear));
    CHECK_THROWS_WITH_AS(assemble(P1, K1, TwoWayCoding::make(1, 0, -1, 1)), doctest::Contains("ill-posed interconnection"),
                         DomainError);
    CHECK_THROWS_WITH_AS(assemble(Tf{Poly{1, 1}, Poly{2, 1}}, K1, TwoWayCoding::identity()),
                         doctest::Contains("algebraic loop through plant unsupported"), DomainError);
    CHECK_THROWS_AS(assemble(P1, Tf{Poly{0, 0, 1}, Poly{1, 1}}, TwoWayCoding::identity()), DomainError);
}

TEST_CASE("step response settles at the DC gain for any coding") {
    for (const TwoWayCoding& m :
         {TwoWayCoding::identity(), shear, TwoWayCoding::make(2, -1, 0.5, 1.5), catalog(CodingKind::scattering, {.gamma = 2})}) {
        Scenario sc = loop_scenario(P1, K1, m, 30, InitialState::zero);
        sc.reference = ReferenceSource::step(1);
        const SignalLog log = simulate(sc);
        CHECK(log.size() == 30001);
        CHECK(log.t.back() == doctest::Approx(30));
        CHECK(std::abs(log.ybar.back() + 1) < 1e-3);
        CHECK(std::abs(log.y.back() + 1) < 1e-3);
    }
}

TEST_CASE("wiring identities hold exactly at every sample") {
    Scenario sc = loop_scenario(P1, Tf{Poly{1, 1}, Poly{2, 1}}, TwoWayCoding::make(1.5, 0.4, -0.3, 0.8), 5,
                                InitialState::zero);
    sc.reference = ReferenceSource::sine(1, 0.7);
    sc.injections.push_back({InjectionPoint::forward_w, ExpSignal{cd(-0.3, 2), 0.2, 0.1, 1}});
    sc.injections.push_back({InjectionPoint::feedback_z, ExpSignal{0.1, 0.05, 0, 0.5}});
    const SignalLog log = simulate(sc);
    for (std::size_t k = 0; k < log.size(); ++k) {
        CHECK(log.qbar[k] == log.q[k] + log.w[k]);
        CHECK(log.v[k] == log.vbar[k] + log.z[k]);
    }
    CHECK(log.w[999] == 0.0);
    CHECK(log.w[1000] == doctest::Approx(0.2 * std::cos(0.1)));
}

TEST_CASE("coded and uncoded loops coincide without attacks") {
    Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const Loop loop = stable_loop(rng);
        const double dk = loop.controller.num().degree() == loop.controller.den().degree()
                              ? loop.controller.num().leading() / loop.controller.den().leading()
                              : 0;
        Scenario sc = loop_scenario(loop.plant, loop.controller, rng.coding(dk), 10, InitialState::zero);
        sc.dt = 1e-2;
        sc.reference = trial % 2 ? ReferenceSource::step(1) : ReferenceSource::sine(1, rng.uniform(0.1, 3));
        const SignalLog coded = simulate(sc);
        const SignalLog plain = simulate_baseline(loop.plant, loop.controller, sc.reference, sc.horizon, sc.dt);
        CHECK(max_abs_diff(coded.y, coded.ybar) <= 1e-6);
        CHECK(max_abs_diff(coded.u, coded.ubar) <= 1e-6);
        CHECK(max_abs_diff(coded.ybar, plain.ybar) <= 1e-6);
        CHECK(max_abs_diff(coded.ubar, plain.u) <= 1e-6);
    }
}

TEST_CASE("fourth-order convergence against the matrix exponential") {
    Scenario sc = loop_scenario(P1, Tf{Poly{1, 1}, Poly{2, 1}}, shear, 2, InitialState::zero);
    sc.reference = ReferenceSource::step(1);
    sc.dt = 0.02;
    const double coarse = rk4_terminal_error(sc);
    sc.dt = 0.01;
    const double fine = rk4_terminal_error(sc);
    CHECK(coarse > 1e-12);
    CHECK(coarse / fine == doctest::Approx(16).epsilon(3.0 / 16));
}

TEST_CASE("single rk4 step on a scalar ODE") {
    const auto f = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
    const Eigen::VectorXd x1 = rk4_step(f, 0.0, Eigen::VectorXd(Eigen::VectorXd::Ones(1)), 0.1);
    const double h = 0.1;
    CHECK(x1(0) == doctest::Approx(1 - h + h * h / 2 - h * h * h / 6 + h * h * h * h / 24).epsilon(1e-15));
}

TEST_CASE("grid and divergence handling") {
    Scenario bad = loop_scenario(P1, K1, shear, 1, InitialState::zero);
    bad.dt = 0.05;
    CHECK_THROWS_WITH_AS(simulate(bad), doctest::Contains("horizon / 100"), DomainError);

    Scenario unstable = loop_scenario(P2, Tf::constant(0.5), TwoWayCoding::identity(), 4000, InitialState::zero);
    unstable.reference = ReferenceSource::step(1);
    unstable.dt = 0.5;
    const SignalLog log = simulate(unstable);
    REQUIRE(log.divergence_time.has_value());
    CHECK(*log.divergence_time > 1000);
    CHECK(*log.divergence_time < 4000);
    CHECK(log.size() < 8001);
    REQUIRE_FALSE(log.notes.empty());
    CHECK(log.notes.back().rfind("divergence at t=", 0) == 0);
}

TEST_CASE("scattering coding keeps a passive loop bounded") {
    Scenario sc = loop_scenario(Tf{Poly{1}, Poly{1, 1}}, K1, catalog(CodingKind::scattering, {.gamma = 2}), 50,
                                InitialState::zero);
    sc.reference = ReferenceSource::sine(1, 1.3);
    const SignalLog log = simulate(sc);
    CHECK_FALSE(log.divergence_time);
    for (std::size_t c = 1; c < SignalLog::column_names.size(); ++c)
        for (double v : log.column(c)) CHECK(std::abs(v) < 10);
}

TEST_CASE("frequency-domain cross-validation") {
    Scenario sc = loop_scenario(P1, K1, shear, 60, InitialState::zero);
    sc.reference = ReferenceSource::sine(1, 0.7);
    const ClosedLoopMaps maps = closed_loop_maps(P1, K1, shear);
    const auto ref = crossvalidate(sc, maps);
    CHECK(ref.pass);
    CHECK(ref.channels.size() == 3);
    CHECK(ref.max_relative_error < 0.01);

    Scenario attacked = loop_scenario(P1, K1, shear, 30, InitialState::zero);
    attacked.injections.push_back({InjectionPoint::feedback_z, ExpSignal{cd(-0.1, 1.2), 1, 0.4, 0}});
    const auto atk = crossvalidate(attacked, maps);
    CHECK(atk.pass);

    Scenario step = sc;
    step.reference = ReferenceSource::step(1);
    CHECK_THROWS_AS(crossvalidate(step, maps), DomainError);
    CHECK_THROWS_AS(crossvalidate(sc, closed_loop_maps(P2, Tf::constant(0.5), TwoWayCoding::identity())), DomainError);
}

TEST_CASE("identity coding reproduces the uncoded loop") {
    Scenario sc = loop_scenario(P1, Tf{Poly{1, 1}, Poly{2, 1}}, TwoWayCoding::identity(), 20, InitialState::zero);
    sc.reference = ReferenceSource::sine(1, 0.7, 0.2);
    const SignalLog coded = simulate(sc);
    const SignalLog plain = simulate_baseline(sc.plant, sc.controller, sc.reference, sc.horizon, sc.dt);
    for (std::vector<double> SignalLog::*col : {&SignalLog::u, &SignalLog::q, &SignalLog::qbar, &SignalLog::ubar, &SignalLog::ybar,
                            &SignalLog::vbar, &SignalLog::v, &SignalLog::y})
        CHECK(max_abs_diff(coded.*col, plain.*col) < 1e-8);
}

TEST_CASE("aligned initial state removes the transient of a decaying injection") {
    Scenario sc = loop_scenario(P1, K1, shear, 10);
    sc.injections.push_back({InjectionPoint::forward_w, ExpSignal{cd(-0.5, 1), 0.3, 0.2, 0}});
    const SignalLog log = simulate(sc);
    const ClosedLoopMaps maps = closed_loop_maps(P1, K1, shear);
    const ExpSignal& sig = sc.injections[0].signal;
    for (std::size_t k = 0; k < log.size(); k += 997) {
        const double t = log.t[k];
        const double expect = (maps.w_to_y(sig.mode) * sig.phasor() * std::exp(sig.mode * t)).real();
        CHECK(std::abs(log.y[k] - expect) < 1e-9);
    }

    Scenario resonant = loop_scenario(P2, K2, TwoWayCoding::identity(), 5);
    resonant.injections.push_back({InjectionPoint::feedback_z, ExpSignal{-1, 1, 0, 0}});
    const SignalLog rl = simulate(resonant);
    REQUIRE_FALSE(rl.notes.empty());
    CHECK(rl.notes.front().find("closed-loop eigenvalue") != std::string::npos);
    CHECK(rl.ybar.front() == 0.0);
}
