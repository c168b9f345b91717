#include "twoway/sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "twoway/rk4.hpp"

namespace twoway {

double ReferenceSource::operator()(double t) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::step: return t >= t_on ? amplitude : 0.0;
        case Kind::sine: return amplitude * std::sin(omega * t + phase);
    }
    return 0.0;
}

std::string to_string(ReferenceSource::Kind k) {
    switch (k) {
        case ReferenceSource::Kind::zero: return "zero";
        case ReferenceSource::Kind::step: return "step";
        case ReferenceSource::Kind::sine: return "sine";
    }
    return "?";
}

Interconnection::Interconnection(const Tf& plant, const Tf& controller, const TwoWayCoding& coding)
    : coding_(coding), inverse_(coding.inverse()) {
    if (!plant.is_strictly_proper())
        throw DomainError("algebraic loop through plant unsupported: plant must be strictly proper");
    plant_ = realize(plant);
    ctrl_ = realize(controller);

    const double a = coding.a(), b = coding.b(), c = coding.c(), d = coding.d();
    const double well_posed = 1 + c * ctrl_.D;
    if (std::abs(well_posed) <= 1e-9)
        throw DomainError("ill-posed interconnection: 1 + c D_K = 0 (the attacker's equivalent controller is improper)");

    // Unknowns (u, v):
    //   (1 + c D_K) u + d D_K v        = C_K x_K + D_K r
    //   -cbar a u    + (1 - cbar b) v  = cbar w + dbar ybar + z
    Eigen::Matrix2d s;
    s << well_posed, d * ctrl_.D, -inverse_.c() * a, 1 - inverse_.c() * b;
    if (std::abs(s.determinant()) <= 1e-12) throw DomainError("ill-posed interconnection: singular static system");
    static_inverse_ = s.inverse();
}

Interconnection assemble(const Tf& plant, const Tf& controller, const TwoWayCoding& coding) {
    return Interconnection(plant, controller, coding);
}

LoopSignals Interconnection::signals(const Vector& x, double r, double w, double z) const {
    const Eigen::Index nk = ctrl_.order();
    const Eigen::Index np = plant_.order();
    LoopSignals s;
    s.r = r;
    s.w = w;
    s.z = z;
    s.ybar = plant_.C.dot(x.segment(nk, np));
    const double controller_drive = ctrl_.C.dot(x.head(nk)) + ctrl_.D * r;
    const Eigen::Vector2d rhs(controller_drive, inverse_.c() * w + inverse_.d() * s.ybar + z);
    const Eigen::Vector2d uv = static_inverse_ * rhs;
    s.u = uv(0);
    s.q = coding_.a() * s.u + coding_.b() * uv(1);
    s.qbar = s.q + w;
    s.ubar = inverse_.a() * s.qbar + inverse_.b() * s.ybar;
    s.vbar = inverse_.c() * s.qbar + inverse_.d() * s.ybar;
    s.v = s.vbar + z;
    s.y = coding_.c() * s.u + coding_.d() * s.v;
    return s;
}

Interconnection::Vector Interconnection::derivative(const Vector& x, const LoopSignals& s) const {
    const Eigen::Index nk = ctrl_.order();
    const Eigen::Index np = plant_.order();
    Vector dx(nk + np);
    dx.head(nk) = ctrl_.A * x.head(nk) + ctrl_.B * (s.r - s.y);
    dx.segment(nk, np) = plant_.A * x.segment(nk, np) + plant_.B * s.ubar;
    return dx;
}

Interconnection::Vector Interconnection::derivative(const Vector& x, double r, double w, double z) const {
    return derivative(x, signals(x, r, w, z));
}

Interconnection::Linear Interconnection::linearize() const {
    const Eigen::Index n = order();
    const Vector zero = Vector::Zero(n);
    Linear lin;
    lin.A.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) lin.A.col(j) = derivative(Vector::Unit(n, j), 0, 0, 0);
    lin.Br = derivative(zero, 1, 0, 0);
    lin.Bw = derivative(zero, 0, 1, 0);
    lin.Bz = derivative(zero, 0, 0, 1);
    return lin;
}

const std::vector<double>& SignalLog::column(std::size_t i) const {
    const std::array<const std::vector<double>*, 13> cols{&t,    &r,    &u, &q, &qbar, &ubar, &ybar,
                                                          &vbar, &v,    &y, &w, &z,    &plant_state_norm};
    return *cols.at(i);
}

void SignalLog::push(double time, const LoopSignals& s, double state_norm) {
    t.push_back(time);
    r.push_back(s.r);
    u.push_back(s.u);
    q.push_back(s.q);
    qbar.push_back(s.qbar);
    ubar.push_back(s.ubar);
    ybar.push_back(s.ybar);
    vbar.push_back(s.vbar);
    v.push_back(s.v);
    y.push_back(s.y);
    w.push_back(s.w);
    z.push_back(s.z);
    plant_state_norm.push_back(state_norm);
}

namespace {

bool finite(const LoopSignals& s) {
    for (double v : {s.u, s.q, s.qbar, s.ubar, s.ybar, s.vbar, s.v, s.y, s.w, s.z})
        if (!std::isfinite(v)) return false;
    return true;
}

long step_count(double horizon, double dt) {
    if (!(dt > 0) || !(horizon > 0)) throw DomainError("horizon and dt must be positive");
    if (dt > horizon / 100 * (1 + 1e-12)) throw DomainError("dt must not exceed horizon / 100");
    return std::lround(horizon / dt);
}

double injected(const std::vector<Injection>& injections, InjectionPoint point, double t) {
    double sum = 0;
    for (const auto& inj : injections)
        if (inj.point == point) sum += inj.signal(t);
    return sum;
}

std::string divergence_note(double t) {
    std::ostringstream os;
    os << "divergence at t=" << t;
    return os.str();
}

}  // namespace

Eigen::VectorXd aligned_initial_state(const Interconnection& loop, const std::vector<Injection>& injections,
                                      std::vector<std::string>* skipped) {
    const Eigen::Index n = loop.order();
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
    if (n == 0) return x0;
    const auto lin = loop.linearize();
    const Eigen::VectorXcd eig = lin.A.eigenvalues();
    for (const auto& inj : injections) {
        const std::complex<double> s0 = inj.signal.mode;
        if (inj.signal.start != 0) {
            if (skipped) skipped->push_back("injection starting at t=" + std::to_string(inj.signal.start) +
                                            " not aligned (only t=0 injections are)");
            continue;
        }
        bool resonant = false;
        for (Eigen::Index i = 0; i < eig.size(); ++i)
            if (std::abs(eig(i) - s0) <= 1e-8 * (1 + std::abs(eig(i)))) resonant = true;
        if (resonant) {
            if (skipped) skipped->push_back("mode " + format_complex(s0) + " is a closed-loop eigenvalue; not aligned");
            continue;
        }
        Eigen::MatrixXcd m = -lin.A.cast<std::complex<double>>();
        m.diagonal().array() += s0;
        const Eigen::VectorXd& b = inj.point == InjectionPoint::forward_w ? lin.Bw : lin.Bz;
        const Eigen::VectorXcd x = m.partialPivLu().solve(b.cast<std::complex<double>>() * inj.signal.phasor());
        x0 += x.real();
    }
    return x0;
}

SignalLog simulate(const Scenario& sc) {
    const Interconnection loop = assemble(sc.plant, sc.controller, sc.coding);
    const long steps = step_count(sc.horizon, sc.dt);
    const Eigen::Index nk = loop.controller_order();
    const Eigen::Index np = loop.plant_order();

    SignalLog log;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(loop.order());
    if (sc.initial_state == InitialState::attack_aligned) x = aligned_initial_state(loop, sc.injections, &log.notes);

    auto w_at = [&](double t) { return injected(sc.injections, InjectionPoint::forward_w, t); };
    auto z_at = [&](double t) { return injected(sc.injections, InjectionPoint::feedback_z, t); };

    double r_now = sc.reference(0.0);
    log.push(0.0, loop.signals(x, r_now, w_at(0.0), z_at(0.0)), x.segment(nk, np).norm());
    for (long k = 0; k < steps; ++k) {
        const double t = k * sc.dt;
        const double t_next = (k + 1) * sc.dt;
        const double r_next = sc.reference(t_next);
        const FirstOrderHold hold{t, sc.dt, r_now, r_next};
        auto f = [&](double tau, const Eigen::VectorXd& state) {
            return loop.derivative(state, hold(tau), w_at(tau), z_at(tau));
        };
        x = rk4_step(f, t, x, sc.dt);
        const LoopSignals s = loop.signals(x, r_next, w_at(t_next), z_at(t_next));
        if (!x.allFinite() || !finite(s)) {
            log.divergence_time = t_next;
            log.notes.push_back(divergence_note(t_next));
            break;
        }
        log.push(t_next, s, x.segment(nk, np).norm());
        r_now = r_next;
    }
    return log;
}

SignalLog simulate_baseline(const Tf& plant, const Tf& controller, const ReferenceSource& reference, double horizon,
                            double dt) {
    if (!plant.is_strictly_proper()) throw DomainError("baseline loop needs a strictly proper plant");
    const StateSpaced p = realize(plant);
    const StateSpaced k = realize(controller);
    const long steps = step_count(horizon, dt);
    const Eigen::Index nk = k.order();
    const Eigen::Index np = p.order();

    auto signals = [&](const Eigen::VectorXd& x, double r) {
        LoopSignals s;
        s.r = r;
        s.ybar = p.C.dot(x.segment(nk, np));
        s.y = s.v = s.vbar = s.ybar;
        s.u = k.C.dot(x.head(nk)) + k.D * (r - s.ybar);
        s.q = s.qbar = s.ubar = s.u;
        return s;
    };
    auto derivative = [&](const Eigen::VectorXd& x, double r) {
        const LoopSignals s = signals(x, r);
        Eigen::VectorXd dx(nk + np);
        dx.head(nk) = k.A * x.head(nk) + k.B * (r - s.y);
        dx.segment(nk, np) = p.A * x.segment(nk, np) + p.B * s.u;
        return dx;
    };

    SignalLog log;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nk + np);
    double r_now = reference(0.0);
    log.push(0.0, signals(x, r_now), 0.0);
    for (long i = 0; i < steps; ++i) {
        const double t = i * dt;
        const double t_next = (i + 1) * dt;
        const double r_next = reference(t_next);
        const FirstOrderHold hold{t, dt, r_now, r_next};
        x = rk4_step([&](double tau, const Eigen::VectorXd& st) { return derivative(st, hold(tau)); }, t, x, dt);
        const LoopSignals s = signals(x, r_next);
        if (!x.allFinite() || !finite(s)) {
            log.divergence_time = t_next;
            log.notes.push_back(divergence_note(t_next));
            break;
        }
        log.push(t_next, s, x.segment(nk, np).norm());
        r_now = r_next;
    }
    return log;
}

namespace {

/// Least-squares fit of samples to Re(X e^{s0 t}).
std::complex<double> fit_mode(const std::vector<double>& t, const std::vector<double>& y, std::size_t from,
                              std::complex<double> s0) {
    const std::size_t n = t.size() - from;
    const bool oscillating = s0.imag() != 0;
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), oscillating ? 2 : 1);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = t[from + i];
        const double env = std::exp(s0.real() * ti);
        const auto row = static_cast<Eigen::Index>(i);
        basis(row, 0) = env * std::cos(s0.imag() * ti);
        if (oscillating) basis(row, 1) = -env * std::sin(s0.imag() * ti);
        rhs(row) = y[from + i];
    }
    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(rhs);
    return {coef(0), oscillating ? coef(1) : 0.0};
}

}  // namespace

CrossvalidationReport crossvalidate(const Scenario& sc, const ClosedLoopMaps& maps) {
    if (!maps.nominal_stable) throw DomainError("cross-validation needs a stable closed loop");

    LoopInput input;
    std::complex<double> s0;
    std::complex<double> phasor;
    if (sc.injections.empty()) {
        if (sc.reference.kind != ReferenceSource::Kind::sine)
            throw DomainError("cross-validation of the reference channel needs a sine reference");
        input = LoopInput::r;
        s0 = {0, sc.reference.omega};
        phasor = sc.reference.amplitude * std::polar(1.0, sc.reference.phase - std::numbers::pi / 2);
    } else {
        if (sc.injections.size() != 1 || sc.reference.kind != ReferenceSource::Kind::zero)
            throw DomainError("cross-validation of an attack channel needs one injection and a zero reference");
        const Injection& inj = sc.injections.front();
        if (inj.signal.mode.real() > 0) throw DomainError("cross-validation needs Re(s0) <= 0");
        input = inj.point == InjectionPoint::forward_w ? LoopInput::w : LoopInput::z;
        s0 = inj.signal.mode;
        phasor = inj.signal.phasor();
    }

    const SignalLog log = simulate(sc);
    if (log.divergence_time) throw DomainError("cross-validation run diverged");
    std::size_t from = 0;
    while (from < log.size() && log.t[from] < sc.horizon * 2 / 3) ++from;

    CrossvalidationReport report;
    report.pass = true;
    const std::array<std::pair<LoopOutput, const std::vector<double>*>, 3> outputs{
        {{LoopOutput::ybar, &log.ybar}, {LoopOutput::y, &log.y}, {LoopOutput::ubar, &log.ubar}}};
    for (const auto& [output, series] : outputs) {
        ChannelCheck check;
        check.input = input;
        check.output = output;
        check.predicted = maps.channel(input, output)(s0) * phasor;
        check.measured = fit_mode(log.t, *series, from, s0);
        const double ref = std::abs(check.predicted);
        if (ref <= 1e-9 * std::abs(phasor)) {
            check.amplitude_error = std::abs(check.measured) / std::abs(phasor);
            check.phase_error = 0;
            check.pass = check.amplitude_error < 0.01;
        } else {
            check.amplitude_error = std::abs(std::abs(check.measured) - ref) / ref;
            check.phase_error = std::abs(std::arg(check.measured / check.predicted));
            check.pass = check.amplitude_error < 0.01 && check.phase_error < 0.01;
            report.max_relative_error = std::max(report.max_relative_error, std::abs(check.measured - check.predicted) / ref);
        }
        report.pass = report.pass && check.pass;
        report.channels.push_back(check);
    }
    return report;
}

}  // namespace twoway
