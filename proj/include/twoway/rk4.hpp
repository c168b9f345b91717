#pragma once

#include <Eigen/Core>

namespace twoway {

/// One classical Runge-Kutta step of dx/dt = f(t, x).
template <typename State, typename Deriv>
State rk4_step(const Deriv& f, double t, const State& x, double dt) {
    const State k1 = f(t, x);
    const State k2 = f(t + dt / 2, State(x + (dt / 2) * k1));
    const State k3 = f(t + dt / 2, State(x + (dt / 2) * k2));
    const State k4 = f(t + dt, State(x + dt * k3));
    return x + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Input held linearly between two grid samples; the value RK4 sees at the
/// midpoint stages is the average of the endpoints.
struct FirstOrderHold {
    double t0, dt, v0, v1;
    double operator()(double t) const { return v0 + (v1 - v0) * ((t - t0) / dt); }
};

}  // namespace twoway
