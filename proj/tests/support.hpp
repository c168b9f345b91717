#pragma once

// Independent oracles and random generators shared by the unit tests and the
// acceptance binary. Nothing here calls into the library's root finder or
// closed-loop algebra.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "twoway/coding.hpp"
#include "twoway/lti.hpp"
#include "twoway/poly.hpp"

namespace twoway::testing {

using cd = std::complex<double>;

inline cd horner(const std::vector<double>& c, cd s) {
    cd acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

/// Weierstrass / Durand-Kerner simultaneous iteration.
inline std::vector<cd> durand_kerner(std::vector<double> c, int iterations = 2000) {
    while (c.size() > 1 && c.back() == 0) c.pop_back();
    const std::size_t n = c.size() - 1;
    const double lead = c.back();
    for (double& x : c) x /= lead;
    double radius = 0;
    for (std::size_t k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[k]));
    radius = 1 + radius;
    std::vector<cd> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(0.5 * radius, 0.4 + 2 * M_PI * double(k) / double(n));
    for (int it = 0; it < iterations; ++it) {
        double moved = 0;
        for (std::size_t i = 0; i < n; ++i) {
            cd den = 1;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            const cd step = horner(c, z[i]) / den;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-15) break;
    }
    return z;
}

inline double max_real(const std::vector<cd>& z) {
    double m = -INFINITY;
    for (const cd& x : z) m = std::max(m, x.real());
    return m;
}

/// Largest distance from a point of `x` to its nearest unused partner in `y`
/// (greedy matching); infinity when the sizes differ.
inline double multiset_distance(std::vector<cd> x, std::vector<cd> y) {
    if (x.size() != y.size()) return INFINITY;
    double worst = 0;
    for (const cd& p : x) {
        auto best = std::min_element(y.begin(), y.end(),
                                     [&](const cd& u, const cd& v) { return std::abs(u - p) < std::abs(v - p); });
        worst = std::max(worst, std::abs(*best - p));
        y.erase(best);
    }
    return worst;
}

inline double min_pair_distance(const std::vector<cd>& x, const std::vector<cd>& y) {
    double best = INFINITY;
    for (const cd& p : x)
        for (const cd& q : y) best = std::min(best, std::abs(p - q));
    return best;
}

struct WiringSolution {
    cd u, q, qbar, ubar, ybar, vbar, v, y;
};

/// Solves every wiring equation of the coded loop at one complex frequency:
/// u = K (r - y), [q; y] = M [u; v], qbar = q + w, [ubar; vbar] = M^-1 [qbar; ybar],
/// ybar = P ubar, v = vbar + z.
inline WiringSolution solve_wiring(cd p, cd k, const TwoWayCoding& m, cd r, cd w, cd z) {
    const double a = m.a(), b = m.b(), c = m.c(), d = m.d(), dl = m.delta();
    // unknowns: u q qbar ubar ybar vbar v y
    Eigen::Matrix<cd, 8, 8> A = Eigen::Matrix<cd, 8, 8>::Zero();
    Eigen::Matrix<cd, 8, 1> rhs = Eigen::Matrix<cd, 8, 1>::Zero();
    A(0, 0) = 1;  A(0, 7) = k;  rhs(0) = k * r;
    A(1, 1) = 1;  A(1, 0) = -a; A(1, 6) = -b;
    A(2, 7) = 1;  A(2, 0) = -c; A(2, 6) = -d;
    A(3, 2) = 1;  A(3, 1) = -1; rhs(3) = w;
    A(4, 3) = 1;  A(4, 2) = -d / dl; A(4, 4) = b / dl;
    A(5, 5) = 1;  A(5, 2) = c / dl;  A(5, 4) = -a / dl;
    A(6, 4) = 1;  A(6, 3) = -p;
    A(7, 6) = 1;  A(7, 5) = -1; rhs(7) = z;
    const Eigen::Matrix<cd, 8, 1> x = A.fullPivLu().solve(rhs);
    return {x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7)};
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    cd point(double r = 3) { return {uniform(-r, r), uniform(-r, r)}; }
    std::mt19937_64& engine() { return gen_; }

    std::vector<double> coeffs(int degree, double lo = -3, double hi = 3) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1);
        for (double& x : c) x = uniform(lo, hi);
        if (std::abs(c.back()) < 0.2) c.back() = c.back() < 0 ? -0.2 : 0.2;
        return c;
    }

    Poly poly(int degree) { return Poly::from_vector(coeffs(degree)); }

    /// Real roots and conjugate pairs with real parts in [re_lo, re_hi].
    std::vector<cd> root_set(int degree, double re_lo, double re_hi) {
        std::vector<cd> r;
        while (static_cast<int>(r.size()) < degree) {
            const double re = uniform(re_lo, re_hi);
            if (degree - static_cast<int>(r.size()) >= 2 && uniform(0, 1) < 0.5) {
                const double im = uniform(0.1, 2.0);
                r.emplace_back(re, im);
                r.emplace_back(re, -im);
            } else {
                r.emplace_back(re, 0);
            }
        }
        return r;
    }

    /// Strictly proper coprime plant with deg den in [1, max_degree].
    Tf plant(int max_degree = 3) {
        for (;;) {
            const int n = integer(1, max_degree);
            const Poly den = Poly::from_roots(root_set(n, -3, 1.5), uniform(0.5, 2));
            const Poly num = poly(integer(0, n - 1));
            if (coprime(num, den, 1e-3)) return {num, den};
        }
    }

    TwoWayCoding coding(double controller_feedthrough = 0, double margin = 0.2) {
        for (;;) {
            const double a = uniform(-2, 2), b = uniform(-2, 2), c = uniform(-2, 2), d = uniform(-2, 2);
            if (std::abs(a * d) > margin && std::abs(a * d - b * c) > margin &&
                std::abs(1 + c * controller_feedthrough) > margin)
                return TwoWayCoding::make(a, b, c, d);
        }
    }

private:
    std::mt19937_64 gen_;
};

struct Loop {
    Tf plant;
    Tf controller;
};

/// Plant and proper controller (static or first order) whose characteristic
/// polynomial has every root left of -stability_margin.
inline Loop stable_loop(Rng& rng, int max_degree = 3, double stability_margin = 0.1) {
    for (;;) {
        const Tf p = rng.plant(max_degree);
        Tf k = Tf::constant(rng.uniform(-3, 3));
        if (rng.uniform(0, 1) < 0.5) k = Tf(Poly{rng.uniform(-2, 2), rng.uniform(-2, 2)}, Poly{rng.uniform(0.5, 3), 1});
        const Poly chi = k.den() * p.den() + k.num() * p.num();
        if (chi.degree() < 1) continue;
        if (max_real(durand_kerner(chi.to_vector())) < -stability_margin) return {p, k};
    }
}

}  // namespace twoway::testing
