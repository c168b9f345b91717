#pragma once

// SISO rational transfer functions and their controllable-canonical
// state-space realizations. Transfer functions are never reduced implicitly;
// `reduce` is the only operation that cancels common factors and it reports
// every cancellation it makes.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twoway/poly.hpp"

namespace twoway {

template <typename Scalar>
class RationalTf {
public:
    using Complex = std::complex<Scalar>;

    RationalTf() : num_(Polynomial<Scalar>{0}), den_(Polynomial<Scalar>{1}) {}

    RationalTf(Polynomial<Scalar> num, Polynomial<Scalar> den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw DomainError("transfer function denominator is the zero polynomial");
    }

    static RationalTf constant(Scalar k) { return {Polynomial<Scalar>{k}, Polynomial<Scalar>{1}}; }

    const Polynomial<Scalar>& num() const noexcept { return num_; }
    const Polynomial<Scalar>& den() const noexcept { return den_; }

    Complex operator()(const Complex& s) const {
        const Complex d = den_(s);
        if (std::abs(d) <= Scalar(1e-12) * den_.eval_scale(s))
            throw DomainError("pole at evaluation point s = " + format_complex(std::complex<double>(s)));
        return num_(s) / d;
    }

    bool is_proper() const { return num_.is_zero() || num_.degree() <= den_.degree(); }
    bool is_strictly_proper() const { return num_.is_zero() || num_.degree() < den_.degree(); }
    int relative_degree() const { return den_.degree() - (num_.is_zero() ? 0 : num_.degree()); }

    std::string to_string() const { return "(" + num_.to_string() + ") / (" + den_.to_string() + ")"; }

private:
    Polynomial<Scalar> num_;
    Polynomial<Scalar> den_;
};

using Tf = RationalTf<double>;

template <typename Scalar>
std::complex<Scalar> tf_eval(const RationalTf<Scalar>& g, const std::complex<Scalar>& s) {
    return g(s);
}

template <typename Scalar>
RationalTf<Scalar> operator+(const RationalTf<Scalar>& g, const RationalTf<Scalar>& h) {
    return {g.num() * h.den() + h.num() * g.den(), g.den() * h.den()};
}

template <typename Scalar>
RationalTf<Scalar> operator-(const RationalTf<Scalar>& g) {
    return {-g.num(), g.den()};
}

template <typename Scalar>
RationalTf<Scalar> operator-(const RationalTf<Scalar>& g, const RationalTf<Scalar>& h) {
    return {g.num() * h.den() - h.num() * g.den(), g.den() * h.den()};
}

template <typename Scalar>
RationalTf<Scalar> operator*(const RationalTf<Scalar>& g, const RationalTf<Scalar>& h) {
    return {g.num() * h.num(), g.den() * h.den()};
}

template <typename Scalar>
RationalTf<Scalar> operator/(const RationalTf<Scalar>& g, const RationalTf<Scalar>& h) {
    if (h.num().is_zero()) throw DomainError("division by the zero transfer function");
    return {g.num() * h.den(), g.den() * h.num()};
}

template <typename Scalar>
RationalTf<Scalar> operator*(Scalar k, const RationalTf<Scalar>& g) {
    return {k * g.num(), g.den()};
}

enum class TfOp { add, sub, mul, div };

template <typename Scalar>
RationalTf<Scalar> tf_arith(const RationalTf<Scalar>& g, const RationalTf<Scalar>& h, TfOp op) {
    switch (op) {
        case TfOp::add: return g + h;
        case TfOp::sub: return g - h;
        case TfOp::mul: return g * h;
        case TfOp::div: return g / h;
    }
    return g;
}

template <typename Scalar>
struct Cancellation {
    std::complex<Scalar> location;
    bool unstable = false;  ///< Re(location) >= 0: UNSTABLE_CANCELLATION
};

template <typename Scalar>
struct ReduceReport {
    std::vector<Cancellation<Scalar>> cancelled;
    bool has_unstable_cancellation() const {
        for (const auto& c : cancelled)
            if (c.unstable) return true;
        return false;
    }
};

namespace detail {

/// Replace clusters of nearly coincident roots by their centroid. A root of
/// multiplicity m is computed with error ~eps^(1/m) but the centroid of its
/// cluster is accurate to ~eps.
template <typename Scalar>
std::vector<std::complex<Scalar>> cluster_roots(std::vector<std::complex<Scalar>> rs, Scalar radius) {
    const std::size_t n = rs.size();
    std::vector<int> group(n, -1);
    int groups = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (group[i] >= 0) continue;
        group[i] = groups;
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t j = 0; j < n; ++j) {
                if (group[j] >= 0) continue;
                for (std::size_t k = 0; k < n; ++k) {
                    if (group[k] == groups && std::abs(rs[j] - rs[k]) <= radius * (1 + std::abs(rs[k]))) {
                        group[j] = groups;
                        grew = true;
                        break;
                    }
                }
            }
        }
        ++groups;
    }
    for (int g = 0; g < groups; ++g) {
        std::complex<Scalar> sum(0);
        int count = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (group[i] == g) {
                sum += rs[i];
                ++count;
            }
        const std::complex<Scalar> centroid = sum / Scalar(count);
        for (std::size_t i = 0; i < n; ++i)
            if (group[i] == g) rs[i] = centroid;
    }
    return rs;
}

/// Real polynomial prod (s - r) over a root list closed under conjugation.
template <typename Scalar>
Polynomial<Scalar> factor_of(const std::vector<std::complex<Scalar>>& rs) {
    return Polynomial<Scalar>::from_roots(rs);
}

}  // namespace detail

/// Cancel numerator/denominator root pairs closer than `tol`. The common
/// factor is divided out of both polynomials; every cancelled location is
/// reported and those in the closed right half-plane are flagged.
template <typename Scalar>
std::pair<RationalTf<Scalar>, ReduceReport<Scalar>> reduce(const RationalTf<Scalar>& g, Scalar tol = Scalar(1e-8)) {
    using Complex = std::complex<Scalar>;
    ReduceReport<Scalar> report;
    if (g.num().is_zero()) return {RationalTf<Scalar>(Polynomial<Scalar>{0}, Polynomial<Scalar>{1}), report};
    if (g.num().degree() == 0 || g.den().degree() == 0) return {g, report};

    constexpr Scalar cluster_radius = Scalar(1e-5);
    const auto zs = detail::cluster_roots(roots(g.num()), cluster_radius);
    const auto ps = detail::cluster_roots(roots(g.den()), cluster_radius);

    std::vector<bool> used(ps.size(), false);
    std::vector<Complex> common;
    for (const Complex& z : zs) {
        for (std::size_t j = 0; j < ps.size(); ++j) {
            if (used[j] || std::abs(z - ps[j]) > tol) continue;
            used[j] = true;
            const Complex at = (z + ps[j]) / Scalar(2);
            common.push_back(at);
            break;
        }
    }
    if (common.empty()) return {g, report};

    // Keep conjugate symmetry: drop any unpaired complex location.
    std::vector<Complex> symmetric;
    for (const Complex& c : common) {
        if (c.imag() == Scalar(0)) {
            symmetric.push_back(Complex(c.real(), 0));
            continue;
        }
        if (c.imag() > 0) {
            for (const Complex& d : common)
                if (d.imag() < 0 && std::abs(d - std::conj(c)) <= tol) {
                    const Complex avg((c.real() + d.real()) / 2, (c.imag() - d.imag()) / 2);
                    symmetric.push_back(avg);
                    symmetric.push_back(std::conj(avg));
                    break;
                }
        }
    }
    if (symmetric.empty()) return {g, report};

    const Polynomial<Scalar> factor = detail::factor_of(symmetric);
    const Polynomial<Scalar> num = divmod(g.num(), factor).first;
    const Polynomial<Scalar> den = divmod(g.den(), factor).first;
    for (const Complex& c : symmetric) report.cancelled.push_back({c, c.real() >= Scalar(0)});
    return {RationalTf<Scalar>(num, den), report};
}

template <typename Scalar>
struct Classification {
    bool stable = false;
    bool minimum_phase = false;
    bool proper = false;
    int relative_degree = 0;
};

/// Stability, minimum phase, properness and relative degree of an already
/// reduced transfer function.
template <typename Scalar>
Classification<Scalar> classify(const RationalTf<Scalar>& g) {
    Classification<Scalar> c;
    c.stable = g.den().degree() == 0 || is_hurwitz(g.den());
    c.minimum_phase = g.num().degree() == 0 || is_hurwitz(g.num());
    c.proper = g.is_proper();
    c.relative_degree = g.relative_degree();
    return c;
}

template <typename Scalar>
struct StateSpace {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

    Matrix A;
    Vector B;
    RowVector C;
    Scalar D = 0;

    Eigen::Index order() const { return A.rows(); }

    /// C (sI - A)^-1 B + D.
    std::complex<Scalar> transfer(const std::complex<Scalar>& s) const {
        using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
        using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
        if (order() == 0) return D;
        CMatrix m = -A.template cast<std::complex<Scalar>>();
        m.diagonal().array() += s;
        const CVector x = m.partialPivLu().solve(B.template cast<std::complex<Scalar>>());
        return (C.template cast<std::complex<Scalar>>() * x)(0) + D;
    }
};

using StateSpaced = StateSpace<double>;

/// Controllable canonical form. The realization has order deg(den) whether or
/// not the transfer function is reduced.
template <typename Scalar>
StateSpace<Scalar> realize(const RationalTf<Scalar>& g) {
    if (!g.is_proper()) throw DomainError("not realizable as proper state space: " + g.to_string());
    const int n = g.den().degree();
    const Scalar lead = g.den().leading();
    StateSpace<Scalar> ss;
    ss.D = n == g.num().degree() ? g.num().leading() / lead : Scalar(0);
    ss.A = StateSpace<Scalar>::Matrix::Zero(n, n);
    ss.B = StateSpace<Scalar>::Vector::Zero(n);
    ss.C = StateSpace<Scalar>::RowVector::Zero(n);
    if (n == 0) {
        ss.D = g.num()[0] / lead;
        return ss;
    }
    for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1;
    for (int k = 0; k < n; ++k) {
        ss.A(n - 1, k) = -g.den()[k] / lead;
        ss.C(k) = g.num()[k] / lead - ss.D * g.den()[k] / lead;
    }
    ss.B(n - 1) = 1;
    return ss;
}

/// g(j omega) for each omega; refuses frequencies within 1e-9 of a pole.
template <typename Scalar>
std::vector<std::complex<Scalar>> freq_response(const RationalTf<Scalar>& g, const std::vector<Scalar>& omegas) {
    std::vector<std::complex<Scalar>> poles;
    if (g.den().degree() >= 1) poles = roots(g.den());
    std::vector<std::complex<Scalar>> out;
    out.reserve(omegas.size());
    for (Scalar w : omegas) {
        const std::complex<Scalar> s(0, w);
        for (const auto& p : poles)
            if (std::abs(p - s) <= Scalar(1e-9))
                throw DomainError("pole on the imaginary axis at omega = " + std::to_string(static_cast<double>(w)));
        out.push_back(g(s));
    }
    return out;
}

}  // namespace twoway
