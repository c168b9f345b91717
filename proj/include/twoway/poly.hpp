#pragma once

// Real polynomials with ascending coefficient storage, root finding through
// the balanced companion matrix, and the Routh-Hurwitz test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twoway/error.hpp"

namespace twoway {

template <typename Scalar>
class Polynomial {
public:
    using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Complex = std::complex<Scalar>;

    /// Coefficients at or below this fraction of the largest one are trimmed
    /// from the leading end.
    static constexpr Scalar trim_tolerance = Scalar(1e-12);

    Polynomial() : coeffs_(Coeffs::Zero(1)) {}

    explicit Polynomial(Coeffs coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

    Polynomial(std::initializer_list<Scalar> ascending)
        : coeffs_(static_cast<Eigen::Index>(ascending.size())) {
        Eigen::Index k = 0;
        for (Scalar c : ascending) coeffs_(k++) = c;
        normalize();
    }

    static Polynomial from_vector(const std::vector<Scalar>& ascending) {
        Coeffs c(static_cast<Eigen::Index>(ascending.size()));
        for (std::size_t k = 0; k < ascending.size(); ++k) c(static_cast<Eigen::Index>(k)) = ascending[k];
        return Polynomial(std::move(c));
    }

    static Polynomial constant(Scalar c) { return Polynomial{c}; }

    /// Monic-times-gain polynomial with the given roots. Complex roots are
    /// expected in conjugate pairs; the imaginary residue of the product is
    /// discarded.
    static Polynomial from_roots(const std::vector<Complex>& roots, Scalar gain = Scalar(1)) {
        std::vector<Complex> acc{Complex(1)};
        for (const Complex& r : roots) {
            std::vector<Complex> next(acc.size() + 1, Complex(0));
            for (std::size_t k = 0; k < acc.size(); ++k) {
                next[k + 1] += acc[k];
                next[k] -= r * acc[k];
            }
            acc = std::move(next);
        }
        Coeffs c(static_cast<Eigen::Index>(acc.size()));
        for (std::size_t k = 0; k < acc.size(); ++k) c(static_cast<Eigen::Index>(k)) = gain * acc[k].real();
        return Polynomial(std::move(c));
    }

    const Coeffs& coeffs() const noexcept { return coeffs_; }
    std::vector<Scalar> to_vector() const { return {coeffs_.data(), coeffs_.data() + coeffs_.size()}; }

    /// Degree; the zero polynomial reports 0 like any other constant.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    Scalar operator[](int k) const { return k >= 0 && k <= degree() ? coeffs_(k) : Scalar(0); }
    Scalar leading() const { return coeffs_(coeffs_.size() - 1); }
    bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_(0) == Scalar(0); }
    bool is_constant() const noexcept { return coeffs_.size() == 1; }
    Scalar norm() const { return coeffs_.norm(); }

    template <typename T>
    auto operator()(const T& s) const {
        using R = decltype(Scalar() * s);
        R acc = R(0);
        for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * s + coeffs_(k);
        return acc;
    }

    /// Sum of |c_k| |s|^k: the magnitude scale of an evaluation at s.
    Scalar eval_scale(const Complex& s) const {
        Scalar acc = 0;
        const Scalar r = std::abs(s);
        for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * r + std::abs(coeffs_(k));
        return acc;
    }

    Polynomial derivative() const {
        if (degree() == 0) return Polynomial{};
        Coeffs c(degree());
        for (int k = 1; k <= degree(); ++k) c(k - 1) = Scalar(k) * coeffs_(k);
        return Polynomial(std::move(c));
    }

    std::string to_string(const std::string& var = "s") const;

    friend bool operator==(const Polynomial& p, const Polynomial& q) { return p.coeffs_ == q.coeffs_; }

private:
    void normalize() {
        if (coeffs_.size() == 0) coeffs_ = Coeffs::Zero(1);
        if (!coeffs_.allFinite()) throw DomainError("polynomial coefficients must be finite");
        const Scalar biggest = coeffs_.cwiseAbs().maxCoeff();
        if (biggest == Scalar(0)) {
            coeffs_ = Coeffs::Zero(1);
            return;
        }
        Eigen::Index n = coeffs_.size();
        while (n > 1 && std::abs(coeffs_(n - 1)) <= trim_tolerance * biggest) --n;
        coeffs_.conservativeResize(n);
    }

    Coeffs coeffs_;
};

using Poly = Polynomial<double>;

template <typename Scalar>
Polynomial<Scalar> operator+(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
    const Eigen::Index n = std::max(p.coeffs().size(), q.coeffs().size());
    typename Polynomial<Scalar>::Coeffs c = Polynomial<Scalar>::Coeffs::Zero(n);
    c.head(p.coeffs().size()) += p.coeffs();
    c.head(q.coeffs().size()) += q.coeffs();
    return Polynomial<Scalar>(std::move(c));
}

template <typename Scalar>
Polynomial<Scalar> operator-(const Polynomial<Scalar>& p) {
    return Polynomial<Scalar>(typename Polynomial<Scalar>::Coeffs(-p.coeffs()));
}

template <typename Scalar>
Polynomial<Scalar> operator-(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
    return p + (-q);
}

template <typename Scalar>
Polynomial<Scalar> operator*(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q) {
    const auto& a = p.coeffs();
    const auto& b = q.coeffs();
    typename Polynomial<Scalar>::Coeffs c = Polynomial<Scalar>::Coeffs::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j) c(i + j) += a(i) * b(j);
    return Polynomial<Scalar>(std::move(c));
}

template <typename Scalar>
Polynomial<Scalar> operator*(Scalar k, const Polynomial<Scalar>& p) {
    return Polynomial<Scalar>(typename Polynomial<Scalar>::Coeffs(k * p.coeffs()));
}

template <typename Scalar>
Polynomial<Scalar> operator*(const Polynomial<Scalar>& p, Scalar k) {
    return k * p;
}

/// Long division: p = quotient * q + remainder.
template <typename Scalar>
std::pair<Polynomial<Scalar>, Polynomial<Scalar>> divmod(const Polynomial<Scalar>& p,
                                                         const Polynomial<Scalar>& q) {
    if (q.is_zero()) throw DomainError("polynomial division by zero");
    using Coeffs = typename Polynomial<Scalar>::Coeffs;
    const int dp = p.degree();
    const int dq = q.degree();
    if (dp < dq) return {Polynomial<Scalar>{}, p};
    Coeffs rem = p.coeffs();
    Coeffs quot = Coeffs::Zero(dp - dq + 1);
    for (int k = dp - dq; k >= 0; --k) {
        const Scalar f = rem(k + dq) / q.leading();
        quot(k) = f;
        for (int j = 0; j <= dq; ++j) rem(k + j) -= f * q.coeffs()(j);
    }
    Coeffs r = dq > 0 ? Coeffs(rem.head(dq)) : Coeffs::Zero(1);
    return {Polynomial<Scalar>(std::move(quot)), Polynomial<Scalar>(std::move(r))};
}

template <typename Scalar, typename T>
auto poly_eval(const Polynomial<Scalar>& p, const T& s) {
    return p(s);
}

namespace detail {

/// In-place diagonal similarity balancing (radix 2) so that row and column
/// norms of the off-diagonal part are comparable.
template <typename Matrix>
void balance(Matrix& a) {
    using Scalar = typename Matrix::Scalar;
    const Eigen::Index n = a.rows();
    constexpr Scalar radix = 2;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar c = a.col(i).cwiseAbs().sum() - std::abs(a(i, i));
            Scalar r = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
            if (c == 0 || r == 0) continue;
            const Scalar s = c + r;
            Scalar f = 1;
            Scalar g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c >= g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < Scalar(0.95) * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

template <typename Scalar>
std::complex<Scalar> newton_polish(const Polynomial<Scalar>& p, const Polynomial<Scalar>& dp,
                                   std::complex<Scalar> z) {
    Scalar best = std::abs(p(z));
    for (int it = 0; it < 4 && best > 0; ++it) {
        const std::complex<Scalar> d = dp(z);
        if (d == std::complex<Scalar>(0)) break;
        const std::complex<Scalar> next = z - p(z) / d;
        const Scalar res = std::abs(p(next));
        if (!(res < best)) break;
        z = next;
        best = res;
    }
    return z;
}

}  // namespace detail

/// All deg(p) roots with multiplicity, sorted by real part then imaginary
/// part. Complex roots are returned as exact conjugate pairs.
template <typename Scalar>
std::vector<std::complex<Scalar>> roots(const Polynomial<Scalar>& p) {
    using Complex = std::complex<Scalar>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (p.degree() < 1) throw DomainError("no roots defined for a constant or zero polynomial");

    const auto& c = p.coeffs();
    int zeros_at_origin = 0;
    while (c(zeros_at_origin) == Scalar(0)) ++zeros_at_origin;

    std::vector<Complex> out(static_cast<std::size_t>(zeros_at_origin), Complex(0));
    const int n = p.degree() - zeros_at_origin;
    if (n > 0) {
        Matrix companion = Matrix::Zero(n, n);
        for (int i = 1; i < n; ++i) companion(i, i - 1) = 1;
        for (int i = 0; i < n; ++i) companion(i, n - 1) = -c(zeros_at_origin + i) / p.leading();
        detail::balance(companion);
        Eigen::EigenSolver<Matrix> solver(companion, false);
        if (solver.info() != Eigen::Success) throw DomainError("companion eigenvalue iteration did not converge");
        const Polynomial<Scalar> dp = p.derivative();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex z = solver.eigenvalues()(i);
            if (z.imag() < 0) continue;
            if (z.imag() == Scalar(0)) {
                out.push_back(Complex(detail::newton_polish(p, dp, z).real(), 0));
            } else {
                const Complex polished = detail::newton_polish(p, dp, z);
                out.push_back(polished);
                out.push_back(std::conj(polished));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

template <typename Scalar>
Scalar max_real_part(const std::vector<std::complex<Scalar>>& rs) {
    Scalar m = -std::numeric_limits<Scalar>::infinity();
    for (const auto& r : rs) m = std::max(m, r.real());
    return m;
}

/// Routh array of a polynomial, first column kept for inspection.
template <typename Scalar>
struct RouthTable {
    std::vector<Scalar> first_column;
    int sign_changes = 0;
    bool epsilon_substituted = false;  ///< a zero pivot was replaced by +eps
    bool zero_row = false;             ///< an all-zero row forced the auxiliary polynomial
};

template <typename Scalar>
RouthTable<Scalar> routh_table(const Polynomial<Scalar>& p) {
    if (p.is_zero()) throw DomainError("Routh table of the zero polynomial");
    const int n = p.degree();
    const Scalar sign = p.leading() > 0 ? Scalar(1) : Scalar(-1);
    const std::size_t width = static_cast<std::size_t>(n / 2 + 1);
    const Scalar eps = std::sqrt(std::numeric_limits<Scalar>::epsilon()) * p.coeffs().cwiseAbs().maxCoeff();

    std::vector<std::vector<Scalar>> rows(static_cast<std::size_t>(n + 1), std::vector<Scalar>(width, Scalar(0)));
    for (int k = n, j = 0; k >= 0; k -= 2, ++j) rows[0][static_cast<std::size_t>(j)] = sign * p[k];
    for (int k = n - 1, j = 0; k >= 0; k -= 2, ++j) rows[1 % rows.size()][static_cast<std::size_t>(j)] = sign * p[k];

    RouthTable<Scalar> table;
    auto all_zero = [](const std::vector<Scalar>& row) {
        return std::all_of(row.begin(), row.end(), [](Scalar v) { return v == Scalar(0); });
    };
    auto fix_row = [&](std::size_t i) {
        auto& row = rows[i];
        if (all_zero(row)) {
            // Auxiliary polynomial from the row above, of degree n - i + 1 in
            // even or odd powers; replace by its derivative's coefficients.
            table.zero_row = true;
            const int aux_degree = n - static_cast<int>(i) + 1;
            const auto& above = rows[i - 1];
            for (std::size_t j = 0; j < width; ++j) {
                const int power = aux_degree - 2 * static_cast<int>(j);
                row[j] = power > 0 ? Scalar(power) * above[j] : Scalar(0);
            }
        }
        if (row[0] == Scalar(0)) {
            table.epsilon_substituted = true;
            row[0] = eps;
        }
    };

    if (n >= 1) fix_row(1);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        const auto& r0 = rows[i - 2];
        const auto& r1 = rows[i - 1];
        for (std::size_t j = 0; j + 1 < width; ++j) {
            const Scalar lhs = r1[0] * r0[j + 1];
            const Scalar rhs = r0[0] * r1[j + 1];
            const Scalar diff = lhs - rhs;
            const Scalar tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * (std::abs(lhs) + std::abs(rhs));
            rows[i][j] = std::abs(diff) <= tol ? Scalar(0) : diff / r1[0];
        }
        fix_row(i);
    }

    for (const auto& row : rows) table.first_column.push_back(row[0]);
    for (std::size_t i = 1; i < table.first_column.size(); ++i)
        if ((table.first_column[i] > 0) != (table.first_column[i - 1] > 0)) ++table.sign_changes;
    return table;
}

/// True iff every root lies in the open left half-plane, decided from the
/// Routh array alone.
template <typename Scalar>
bool is_hurwitz(const Polynomial<Scalar>& p) {
    if (p.is_zero()) throw DomainError("Hurwitz test of the zero polynomial");
    if (p.degree() < 1) throw DomainError("Hurwitz test needs degree >= 1");
    const RouthTable<Scalar> t = routh_table(p);
    return t.sign_changes == 0 && !t.epsilon_substituted && !t.zero_row;
}

/// No root of p within `tol` of a root of q. Constants share no roots.
template <typename Scalar>
bool coprime(const Polynomial<Scalar>& p, const Polynomial<Scalar>& q, Scalar tol = Scalar(1e-7)) {
    if (p.is_zero() || q.is_zero()) throw DomainError("coprimality test with the zero polynomial");
    if (p.degree() == 0 || q.degree() == 0) return true;
    const auto rp = roots(p);
    const auto rq = roots(q);
    for (const auto& a : rp)
        for (const auto& b : rq)
            if (std::abs(a - b) <= tol) return false;
    return true;
}

template <typename Scalar>
std::string Polynomial<Scalar>::to_string(const std::string& var) const {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Scalar c = coeffs_(k);
        if (c == Scalar(0) && !(k == 0 && first)) continue;
        const Scalar mag = std::abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        if (k == 0 || mag != Scalar(1)) os << mag;
        if (k >= 1) os << var;
        if (k >= 2) os << "^" << k;
        first = false;
    }
    return os.str();
}

inline std::string format_complex(const std::complex<double>& z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? " - j" : " + j") << std::abs(z.imag());
    return os.str();
}

}  // namespace twoway
