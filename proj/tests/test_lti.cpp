#include <doctest.h>

#include "support.hpp"
#include "twoway/error.hpp"
#include "twoway/lti.hpp"

using namespace twoway;
using namespace twoway::testing;

namespace {

const Tf P1{Poly{-1, 1}, Poly{2, 3, 1}};
const Tf P2{Poly{1}, Poly{-1, 1}};

double rel(cd x, cd y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); }

}  // namespace

TEST_CASE("construction rejects a zero denominator") {
    CHECK_THROWS_AS(Tf(Poly{1}, Poly{0}), DomainError);
}

TEST_CASE("evaluation") {
    CHECK(tf_eval(P1, cd(0)) == cd(-0.5));
    CHECK(std::abs(P1(cd(1))) == 0.0);
    CHECK_THROWS_WITH_AS(P2(cd(1)), doctest::Contains("pole at evaluation point"), DomainError);
}

TEST_CASE("arithmetic") {
    const Tf one = Tf::constant(1);
    const Tf loop = one + Tf::constant(1) * P1;
    CHECK(loop.num() == Poly{1, 4, 1});
    CHECK(loop.den() == Poly{2, 3, 1});
    Rng rng(21);
    for (int k = 0; k < 3; ++k) {
        const cd s = rng.point();
        CHECK(rel(loop(s), 1.0 + (s - 1.0) / (s * s + 3.0 * s + 2.0)) < 1e-12);
        CHECK(rel((P1 * (one / P1))(s), 1.0) < 1e-12);
        CHECK(rel((P1 + Tf::constant(0))(s), P1(s)) < 1e-12);
        CHECK(rel(tf_arith(P1, P2, TfOp::sub)(s), P1(s) - P2(s)) < 1e-12);
        CHECK(rel(tf_arith(P1, P2, TfOp::div)(s), P1(s) / P2(s)) < 1e-12);
    }
    CHECK_THROWS_AS(P1 / Tf::constant(0), DomainError);
    CHECK_THROWS_AS(tf_arith(P1, Tf(Poly{0}, Poly{1, 1}), TfOp::div), DomainError);
}

TEST_CASE("reduce cancels common factors and flags unstable ones") {
    const Tf g{Poly{-1, 1} * Poly{2, 1}, Poly{-1, 1} * Poly{3, 1}};
    const auto [r, rep] = reduce(g);
    CHECK(r.num()[0] / r.num()[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.den()[0] / r.den()[1] == doctest::Approx(3.0).epsilon(1e-12));
    REQUIRE(rep.cancelled.size() == 1);
    CHECK(std::abs(rep.cancelled[0].location - 1.0) < 1e-12);
    CHECK(rep.has_unstable_cancellation());

    const auto [same, empty] = reduce(P1);
    CHECK(same.num() == P1.num());
    CHECK(same.den() == P1.den());
    CHECK(empty.cancelled.empty());

    const Tf h{Poly{1, 1} * Poly{1, 1}, Poly{1, 1} * Poly{4, 1}};
    const auto [hr, hrep] = reduce(h);
    REQUIRE(hr.num().degree() == 1);
    CHECK(hr.num()[0] / hr.num()[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(hr.den()[0] / hr.den()[1] == doctest::Approx(4.0).epsilon(1e-10));
    REQUIRE(hrep.cancelled.size() == 1);
    CHECK_FALSE(hrep.has_unstable_cancellation());

    // complex pair
    const Poly pair{3, 2, 1};
    const auto [cr, crep] = reduce(Tf{pair * Poly{5, 1}, pair * Poly{-2, 1}});
    CHECK(cr.num().degree() == 1);
    CHECK(cr.den().degree() == 1);
    CHECK(crep.cancelled.size() == 2);
}

TEST_CASE("reduce preserves the value away from cancelled points") {
    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const auto common = rng.root_set(rng.integer(1, 2), -2, 2);
        const Poly f = Poly::from_roots(common);
        const Tf g{rng.poly(rng.integer(0, 3)) * f, rng.poly(rng.integer(1, 3)) * f};
        const auto [r, rep] = reduce(g);
        for (int k = 0; k < 10; ++k) {
            const cd s = rng.point();
            if (min_pair_distance({s}, durand_kerner(g.den().to_vector())) < 1e-2) continue;
            CHECK(std::abs(r(s) - g(s)) <= 1e-8 * std::max(1.0, std::abs(g(s))));
        }
    }
}

TEST_CASE("classification") {
    const auto c1 = classify(P1);
    CHECK(c1.stable);
    CHECK_FALSE(c1.minimum_phase);
    CHECK(c1.proper);
    CHECK(c1.relative_degree == 1);

    const auto c2 = classify(Tf{Poly{-3, -2, -1}, Poly{2, 3, 1}});
    CHECK(c2.stable);
    CHECK(c2.minimum_phase);
    CHECK(c2.relative_degree == 0);

    const auto c3 = classify(Tf::constant(-4));
    CHECK(c3.stable);
    CHECK(c3.minimum_phase);
    CHECK(c3.relative_degree == 0);

    CHECK_FALSE(classify(P2).stable);
    CHECK_FALSE(classify(Tf{Poly{0, 0, 1}, Poly{1, 1}}).proper);
}

TEST_CASE("stability classification is invariant under common scaling") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Tf g = rng.plant(4);
        const double k = rng.uniform(-5, 5);
        if (std::abs(k) < 0.1) continue;
        CHECK(classify(g).stable == classify(Tf{k * g.num(), k * g.den()}).stable);
        CHECK(classify(g).minimum_phase == classify(Tf{k * g.num(), k * g.den()}).minimum_phase);
    }
}

TEST_CASE("controllable canonical realization") {
    const StateSpaced ss = realize(P1);
    Eigen::Matrix2d a;
    a << 0, 1, -2, -3;
    CHECK(ss.A == a);
    CHECK(ss.B == Eigen::Vector2d(0, 1));
    CHECK(ss.C == Eigen::RowVector2d(-1, 1));
    CHECK(ss.D == 0.0);

    const StateSpaced k = realize(Tf::constant(2.5));
    CHECK(k.order() == 0);
    CHECK(k.D == 2.5);

    CHECK_THROWS_WITH_AS(realize(Tf{Poly{0, 0, 1}, Poly{1, 1}}), doctest::Contains("not realizable as proper state space"),
                         DomainError);

    const StateSpaced bi = realize(Tf{Poly{1, 2}, Poly{3, 4}});
    CHECK(bi.D == doctest::Approx(0.5));
}

TEST_CASE("realization matches the transfer function on the imaginary axis") {
    Rng rng(24);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.integer(1, 4);
        const Tf g{rng.poly(rng.integer(0, n)), Poly::from_roots(rng.root_set(n, -3, -0.1), rng.uniform(0.5, 2))};
        const StateSpaced ss = realize(g);
        for (int k = 0; k < 10; ++k) {
            const double w = rng.uniform(0, 10);
            const cd gw = freq_response(g, {w})[0];
            CHECK(std::abs(ss.transfer(cd(0, w)) - gw) <= 1e-8 * (1 + std::abs(gw)));
        }
        for (int k = 0; k < 5; ++k) {
            const cd s = rng.point();
            CHECK(std::abs(ss.transfer(s) - g(s)) <= 1e-8 * (1 + std::abs(g(s))));
        }
    }
}

TEST_CASE("frequency response") {
    const Tf lag{Poly{1}, Poly{1, 1}};
    const auto r = freq_response(lag, {0.0, 1.0});
    CHECK(std::abs(r[0] - 1.0) < 1e-15);
    CHECK(std::abs(r[1] - cd(0.5, -0.5)) < 1e-15);
    CHECK(std::abs(freq_response(P1, {0.0})[0] + 0.5) < 1e-15);
    CHECK_THROWS_WITH_AS(freq_response(Tf{Poly{1}, Poly{1, 0, 1}}, {1.0}), doctest::Contains("omega"), DomainError);
}
