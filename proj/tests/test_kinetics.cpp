#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memdiff/kinetics.hpp"
#include "oracles.hpp"

using namespace memdiff;

TEST_CASE("positive steady state zeroes both reaction terms") {
    for (auto [a, b, c] : {std::array<double, 3>{1, 9, 3}, {1, 0.3, 0.1}, {1.7, 2.5, 0.8}}) {
        Kinetics kin = holling2(a, b, c);
        Equilibrium eq = holling2_equilibrium(a, b, c);
        CHECK(eq.u > 0);
        CHECK(eq.v > 0);
        CHECK(std::abs(kin.f(eq.u, eq.v)) < 1e-13);
        CHECK(std::abs(kin.g(eq.u, eq.v)) < 1e-13);
    }
}

TEST_CASE("steady state requires sufficient predation efficiency") {
    // b <= c(1+a)/a leaves no positive coexistence state
    CHECK_THROWS_AS(holling2_equilibrium(1.0, 0.2, 0.1), PreconditionViolated);
    CHECK_THROWS_AS(holling2_equilibrium(1.0, 3.0, 3.0), PreconditionViolated);
    CHECK_NOTHROW(holling2_equilibrium(1.0, 0.21, 0.1));
}

TEST_CASE("closed-form partials match an independent finite-difference oracle") {
    for (auto [a, b, c] : {std::array<double, 3>{1, 9, 3}, {1, 0.3, 0.1}, {1.7, 2.5, 0.8}}) {
        Kinetics kin = holling2(a, b, c);
        Equilibrium eq = holling2_equilibrium(a, b, c);
        for (auto [u, v] : {std::pair<double, double>{eq.u, eq.v}, {0.3, 1.1}, {0.8, 0.2}}) {
            Partials got = kin.partials(u, v);
            Partials want = oracle::fd_partials(kin, u, v);
            const double* xg = &got.f10;
            const double* xw = &want.f10;
            for (int i = 0; i < 18; ++i)
                CHECK(std::abs(xg[i] - xw[i]) < 1e-6 * (1 + std::abs(xw[i])));
        }
    }
}

TEST_CASE("built-in numeric partials agree with the closed form") {
    Kinetics kin = holling2(1, 9, 3);
    Partials a = kin.partials(0.4, 0.7);
    Partials b = kin.partials_numeric(0.4, 0.7);
    const double* xa = &a.f10;
    const double* xb = &b.f10;
    for (int i = 0; i < 18; ++i) CHECK(std::abs(xa[i] - xb[i]) < 1e-6);
}

TEST_CASE("jacobian entries are the first partials at the steady state") {
    Kinetics kin = holling2(1, 9, 3);
    Equilibrium eq = holling2_equilibrium(1, 9, 3);
    fill_jacobian(kin, eq);
    Partials p = kin.partials(eq.u, eq.v);
    CHECK(eq.a11 == doctest::Approx(p.f10).epsilon(1e-12));
    CHECK(eq.a12 == doctest::Approx(p.f01).epsilon(1e-12));
    CHECK(eq.a21 == doctest::Approx(p.g10).epsilon(1e-12));
    CHECK(eq.a22 == doctest::Approx(p.g01).epsilon(1e-12));
    CHECK(eq.a12 < 0);
    CHECK(eq.a21 > 0);
}

TEST_CASE("parameter validation rejects unusable ranges") {
    ModelParams mp;
    mp.d11 = 0.6;
    mp.d22 = 0.8;
    mp.d21 = 1;
    mp.tau = 1;
    mp.ell = 2;
    CHECK_NOTHROW(mp.validate());
    ModelParams bad = mp;
    bad.d11 = 0;
    CHECK_THROWS_AS(bad.validate(), PreconditionViolated);
    bad = mp;
    bad.tau = -1;
    CHECK_THROWS_AS(bad.validate(), PreconditionViolated);
    bad = mp;
    bad.ell = 0;
    CHECK_THROWS_AS(bad.validate(), PreconditionViolated);
}
