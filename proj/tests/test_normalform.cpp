#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memdiff/normalform.hpp"
#include "memdiff/validate.hpp"
#include "oracles.hpp"

using namespace memdiff;

namespace {

struct Ctx {
    ModelParams mp;
    Equilibrium eq;
    DoubleHopfPoint dh;
};

Ctx ctx1() {
    Ctx c;
    c.mp = reference_params_1();
    c.eq = holling2_equilibrium(1, 9, 3);
    fill_jacobian(c.mp.kinetics, c.eq);
    c.dh = locate_hh_1(c.mp, c.eq);
    c.mp.d21 = c.dh.d21_c;
    c.mp.tau = c.dh.tau_c;
    return c;
}

Ctx ctx2() {
    Ctx c;
    c.mp = reference_params_2();
    c.eq = holling2_equilibrium(1, 0.3, 0.1);
    fill_jacobian(c.mp.kinetics, c.eq);
    c.dh = locate_hh_2(c.mp, c.eq);
    c.mp.d21 = c.dh.d21_c;
    c.mp.tau = c.dh.tau_c;
    return c;
}

}  // namespace

TEST_CASE("eigenbasis: kernel vectors, adjoint rows, and normalization") {
    for (Ctx c : {ctx1(), ctx2()}) {
        NormalForm nf(c.dh, c.mp, c.eq);
        const EigenBasis& B = nf.basis();
        const int nj[2] = {c.dh.n1, c.dh.n2};
        for (int j = 0; j < 2; ++j) {
            cplx iw(0, B.omega_c[j]);
            Eigen::Matrix2cd M = nf.Mtil(nj[j], iw);
            CHECK((M * B.phi0[j]).norm() < 1e-10);
            CHECK((B.psi0[j].transpose() * M).norm() < 1e-10);
            // bilinear pairing fixed to one by the alpha normalizer
            double kap = (nj[j] / c.mp.ell) * (nj[j] / c.mp.ell);
            cplx pairing = (B.psi0[j].transpose() * B.phi0[j])(0) +
                           c.dh.tau_c * kap * c.dh.d21_c * c.eq.v *
                               std::exp(cplx(0, -B.omega_c[j])) * B.psi0[j](1) * B.phi0[j](0);
            CHECK(std::abs(pairing - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("mode set covers every quadratic interaction channel") {
    Ctx c1 = ctx1();
    NormalForm nf1(c1.dh, c1.mp, c1.eq);
    CHECK(nf1.mode_set() == std::vector<int>{0, 4});
    Ctx c2 = ctx2();
    NormalForm nf2(c2.dh, c2.mp, c2.eq);
    CHECK(nf2.mode_set() == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("second-order responses satisfy their boundary value problems") {
    for (Ctx c : {ctx1(), ctx2()}) {
        NormalForm nf(c.dh, c.mp, c.eq);
        HSet H = nf.solve_h_all(HPath::Closed);
        CHECK(!H.empty());
        for (const auto& [key, h] : H) CHECK(nf.h_residual(key.n, key.q, h) < 1e-8);
    }
}

TEST_CASE("closed-form and generic-solver responses coincide") {
    for (Ctx c : {ctx1(), ctx2()}) {
        NormalForm nf(c.dh, c.mp, c.eq);
        HSet Hc = nf.solve_h_all(HPath::Closed);
        for (const auto& [key, hc] : Hc) {
            HFunc hb = nf.solve_h(key.n, key.q, HPath::GenericBVP);
            for (int i = 0; i <= 16; ++i) {
                double th = -i / 16.0;
                CHECK((hc.at(th) - hb.at(th)).norm() / (1 + hc.at(th).norm()) < 1e-8);
            }
        }
    }
}

TEST_CASE("cubic amplitude coefficients match the multiple-scales oracle") {
    for (Ctx c : {ctx1(), ctx2()}) {
        auto [nfc, amp] = normal_form(c.dh, c.mp, c.eq);
        auto want = oracle::ms_amplitude_coeffs(c.mp, c.eq, c.dh.n1, c.dh.n2, c.dh.omega1,
                                                c.dh.omega2);
        CHECK(amp.p11 == doctest::Approx(want[0]).epsilon(1e-4));
        CHECK(amp.p12 == doctest::Approx(want[1]).epsilon(1e-4));
        CHECK(amp.p21 == doctest::Approx(want[2]).epsilon(1e-4));
        CHECK(amp.p22 == doctest::Approx(want[3]).epsilon(1e-4));
        CHECK(amp.simple_case == (amp.p11 * amp.p22 > 0));
    }
}

TEST_CASE("linear rows reproduce the characteristic-root drift") {
    // delta_j . mu approximates the rescaled real part of the root that leaves
    // the axis when (tau, d21) moves off the intersection point
    for (Ctx c : {ctx1(), ctx2()}) {
        auto [nfc, amp] = normal_form(c.dh, c.mp, c.eq);
        const int nj[2] = {c.dh.n1, c.dh.n2};
        const double omj[2] = {c.dh.omega1, c.dh.omega2};
        const Eigen::Vector2d delta[2] = {amp.delta1, amp.delta2};
        for (int j = 0; j < 2; ++j) {
            for (auto [m1, m2] : {std::pair<double, double>{0.04, 0.0}, {0.0, 0.004}}) {
                auto drift = [&](double s) {
                    ModelParams mp = c.mp;
                    mp.tau = c.dh.tau_c + s * m1;
                    mp.d21 = c.dh.d21_c + s * m2;
                    auto roots = char_roots_in_box(nj[j], mp, c.eq, -0.05, 0.05,
                                                   omj[j] - 0.05, omj[j] + 0.05);
                    REQUIRE(!roots.empty());
                    cplx best = roots[0];
                    for (cplx r : roots)
                        if (std::abs(r - cplx(0, omj[j])) < std::abs(best - cplx(0, omj[j])))
                            best = r;
                    return c.dh.tau_c * best.real() / s;
                };
                // second-order Richardson in the perturbation size
                double got = 2 * drift(0.5) - drift(1.0);
                double want = delta[j](0) * m1 + delta[j](1) * m2;
                CHECK(got == doctest::Approx(want).epsilon(2e-2));
            }
        }
    }
}

TEST_CASE("coefficients transform canonically under eigenvector rescaling") {
    Ctx c = ctx1();
    NormalForm nf(c.dh, c.mp, c.eq);
    auto [nfc0, amp0] = nf.assemble();
    SUBCASE("pure phases leave everything unchanged") {
        nf.rescale_eigenvectors(0, std::polar(1.0, 0.8));
        nf.rescale_eigenvectors(1, std::polar(1.0, -2.1));
        auto [nfc1, amp1] = nf.assemble();
        CHECK(amp1.p11 == doctest::Approx(amp0.p11).epsilon(1e-8));
        CHECK(amp1.p12 == doctest::Approx(amp0.p12).epsilon(1e-8));
        CHECK(amp1.p21 == doctest::Approx(amp0.p21).epsilon(1e-8));
        CHECK(amp1.p22 == doctest::Approx(amp0.p22).epsilon(1e-8));
        CHECK((amp1.delta1 - amp0.delta1).norm() < 1e-8);
        CHECK((amp1.delta2 - amp0.delta2).norm() < 1e-8);
    }
    SUBCASE("moduli scale the cubic column for their mode, linear rows untouched") {
        cplx c1(1.3, -0.4), c2(0.2, 0.9);
        double s1 = std::norm(c1), s2 = std::norm(c2);
        nf.rescale_eigenvectors(0, c1);
        nf.rescale_eigenvectors(1, c2);
        auto [nfc1, amp1] = nf.assemble();
        CHECK(amp1.p11 == doctest::Approx(s1 * amp0.p11).epsilon(1e-8));
        CHECK(amp1.p12 == doctest::Approx(s2 * amp0.p12).epsilon(1e-8));
        CHECK(amp1.p21 == doctest::Approx(s1 * amp0.p21).epsilon(1e-8));
        CHECK(amp1.p22 == doctest::Approx(s2 * amp0.p22).epsilon(1e-8));
        CHECK((amp1.delta1 - amp0.delta1).norm() < 1e-8);
        CHECK((amp1.delta2 - amp0.delta2).norm() < 1e-8);
        // the classification invariants are unchanged by any rescaling
        CHECK(amp1.p12 * amp1.p21 / (amp1.p11 * amp1.p22) ==
              doctest::Approx(amp0.p12 * amp0.p21 / (amp0.p11 * amp0.p22)).epsilon(1e-10));
        CHECK(amp1.simple_case == amp0.simple_case);
    }
}

TEST_CASE("exact 1:2 frequency ratio is rejected, not silently mangled") {
    Ctx c = ctx2();
    DoubleHopfPoint dh = c.dh;
    dh.n1 = 1;
    dh.n2 = 2;
    dh.omega2 = 2 * dh.omega1;
    dh.omega1c = dh.tau_c * dh.omega1;
    dh.omega2c = dh.tau_c * dh.omega2;
    NormalForm nf(dh, c.mp, c.eq);
    CHECK_THROWS_AS(nf.assemble(), std::runtime_error);
}
