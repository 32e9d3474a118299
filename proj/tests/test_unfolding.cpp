#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "memdiff/unfolding.hpp"
#include "memdiff/validate.hpp"
#include "oracles.hpp"

using namespace memdiff;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

AmplitudeSystem make_amp(double d1a, double d1b, double d2a, double d2b, double p11, double p12,
                         double p21, double p22) {
    AmplitudeSystem a;
    a.delta1 << d1a, d1b;
    a.delta2 << d2a, d2b;
    a.p11 = p11;
    a.p12 = p12;
    a.p21 = p21;
    a.p22 = p22;
    a.simple_case = p11 * p22 > 0;
    return a;
}

// symmetric stable-mixed-mode system: E3 attracts
const AmplitudeSystem kMixed = make_amp(1, 0, 1, 0, -1, -0.5, -0.5, -1);
// strong mutual inhibition: both axis orbits stable (bistable)
const AmplitudeSystem kBistable = make_amp(1, 0, 1, 0, -1, -2, -2, -1);

DoubleHopfPoint fake_dh() {
    DoubleHopfPoint dh;
    dh.d21_c = 5;
    dh.tau_c = 10;
    dh.n1 = 1;
    dh.n2 = 2;
    dh.omega1 = 0.3;
    dh.omega2 = 0.7;
    dh.branch1 = '+';
    dh.branch2 = '-';
    dh.resonance = Resonance::NonResonant;
    return dh;
}

struct Ctx {
    AmplitudeSystem amp;
    DoubleHopfPoint dh;
};

Ctx real_case(int which) {
    ModelParams mp = which == 1 ? reference_params_1() : reference_params_2();
    Equilibrium eq = holling2_equilibrium(mp.ka, mp.kb, mp.kc);
    fill_jacobian(mp.kinetics, eq);
    DoubleHopfPoint dh = which == 1 ? locate_hh_1(mp, eq) : locate_hh_2(mp, eq);
    mp.d21 = dh.d21_c;
    mp.tau = dh.tau_c;
    auto [nfc, amp] = normal_form(dh, mp, eq);
    return {amp, dh};
}

}  // namespace

TEST_CASE("every reported equilibrium is a zero of the amplitude flow") {
    Ctx c = real_case(1);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (int k = 0; k < 50; ++k) {
        double mu1 = U(rng), mu2 = U(rng);
        double h1 = c.amp.delta1(0) * mu1 + c.amp.delta1(1) * mu2;
        double h2 = c.amp.delta2(0) * mu1 + c.amp.delta2(1) * mu2;
        for (const auto& e : amplitude_equilibria(c.amp, mu1, mu2)) {
            double f1 = e.r1 * (h1 + c.amp.p11 * e.r1 * e.r1 + c.amp.p12 * e.r2 * e.r2);
            double f2 = e.r2 * (h2 + c.amp.p21 * e.r1 * e.r1 + c.amp.p22 * e.r2 * e.r2);
            CHECK(std::abs(f1) < 1e-12);
            CHECK(std::abs(f2) < 1e-12);
            CHECK(e.r1 >= 0);
            CHECK(e.r2 >= 0);
            // the existence half-plane matches the actual presence
            if (e.kind != EqKind::E0)
                CHECK(e.exist_c1 * mu1 + e.exist_c2 * mu2 > 0);
        }
    }
}

TEST_CASE("analytic amplitude-jacobian eigenvalues match finite differences") {
    Ctx c = real_case(2);
    double mu1 = 0.2, mu2 = -0.15;
    double h1 = c.amp.delta1(0) * mu1 + c.amp.delta1(1) * mu2;
    double h2 = c.amp.delta2(0) * mu1 + c.amp.delta2(1) * mu2;
    auto f1 = [&](double x, double y) { return x * (h1 + c.amp.p11 * x * x + c.amp.p12 * y * y); };
    auto f2 = [&](double x, double y) { return y * (h2 + c.amp.p21 * x * x + c.amp.p22 * y * y); };
    for (const auto& e : amplitude_equilibria(c.amp, mu1, mu2)) {
        const double h = 1e-6;
        double j11 = (f1(e.r1 + h, e.r2) - f1(e.r1 - h, e.r2)) / (2 * h);
        double j12 = (f1(e.r1, e.r2 + h) - f1(e.r1, e.r2 - h)) / (2 * h);
        double j21 = (f2(e.r1 + h, e.r2) - f2(e.r1 - h, e.r2)) / (2 * h);
        double j22 = (f2(e.r1, e.r2 + h) - f2(e.r1, e.r2 - h)) / (2 * h);
        double tr = j11 + j22, det = j11 * j22 - j12 * j21;
        CHECK((e.eig[0] + e.eig[1]).real() == doctest::Approx(tr).epsilon(1e-5));
        CHECK((e.eig[0] * e.eig[1]).real() == doctest::Approx(det).epsilon(1e-5));
    }
}

TEST_CASE("stability verdicts agree with direct flow integration") {
    for (int which : {1, 2}) {
        Ctx c = real_case(which);
        std::mt19937 rng(11 + which);
        std::uniform_real_distribution<double> U(0, 1);
        int tested = 0;
        while (tested < 25) {
            double th = 2 * kPi * U(rng), rho = 0.05 + 0.5 * U(rng);
            double mu1 = rho * std::cos(th), mu2 = rho * std::sin(th);
            auto eqs = amplitude_equilibria(c.amp, mu1, mu2);
            double minre = 1e300;
            for (const auto& e : eqs)
                for (const cplx& l : e.eig) minre = std::min(minre, std::abs(l.real()));
            if (minre < 1e-3) continue;  // too close to a boundary to be decisive
            for (const auto& e : eqs) {
                double T = std::min(30.0 / minre, 1e5);
                auto [r1, r2] = oracle::rk4_amplitude(c.amp, mu1, mu2, e.r1 + 1e-3, e.r2 + 1e-3,
                                                      T, std::min(0.05, T / 2000));
                bool returned = std::hypot(r1 - e.r1, r2 - e.r2) < 1e-4;
                CHECK(returned == e.stable);
            }
            ++tested;
        }
    }
}

TEST_CASE("adaptive amplitude integrator matches the fixed-step oracle") {
    Ctx c = real_case(1);
    double mu1 = 0.1, mu2 = 0.05;
    AmplitudeTrajectory tr = simulate_amplitude(c.amp, mu1, mu2, 0.05, 0.07, 200.0);
    auto [r1, r2] = oracle::rk4_amplitude(c.amp, mu1, mu2, 0.05, 0.07, 200.0, 1e-3);
    CHECK(tr.r1.back() == doctest::Approx(r1).epsilon(1e-6));
    CHECK(tr.r2.back() == doctest::Approx(r2).epsilon(1e-6));
}

TEST_CASE("coordinate axes are invariant under the amplitude flow") {
    AmplitudeTrajectory tr = simulate_amplitude(kMixed, 0.3, 0.0, 0.0, 0.2, 100.0);
    for (double r : tr.r1) CHECK(r == 0.0);
    CHECK(tr.r2.back() > 0);
    CHECK_THROWS_AS(simulate_amplitude(kMixed, 0.1, 0.0, -0.1, 0.1, 1.0), StepFailure);
}

TEST_CASE("label rules on synthetic systems with known dynamics") {
    DoubleHopfPoint dh = fake_dh();
    // stable interior state: torus label
    CHECK(label_at(kMixed, dh, 0.3, 0.0).kind == LabelKind::QuasiPeriodic);
    // strong inhibition: both axis orbits stable
    DynamicsLabel bi = label_at(kBistable, dh, 0.3, 0.0);
    CHECK(bi.kind == LabelKind::Bistable);
    CHECK(bi.mode[0] == 1);
    CHECK(bi.mode[1] == 2);
    // damping everywhere: trivial state
    CHECK(label_at(kMixed, dh, -0.3, 0.0).kind == LabelKind::StableEquilibrium);
    // only one amplitude excited: single periodic mode
    AmplitudeSystem one = make_amp(1, 0, -1, 0, -1, -0.5, -0.5, -1);
    DynamicsLabel pm = label_at(one, dh, 0.3, 0.0);
    CHECK(pm.kind == LabelKind::PeriodicMode);
    CHECK(pm.mode[0] == 1);
    CHECK(pm.branch[0] == '+');
}

TEST_CASE("degenerate cubic matrices are rejected") {
    AmplitudeSystem bad = make_amp(1, 0, 1, 0, 0, -1, -1, -1);
    CHECK_THROWS_AS(amplitude_equilibria(bad, 0.1, 0.1), DegenerateCubic);
    AmplitudeSystem sing = make_amp(1, 0, 1, 0, -1, -1, -1, -1);
    CHECK_THROWS_AS(amplitude_equilibria(sing, 0.1, 0.1), DegenerateCubic);
}

TEST_CASE("region partition tiles the plane and matches pointwise labels") {
    for (int which : {1, 2}) {
        Ctx c = real_case(which);
        UnfoldingClassification uc = region_partition(c.amp, c.dh);
        REQUIRE(!uc.regions.empty());
        double covered = 0;
        for (const auto& s : uc.regions) {
            CHECK(s.angle_hi > s.angle_lo);
            covered += s.angle_hi - s.angle_lo;
        }
        CHECK(covered == doctest::Approx(2 * kPi).epsilon(1e-9));
        CHECK(uc.regions.front().label.kind == LabelKind::StableEquilibrium);
        // sector labels agree with direct evaluation at interior angles
        for (const auto& s : uc.regions) {
            double mid = (s.angle_lo + s.angle_hi) / 2;
            DynamicsLabel lb = label_at(c.amp, c.dh, 0.01 * std::cos(mid), 0.01 * std::sin(mid));
            CHECK(lb.kind == s.label.kind);
        }
    }
}

TEST_CASE("point classification is consistent with the partition") {
    Ctx c = real_case(1);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    UnfoldingClassification uc = region_partition(c.amp, c.dh);
    for (int k = 0; k < 30; ++k) {
        double th = 2 * kPi * U(rng), rho = 0.005 + 0.02 * U(rng);
        double mu1 = rho * std::cos(th), mu2 = rho * std::sin(th);
        PointClassification pc =
            classify_point(c.amp, c.dh, c.dh.d21_c + mu2, c.dh.tau_c + mu1);
        REQUIRE(pc.region >= 1);
        REQUIRE(pc.region <= (int)uc.regions.size());
        CHECK(pc.label.kind == uc.regions[pc.region - 1].label.kind);
        CHECK(!pc.outside_validity);
    }
    PointClassification far = classify_point(c.amp, c.dh, c.dh.d21_c + 4.0, c.dh.tau_c);
    CHECK(far.outside_validity);
}

TEST_CASE("lines are oriented toward the side where the merging state exists") {
    Ctx c = real_case(1);
    auto lines = region_lines(c.amp);
    REQUIRE(lines.size() == 4);
    // on the L1 ray, the mode-1 amplitude of the reference flow is real
    const RegionLine& L1 = lines[2];
    double eps = -(c.amp.delta1(0) * L1.dir_mu1 + c.amp.delta1(1) * L1.dir_mu2) / c.amp.p11;
    CHECK(eps >= 0);
    const RegionLine& L2 = lines[3];
    double ep2 = -(c.amp.delta2(0) * L2.dir_mu1 + c.amp.delta2(1) * L2.dir_mu2) / c.amp.p22;
    CHECK(ep2 >= 0);
    // H rays point along the zero set of the linear parts
    CHECK(std::abs(c.amp.delta1(0) * lines[0].dir_mu1 + c.amp.delta1(1) * lines[0].dir_mu2) <
          1e-9);
    CHECK(std::abs(c.amp.delta2(0) * lines[1].dir_mu1 + c.amp.delta2(1) * lines[1].dir_mu2) <
          1e-9);
}
