#include "memdiff/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "memdiff/normalform.hpp"
#include "memdiff/simulator.hpp"
#include "memdiff/unfolding.hpp"

namespace memdiff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void run_jobs(std::vector<std::function<void()>>& jobs, int threads) {
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            jobs[i]();
        }
    };
    int n = std::max(1, std::min<int>(threads, (int)jobs.size()));
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

struct SubItem {
    bool pass = false;
    std::string detail;
};

// one PDE run from a small cosine perturbation of the steady state
SimResult run_pde(const ModelParams& mp, const Equilibrium& eq, double amp, double ic_mode,
                  double T, int M) {
    Grid g{M, mp.ell};
    std::vector<double> u0(M), v0(M);
    for (int i = 0; i < M; ++i) {
        double x = g.x(i);
        u0[i] = eq.u + amp * std::cos(ic_mode * x);
        v0[i] = eq.v + amp * std::cos(ic_mode * x);
    }
    return simulate(mp, u0, v0, T, M);
}

const char* kind_name(AttractorKind k) {
    static const char* names[] = {"Equilibrium", "Periodic", "QuasiPeriodic", "Unclassified"};
    return names[(int)k];
}

int dominant_mode(const SimResult& r) {
    int dom = 1;
    for (int n = 2; n < (int)r.mode_avg.size(); ++n)
        if (r.mode_avg[n] > r.mode_avg[dom]) dom = n;
    return dom;
}

}  // namespace

ModelParams reference_params_1() {
    ModelParams mp;
    mp.d11 = 0.6;
    mp.d22 = 0.8;
    mp.ell = 2;
    mp.ka = 1;
    mp.kb = 9;
    mp.kc = 3;
    mp.kinetics = holling2(1, 9, 3);
    return mp;
}

ModelParams reference_params_2() {
    ModelParams mp;
    mp.d11 = 0.6;
    mp.d22 = 0.8;
    mp.ell = 2;
    mp.ka = 1;
    mp.kb = 0.3;
    mp.kc = 0.1;
    mp.kinetics = holling2(1, 0.3, 0.1);
    return mp;
}

DoubleHopfPoint locate_hh_1(const ModelParams& mp, const Equilibrium& eq) {
    return find_double_hopf({2, '+', 1}, {2, '-', 0}, 927.0 / 134 + 1e-6, 524.0 / 75 - 1e-9, mp,
                            eq);
}

DoubleHopfPoint locate_hh_2(const ModelParams& mp, const Equilibrium& eq) {
    return find_double_hopf({1, '+', 0}, {2, '+', 0}, 3.5, 6.0, mp, eq);
}

namespace {

CriterionResult crit1_thresholds(const ModelParams& mp, const Equilibrium& eq) {
    CriterionResult r{1, "memory-coefficient thresholds (exact rationals)"};
    struct Row {
        int n;
        bool star;
        double target;
    };
    const Row rows[] = {{2, false, 524.0 / 75},   {3, false, 1612.0 / 225},
                        {1, false, 1316.0 / 75},  {2, true, 927.0 / 134},
                        {1, true, 6851.0 / 633}};
    r.pass = true;
    std::ostringstream os;
    for (const Row& w : rows) {
        CriticalD21 cd = critical_d21(w.n, mp, eq);
        double got = w.star ? (cd.d21_star ? *cd.d21_star : NAN) : cd.d21_n;
        // the plain thresholds are exact rationals; the starred ones are
        // square roots of non-square rationals, so the reference fractions
        // are rounded convergents good to ~1e-7
        double tol = w.star ? 1e-6 : 1e-10;
        double e = rel_err(got, w.target);
        bool ok = std::isfinite(got) && e < tol;
        r.pass = r.pass && ok;
        os << (w.star ? "d21*(" : "d21(") << w.n << ")=" << fmt(got) << " want " << fmt(w.target)
           << " rel " << fmt(e) << (ok ? "" : " [FAIL]") << "; ";
    }
    r.detail = os.str();
    return r;
}

CriterionResult crit2_pn_signs(const ModelParams& mp, const Equilibrium& eq) {
    CriterionResult r{2, "quartic coefficient P_n sign pattern"};
    r.pass = true;
    std::ostringstream os;
    for (int n = 1; n <= 10; ++n) {
        double Pn = quartic_data(n, mp, eq).Pn;
        bool ok = (n <= 2) ? (Pn < 0) : (Pn > 0);
        r.pass = r.pass && ok;
        os << "P" << n << "=" << fmt(Pn) << (ok ? "" : " [FAIL]") << "; ";
    }
    r.detail = os.str();
    return r;
}

CriterionResult crit3_hh1(const ModelParams& mp, const Equilibrium& eq,
                          const DoubleHopfPoint& dh) {
    CriterionResult r{3, "first Hopf-Hopf point: location, frequencies, residuals"};
    bool loc = std::abs(dh.d21_c - 6.9618) < 1e-2 && std::abs(dh.tau_c - 13.1290) < 1e-2;
    bool om = std::abs(dh.omega1 - 0.2222) < 1e-3 && std::abs(dh.omega2 - 0.6629) < 1e-3;
    ModelParams mc = mp;
    mc.d21 = dh.d21_c;
    mc.tau = dh.tau_c;
    double res1 = std::abs(char_det(dh.n1, cplx(0, dh.omega1), mc, eq));
    double res2 = std::abs(char_det(dh.n2, cplx(0, dh.omega2), mc, eq));
    bool res = res1 < 1e-8 && res2 < 1e-8;
    r.pass = loc && om && res;
    r.detail = "(d21_c,tau_c)=(" + fmt(dh.d21_c) + "," + fmt(dh.tau_c) +
               ") want (6.9618,13.1290)" + (loc ? "" : " [FAIL]") + "; omega=(" +
               fmt(dh.omega1) + "," + fmt(dh.omega2) + ") want (0.2222,0.6629)" +
               (om ? "" : " [FAIL]") + "; residuals=(" + fmt(res1) + "," + fmt(res2) + ")" +
               (res ? "" : " [FAIL]");
    return r;
}

CriterionResult crit4_hh2(const DoubleHopfPoint& dh) {
    CriterionResult r{4, "second Hopf-Hopf point: location and frequencies"};
    bool loc = std::abs(dh.d21_c - 4.1350) < 1e-2 && std::abs(dh.tau_c - 4.0276) < 1e-2;
    bool om = std::abs(dh.omega1 - 0.2671) < 1e-3 && std::abs(dh.omega2 - 0.3666) < 1e-3;
    r.pass = loc && om;
    r.detail = "(d21_c,tau_c)=(" + fmt(dh.d21_c) + "," + fmt(dh.tau_c) +
               ") want (4.1350,4.0276)" + (loc ? "" : " [FAIL]") + "; omega=(" + fmt(dh.omega1) +
               "," + fmt(dh.omega2) + ") want (0.2671,0.3666)" + (om ? "" : " [FAIL]") +
               "; note: targets equal the computed pair divided by sqrt(2); the computed pair "
               "satisfies the characteristic equation to machine residual, the targets do not";
    return r;
}

// compares one coefficient set against reference values: 2% relative + exact sign
bool cmp_coeffs(const double got[8], const double want[8], std::ostringstream& os) {
    static const char* nm[8] = {"d11_mu", "d12_mu", "d21_mu", "d22_mu",
                                "p11",    "p12",    "p21",    "p22"};
    bool all = true;
    for (int i = 0; i < 8; ++i) {
        bool ok = rel_err(got[i], want[i]) < 0.02 && (got[i] > 0) == (want[i] > 0);
        all = all && ok;
        os << nm[i] << "=" << fmt(got[i]) << " want " << fmt(want[i]) << (ok ? "" : " [FAIL]")
           << "; ";
    }
    return all;
}

CriterionResult crit5_nf1(const AmplitudeSystem& amp) {
    CriterionResult r{5, "first normal form coefficient table"};
    const double got[8] = {amp.delta1(0), amp.delta1(1), amp.delta2(0), amp.delta2(1),
                           amp.p11,       amp.p12,       amp.p21,       amp.p22};
    const double want[8] = {-4.1681e-4, 0.1332, 0.0036, 0.1311, -0.1428, 6.003, -5.4981, -2.2507};
    std::ostringstream os;
    bool ok = cmp_coeffs(got, want, os);
    bool tag = amp.simple_case;  // p11 p22 > 0
    os << "case=" << (amp.simple_case ? "simple" : "difficult") << " want simple"
       << (tag ? "" : " [FAIL]");
    r.pass = ok && tag;
    r.detail = os.str();
    return r;
}

CriterionResult crit6_slopes1(const AmplitudeSystem& amp, const DoubleHopfPoint& dh) {
    CriterionResult r{6, "first case region-line slopes and sector count"};
    auto lines = region_lines(amp);
    const double want[4] = {319.6, -36.4988, 254.4824, -52.6919};
    std::ostringstream os;
    bool all = true;
    for (int i = 0; i < 4; ++i) {
        bool ok = rel_err(lines[i].slope, want[i]) < 0.02;
        all = all && ok;
        os << lines[i].name << "=" << fmt(lines[i].slope) << " want " << fmt(want[i])
           << (ok ? "" : " [FAIL]") << "; ";
    }
    auto uc = region_partition(amp, dh);
    bool six = uc.regions.size() == 6;
    os << "sectors=" << uc.regions.size() << " want 6" << (six ? "" : " [FAIL]");
    r.pass = all && six;
    r.detail = os.str();
    return r;
}

CriterionResult crit7_nf2(const AmplitudeSystem& amp, bool crit4_passed) {
    CriterionResult r{7, "second normal form table and region-line slopes"};
    const double got[8] = {amp.delta1(0), amp.delta1(1), amp.delta2(0), amp.delta2(1),
                           amp.p11,       amp.p12,       amp.p21,       amp.p22};
    const double want[8] = {0.0781, 0.1224, 0.0595, 0.1653, -1.4203, -4.2174, -1.8176, -2.3315};
    std::ostringstream os;
    bool coeff = cmp_coeffs(got, want, os);
    auto lines = region_lines(amp);
    // the reference swaps the two H labels relative to the delta ordering;
    // compare the H slopes as an unordered pair
    double h_got[2] = {lines[0].slope, lines[1].slope};
    double h_want[2] = {-2.7794, -1.5672};
    std::sort(h_got, h_got + 2);
    std::sort(h_want, h_want + 2);
    bool hok = rel_err(h_got[0], h_want[0]) < 0.02 && rel_err(h_got[1], h_want[1]) < 0.02;
    bool l1 = rel_err(lines[2].slope, 0.2140) < 0.02;
    bool l2 = rel_err(lines[3].slope, -5.991) < 0.02;
    os << "H slopes {" << fmt(h_got[0]) << "," << fmt(h_got[1]) << "} want {" << fmt(h_want[0])
       << "," << fmt(h_want[1]) << "}" << (hok ? "" : " [FAIL]") << "; L1=" << fmt(lines[2].slope)
       << " want 0.2140" << (l1 ? "" : " [FAIL]") << "; L2=" << fmt(lines[3].slope)
       << " want -5.991" << (l2 ? "" : " [FAIL]");
    r.pass = coeff && hok && l1 && l2;
    if (!r.pass && !crit4_passed)
        os << "; discrepancy-report alternative unavailable: criterion 4 did not pass";
    r.detail = os.str();
    return r;
}

CriterionResult crit8_stability(const ModelParams& mp, const Equilibrium& eq) {
    CriterionResult r{8, "stability below the first memory threshold"};
    const double d21_star = 927.0 / 134;
    const double taus[4] = {0, 1, 10, 50};
    r.pass = true;
    int checked = 0, failed = 0;
    std::string first_bad;
    for (int i = 0; i < 20; ++i) {
        double d21 = (i + 1) / 21.0 * d21_star;
        for (double tau : taus) {
            ModelParams m = mp;
            m.d21 = d21;
            m.tau = tau;
            StabilityVerdict v = stability_verdict(m, eq);
            ++checked;
            if (!v.stable) {
                ++failed;
                if (first_bad.empty())
                    first_bad = " first failure at (d21,tau)=(" + fmt(d21) + "," + fmt(tau) + ")";
            }
        }
    }
    r.pass = failed == 0;
    r.detail = std::to_string(checked - failed) + "/" + std::to_string(checked) + " verdicts Stable" +
               first_bad;
    return r;
}

SubItem sim_equilibrium(const ModelParams& mp0, const Equilibrium& eq, int M) {
    SubItem s;
    ModelParams mp = mp0;
    mp.d21 = 6.95;
    mp.tau = 12.5;
    SimResult r = run_pde(mp, eq, 0.005, 1.0, 3000.0, M);
    double sup = 0;
    for (int i = 0; i < M; ++i)
        sup = std::max(sup,
                       std::max(std::abs(r.final_u[i] - eq.u), std::abs(r.final_v[i] - eq.v)));
    s.pass = sup < 1e-4;
    s.detail = "(6.95,12.5) sup-norm at t=3000 = " + fmt(sup) + " want <1e-4";
    if (!s.pass)
        s.detail +=
            " [FAIL: the leading characteristic root there is -1.03e-4+0.233i, so the decay "
            "e-fold time is ~9700 and the bound is first reached near t~38000; the state is a "
            "decaying oscillation about the steady state, as predicted, but not yet below the "
            "threshold]";
    return s;
}

SubItem sim_periodic(const ModelParams& mp0, const Equilibrium& eq, int M, double d21, double tau,
                     double T, char branch, const std::string& tag) {
    SubItem s;
    ModelParams mp = mp0;
    mp.d21 = d21;
    mp.tau = tau;
    SimResult r = run_pde(mp, eq, 0.005, 1.0, T, M);
    AttractorReport rep = classify_attractor(r.t, r.u_probe, 1700.0);
    int dom = dominant_mode(r);
    auto w = hopf_frequencies(2, mp, eq);  // (omega+, omega-) of mode 2 at this d21
    double f_loc = (branch == '+' ? w[0] : w[1]) / (2 * kPi);
    double f = rep.frequencies.empty() ? 0 : rep.frequencies[0];
    bool kind = rep.kind == AttractorKind::Periodic;
    bool mode = dom == 2;
    bool freq = f > 0 && rel_err(f, f_loc) < 0.05;
    s.pass = kind && mode && freq;
    s.detail = tag + " kind=" + std::string(kind_name(rep.kind)) + (kind ? "" : " [FAIL: not Periodic]") +
               ", dominant mode " + std::to_string(dom) + (mode ? "" : " [FAIL]") + ", f=" +
               fmt(f) + " want " + fmt(f_loc) + " (rel " + fmt(rel_err(f, f_loc)) + ")" +
               (freq ? "" : " [FAIL]");
    return s;
}

SubItem sim_quasi(const ModelParams& mp0, const Equilibrium& eq, int M) {
    SubItem s;
    ModelParams mp = mp0;
    mp.d21 = 6.95;
    mp.tau = 14.0;
    SimResult r = run_pde(mp, eq, 0.005, 1.0, 5200.0, M);
    AttractorReport rep = classify_attractor(r.t, r.u_probe, 1700.0);
    bool kind = rep.kind == AttractorKind::QuasiPeriodic;
    const double t1 = 0.22 / (2 * kPi), t2 = 0.66 / (2 * kPi);
    bool f1 = false, f2 = false;
    for (double f : rep.frequencies) {
        f1 = f1 || rel_err(f, t1) < 0.10;
        f2 = f2 || rel_err(f, t2) < 0.10;
    }
    s.pass = kind && f1 && f2;
    std::ostringstream os;
    os << "(6.95,14) kind=" << kind_name(rep.kind) << (kind ? "" : " [FAIL: not QuasiPeriodic]")
       << ", lines ";
    for (double f : rep.frequencies) os << fmt(f) << " ";
    os << "want near " << fmt(t1) << " and " << fmt(t2)
       << ((f1 && f2) ? "" : " [FAIL]");
    s.detail = os.str();
    return s;
}

SubItem sim_bistable(const ModelParams& mp0, const Equilibrium& eq, int M, double ic_mode,
                     int want_mode) {
    SubItem s;
    ModelParams mp = mp0;
    mp.d21 = 4.4;
    mp.tau = 4.3;
    SimResult r = run_pde(mp, eq, 0.1, ic_mode, 3200.0, M);
    AttractorReport rep = classify_attractor(r.t, r.u_probe, 1000.0);
    int dom = dominant_mode(r);
    bool kind = rep.kind == AttractorKind::Periodic;
    bool mode = dom == want_mode;
    s.pass = kind && mode;
    s.detail = "(4.4,4.3) IC mode " + fmt(ic_mode) + ": kind=" + std::string(kind_name(rep.kind)) +
               (kind ? "" : " [FAIL: not Periodic]") + ", dominant mode " + std::to_string(dom) +
               " want " + std::to_string(want_mode) + (mode ? "" : " [FAIL]");
    return s;
}

// --- property suites (criterion 11) ---

std::string suite_h_residuals(const NormalForm& nf1, const NormalForm& nf2, bool& ok) {
    double worst = 0;
    for (const NormalForm* nf : {&nf1, &nf2}) {
        HSet H = nf->solve_h_all(HPath::Closed);
        for (const auto& [key, h] : H)
            worst = std::max(worst, nf->h_residual(key.n, key.q, h));
    }
    ok = worst < 1e-8;
    return "h residual sup " + fmt(worst) + " want <1e-8" + (ok ? "" : " [FAIL]");
}

std::string suite_h_paths(unsigned long seed, bool& ok) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    double worst = 0;
    int done = 0, attempts = 0;
    while (done < 20 && ++attempts < 300) {
        ModelParams mp;
        mp.d11 = 0.2 + 1.3 * U(rng);
        mp.d22 = 0.2 + 1.3 * U(rng);
        mp.ell = 1 + (int)(3 * U(rng));
        double a = 0.5 + 1.5 * U(rng), c = 0.1 + 2.0 * U(rng);
        double b = c * (1 + a) / a * (1.2 + 2.0 * U(rng));
        mp.ka = a;
        mp.kb = b;
        mp.kc = c;
        mp.kinetics = holling2(a, b, c);
        DoubleHopfPoint dh;
        dh.d21_c = 0.5 + 7.5 * U(rng);
        dh.tau_c = 2 + 13 * U(rng);
        dh.n1 = 1 + (int)(3 * U(rng));
        dh.n2 = 1 + (int)(3 * U(rng));
        dh.omega1 = 0.15 + 0.35 * U(rng);
        dh.omega2 = 0.55 + 0.55 * U(rng);
        dh.omega1c = dh.tau_c * dh.omega1;
        dh.omega2c = dh.tau_c * dh.omega2;
        dh.branch1 = '+';
        dh.branch2 = '-';
        dh.resonance = resonance_check(dh.omega1, dh.omega2);
        mp.d21 = dh.d21_c;
        mp.tau = dh.tau_c;
        try {
            Equilibrium eq = holling2_equilibrium(a, b, c);
            fill_jacobian(mp.kinetics, eq);
            NormalForm nf(dh, mp, eq);
            HSet Hc = nf.solve_h_all(HPath::Closed);
            for (const auto& [key, hc] : Hc) {
                HFunc hb = nf.solve_h(key.n, key.q, HPath::GenericBVP);
                for (int i = 0; i <= 20; ++i) {
                    double th = -i / 20.0;
                    double d = (hc.at(th) - hb.at(th)).norm() / (1 + hc.at(th).norm());
                    worst = std::max(worst, d);
                }
            }
            ++done;
        } catch (const std::runtime_error&) {
            continue;  // degenerate draw; redraw
        }
    }
    ok = done == 20 && worst < 1e-8;
    return "closed vs generic h on " + std::to_string(done) + "/20 random sets, sup diff " +
           fmt(worst) + " want <1e-8" + (ok ? "" : " [FAIL]");
}

// integrate the amplitude flow from a perturbation of one equilibrium and
// decide whether the flow returns to it
bool oracle_stable(const AmplitudeSystem& amp, double mu1, double mu2,
                   const AmplitudeEquilibrium& e, double min_re) {
    double pert = 1e-3;
    double T = std::min(40.0 / min_re, 2e5);
    AmplitudeTrajectory tr =
        simulate_amplitude(amp, mu1, mu2, e.r1 + pert, e.r2 + pert, T, 1e-8);
    double d = std::hypot(tr.r1.back() - e.r1, tr.r2.back() - e.r2);
    return d < pert;
}

std::string suite_classification(const AmplitudeSystem& amp, const DoubleHopfPoint& dh,
                                 unsigned long seed, const std::string& tag, bool& ok) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    auto lines = region_lines(amp);
    std::vector<double> ray_angles;
    for (const auto& L : lines) {
        double t = std::atan2(L.dir_mu2, L.dir_mu1);
        ray_angles.push_back(t);
        ray_angles.push_back(t + kPi);
    }
    int done = 0, attempts = 0, bad = 0;
    std::string first_bad;
    while (done < 200 && ++attempts < 4000) {
        double th = 2 * kPi * U(rng), rho = 0.05 + 0.75 * U(rng);
        bool near_ray = false;
        for (double a : ray_angles) {
            double d = std::remainder(th - a, 2 * kPi);
            near_ray = near_ray || std::abs(d) < 0.02;
        }
        if (near_ray) continue;
        double mu1 = rho * std::cos(th), mu2 = rho * std::sin(th);
        auto eqs = amplitude_equilibria(amp, mu1, mu2);
        double min_re = 1e300;
        for (const auto& e : eqs)
            for (const cplx& l : e.eig) min_re = std::min(min_re, std::abs(l.real()));
        if (min_re < 1e-4) continue;  // marginal spectrum; redraw
        bool agree = true;
        for (const auto& e : eqs)
            if (oracle_stable(amp, mu1, mu2, e, min_re) != e.stable) agree = false;
        ++done;
        if (!agree) {
            ++bad;
            if (first_bad.empty())
                first_bad = " first mismatch at mu=(" + fmt(mu1) + "," + fmt(mu2) + ")";
        }
    }
    ok = done == 200 && bad == 0;
    return tag + " flow-oracle agreement " + std::to_string(done - bad) + "/" +
           std::to_string(done) + first_bad + (ok ? "" : " [FAIL]");
}

std::string suite_eigenbasis(const NormalForm& nf1, const NormalForm& nf2, bool& ok) {
    double worst = 0;
    for (const NormalForm* nf : {&nf1, &nf2}) {
        const EigenBasis& B = nf->basis();
        const DoubleHopfPoint& dh = nf->point();
        const int nj[2] = {dh.n1, dh.n2};
        for (int j = 0; j < 2; ++j) {
            cplx iw(0, B.omega_c[j]);
            Eigen::Matrix2cd M = nf->Mtil(nj[j], iw);
            worst = std::max(worst, (M * B.phi0[j]).norm());
            worst = std::max(worst, (B.psi0[j].transpose() * M).norm());
        }
    }
    ok = worst < 1e-8;
    return "eigenbasis kernel/pairing residual sup " + fmt(worst) + " want <1e-8" +
           (ok ? "" : " [FAIL]");
}

std::string suite_sim_order(const ModelParams& mp0, const Equilibrium& eq, bool& ok) {
    ModelParams mp = mp0;
    mp.d21 = 6.96;
    mp.tau = 12.5;
    std::vector<std::vector<double>> coeffs;
    // the coarsest usable grid is still pre-asymptotic here (ratio ~3.3),
    // so the order is measured one refinement level up
    for (int M : {128, 256, 512}) {
        SimResult r = run_pde(mp, eq, 0.005, 1.0, 100.0, M);
        coeffs.push_back(mode_amplitudes(r.final_u, mp.ell, 6));
    }
    auto diff = [&](int i, int j) {
        double d = 0;
        for (size_t n = 0; n < coeffs[i].size(); ++n)
            d = std::max(d, std::abs(coeffs[i][n] - coeffs[j][n]));
        return d;
    };
    double e1 = diff(0, 1), e2 = diff(1, 2);
    double order = std::log2(e1 / e2);
    ok = order >= 1.8;
    return "simulator convergence order " + fmt(order) + " (errors " + fmt(e1) + " -> " +
           fmt(e2) + ") want >=1.8" + (ok ? "" : " [FAIL]");
}

std::string suite_partials(bool& ok) {
    double worst = 0;
    for (auto [a, b, c] : {std::array<double, 3>{1, 9, 3}, {1, 0.3, 0.1}, {1.7, 2.5, 0.8}}) {
        Kinetics kin = holling2(a, b, c);
        Equilibrium eq = holling2_equilibrium(a, b, c);
        for (auto [u, v] : {std::pair<double, double>{eq.u, eq.v}, {0.3, 1.1}, {0.9, 0.4}}) {
            Partials pc = kin.partials(u, v);
            Partials pn = kin.partials_numeric(u, v);
            const double* xc = &pc.f10;
            const double* xn = &pn.f10;
            for (int i = 0; i < 18; ++i) worst = std::max(worst, std::abs(xc[i] - xn[i]));
        }
    }
    ok = worst < 1e-6;
    return "closed vs finite-difference partials sup " + fmt(worst) + " want <1e-6" +
           (ok ? "" : " [FAIL]");
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    std::vector<CriterionResult> out;

    ModelParams mp1 = reference_params_1();
    Equilibrium eq1 = holling2_equilibrium(mp1.ka, mp1.kb, mp1.kc);
    fill_jacobian(mp1.kinetics, eq1);
    ModelParams mp2 = reference_params_2();
    Equilibrium eq2 = holling2_equilibrium(mp2.ka, mp2.kb, mp2.kc);
    fill_jacobian(mp2.kinetics, eq2);

    out.push_back(crit1_thresholds(mp1, eq1));
    out.push_back(crit2_pn_signs(mp1, eq1));

    DoubleHopfPoint dh1 = locate_hh_1(mp1, eq1);
    DoubleHopfPoint dh2 = locate_hh_2(mp2, eq2);
    out.push_back(crit3_hh1(mp1, eq1, dh1));
    out.push_back(crit4_hh2(dh2));
    bool c4 = out.back().pass;

    ModelParams mc1 = mp1;
    mc1.d21 = dh1.d21_c;
    mc1.tau = dh1.tau_c;
    NormalForm nf1(dh1, mc1, eq1);
    auto [nfc1, amp1] = nf1.assemble();
    ModelParams mc2 = mp2;
    mc2.d21 = dh2.d21_c;
    mc2.tau = dh2.tau_c;
    NormalForm nf2(dh2, mc2, eq2);
    auto [nfc2, amp2] = nf2.assemble();

    AmplitudeSystem amp1_checked = amp1;
    if (opt.tamper_p11) amp1_checked.p11 = -amp1_checked.p11;
    out.push_back(crit5_nf1(amp1_checked));
    out.push_back(crit6_slopes1(amp1, dh1));
    out.push_back(crit7_nf2(amp2, c4));
    out.push_back(crit8_stability(mp1, eq1));

    CriterionResult c9{9, "first case: simulated attractors vs prediction"};
    CriterionResult c10{10, "second case: initial-data selected bistability"};
    if (opt.with_sims) {
        SubItem s[6];
        std::vector<std::function<void()>> jobs = {
            [&] { s[0] = sim_equilibrium(mp1, eq1, opt.sim_M); },
            [&] {
                s[1] = sim_periodic(mp1, eq1, opt.sim_M, 6.96, 12.5, 5200.0, '-', "(6.96,12.5)");
            },
            [&] {
                s[2] =
                    sim_periodic(mp1, eq1, opt.sim_M, 6.945, 13.9, 16000.0, '+', "(6.945,13.9)");
            },
            [&] { s[3] = sim_quasi(mp1, eq1, opt.sim_M); },
            [&] { s[4] = sim_bistable(mp2, eq2, opt.sim_M, 0.5, 1); },
            [&] { s[5] = sim_bistable(mp2, eq2, opt.sim_M, 1.0, 2); },
        };
        // wrap each job so a thrown diagnostic becomes a failed sub-item
        for (size_t i = 0; i < jobs.size(); ++i) {
            auto inner = jobs[i];
            jobs[i] = [inner, &s, i] {
                try {
                    inner();
                } catch (const std::exception& ex) {
                    s[i].pass = false;
                    s[i].detail = std::string("[FAIL: ") + ex.what() + "]";
                }
            };
        }
        run_jobs(jobs, opt.threads);
        c9.pass = s[0].pass && s[1].pass && s[2].pass && s[3].pass;
        c9.detail = s[0].detail + " | " + s[1].detail + " | " + s[2].detail + " | " + s[3].detail;
        c10.pass = s[4].pass && s[5].pass;
        c10.detail = s[4].detail + " | " + s[5].detail;
    } else {
        c9.skipped = c10.skipped = true;
        c9.detail = c10.detail = "skipped (simulations disabled)";
    }
    out.push_back(c9);
    out.push_back(c10);

    CriterionResult c11{11, "property suites"};
    {
        bool ok[6];
        std::string d[6];
        d[0] = suite_h_residuals(nf1, nf2, ok[0]);
        d[1] = suite_h_paths(opt.seed, ok[1]);
        bool oka, okb;
        d[2] = suite_classification(amp1, dh1, opt.seed + 1, "first-case", oka) + " | " +
               suite_classification(amp2, dh2, opt.seed + 2, "second-case", okb);
        ok[2] = oka && okb;
        d[3] = suite_eigenbasis(nf1, nf2, ok[3]);
        d[4] = suite_sim_order(mp1, eq1, ok[4]);
        d[5] = suite_partials(ok[5]);
        c11.pass = ok[0] && ok[1] && ok[2] && ok[3] && ok[4] && ok[5];
        c11.detail = d[0] + " | " + d[1] + " | " + d[2] + " | " + d[3] + " | " + d[4] + " | " + d[5];
    }
    out.push_back(c11);
    return out;
}

}  // namespace memdiff
