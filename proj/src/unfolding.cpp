#include "memdiff/unfolding.hpp"

#include <algorithm>
#include <cmath>

namespace memdiff {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

struct Flow {
    double hm1, hm2;  // delta_j . mu
    const AmplitudeSystem& a;
    Flow(const AmplitudeSystem& amp, double mu1, double mu2) : a(amp) {
        hm1 = amp.delta1(0) * mu1 + amp.delta1(1) * mu2;
        hm2 = amp.delta2(0) * mu1 + amp.delta2(1) * mu2;
    }
    double f1(double r1, double r2) const {
        return r1 * (hm1 + a.p11 * r1 * r1 + a.p12 * r2 * r2);
    }
    double f2(double r1, double r2) const {
        return r2 * (hm2 + a.p21 * r1 * r1 + a.p22 * r2 * r2);
    }
};

void eig2(double j11, double j12, double j21, double j22, cplx out[2]) {
    double tr = j11 + j22, det = j11 * j22 - j12 * j21;
    cplx disc = std::sqrt(cplx(tr * tr / 4 - det, 0));
    out[0] = tr / 2 + disc;
    out[1] = tr / 2 - disc;
}
}  // namespace

AmplitudeEquilibrium stability_of(AmplitudeEquilibrium eq, const AmplitudeSystem& amp,
                                  double mu1, double mu2) {
    Flow fl(amp, mu1, mu2);
    double r1 = eq.r1, r2 = eq.r2;
    double j11 = fl.hm1 + 3 * amp.p11 * r1 * r1 + amp.p12 * r2 * r2;
    double j12 = 2 * amp.p12 * r1 * r2;
    double j21 = 2 * amp.p21 * r1 * r2;
    double j22 = fl.hm2 + amp.p21 * r1 * r1 + 3 * amp.p22 * r2 * r2;
    eig2(j11, j12, j21, j22, eq.eig);
    eq.stable = eq.eig[0].real() < 0 && eq.eig[1].real() < 0;
    return eq;
}

std::vector<AmplitudeEquilibrium> amplitude_equilibria(const AmplitudeSystem& amp, double mu1,
                                                       double mu2) {
    if (std::abs(amp.p11) < 1e-12 || std::abs(amp.p22) < 1e-12)
        throw DegenerateCubic("vanishing diagonal cubic coefficient");
    const double det = amp.p11 * amp.p22 - amp.p12 * amp.p21;
    Flow fl(amp, mu1, mu2);
    std::vector<AmplitudeEquilibrium> out;
    AmplitudeEquilibrium e0{EqKind::E0, 0, 0, 0, 0, {}, false};
    out.push_back(stability_of(e0, amp, mu1, mu2));

    double eps1 = -fl.hm1 / amp.p11;
    if (eps1 > 0) {
        AmplitudeEquilibrium e{EqKind::E1, std::sqrt(eps1), 0, -amp.delta1(0) / amp.p11,
                               -amp.delta1(1) / amp.p11, {}, false};
        out.push_back(stability_of(e, amp, mu1, mu2));
    }
    double eps2 = -fl.hm2 / amp.p22;
    if (eps2 > 0) {
        AmplitudeEquilibrium e{EqKind::E2, 0, std::sqrt(eps2), -amp.delta2(0) / amp.p22,
                               -amp.delta2(1) / amp.p22, {}, false};
        out.push_back(stability_of(e, amp, mu1, mu2));
    }
    if (std::abs(det) < 1e-12) throw DegenerateCubic("singular cubic coefficient matrix");
    // p . (eps1, eps2) = -muhat
    double x = (-fl.hm1 * amp.p22 + fl.hm2 * amp.p12) / det;
    double y = (-amp.p11 * fl.hm2 + amp.p21 * fl.hm1) / det;
    if (x > 0 && y > 0) {
        double c1 = (-amp.delta1(0) * amp.p22 + amp.delta2(0) * amp.p12) / det;
        double c2 = (-amp.delta1(1) * amp.p22 + amp.delta2(1) * amp.p12) / det;
        AmplitudeEquilibrium e{EqKind::E3, std::sqrt(x), std::sqrt(y), c1, c2, {}, false};
        out.push_back(stability_of(e, amp, mu1, mu2));
    }
    return out;
}

std::vector<RegionLine> region_lines(const AmplitudeSystem& amp) {
    const double a = amp.delta1(0), b = amp.delta1(1);
    const double c = amp.delta2(0), d = amp.delta2(1);
    auto mk = [](const std::string& name, double num, double den, double dir2) {
        RegionLine L;
        L.name = name;
        L.vertical = std::abs(den) < 1e-14 * (1 + std::abs(num));
        L.slope = L.vertical ? den / num : num / den;  // inverted form when vertical
        double m1 = L.vertical ? (num > 0 ? 1.0 : -1.0) : L.slope * dir2;
        double m2 = L.vertical ? 0.0 : dir2;
        double nrm = std::hypot(m1, m2);
        L.dir_mu1 = m1 / nrm;
        L.dir_mu2 = m2 / nrm;
        return L;
    };
    std::vector<RegionLine> out;
    // zero sets of the linear parts: mu1 = -(mu2 coeff)/(mu1 coeff) * mu2
    out.push_back(mk("H1", -b, a, 1.0));
    out.push_back(mk("H2", -d, c, 1.0));
    // interior-equilibrium existence boundaries: muhat2/muhat1 = p21/p11 (merge
    // with E1) and p22/p12 (merge with E2)
    double k1 = amp.p21 / amp.p11;
    double k2 = amp.p22 / amp.p12;
    RegionLine L1 = mk("L1", k1 * b - d, c - k1 * a, 1.0);
    RegionLine L2 = mk("L2", k2 * b - d, c - k2 * a, 1.0);
    // orient each L half-line toward the side where the surviving amplitude is
    // real (E1 for L1, E2 for L2)
    auto orient = [&](RegionLine& L, const Eigen::Vector2d& delta, double p) {
        double eps = -(delta(0) * L.dir_mu1 + delta(1) * L.dir_mu2) / p;
        if (eps < 0) {
            L.dir_mu1 = -L.dir_mu1;
            L.dir_mu2 = -L.dir_mu2;
        }
    };
    orient(L1, amp.delta1, amp.p11);
    orient(L2, amp.delta2, amp.p22);
    out.push_back(L1);
    out.push_back(L2);
    return out;
}

DynamicsLabel label_at(const AmplitudeSystem& amp, const DoubleHopfPoint& dhp, double mu1,
                       double mu2) {
    auto eqs = amplitude_equilibria(amp, mu1, mu2);
    const AmplitudeEquilibrium* e[4] = {nullptr, nullptr, nullptr, nullptr};
    for (const auto& q : eqs) e[(int)q.kind] = &q;
    DynamicsLabel lb;
    auto periodic = [&](int which) {  // 0 -> mode n1 state, 1 -> mode n2 state
        lb.mode[0] = which == 0 ? dhp.n1 : dhp.n2;
        lb.branch[0] = which == 0 ? dhp.branch1 : dhp.branch2;
    };
    if (e[3] && e[3]->stable) {
        lb.kind = LabelKind::QuasiPeriodic;
        lb.text = "quasi-periodic (mixed mode)";
        return lb;
    }
    bool s1 = e[1] && e[1]->stable, s2 = e[2] && e[2]->stable;
    if (e[1] && e[2] && s1 && s2) {
        lb.kind = LabelKind::Bistable;
        lb.mode[0] = dhp.n1;
        lb.mode[1] = dhp.n2;
        lb.branch[0] = dhp.branch1;
        lb.branch[1] = dhp.branch2;
        lb.text = "bistable periodic modes";
        return lb;
    }
    if (e[1] && e[2] && (s1 || s2)) {
        lb.kind = LabelKind::ConnectingOrbit;
        int from = s1 ? 1 : 0;  // unstable source first
        lb.mode[0] = from == 0 ? dhp.n1 : dhp.n2;
        lb.branch[0] = from == 0 ? dhp.branch1 : dhp.branch2;
        lb.mode[1] = from == 0 ? dhp.n2 : dhp.n1;
        lb.branch[1] = from == 0 ? dhp.branch2 : dhp.branch1;
        lb.text = "connecting orbit between periodic modes";
        return lb;
    }
    if (s1 || s2) {
        lb.kind = LabelKind::PeriodicMode;
        periodic(s1 ? 0 : 1);
        lb.text = "periodic mode-" + std::to_string(lb.mode[0]);
        return lb;
    }
    if (e[0]->stable) {
        lb.kind = LabelKind::StableEquilibrium;
        lb.text = "stable constant steady state";
        return lb;
    }
    lb.kind = LabelKind::Unclassified;
    lb.text = "no stable state within cubic truncation";
    return lb;
}

namespace {
bool same_label(const DynamicsLabel& a, const DynamicsLabel& b) {
    return a.kind == b.kind && a.mode[0] == b.mode[0] && a.mode[1] == b.mode[1] &&
           a.branch[0] == b.branch[0] && a.branch[1] == b.branch[1];
}
}  // namespace

UnfoldingClassification region_partition(const AmplitudeSystem& amp,
                                         const DoubleHopfPoint& dhp) {
    UnfoldingClassification uc;
    uc.lines = region_lines(amp);
    std::vector<double> ang;
    for (const auto& L : uc.lines) {
        double t = std::atan2(L.dir_mu2, L.dir_mu1);
        for (double v : {t, t + kPi}) {
            v = std::fmod(v + 4 * kPi, 2 * kPi);
            ang.push_back(v);
        }
    }
    std::sort(ang.begin(), ang.end());
    ang.erase(std::unique(ang.begin(), ang.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-9; }),
              ang.end());
    const double rho = 0.01;
    std::vector<Sector> raw;
    for (size_t i = 0; i < ang.size(); ++i) {
        double lo = ang[i];
        double hi = (i + 1 < ang.size()) ? ang[i + 1] : ang[0] + 2 * kPi;
        double mid = (lo + hi) / 2;
        Sector s{lo, hi, label_at(amp, dhp, rho * std::cos(mid), rho * std::sin(mid))};
        raw.push_back(s);
    }
    // merge adjacent sectors that carry the same label (wrap-around included)
    std::vector<Sector> merged;
    for (const auto& s : raw) {
        if (!merged.empty() && same_label(merged.back().label, s.label))
            merged.back().angle_hi = s.angle_hi;
        else
            merged.push_back(s);
    }
    if (merged.size() > 1 && same_label(merged.front().label, merged.back().label)) {
        merged.front().angle_lo = merged.back().angle_lo - 2 * kPi;
        merged.pop_back();
    }
    // region 1 = the sector with the stable trivial state, when present
    size_t start = 0;
    for (size_t i = 0; i < merged.size(); ++i)
        if (merged[i].label.kind == LabelKind::StableEquilibrium) start = i;
    std::rotate(merged.begin(), merged.begin() + start, merged.end());
    // enumerate clockwise after region 1
    if (merged.size() > 2) std::reverse(merged.begin() + 1, merged.end());
    uc.regions = merged;
    return uc;
}

PointClassification classify_point(const AmplitudeSystem& amp, const DoubleHopfPoint& dhp,
                                   double d21, double tau, double validity_radius) {
    PointClassification pc;
    pc.mu1 = tau - dhp.tau_c;
    pc.mu2 = d21 - dhp.d21_c;
    pc.outside_validity = std::max(std::abs(pc.mu1), std::abs(pc.mu2)) > validity_radius;
    pc.equilibria = amplitude_equilibria(amp, pc.mu1, pc.mu2);
    pc.label = label_at(amp, dhp, pc.mu1, pc.mu2);
    UnfoldingClassification uc = region_partition(amp, dhp);
    double th = std::atan2(pc.mu2, pc.mu1);
    pc.region = 1;
    for (size_t i = 0; i < uc.regions.size(); ++i) {
        double lo = uc.regions[i].angle_lo, hi = uc.regions[i].angle_hi;
        double t = th;
        while (t < lo) t += 2 * kPi;
        while (t >= lo + 2 * kPi) t -= 2 * kPi;
        if (t < hi || uc.regions.size() == 1) {
            pc.region = (int)i + 1;
            break;
        }
    }
    return pc;
}

AmplitudeTrajectory simulate_amplitude(const AmplitudeSystem& amp, double mu1, double mu2,
                                       double r1_0, double r2_0, double T, double tol) {
    if (r1_0 < 0 || r2_0 < 0) throw StepFailure("negative initial amplitude");
    Flow fl(amp, mu1, mu2);
    const bool z1 = (r1_0 == 0), z2 = (r2_0 == 0);  // invariant axes stay exact
    AmplitudeTrajectory tr;
    double t = 0, r1 = r1_0, r2 = r2_0;
    double h = std::min(1e-2, T);
    tr.t.push_back(t);
    tr.r1.push_back(r1);
    tr.r2.push_back(r2);
    auto deriv = [&](double x, double y, double& dx, double& dy) {
        dx = z1 ? 0.0 : fl.f1(x, y);
        dy = z2 ? 0.0 : fl.f2(x, y);
    };
    int guard = 0;
    while (t < T) {
        if (++guard > 50'000'000) throw StepFailure("step budget exhausted");
        if (t + h > T) h = T - t;
        // two half steps vs one full step of classical RK4, step doubling
        auto rk4 = [&](double x, double y, double hh, double& ox, double& oy) {
            double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
            deriv(x, y, k1x, k1y);
            deriv(x + hh / 2 * k1x, y + hh / 2 * k1y, k2x, k2y);
            deriv(x + hh / 2 * k2x, y + hh / 2 * k2y, k3x, k3y);
            deriv(x + hh * k3x, y + hh * k3y, k4x, k4y);
            ox = x + hh / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
            oy = y + hh / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
        };
        double fx, fy, hx, hy, hx2, hy2;
        rk4(r1, r2, h, fx, fy);
        rk4(r1, r2, h / 2, hx, hy);
        rk4(hx, hy, h / 2, hx2, hy2);
        double err = std::max(std::abs(fx - hx2), std::abs(fy - hy2)) / 15.0;
        double scale = tol * (1 + std::max(std::abs(hx2), std::abs(hy2)));
        if (err <= scale) {
            t += h;
            r1 = z1 ? 0.0 : std::max(0.0, hx2 + (hx2 - fx) / 15);
            r2 = z2 ? 0.0 : std::max(0.0, hy2 + (hy2 - fy) / 15);
            tr.t.push_back(t);
            tr.r1.push_back(r1);
            tr.r2.push_back(r2);
            if (err < scale / 32) h *= 2;
        } else {
            h /= 2;
            if (h < 1e-13 * std::max(1.0, T)) throw StepFailure("step size underflow");
        }
    }
    return tr;
}

}  // namespace memdiff
