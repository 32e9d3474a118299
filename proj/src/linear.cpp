#include "memdiff/linear.hpp"

#include <algorithm>
#include <cmath>

namespace memdiff {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

struct LinCtx {
    double d11, d22, d21, tau, ell, vs;
    double a11, a12, a21, a22;
};
LinCtx ctx(const ModelParams& mp, const Equilibrium& eq) {
    return {mp.d11, mp.d22, mp.d21, mp.tau, mp.ell, eq.v, eq.a11, eq.a12, eq.a21, eq.a22};
}
double kap(const LinCtx& c, int n) { return (n / c.ell) * (n / c.ell); }
}  // namespace

Eigen::Matrix2cd char_matrix(int n, cplx lambda, const ModelParams& mp, const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    double k = kap(c, n);
    cplx ex = std::exp(-lambda * c.tau);
    Eigen::Matrix2cd M;
    M(0, 0) = lambda + k * c.d11 - c.a11;
    M(0, 1) = -c.a12;
    M(1, 0) = -k * ex * c.d21 * c.vs - c.a21;
    M(1, 1) = lambda + k * c.d22 - c.a22;
    return M;
}

Eigen::Matrix2cd char_matrix_scaled(int n, cplx lambda, const ModelParams& mp,
                                    const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    double k = kap(c, n);
    cplx ex = std::exp(-lambda);
    Eigen::Matrix2cd M;
    M(0, 0) = lambda + c.tau * (k * c.d11 - c.a11);
    M(0, 1) = c.tau * -c.a12;
    M(1, 0) = c.tau * (-k * ex * c.d21 * c.vs - c.a21);
    M(1, 1) = lambda + c.tau * (k * c.d22 - c.a22);
    return M;
}

cplx char_det(int n, cplx lambda, const ModelParams& mp, const Equilibrium& eq) {
    Eigen::Matrix2cd M = char_matrix(n, lambda, mp, eq);
    return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
}

static cplx char_det_deriv(int n, cplx lambda, const ModelParams& mp, const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    double k = kap(c, n);
    cplx ex = std::exp(-lambda * c.tau);
    // det = (l + k d11 - a11)(l + k d22 - a22) - a12 (k d21 v* e^{-l tau} + a21)
    return (lambda + k * c.d22 - c.a22) + (lambda + k * c.d11 - c.a11) +
           c.a12 * k * c.d21 * c.vs * c.tau * ex;
}

CharacteristicData quartic_data(int n, const ModelParams& mp, const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    double k = kap(c, n);
    CharacteristicData q;
    q.n = n;
    q.kappa = k;
    q.Tn = (c.a11 + c.a22) - (c.d11 + c.d22) * k;
    double detA = c.a11 * c.a22 - c.a12 * c.a21;
    q.Jn = c.d11 * c.d22 * k * k - (c.d11 * c.a22 + c.d22 * c.a11) * k + detA;
    q.Pn = (c.d11 * c.d11 + c.d22 * c.d22) * k * k - 2 * (c.d11 * c.a11 + c.d22 * c.a22) * k +
           c.a11 * c.a11 + c.a22 * c.a22 + 2 * c.a12 * c.a21;
    double w = c.d21 * c.vs * c.a12 * k;
    q.Qn = q.Jn * q.Jn - w * w;
    q.Delta = q.Pn * q.Pn - 4 * q.Qn;
    return q;
}

std::vector<double> hopf_frequencies(int n, const ModelParams& mp, const Equilibrium& eq) {
    CharacteristicData q = quartic_data(n, mp, eq);
    std::vector<double> out;
    if (q.Delta < 0) return out;
    double sd = std::sqrt(q.Delta);
    for (double s : {+1.0, -1.0}) {
        double w2 = (-q.Pn + s * sd) / 2;
        if (w2 > 0) out.push_back(std::sqrt(w2));
    }
    return out;  // '+' root first when both exist
}

std::vector<HopfCurvePoint> hopf_delays(int n, char branch, int j_max, const ModelParams& mp,
                                        const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    CharacteristicData q = quartic_data(n, mp, eq);
    std::vector<double> oms = hopf_frequencies(n, mp, eq);
    std::vector<HopfCurvePoint> out;
    double om = 0;
    if (branch == '+' && !oms.empty())
        om = oms.front();
    else if (branch == '-' && oms.size() == 2)
        om = oms.back();
    else
        return out;
    double k = kap(c, n);
    double den = c.d21 * c.vs * c.a12 * k;
    double cth = (q.Jn - om * om) / den;
    if (std::abs(cth) > 1 + 1e-12)
        throw ArccosDomain("arccos argument out of range for mode " + std::to_string(n));
    double sth = om * q.Tn / den;
    double th = std::acos(std::clamp(cth, -1.0, 1.0));
    bool corrected = false;
    if (sth < 0) {
        th = 2 * kPi - th;
        corrected = true;
    }
    for (int j = 0; j <= j_max; ++j) {
        HopfCurvePoint p;
        p.n = n;
        p.branch = branch;
        p.j = j;
        p.omega = om;
        p.tau_crit = (th + 2 * kPi * j) / om;
        p.d21 = c.d21;
        p.branch_corrected = corrected;
        // residual check at the emitted point
        ModelParams at = mp;
        at.tau = p.tau_crit;
        if (std::abs(char_det(n, cplx(0, om), at, eq)) > 1e-8)
            throw ArccosDomain("characteristic residual check failed for mode " +
                               std::to_string(n));
        out.push_back(p);
    }
    return out;
}

CriticalD21 critical_d21(int n, const ModelParams& mp, const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    CharacteristicData q = quartic_data(n, mp, eq);
    double k = kap(c, n);
    CriticalD21 out;
    out.d21_n = q.Jn / (c.vs * std::abs(c.a12) * k);
    double disc = 4 * q.Tn * q.Tn * q.Jn - q.Tn * q.Tn * q.Tn * q.Tn;
    if (disc >= 0)
        out.d21_star = std::sqrt(disc) / (2 * c.vs * std::abs(c.a12) * k);
    return out;
}

// ---- argument-principle root location ----
namespace {

// winding number of char_det along the rectangle boundary; adaptive phase walk
int winding(int n, const ModelParams& mp, const Equilibrium& eq, double x0, double x1, double y0,
            double y1) {
    auto F = [&](double x, double y) { return char_det(n, cplx(x, y), mp, eq); };
    double total = 0;
    cplx corners[5] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    for (int edge = 0; edge < 4; ++edge) {
        cplx a = corners[edge], b = corners[edge + 1];
        double t = 0;
        cplx fa = F(a.real(), a.imag());
        double step = 1.0 / 64;
        while (t < 1) {
            double tn = std::min(1.0, t + step);
            cplx p = a + (b - a) * tn;
            cplx fb = F(p.real(), p.imag());
            double dphi = std::arg(fb / fa);
            if (std::abs(dphi) > 0.8 && step > 1e-9) {
                step /= 2;
                continue;
            }
            total += dphi;
            t = tn;
            fa = fb;
            if (std::abs(dphi) < 0.2) step = std::min(step * 2, 1.0 / 64);
        }
    }
    return (int)std::lround(total / (2 * kPi));
}

bool newton_root(int n, const ModelParams& mp, const Equilibrium& eq, cplx guess, cplx& root) {
    cplx z = guess;
    for (int it = 0; it < 100; ++it) {
        cplx f = char_det(n, z, mp, eq);
        cplx fp = char_det_deriv(n, z, mp, eq);
        if (std::abs(fp) == 0) return false;
        cplx step = f / fp;
        z -= step;
        if (std::abs(step) < 1e-13) {
            root = z;
            return std::abs(char_det(n, z, mp, eq)) < 1e-10;
        }
    }
    return false;
}

void collect_roots(int n, const ModelParams& mp, const Equilibrium& eq, double x0, double x1,
                   double y0, double y1, std::vector<cplx>& out, int depth) {
    int w = winding(n, mp, eq, x0, x1, y0, y1);
    if (w <= 0) return;
    if (w == 1 || depth > 40 || (x1 - x0 < 1e-8 && y1 - y0 < 1e-8)) {
        cplx root;
        if (newton_root(n, mp, eq, cplx((x0 + x1) / 2, (y0 + y1) / 2), root)) {
            if (root.real() > x0 - 1e-6 && root.real() < x1 + 1e-6 && root.imag() > y0 - 1e-6 &&
                root.imag() < y1 + 1e-6) {
                for (const cplx& r : out)
                    if (std::abs(r - root) < 1e-7) return;
                out.push_back(root);
                return;
            }
        }
        if (w == 1 && depth > 40) return;  // give up on this cell
    }
    // split the longer side; offset slightly to avoid cutting through a root
    if (x1 - x0 > y1 - y0) {
        double xm = (x0 + x1) / 2 + (x1 - x0) * 1e-3;
        collect_roots(n, mp, eq, x0, xm, y0, y1, out, depth + 1);
        collect_roots(n, mp, eq, xm, x1, y0, y1, out, depth + 1);
    } else {
        double ym = (y0 + y1) / 2 + (y1 - y0) * 1e-3;
        collect_roots(n, mp, eq, x0, x1, y0, ym, out, depth + 1);
        collect_roots(n, mp, eq, x0, x1, ym, y1, out, depth + 1);
    }
}

}  // namespace

std::vector<cplx> char_roots_in_box(int n, const ModelParams& mp, const Equilibrium& eq,
                                    double re_lo, double re_hi, double im_lo, double im_hi) {
    std::vector<cplx> out;
    collect_roots(n, mp, eq, re_lo, re_hi, im_lo, im_hi, out, 0);
    return out;
}

namespace {

// path A: delay-free root count plus signed crossing count up to tau
int rhp_count_curvewise(int n, const ModelParams& mp, const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    CharacteristicData q = quartic_data(n, mp, eq);
    double k = kap(c, n);
    double j0 = q.Jn - c.a12 * k * c.d21 * c.vs;  // delay-free determinant
    int count = 0;
    if (j0 < 0)
        count = 1;
    else if (q.Tn > 0)
        count = 2;
    std::vector<double> oms = hopf_frequencies(n, mp, eq);
    if (oms.empty() || c.tau == 0) return count;
    double den = c.d21 * c.vs * c.a12 * k;
    for (size_t i = 0; i < oms.size(); ++i) {
        double om = oms[i];
        int dir = (i == 0) ? +2 : -2;  // '+' branch destabilizes, '-' restores
        double cth = (q.Jn - om * om) / den;
        if (std::abs(cth) > 1 + 1e-12) continue;
        double sth = om * q.Tn / den;
        double th = std::acos(std::clamp(cth, -1.0, 1.0));
        if (sth < 0) th = 2 * kPi - th;
        for (double tj = th / om; tj <= c.tau + 1e-12; tj += 2 * kPi / om) count += dir;
    }
    return count;
}

int rhp_count_rootscan(int n, const ModelParams& mp, const Equilibrium& eq) {
    LinCtx c = ctx(mp, eq);
    double sc = std::max({std::abs(c.a11), std::abs(c.a12), std::abs(c.a21), std::abs(c.a22), 1.0});
    std::vector<double> oms = hopf_frequencies(n, mp, eq);
    double om_hi = 1.0;
    for (double w : oms) om_hi = std::max(om_hi, w);
    // upper half plus a sliver below the axis so real roots are counted once
    std::vector<cplx> roots =
        char_roots_in_box(n, mp, eq, -0.02 * sc, 0.5 * sc, -1e-4, 5 * om_hi);
    int cnt = 0;
    for (const cplx& r : roots) {
        if (r.real() < -1e-9) continue;
        cnt += (std::abs(r.imag()) < 1e-7) ? 1 : 2;  // conjugate partner below axis
    }
    return cnt;
}

}  // namespace

StabilityVerdict stability_verdict(const ModelParams& mp, const Equilibrium& eq, int n_max) {
    LinCtx c = ctx(mp, eq);
    double trA = c.a11 + c.a22;
    if (n_max < 0) {
        n_max = (int)std::ceil(c.ell * std::sqrt(std::max(trA, 0.0) / std::min(c.d11, c.d22))) + 5;
        // extend until the tail is provably stable: Tn < 0, Qn > 0, Pn > 0, J0 > 0
        for (int guard = 0; guard < 32; ++guard) {
            bool ok = true;
            for (int n = n_max + 1; n <= n_max + 3; ++n) {
                CharacteristicData q = quartic_data(n, mp, eq);
                double j0 = q.Jn - c.a12 * kap(c, n) * c.d21 * c.vs;
                if (!(q.Tn < 0 && q.Qn > 0 && q.Pn > 0 && j0 > 0)) ok = false;
            }
            if (ok) break;
            n_max *= 2;
        }
    }
    StabilityVerdict v;
    v.stable = true;
    for (int n = 0; n <= n_max; ++n) {
        int a = rhp_count_curvewise(n, mp, eq);
        int b = rhp_count_rootscan(n, mp, eq);
        if ((a > 0) != (b > 0))
            throw Inconclusive("stability paths disagree at mode " + std::to_string(n) + ": " +
                               std::to_string(a) + " vs " + std::to_string(b));
        if (a > 0) {
            v.stable = false;
            v.leading_modes.push_back(n);
        }
    }
    return v;
}

Resonance resonance_check(double omega1, double omega2, double m_tol) {
    double scale = omega1 + omega2;
    for (int m1 = 1; m1 <= 3; ++m1)
        for (int m2 = 1; m1 + m2 <= 4; ++m2)
            if (std::abs(m1 * omega1 - m2 * omega2) < m_tol * scale) return Resonance::Strong;
    for (int m1 = 1; m1 <= 11; ++m1)
        for (int m2 = 1; m1 + m2 <= 12; ++m2)
            if (std::abs(m1 * omega1 - m2 * omega2) < m_tol * scale) return Resonance::Weak;
    return Resonance::NonResonant;
}

std::optional<HopfCurvePoint> curve_tau(CurveId c, double d21, const ModelParams& mp,
                                        const Equilibrium& eq) {
    ModelParams at = mp;
    at.d21 = d21;
    std::vector<HopfCurvePoint> pts = hopf_delays(c.n, c.branch, c.j, at,
                                                  eq);
    if ((int)pts.size() <= c.j) return std::nullopt;
    return pts[c.j];
}

DoubleHopfPoint find_double_hopf(CurveId c1, CurveId c2, double d21_lo, double d21_hi,
                                 const ModelParams& mp, const Equilibrium& eq) {
    auto diff = [&](double d) -> std::optional<double> {
        auto p1 = curve_tau(c1, d, mp, eq);
        auto p2 = curve_tau(c2, d, mp, eq);
        if (!p1 || !p2) return std::nullopt;
        return p1->tau_crit - p2->tau_crit;
    };
    auto flo = diff(d21_lo), fhi = diff(d21_hi);
    if (!flo || !fhi || *flo * *fhi > 0)
        throw NoCrossing("tau curves do not cross in the given d21 interval");
    double lo = d21_lo, hi = d21_hi, glo = *flo;
    for (int it = 0; it < 200; ++it) {
        double mid = (lo + hi) / 2;
        auto fm = diff(mid);
        if (!fm) throw NoCrossing("curve lost during bisection");
        if (glo * *fm <= 0)
            hi = mid;
        else {
            lo = mid;
            glo = *fm;
        }
    }
    double d21c = (lo + hi) / 2;
    HopfCurvePoint p1 = *curve_tau(c1, d21c, mp, eq);
    HopfCurvePoint p2 = *curve_tau(c2, d21c, mp, eq);
    DoubleHopfPoint dh;
    dh.d21_c = d21c;
    dh.tau_c = (p1.tau_crit + p2.tau_crit) / 2;
    // order so (n1, omega1) <= (n2, omega2) lexicographically by (n, omega)
    bool flip = (p2.n < p1.n) || (p2.n == p1.n && p2.omega < p1.omega);
    const HopfCurvePoint& a = flip ? p2 : p1;
    const HopfCurvePoint& b = flip ? p1 : p2;
    dh.n1 = a.n;
    dh.n2 = b.n;
    dh.omega1 = a.omega;
    dh.omega2 = b.omega;
    dh.omega1c = dh.tau_c * a.omega;
    dh.omega2c = dh.tau_c * b.omega;
    dh.branch1 = a.branch;
    dh.branch2 = b.branch;
    dh.resonance = resonance_check(dh.omega1, dh.omega2);
    // both characteristic residuals at the crossing
    ModelParams at = mp;
    at.d21 = d21c;
    at.tau = dh.tau_c;
    if (std::abs(char_det(dh.n1, cplx(0, dh.omega1), at, eq)) > 1e-8 ||
        std::abs(char_det(dh.n2, cplx(0, dh.omega2), at, eq)) > 1e-8)
        throw NoCrossing("double Hopf residual check failed");
    return dh;
}

}  // namespace memdiff
