#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <map>

#include <Eigen/Dense>

namespace oracle {

using memdiff::cplx;
using memdiff::Equilibrium;
using memdiff::Kinetics;
using memdiff::ModelParams;
using memdiff::Partials;
using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double Nrm(int n, double ell) { return std::sqrt((n == 0 ? 1.0 : 2.0) / (ell * kPi)); }

double Iccc(int p, int q, int r, double ell) {
    int cnt = 0;
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            if (p + s1 * q + s2 * r == 0) ++cnt;
    return Nrm(p, ell) * Nrm(q, ell) * Nrm(r, ell) * ell * kPi / 4 * cnt;
}

double Issc(int p, int q, int r, double ell) {
    if (p == 0 || q == 0) return 0.0;
    int val = (p - q + r == 0) + (p - q - r == 0) - (p + q + r == 0) - (p + q - r == 0);
    return Nrm(p, ell) * Nrm(q, ell) * Nrm(r, ell) * ell * kPi / 4 * val;
}

double Icccc(int p, int q, int r, int s, double ell) {
    int cnt = 0;
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (int s3 : {1, -1})
                if (p + s1 * q + s2 * r + s3 * s == 0) ++cnt;
    return Nrm(p, ell) * Nrm(q, ell) * Nrm(r, ell) * Nrm(s, ell) * ell * kPi / 8 * cnt;
}

struct Comp {
    std::array<int, 4> key;  // powers of (A1, conj A1, A2, conj A2)
    double nu;
    int mode;
    Vec2 vec;
};

}  // namespace

std::array<double, 4> ms_amplitude_coeffs(const ModelParams& mp, const Equilibrium& eq, int n1,
                                          int n2, double om1, double om2) {
    const double ell = mp.ell, tau = mp.tau, d21 = mp.d21, vs = eq.v;
    Partials d = mp.kinetics.partials(eq.u, eq.v);
    Mat2 A;
    A << eq.a11, eq.a12, eq.a21, eq.a22;
    auto kapn = [&](int n) { return (n / ell) * (n / ell); };
    auto M = [&](int n, cplx lam) {
        Mat2 out = Mat2::Zero();
        out(0, 0) = lam + kapn(n) * mp.d11;
        out(1, 1) = lam + kapn(n) * mp.d22;
        out(1, 0) = kapn(n) * std::exp(-lam * tau) * (-d21 * vs);
        return Mat2(out - A);
    };
    auto phi = [&](int n, double om) {
        Mat2 Mm = M(n, cplx(0, om));
        return Vec2(1.0, -Mm(0, 0) / Mm(0, 1));
    };
    auto psiL = [&](int n, double om) {
        Mat2 Mm = M(n, cplx(0, om));
        return Vec2(1.0, -Mm(0, 0) / Mm(1, 0));
    };
    Vec2 ph[2] = {phi(n1, om1), phi(n2, om2)};
    const int nn[2] = {n1, n2};
    const double oms[2] = {om1, om2};

    std::vector<Comp> comps1;
    for (int j = 0; j < 2; ++j) {
        std::array<int, 4> k{0, 0, 0, 0}, kc{0, 0, 0, 0};
        k[2 * j] = 1;
        kc[2 * j + 1] = 1;
        comps1.push_back({k, oms[j], nn[j], ph[j]});
        comps1.push_back({kc, -oms[j], nn[j], ph[j].conjugate()});
    }
    auto react2 = [&](const Vec2& V1, const Vec2& V2) {
        return Vec2(0.5 * d.f20 * V1(0) * V2(0) + 0.5 * d.f11 * (V1(0) * V2(1) + V1(1) * V2(0)) +
                        0.5 * d.f02 * V1(1) * V2(1),
                    0.5 * d.g20 * V1(0) * V2(0) + 0.5 * d.g11 * (V1(0) * V2(1) + V1(1) * V2(0)) +
                        0.5 * d.g02 * V1(1) * V2(1));
    };

    // order 2: forcing per (key, frequency, mode), then direct response solves
    struct FKey {
        std::array<int, 4> key;
        long long nu12;  // frequency scaled to avoid float map keys
        int m;
        bool operator<(const FKey& o) const {
            if (key != o.key) return key < o.key;
            if (nu12 != o.nu12) return nu12 < o.nu12;
            return m < o.m;
        }
    };
    std::map<FKey, std::pair<double, Vec2>> forcing;
    for (const Comp& c1 : comps1)
        for (const Comp& c2 : comps1) {
            std::array<int, 4> key;
            for (int i = 0; i < 4; ++i) key[i] = c1.key[i] + c2.key[i];
            double nu = c1.nu + c2.nu;
            Vec2 rv = react2(c1.vec, c2.vec);
            // delayed u-gradient factor carries only the u-part frequency
            cplx adv_u = c2.vec(0) * std::exp(cplx(0, -c2.nu * tau));
            for (int m = 0; m <= c1.mode + c2.mode; ++m) {
                double w = Iccc(c1.mode, c2.mode, m, ell);
                Vec2 vec = w != 0 ? Vec2(rv * w) : Vec2(Vec2::Zero());
                double aw = Issc(c2.mode, m, c1.mode, ell);
                if (aw != 0)
                    vec(1) += d21 * (c2.mode * m / (ell * ell)) * aw * c1.vec(1) * adv_u;
                if (vec.norm() > 0) {
                    FKey fk{key, (long long)std::llround(nu * 1e12), m};
                    auto it = forcing.find(fk);
                    if (it == forcing.end())
                        forcing[fk] = {nu, vec};
                    else
                        it->second.second += vec;
                }
            }
        }
    std::vector<Comp> comps2;
    for (const auto& [fk, fv] : forcing) {
        Vec2 W = M(fk.m, cplx(0, fv.first)).colPivHouseholderQr().solve(fv.second);
        comps2.push_back({fk.key, fv.first, fk.m, W});
    }

    // order 3: resonant forcing at (n_j, om_j), projected on the adjoint row
    struct Target {
        int j;
        std::array<int, 4> key;
    };
    const Target targets[4] = {{0, {2, 1, 0, 0}},    // G11
                               {0, {1, 0, 1, 1}},    // G12
                               {1, {0, 0, 2, 1}},    // G31 (coefficient of A2|A2|^2)
                               {1, {1, 1, 1, 0}}};   // G32
    cplx G[4];
    for (int tix = 0; tix < 4; ++tix) {
        int j = targets[tix].j;
        const std::array<int, 4>& tkey = targets[tix].key;
        int nj = nn[j];
        double omj = oms[j];
        Vec2 tot = Vec2::Zero();
        for (const Comp& c1 : comps1)
            for (const Comp& c2 : comps1)
                for (const Comp& c3 : comps1) {
                    std::array<int, 4> key;
                    for (int i = 0; i < 4; ++i) key[i] = c1.key[i] + c2.key[i] + c3.key[i];
                    if (key != tkey) continue;
                    double w = Icccc(c1.mode, c2.mode, c3.mode, nj, ell);
                    if (w == 0) continue;
                    const Vec2 &V1 = c1.vec, &V2 = c2.vec, &V3 = c3.vec;
                    tot += w * Vec2(d.f30 / 6 * V1(0) * V2(0) * V3(0) +
                                        d.f21 / 2 * V1(0) * V2(0) * V3(1),
                                    d.g30 / 6 * V1(0) * V2(0) * V3(0) +
                                        d.g21 / 2 * V1(0) * V2(0) * V3(1));
                }
        auto crosspair = [&](const Comp& c1, const Comp& c2) {
            std::array<int, 4> key;
            for (int i = 0; i < 4; ++i) key[i] = c1.key[i] + c2.key[i];
            if (key != tkey) return Vec2(Vec2::Zero());
            Vec2 out = react2(c1.vec, c2.vec) * Iccc(c1.mode, c2.mode, nj, ell);
            cplx adv_u = c2.vec(0) * std::exp(cplx(0, -c2.nu * tau));
            double aw = Issc(c2.mode, nj, c1.mode, ell);
            if (aw != 0) out(1) += d21 * (c2.mode * nj / (ell * ell)) * aw * c1.vec(1) * adv_u;
            return out;
        };
        for (const Comp& c1 : comps1)
            for (const Comp& c2 : comps2) tot += crosspair(c1, c2) + crosspair(c2, c1);
        Vec2 psi = psiL(nj, omj);
        Vec2 P = ph[j] + tau * kapn(nj) * d21 * vs * std::exp(cplx(0, -omj * tau)) *
                             Vec2(0.0, ph[j](0));
        G[tix] = (psi.transpose() * tot)(0) / (psi.transpose() * P)(0);
    }
    // p_jk in rescaled time: tau * Re(G)
    return {tau * G[0].real(), tau * G[1].real(), tau * G[3].real(), tau * G[2].real()};
}

Partials fd_partials(const Kinetics& kin, double u, double v) {
    auto richard = [](auto f, double h) {  // O(h^4) from two O(h^2) evaluations
        return (4 * f(h / 2) - f(h)) / 3;
    };
    auto d1 = [&](auto f, double x, double h) {
        return richard([&](double hh) { return (f(x + hh) - f(x - hh)) / (2 * hh); }, h);
    };
    auto d2 = [&](auto f, double x, double h) {
        return richard([&](double hh) { return (f(x + hh) - 2 * f(x) + f(x - hh)) / (hh * hh); },
                       h);
    };
    auto d3 = [&](auto f, double x, double h) {
        return richard(
            [&](double hh) {
                return (f(x + 2 * hh) - 2 * f(x + hh) + 2 * f(x - hh) - f(x - 2 * hh)) /
                       (2 * hh * hh * hh);
            },
            h);
    };
    const double h = 0.02;
    Partials p{};
    auto fill = [&](auto fn, double& p10, double& p01, double& p20, double& p11, double& p02,
                    double& p30, double& p21, double& p12, double& p03) {
        auto fu = [&](double x) { return fn(x, v); };
        auto fv = [&](double y) { return fn(u, y); };
        p10 = d1(fu, u, h);
        p01 = d1(fv, v, h);
        p20 = d2(fu, u, h);
        p02 = d2(fv, v, h);
        p30 = d3(fu, u, h);
        p03 = d3(fv, v, h);
        p11 = d1([&](double y) { return d1([&](double x) { return fn(x, y); }, u, h); }, v, h);
        p21 = d1([&](double y) { return d2([&](double x) { return fn(x, y); }, u, h); }, v, h);
        p12 = d1([&](double x) { return d2([&](double y) { return fn(x, y); }, v, h); }, u, h);
    };
    fill(kin.f, p.f10, p.f01, p.f20, p.f11, p.f02, p.f30, p.f21, p.f12, p.f03);
    fill(kin.g, p.g10, p.g01, p.g20, p.g11, p.g02, p.g30, p.g21, p.g12, p.g03);
    return p;
}

std::vector<double> quartic_hopf_roots(double P, double Q) {
    std::vector<double> out;
    double disc = P * P - 4 * Q;
    if (disc < 0) return out;
    double sd = std::sqrt(disc);
    for (double s : {+1.0, -1.0}) {
        double w2 = (-P + s * sd) / 2;
        if (w2 > 0) out.push_back(std::sqrt(w2));
    }
    return out;
}

double zero_crossing_freq(const std::vector<double>& t, const std::vector<double>& y,
                          double window) {
    size_t i0 = 0;
    while (i0 < t.size() && t[i0] < t.back() - window) ++i0;
    double mean = 0;
    for (size_t i = i0; i < y.size(); ++i) mean += y[i];
    mean /= (y.size() - i0);
    std::vector<double> up;
    for (size_t i = i0 + 1; i < y.size(); ++i) {
        double a = y[i - 1] - mean, b = y[i] - mean;
        if (a < 0 && b >= 0) up.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
    }
    if (up.size() < 3) return 0;
    return (up.size() - 1) / (up.back() - up.front());
}

std::pair<double, double> rk4_amplitude(const memdiff::AmplitudeSystem& amp, double mu1,
                                        double mu2, double r1, double r2, double T, double h) {
    double hm1 = amp.delta1(0) * mu1 + amp.delta1(1) * mu2;
    double hm2 = amp.delta2(0) * mu1 + amp.delta2(1) * mu2;
    auto f1 = [&](double x, double y) { return x * (hm1 + amp.p11 * x * x + amp.p12 * y * y); };
    auto f2 = [&](double x, double y) { return y * (hm2 + amp.p21 * x * x + amp.p22 * y * y); };
    long n = (long)std::ceil(T / h);
    double hh = T / n;
    for (long i = 0; i < n; ++i) {
        double k1x = f1(r1, r2), k1y = f2(r1, r2);
        double k2x = f1(r1 + hh / 2 * k1x, r2 + hh / 2 * k1y),
               k2y = f2(r1 + hh / 2 * k1x, r2 + hh / 2 * k1y);
        double k3x = f1(r1 + hh / 2 * k2x, r2 + hh / 2 * k2y),
               k3y = f2(r1 + hh / 2 * k2x, r2 + hh / 2 * k2y);
        double k4x = f1(r1 + hh * k3x, r2 + hh * k3y), k4y = f2(r1 + hh * k3x, r2 + hh * k3y);
        r1 += hh / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
        r2 += hh / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
        r1 = std::max(0.0, r1);
        r2 = std::max(0.0, r2);
    }
    return {r1, r2};
}

}  // namespace oracle
