#include "memdiff/kinetics.hpp"

#include <cmath>

namespace memdiff {

namespace {
// step sizes tuned per derivative order: nested central differences of order k
// amplify roundoff like eps/h^k, so h must grow with k
double step_for(double x, int order) {
    static const double h0[4] = {0, 1e-4, 2e-3, 5e-3};
    return h0[order] * (1 + std::abs(x));
}
}

Partials Kinetics::partials(double u, double v) const {
    Partials p = closed ? closed(u, v) : partials_numeric(u, v);
    const double* vals = &p.f10;
    for (int i = 0; i < 18; ++i)
        if (!std::isfinite(vals[i]))
            throw NonFiniteDerivative("non-finite derivative of " + name);
    return p;
}

Partials Kinetics::partials_numeric(double u, double v) const {
    using Fn = std::function<double(double, double)>;
    auto eval = [&](double scale) {
        auto du = [&](const Fn& F, int ord) -> Fn {
            double h = scale * step_for(u, ord);
            return [F, h](double x, double y) { return (F(x + h, y) - F(x - h, y)) / (2 * h); };
        };
        auto dv = [&](const Fn& F, int ord) -> Fn {
            double h = scale * step_for(v, ord);
            return [F, h](double x, double y) { return (F(x, y + h) - F(x, y - h)) / (2 * h); };
        };
        Partials p{};
        p.f10 = du(f, 1)(u, v);                   p.g10 = du(g, 1)(u, v);
        p.f01 = dv(f, 1)(u, v);                   p.g01 = dv(g, 1)(u, v);
        p.f20 = du(du(f, 2), 2)(u, v);            p.g20 = du(du(g, 2), 2)(u, v);
        p.f11 = du(dv(f, 2), 2)(u, v);            p.g11 = du(dv(g, 2), 2)(u, v);
        p.f02 = dv(dv(f, 2), 2)(u, v);            p.g02 = dv(dv(g, 2), 2)(u, v);
        p.f30 = du(du(du(f, 3), 3), 3)(u, v);     p.g30 = du(du(du(g, 3), 3), 3)(u, v);
        p.f21 = du(du(dv(f, 3), 3), 3)(u, v);     p.g21 = du(du(dv(g, 3), 3), 3)(u, v);
        p.f12 = du(dv(dv(f, 3), 3), 3)(u, v);     p.g12 = du(dv(dv(g, 3), 3), 3)(u, v);
        p.f03 = dv(dv(dv(f, 3), 3), 3)(u, v);     p.g03 = dv(dv(dv(g, 3), 3), 3)(u, v);
        return p;
    };
    // one Richardson pass removes the leading h^2 error of the nested stencils
    Partials coarse = eval(1.0), fine = eval(0.5), out{};
    const double* pc = &coarse.f10;
    const double* pf = &fine.f10;
    double* po = &out.f10;
    for (int i = 0; i < 18; ++i) po[i] = (4 * pf[i] - pc[i]) / 3;
    return out;
}

Kinetics holling2(double a, double b, double c) {
    Kinetics k;
    k.name = "holling2";
    k.f = [a, b](double u, double v) { return u * (1 - u / a) - b * u * v / (1 + u); };
    k.g = [b, c](double u, double v) { return b * u * v / (1 + u) - c * v; };
    k.closed = [a, b, c](double u, double v) {
        // s = u/(1+u); s', s'', s''' in closed form
        const double s = u / (1 + u);
        const double s1 = 1.0 / ((1 + u) * (1 + u));
        const double s2 = -2.0 / std::pow(1 + u, 3);
        const double s3 = 6.0 / std::pow(1 + u, 4);
        Partials p{};
        p.f10 = 1 - 2 * u / a - b * v * s1;
        p.f01 = -b * s;
        p.f20 = -2 / a - b * v * s2;
        p.f11 = -b * s1;
        p.f02 = 0;
        p.f30 = -b * v * s3;
        p.f21 = -b * s2;
        p.f12 = 0;
        p.f03 = 0;
        p.g10 = b * v * s1;
        p.g01 = b * s - c;
        p.g20 = b * v * s2;
        p.g11 = b * s1;
        p.g02 = 0;
        p.g30 = b * v * s3;
        p.g21 = b * s2;
        p.g12 = 0;
        p.g03 = 0;
        return p;
    };
    return k;
}

Equilibrium holling2_equilibrium(double a, double b, double c) {
    if (b <= c || c / (b - c) >= a)
        throw PreconditionViolated("no positive equilibrium: need b > c(1+a)/a");
    Equilibrium eq{};
    eq.u = c / (b - c);
    eq.v = (a - eq.u) * (1 + eq.u) / (a * b);
    Kinetics kin = holling2(a, b, c);
    fill_jacobian(kin, eq);
    return eq;
}

void fill_jacobian(const Kinetics& kin, Equilibrium& eq) {
    Partials p = kin.partials(eq.u, eq.v);
    eq.a11 = p.f10;
    eq.a12 = p.f01;
    eq.a21 = p.g10;
    eq.a22 = p.g01;
}

void ModelParams::validate() const {
    if (!(d11 > 0) || !(d22 > 0))
        throw PreconditionViolated("d11 and d22 must be positive");
    if (d21 < 0 || tau < 0)
        throw PreconditionViolated("d21 and tau must be non-negative");
    if (!(ell > 0))
        throw PreconditionViolated("ell must be positive");
}

}  // namespace memdiff
