#pragma once
// Model family: parameters, reaction terms, equilibrium, Taylor data.
#include <functional>
#include <stdexcept>
#include <string>

namespace memdiff {

struct PreconditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteDerivative : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// partial derivatives of f and g at a point, f_ij = d^{i+j} f / du^i dv^j
struct Partials {
    double f10, f01, f20, f11, f02, f30, f21, f12, f03;
    double g10, g01, g20, g11, g02, g30, g21, g12, g03;
};

// pluggable reaction kinetics: f, g and (optionally) closed-form partials
struct Kinetics {
    std::string name;
    std::function<double(double, double)> f, g;
    std::function<Partials(double, double)> closed;  // may be empty

    Partials partials(double u, double v) const;          // closed if available
    Partials partials_numeric(double u, double v) const;  // central differences
};

// Holling type II: f = u(1-u/a) - b u v/(1+u), g = b u v/(1+u) - c v
Kinetics holling2(double a, double b, double c);

struct Equilibrium {
    double u, v;              // positive steady state
    double a11, a12, a21, a22;  // linearization entries
};

// positive steady state u* = c/(b-c), v* = (a-u*)(1+u*)/(ab);
// throws PreconditionViolated unless b > c(1+a)/a
Equilibrium holling2_equilibrium(double a, double b, double c);

// linearization entries from kinetics partials at (u*, v*)
void fill_jacobian(const Kinetics& kin, Equilibrium& eq);

struct ModelParams {
    double d11 = 0, d22 = 0, d21 = 0, tau = 0, ell = 1;
    Kinetics kinetics;
    double ka = 0, kb = 0, kc = 0;  // holling2 parameters when applicable

    void validate() const;  // throws PreconditionViolated on bad ranges
};

}  // namespace memdiff
