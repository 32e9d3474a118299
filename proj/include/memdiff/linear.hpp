#pragma once
// Spectral machinery: per-mode characteristic matrices, Hopf frequencies and
// delay curves, memory-coefficient thresholds, stability verdicts, and
// Hopf-Hopf point location.
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "memdiff/kinetics.hpp"

namespace memdiff {

using cplx = std::complex<double>;

struct CharacteristicData {
    int n;
    double kappa;            // (n/ell)^2
    double Tn, Jn, Pn, Qn, Delta;
};

struct HopfCurvePoint {
    int n;
    char branch;             // '+' or '-'
    int j;                   // winding index
    double omega;
    double tau_crit;
    double d21;
    bool branch_corrected;   // arccos branch had to be reflected
};

enum class Resonance { Strong, Weak, NonResonant };

struct DoubleHopfPoint {
    double d21_c, tau_c;
    int n1, n2;
    double omega1, omega2;   // positive frequencies, paired with n1/n2
    double omega1c, omega2c; // tau_c * omega
    char branch1 = '?', branch2 = '?';  // Hopf branches the frequencies sit on
    Resonance resonance;
};

struct StabilityVerdict {
    bool stable;
    std::vector<int> leading_modes;  // modes carrying roots with Re >= 0
};

struct CurveId {
    int n;
    char branch;
    int j;
};

struct ArccosDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoCrossing : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Inconclusive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// per-mode characteristic matrix M_n(lambda); unscaled time
Eigen::Matrix2cd char_matrix(int n, cplx lambda, const ModelParams& mp, const Equilibrium& eq);
// time-rescaled variant used by the normal form (lambda in units of 1/tau)
Eigen::Matrix2cd char_matrix_scaled(int n, cplx lambda, const ModelParams& mp,
                                    const Equilibrium& eq);
cplx char_det(int n, cplx lambda, const ModelParams& mp, const Equilibrium& eq);

CharacteristicData quartic_data(int n, const ModelParams& mp, const Equilibrium& eq);

// positive roots omega of w^4 + Pn w^2 + Qn = 0; descending ('+' root first)
std::vector<double> hopf_frequencies(int n, const ModelParams& mp, const Equilibrium& eq);

std::vector<HopfCurvePoint> hopf_delays(int n, char branch, int j_max, const ModelParams& mp,
                                        const Equilibrium& eq);

struct CriticalD21 {
    double d21_n;                    // Q_n sign change
    std::optional<double> d21_star;  // Delta_n = 0 threshold, when real
};
CriticalD21 critical_d21(int n, const ModelParams& mp, const Equilibrium& eq);

// characteristic roots of mode n inside [re_lo, re_hi] x [im_lo, im_hi],
// located by argument-principle winding counts and polished by Newton
std::vector<cplx> char_roots_in_box(int n, const ModelParams& mp, const Equilibrium& eq,
                                    double re_lo, double re_hi, double im_lo, double im_hi);

// two independent decision paths (crossing count vs root scan); throws
// Inconclusive if they disagree
StabilityVerdict stability_verdict(const ModelParams& mp, const Equilibrium& eq, int n_max = -1);

Resonance resonance_check(double omega1, double omega2, double m_tol = 1e-3);

// intersection of two Hopf delay curves by bisection in d21 over [lo, hi]
DoubleHopfPoint find_double_hopf(CurveId c1, CurveId c2, double d21_lo, double d21_hi,
                                 const ModelParams& mp, const Equilibrium& eq);

// tau of a single labeled curve at given d21 (empty if the frequency does not
// exist there)
std::optional<HopfCurvePoint> curve_tau(CurveId c, double d21, const ModelParams& mp,
                                        const Equilibrium& eq);

}  // namespace memdiff
