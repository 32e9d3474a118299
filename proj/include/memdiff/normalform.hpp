#pragma once
// Third-order normal form at a Hopf-Hopf point: eigenbasis, quadratic and
// cubic coefficient tables, second-order response functions h, cross-term
// assembly, and the planar amplitude system.
#include <array>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "memdiff/linear.hpp"

namespace memdiff {

using Vec2c = Eigen::Vector2cd;
using QIdx = std::array<int, 4>;  // powers of (z1, z1bar, z2, z2bar)

struct DegenerateEigenvector : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularHSolve : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResonantDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenBasis {
    Vec2c phi0[2];    // right eigenvectors at theta = 0, first component 1
    Vec2c psi0[2];    // normalized left rows at s = 0
    cplx alpha[2];    // normalizers
    double omega_c[2];  // rescaled frequencies tau_c * omega_j
    Vec2c phi(int j, double theta) const;  // phi0 * exp(i omega_jc theta)
    Vec2c psi(int j, double s) const;      // psi0 * exp(-i omega_jc s)
};

// quadratic/cubic coefficient vectors of the projected nonlinearity
struct TaylorData {
    std::map<QIdx, Vec2c> reaction2;  // order-2 reaction, no spatial weight
    std::map<QIdx, Vec2c> reaction3;  // order-3 reaction
    std::map<QIdx, Vec2c> adv1, adv2, adv3;  // advection channels (see notes)
};

// h_{n,q}(theta) as a sum of exponentials c_k e^{r_k theta}
struct HFunc {
    std::vector<std::pair<Vec2c, cplx>> terms;
    Vec2c at(double theta) const;
};

struct HKey {
    int n;
    QIdx q;
    bool operator<(const HKey& o) const {
        if (n != o.n) return n < o.n;
        return q < o.q;
    }
};
using HSet = std::map<HKey, HFunc>;

struct NormalFormCoefficients {
    cplx B1_1, B2_1, B1_3, B2_3;              // linear-in-mu coefficients
    cplx C11, C12, C31, C32;
    cplx D11, D12, D31, D32;
    cplx E11, E12, E31, E32;
    cplx Ed11, Ed12, Ed31, Ed32;
    cplx B11, B12, B31, B32;                  // assembled cubic coefficients
};

struct AmplitudeSystem {
    Eigen::Vector2d delta1, delta2;  // delta_j = delta_j . (mu1, mu2)
    double p11, p12, p21, p22;
    bool simple_case;  // p11 * p22 > 0
};

enum class HPath { Closed, GenericBVP };

// internal pipeline context; exposed so tests can probe intermediates
class NormalForm {
public:
    NormalForm(const DoubleHopfPoint& dhp, const ModelParams& mp, const Equilibrium& eq);

    const EigenBasis& basis() const { return basis_; }
    const TaylorData& taylor() const { return taylor_; }

    // projection of the full quadratic onto mode n: map q -> 2-vector jump
    std::map<QIdx, Vec2c> mode_jump(int n) const;
    const std::vector<int>& mode_set() const { return modes_; }

    HFunc solve_h(int n, const QIdx& q, HPath path = HPath::Closed) const;
    HSet solve_h_all(HPath path = HPath::Closed) const;

    // residual of h in its defining boundary-value problem
    double h_residual(int n, const QIdx& q, const HFunc& h) const;

    void second_order_nf(NormalFormCoefficients& nfc) const;
    void cubic_step1(NormalFormCoefficients& nfc) const;
    void cubic_step2(NormalFormCoefficients& nfc) const;
    void cubic_step3(const HSet& h, NormalFormCoefficients& nfc) const;
    void cubic_step4(const HSet& h, NormalFormCoefficients& nfc) const;

    std::pair<NormalFormCoefficients, AmplitudeSystem> assemble(HPath path = HPath::Closed) const;

    // rescaled characteristic matrix at the critical point
    Eigen::Matrix2cd Mtil(int n, cplx lambda) const;
    cplx rate(const QIdx& q) const;  // (q1-q2) i w1c + (q3-q4) i w2c

    // scaling covariance hook: phi_j -> c phi_j, psi_j -> psi_j / c
    void rescale_eigenvectors(int j, cplx c);

    const DoubleHopfPoint& point() const { return dhp_; }

private:
    DoubleHopfPoint dhp_;
    ModelParams mp_;       // with d21 = d21_c, tau = tau_c
    Equilibrium eq_;
    Partials pt_;
    EigenBasis basis_;
    TaylorData taylor_;
    std::vector<int> modes_;

    Vec2c phiv(int k, double th) const;  // k in 0..3 over (phi1, conj, phi2, conj)
    cplx lam(int k) const;
    int mode_of(int k) const;
    Vec2c R2(const Vec2c& x, const Vec2c& y) const;
    Vec2c R3(const Vec2c& x, const Vec2c& y, const Vec2c& z) const;
    HFunc solve_h_closed(int n, const QIdx& q) const;
    HFunc solve_h_bvp(int n, const QIdx& q) const;
};

// convenience: full pipeline
std::pair<NormalFormCoefficients, AmplitudeSystem> normal_form(const DoubleHopfPoint& dhp,
                                                               const ModelParams& mp,
                                                               const Equilibrium& eq);

// cosine-basis overlap integrals over (0, ell*pi), normalized eigenfunctions
double overlap3(int p, int q, int r, double ell);            // gam_p gam_q gam_r
double overlap3_ss(int p, int q, int r, double ell);         // xi_p xi_q gam_r
double overlap4(int p, int q, int r, int s, double ell);     // gam^4

}  // namespace memdiff
