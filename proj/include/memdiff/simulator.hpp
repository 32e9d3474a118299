#pragma once
// Method-of-lines integration of the delayed advection-diffusion system with
// Neumann walls, plus attractor diagnostics on probe time series.
#include <string>
#include <vector>

#include "memdiff/kinetics.hpp"

namespace memdiff {

struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteField : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WindowTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Grid {
    int M;        // interior cells
    double ell;   // domain (0, ell*pi)
    double dx() const;
    double x(int i) const;  // cell centers (i + 1/2) dx
};

// one writer advances a state; independent runs share nothing
class Simulator {
public:
    // dt <= 0 picks the diffusion-stable default 0.4 dx^2 / max(d11, d22)
    Simulator(const ModelParams& mp, int M = 256, double dt = -1);

    // constant history: the delayed gradient on [-tau, 0] equals the initial one
    void init(const std::vector<double>& u0, const std::vector<double>& v0);

    void step();

    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& v() const { return v_; }
    double t() const { return t_; }
    double dt() const { return dt_; }
    double dt_hist() const { return dt_hist_; }
    const Grid& grid() const { return grid_; }

private:
    ModelParams mp_;
    Grid grid_;
    double dt_, dt_hist_, t_ = 0;
    std::vector<double> u_, v_;
    // ring buffer of face-centered u_x fields covering [t - tau, t]
    int cap_ = 0, head_ = 0, count_ = 0;
    std::vector<double> hist_;        // cap_ x (M+1)
    std::vector<double> hist_time_;
    void push_hist();
    void interp_hist(double when, std::vector<double>& out) const;
    void face_grad(const std::vector<double>& f, std::vector<double>& out) const;
    void rhs(const std::vector<double>& uu, const std::vector<double>& vv,
             const std::vector<double>& gdel, std::vector<double>& du,
             std::vector<double>& dv) const;
    std::vector<double> scratch_[16];
};

struct SimResult {
    int M;
    double dt;
    double probe_x;
    std::vector<double> t, u_probe, v_probe;
    std::vector<double> mode_avg;   // time-averaged |c_n| of u over the run tail
    std::vector<double> final_u, final_v;
    std::vector<double> snap_t;
    std::vector<std::vector<double>> snap_u, snap_v;
};

SimResult simulate(const ModelParams& mp, const std::vector<double>& u0,
                   const std::vector<double>& v0, double T, int M = 256,
                   double probe_x = -1,          // default pi/5
                   double snapshot_cadence = 0,  // 0: no snapshots
                   double dt = -1);

// normalized cosine-basis coefficients c_n, n = 0..N
std::vector<double> mode_amplitudes(const std::vector<double>& field, double ell, int N);

enum class AttractorKind { Equilibrium, Periodic, QuasiPeriodic, Unclassified };

struct AttractorReport {
    AttractorKind kind = AttractorKind::Unclassified;
    int dominant_mode = -1;                // filled by callers with field access
    std::vector<double> frequencies;       // cycles per unit time, power-ordered
    std::vector<double> power_fraction;    // share of oscillatory power
    double amplitude = 0;                  // half peak-to-peak of the tail
    std::string note;
};

// tail classification of a uniformly sampled probe series; the tail is the
// final `window` time units
AttractorReport classify_attractor(const std::vector<double>& t, const std::vector<double>& y,
                                   double window, double harmonic_tol = 0.005);

}  // namespace memdiff
