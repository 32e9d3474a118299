#include "memdiff/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

namespace memdiff {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double Grid::dx() const { return ell * kPi / M; }
double Grid::x(int i) const { return (i + 0.5) * dx(); }

Simulator::Simulator(const ModelParams& mp, int M, double dt) : mp_(mp) {
    if (M < 64) throw PreconditionViolated("grid needs at least 64 cells");
    grid_ = Grid{M, mp.ell};
    double dx = grid_.dx();
    double dt_max = 0.4 * dx * dx / std::max(mp.d11, mp.d22);
    dt_ = dt <= 0 ? dt_max : dt;
    if (dt_ > dt_max * (1 + 1e-12)) throw CflViolation("dt exceeds diffusion limit");
    if (mp.tau > 0 && dt_ > mp.tau) throw CflViolation("dt exceeds the delay");
    dt_hist_ = mp.tau > 0 ? std::min(dt_, mp.tau / 512) : dt_;
    if (mp.tau > 0) {
        cap_ = (int)std::ceil(mp.tau / dt_) + 4;
        hist_.assign((size_t)cap_ * (M + 1), 0.0);
        hist_time_.assign(cap_, 0.0);
    }
    for (auto& s : scratch_) s.assign(M + 1, 0.0);
}

void Simulator::face_grad(const std::vector<double>& f, std::vector<double>& out) const {
    const int M = grid_.M;
    const double dx = grid_.dx();
    out.resize(M + 1);
    out[0] = out[M] = 0.0;  // Neumann walls
    for (int i = 1; i < M; ++i) out[i] = (f[i] - f[i - 1]) / dx;
}

void Simulator::push_hist() {
    if (mp_.tau <= 0) return;
    const int M = grid_.M;
    std::vector<double>& g = scratch_[11];
    face_grad(u_, g);
    head_ = (head_ + 1) % cap_;
    std::copy(g.begin(), g.end(), hist_.begin() + (size_t)head_ * (M + 1));
    hist_time_[head_] = t_;
    if (count_ < cap_) ++count_;
}

void Simulator::interp_hist(double when, std::vector<double>& out) const {
    const int M = grid_.M;
    out.resize(M + 1);
    // slots head_-count_+1 .. head_ are chronological, spaced exactly dt_
    int oldest = (head_ - count_ + 1 + cap_) % cap_;
    double t0 = hist_time_[oldest];
    double s = std::clamp((when - t0) / dt_, 0.0, (double)(count_ - 1));
    int k = std::min((int)s, std::max(0, count_ - 2));
    double w = count_ == 1 ? 0.0 : s - k;
    const double* a = &hist_[(size_t)((oldest + k) % cap_) * (M + 1)];
    const double* b = count_ == 1 ? a : &hist_[(size_t)((oldest + k + 1) % cap_) * (M + 1)];
    for (int i = 0; i <= M; ++i) out[i] = (1 - w) * a[i] + w * b[i];
}

void Simulator::rhs(const std::vector<double>& uu, const std::vector<double>& vv,
                    const std::vector<double>& gdel, std::vector<double>& du,
                    std::vector<double>& dv) const {
    const int M = grid_.M;
    const double dx = grid_.dx(), idx2 = 1.0 / (dx * dx);
    du.resize(M);
    dv.resize(M);
    auto& q = const_cast<Simulator*>(this)->scratch_[10];
    q.resize(M + 1);
    q[0] = q[M] = 0.0;  // zero advective flux through the walls
    for (int f = 1; f < M; ++f) q[f] = 0.5 * (vv[f - 1] + vv[f]) * gdel[f];
    for (int i = 0; i < M; ++i) {
        double ul = i > 0 ? uu[i - 1] : uu[0];
        double ur = i < M - 1 ? uu[i + 1] : uu[M - 1];
        double vl = i > 0 ? vv[i - 1] : vv[0];
        double vr = i < M - 1 ? vv[i + 1] : vv[M - 1];
        double lapu = (ul - 2 * uu[i] + ur) * idx2;
        double lapv = (vl - 2 * vv[i] + vr) * idx2;
        du[i] = mp_.d11 * lapu + mp_.kinetics.f(uu[i], vv[i]);
        dv[i] = mp_.d22 * lapv - mp_.d21 * (q[i + 1] - q[i]) / dx +
                mp_.kinetics.g(uu[i], vv[i]);
    }
}

void Simulator::init(const std::vector<double>& u0, const std::vector<double>& v0) {
    const int M = grid_.M;
    if ((int)u0.size() != M || (int)v0.size() != M)
        throw PreconditionViolated("initial fields must match the grid");
    u_ = u0;
    v_ = v0;
    t_ = 0;
    head_ = -1;
    count_ = 0;
    if (mp_.tau > 0) {
        // constant history: replicate the initial gradient across [-tau, 0] at
        // the step cadence, so all slots stay uniformly dt apart
        std::vector<double> g;
        face_grad(u_, g);
        int n = (int)std::ceil(mp_.tau / dt_) + 1;
        for (int k = 0; k < n; ++k) {
            head_ = (head_ + 1) % cap_;
            std::copy(g.begin(), g.end(), hist_.begin() + (size_t)head_ * (M + 1));
            hist_time_[head_] = -(double)(n - 1 - k) * dt_;
            ++count_;
        }
    }
}

void Simulator::step() {
    const int M = grid_.M;
    auto& g0 = scratch_[0];
    auto& g1 = scratch_[1];
    auto& g2 = scratch_[2];
    const bool delayed = mp_.tau > 0;
    if (delayed) {
        interp_hist(t_ - mp_.tau, g0);
        interp_hist(t_ - mp_.tau + dt_ / 2, g1);
        interp_hist(t_ - mp_.tau + dt_, g2);
    }
    auto& k1u = scratch_[3];
    auto& k1v = scratch_[4];
    auto& k2u = scratch_[5];
    auto& k2v = scratch_[6];
    auto& tu = scratch_[7];
    auto& tv = scratch_[8];
    auto& gcur = scratch_[9];
    auto& k3u = scratch_[12];
    auto& k3v = scratch_[13];
    auto& k4u = scratch_[14];
    auto& k4v = scratch_[15];
    auto stage = [&](const std::vector<double>& uu, const std::vector<double>& vv,
                     const std::vector<double>& gd, std::vector<double>& du,
                     std::vector<double>& dv) {
        if (delayed) {
            rhs(uu, vv, gd, du, dv);
        } else {
            face_grad(uu, gcur);
            rhs(uu, vv, gcur, du, dv);
        }
    };
    stage(u_, v_, g0, k1u, k1v);
    tu.resize(M);
    tv.resize(M);
    for (int i = 0; i < M; ++i) {
        tu[i] = u_[i] + dt_ / 2 * k1u[i];
        tv[i] = v_[i] + dt_ / 2 * k1v[i];
    }
    stage(tu, tv, g1, k2u, k2v);
    for (int i = 0; i < M; ++i) {
        tu[i] = u_[i] + dt_ / 2 * k2u[i];
        tv[i] = v_[i] + dt_ / 2 * k2v[i];
    }
    stage(tu, tv, g1, k3u, k3v);
    for (int i = 0; i < M; ++i) {
        tu[i] = u_[i] + dt_ * k3u[i];
        tv[i] = v_[i] + dt_ * k3v[i];
    }
    stage(tu, tv, g2, k4u, k4v);
    for (int i = 0; i < M; ++i) {
        u_[i] += dt_ / 6 * (k1u[i] + 2 * k2u[i] + 2 * k3u[i] + k4u[i]);
        v_[i] += dt_ / 6 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
    }
    t_ += dt_;
    for (int i = 0; i < M; ++i)
        if (!std::isfinite(u_[i]) || !std::isfinite(v_[i]))
            throw NonFiniteField("field blow-up at t = " + std::to_string(t_));
    push_hist();
}

std::vector<double> mode_amplitudes(const std::vector<double>& field, double ell, int N) {
    const int M = (int)field.size();
    const double dx = ell * kPi / M;
    std::vector<double> c(N + 1, 0.0);
    for (int n = 0; n <= N; ++n) {
        double nrm = std::sqrt((n == 0 ? 1.0 : 2.0) / (ell * kPi));
        double s = 0;
        for (int i = 0; i < M; ++i) s += field[i] * nrm * std::cos(n * (i + 0.5) * dx / ell);
        c[n] = s * dx;
    }
    return c;
}

SimResult simulate(const ModelParams& mp, const std::vector<double>& u0,
                   const std::vector<double>& v0, double T, int M, double probe_x,
                   double snapshot_cadence, double dt) {
    Simulator sim(mp, M, dt);
    sim.init(u0, v0);
    SimResult res;
    res.M = M;
    res.dt = sim.dt();
    res.probe_x = probe_x <= 0 ? kPi / 5 : probe_x;
    double dxg = sim.grid().dx();
    int pi_idx = std::clamp((int)std::lround(res.probe_x / dxg - 0.5), 0, M - 1);
    long steps = (long)std::ceil(T / sim.dt());
    int probe_every = std::max(1L, (long)std::floor(0.02 / sim.dt()));
    long snap_every = snapshot_cadence > 0
                          ? std::max(1L, (long)std::lround(snapshot_cadence / sim.dt()))
                          : 0;
    const int NMODE = 8;
    std::vector<double> macc(NMODE + 1, 0.0);
    std::vector<double> ctab((NMODE + 1) * M);
    for (int n = 0; n <= NMODE; ++n) {
        double nrm = std::sqrt((n == 0 ? 1.0 : 2.0) / (mp.ell * kPi)) * dxg;
        for (int i = 0; i < M; ++i)
            ctab[n * M + i] = nrm * std::cos(n * (i + 0.5) * dxg / mp.ell);
    }
    long mcount = 0;
    auto record = [&](long k) {
        res.t.push_back(sim.t());
        res.u_probe.push_back(sim.u()[pi_idx]);
        res.v_probe.push_back(sim.v()[pi_idx]);
        if (sim.t() >= 0.75 * T) {
            for (int n = 0; n <= NMODE; ++n) {
                double s = 0;
                for (int i = 0; i < M; ++i) s += sim.u()[i] * ctab[n * M + i];
                macc[n] += std::abs(s);
            }
            ++mcount;
        }
        if (snap_every > 0 && k % snap_every == 0) {
            res.snap_t.push_back(sim.t());
            res.snap_u.push_back(sim.u());
            res.snap_v.push_back(sim.v());
        }
    };
    record(0);
    for (long k = 1; k <= steps; ++k) {
        sim.step();
        if (k % probe_every == 0 || k == steps) record(k);
    }
    res.mode_avg.assign(NMODE + 1, 0.0);
    if (mcount > 0)
        for (int n = 0; n <= NMODE; ++n) res.mode_avg[n] = macc[n] / mcount;
    res.final_u = sim.u();
    res.final_v = sim.v();
    return res;
}

namespace {
// demodulate y at f0: block-averaged phase drift refines the frequency, and
// the block-amplitude trend separates stationary lines from decaying
// transients (ratio = second-half mean amplitude / first-half mean amplitude)
struct DemodStats {
    double f;
    double amp_trend;  // fitted amplitude ratio across the window (1 = steady)
    double amp_corr;   // correlation of log-amplitude with time
};
DemodStats demod_stats(const std::vector<double>& t, const std::vector<double>& y, double f0) {
    const size_t n = t.size();
    std::vector<std::complex<double>> z(n);
    for (size_t i = 0; i < n; ++i)
        z[i] = y[i] * std::exp(std::complex<double>(0, -2 * kPi * f0 * (t[i] - t[0])));
    const int nb = 48;
    size_t bl = n / nb;
    if (bl < 4) return {f0, 1.0, 0.0};
    std::vector<double> bt, ph, am, amt;
    for (int b = 0; b < nb; ++b) {
        std::complex<double> m = 0;
        double tm = 0;
        for (size_t i = b * bl; i < (b + 1) * bl; ++i) {
            m += z[i];
            tm += t[i];
        }
        m /= (double)bl;
        tm /= (double)bl;
        if (std::abs(m) > 1e-14) {
            am.push_back(std::log(std::abs(m)));
            amt.push_back(tm);
            bt.push_back(tm);
            ph.push_back(std::arg(m));
        }
    }
    double trend = 1.0, corr = 0.0;
    if (am.size() >= 8) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, np = (double)am.size();
        for (size_t i = 0; i < am.size(); ++i) {
            sx += amt[i];
            sy += am[i];
            sxx += amt[i] * amt[i];
            sxy += amt[i] * am[i];
            syy += am[i] * am[i];
        }
        double vx = sxx - sx * sx / np, vy = syy - sy * sy / np, cxy = sxy - sx * sy / np;
        if (vx > 0 && vy > 1e-30) {
            double slope = cxy / vx;
            corr = cxy / std::sqrt(vx * vy);
            trend = std::exp(slope * (amt.back() - amt.front()));
        }
    }
    if (bt.size() < 4) return {f0, trend, corr};
    for (size_t i = 1; i < ph.size(); ++i) {
        while (ph[i] - ph[i - 1] > kPi) ph[i] -= 2 * kPi;
        while (ph[i] - ph[i - 1] < -kPi) ph[i] += 2 * kPi;
    }
    double st = 0, sp = 0, stt = 0, stp = 0;
    for (size_t i = 0; i < bt.size(); ++i) {
        st += bt[i];
        sp += ph[i];
        stt += bt[i] * bt[i];
        stp += bt[i] * ph[i];
    }
    double nptr = (double)bt.size();
    double slope = (nptr * stp - st * sp) / (nptr * stt - st * st);
    return {f0 + slope / (2 * kPi), trend, corr};
}
}  // namespace

AttractorReport classify_attractor(const std::vector<double>& t, const std::vector<double>& y,
                                   double window, double harmonic_tol) {
    if (t.size() != y.size() || t.size() < 16)
        throw PreconditionViolated("probe series too short");
    size_t start = 0;
    while (start < t.size() && t[start] < t.back() - window) ++start;
    std::vector<double> tt(t.begin() + start, t.end());
    std::vector<double> yy(y.begin() + start, y.end());
    AttractorReport rep;
    auto [mn, mx] = std::minmax_element(yy.begin(), yy.end());
    double pp = *mx - *mn;
    rep.amplitude = pp / 2;
    if (pp < 1e-6) {
        rep.kind = AttractorKind::Equilibrium;
        return rep;
    }
    double dt_s = (tt.back() - tt.front()) / (tt.size() - 1);
    double mean = 0;
    for (double v : yy) mean += v;
    mean /= yy.size();
    for (double& v : yy) v -= mean;
    size_t N = 1;
    while (N * 2 <= yy.size()) N *= 2;
    std::vector<double> win(N);
    for (size_t i = 0; i < N; ++i) {
        double h = 0.5 - 0.5 * std::cos(2 * kPi * i / (N - 1));
        win[i] = yy[yy.size() - N + i] * h;
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, win);
    size_t half = N / 2;
    std::vector<double> P(half, 0.0);
    double ptot = 0;
    for (size_t k = 1; k < half; ++k) {
        P[k] = std::norm(spec[k]);
        ptot += P[k];
    }
    double bin = 1.0 / (N * dt_s);
    // local maxima, strongest first, sidelobes of stronger peaks suppressed
    std::vector<std::pair<double, size_t>> peaks;
    for (size_t k = 2; k + 1 < half; ++k)
        if (P[k] > P[k - 1] && P[k] >= P[k + 1]) peaks.push_back({P[k], k});
    std::sort(peaks.rbegin(), peaks.rend());
    struct Pk {
        double f, frac, trend, corr;
    };
    std::vector<Pk> sig;
    std::vector<double> tail_t(tt.end() - N, tt.end());
    std::vector<double> tail_y(yy.end() - N, yy.end());
    for (auto& [pw, k] : peaks) {
        if (pw < 1e-4 * peaks.front().first) break;
        // quadratic interpolation then phase-slope refinement
        double d = 0.5 * (P[k - 1] - P[k + 1]) / (P[k - 1] - 2 * P[k] + P[k + 1]);
        double f0 = (k - d) * bin;
        DemodStats ds = demod_stats(tail_t, tail_y, f0);
        double f = ds.f;
        bool dup = false;
        for (auto& s : sig)
            if (std::abs(s.f - f) < 1.5 * bin) dup = true;
        if (dup) continue;
        // gather power near the peak so leakage does not dilute the fraction
        double pk = 0;
        for (size_t j = (k > 2 ? k - 2 : 1); j <= std::min(k + 2, half - 1); ++j) pk += P[j];
        sig.push_back({f, pk / ptot, ds.amp_trend, ds.amp_corr});
        if (sig.size() >= 8) break;
    }
    if (sig.empty()) {
        rep.kind = AttractorKind::Unclassified;
        rep.note = "no spectral peaks";
        return rep;
    }
    double f1 = sig.front().f;
    if (window < 50.0 / f1) throw WindowTooShort("tail shorter than 50 dominant periods");
    // keep the dominant line; drop weaker lines that lose amplitude from the
    // preceding window to the tail window (slowly damped transients rather
    // than attractor content), measured by single-frequency Hann projections
    auto hann_amp = [&](double f, size_t i0, size_t i1) {
        std::complex<double> acc = 0;
        size_t n = i1 - i0;
        double m = 0;
        for (size_t i = i0; i < i1; ++i) m += y[i];
        m /= n;
        for (size_t i = i0; i < i1; ++i) {
            double h = 0.5 - 0.5 * std::cos(2 * kPi * (i - i0) / (double)(n - 1));
            acc += (y[i] - m) * h * std::exp(std::complex<double>(0, -2 * kPi * f * t[i]));
        }
        return std::abs(acc) / n;
    };
    size_t early0 = 0;
    while (early0 < t.size() && t[early0] < t.back() - 2 * window) ++early0;
    size_t late0 = t.size() - N;
    bool have_early = late0 > early0 && (late0 - early0) > N / 2;
    std::vector<Pk> strong;
    for (auto& s : sig) {
        if (s.frac < 0.01) continue;
        if (s.f != sig.front().f && have_early) {
            double a_early = hann_amp(s.f, early0, late0);
            double a_late = hann_amp(s.f, late0, t.size());
            if (a_late < 0.7 * a_early) continue;
        }
        strong.push_back(s);
    }
    if (strong.empty()) strong.push_back(sig.front());
    double base = strong[0].f;
    for (auto& s : strong) base = std::min(base, s.f);
    bool allharm = true;
    for (auto& s : strong) {
        double m = std::max(1.0, std::round(s.f / base));
        if (std::abs(s.f - m * base) > harmonic_tol * s.f) allharm = false;
    }
    if (allharm) {
        rep.kind = AttractorKind::Periodic;
        rep.frequencies = {strong[0].f};
        rep.power_fraction = {strong[0].frac};
        return rep;
    }
    // strongest peak plus the strongest peak incommensurate with it
    for (auto& s : strong) {
        if (s.f == strong[0].f) continue;
        double ratio = s.f > strong[0].f ? s.f / strong[0].f : strong[0].f / s.f;
        double m = std::round(ratio);
        if (m < 1 || std::abs(ratio - m) > harmonic_tol * ratio) {
            rep.kind = AttractorKind::QuasiPeriodic;
            rep.frequencies = {strong[0].f, s.f};
            rep.power_fraction = {strong[0].frac, s.frac};
            return rep;
        }
    }
    rep.kind = AttractorKind::Unclassified;
    rep.note = "incommensurate structure below power threshold";
    return rep;
}

}  // namespace memdiff
