#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memdiff/config.hpp"
#include "memdiff/report.hpp"
#include "memdiff/unfolding.hpp"
#include "memdiff/validate.hpp"

namespace fs = std::filesystem;
using namespace memdiff;

namespace {

struct Ctx {
    std::map<std::string, std::string> kv;
    std::string out = ".";
    int threads = 6;
    unsigned long seed = 12345;
};

double getd(const Ctx& c, const std::string& k, std::optional<double> dflt = {}) {
    auto it = c.kv.find(k);
    if (it == c.kv.end()) {
        if (dflt) return *dflt;
        throw ConfigError("missing config key: " + k);
    }
    return std::stod(it->second);
}

int geti(const Ctx& c, const std::string& k, std::optional<int> dflt = {}) {
    auto it = c.kv.find(k);
    if (it == c.kv.end()) {
        if (dflt) return *dflt;
        throw ConfigError("missing config key: " + k);
    }
    return std::stoi(it->second);
}

std::string gets(const Ctx& c, const std::string& k, std::optional<std::string> dflt = {}) {
    auto it = c.kv.find(k);
    if (it == c.kv.end()) {
        if (dflt) return *dflt;
        throw ConfigError("missing config key: " + k);
    }
    return it->second;
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void emit(const Ctx& c, const std::string& name, const std::string& text) {
    fs::create_directories(c.out);
    write_text((fs::path(c.out) / name).string(), text);
}

void emit_manifest(const Ctx& c, const std::string& verb) {
    emit(c, verb + "-manifest.json", run_manifest(verb, c.kv, c.seed).dump(2) + "\n");
}

CurveId parse_curve(const std::string& s) {
    // "n,branch,j" e.g. "2,+,1"
    CurveId id;
    if (std::sscanf(s.c_str(), "%d,%c,%d", &id.n, &id.branch, &id.j) != 3)
        throw ConfigError("bad curve spec: " + s + " (want n,branch,j)");
    return id;
}

struct Model {
    ModelParams mp;
    Equilibrium eq;
};

Model load_model(const Ctx& c) {
    Model m;
    m.mp = model_from_config(c.kv);
    m.eq = holling2_equilibrium(m.mp.ka, m.mp.kb, m.mp.kc);
    fill_jacobian(m.mp.kinetics, m.eq);
    return m;
}

DoubleHopfPoint locate_from_config(const Ctx& c, const Model& m) {
    CurveId c1 = parse_curve(gets(c, "dh.curve1"));
    CurveId c2 = parse_curve(gets(c, "dh.curve2"));
    return find_double_hopf(c1, c2, getd(c, "dh.d21_lo"), getd(c, "dh.d21_hi"), m.mp, m.eq);
}

// --- verbs ---

void verb_equilibrium(const Ctx& c) {
    Model m = load_model(c);
    emit(c, "equilibrium.json", model_report(m.mp, m.eq).dump(2) + "\n");
    emit_manifest(c, "equilibrium");
}

void verb_stability_map(const Ctx& c) {
    Model m = load_model(c);
    double d_lo = getd(c, "map.d21_min"), d_hi = getd(c, "map.d21_max");
    double t_lo = getd(c, "map.tau_min"), t_hi = getd(c, "map.tau_max");
    int nd = geti(c, "map.d21_steps"), nt = geti(c, "map.tau_steps");
    std::string csv = "d21,tau,stable,leading_modes\n";
    for (int i = 0; i < nd; ++i) {
        double d21 = nd == 1 ? d_lo : d_lo + (d_hi - d_lo) * i / (nd - 1);
        for (int j = 0; j < nt; ++j) {
            double tau = nt == 1 ? t_lo : t_lo + (t_hi - t_lo) * j / (nt - 1);
            ModelParams mp = m.mp;
            mp.d21 = d21;
            mp.tau = tau;
            StabilityVerdict v = stability_verdict(mp, m.eq);
            std::string modes;
            for (int n : v.leading_modes) modes += (modes.empty() ? "" : "|") + std::to_string(n);
            csv += num(d21) + "," + num(tau) + "," + (v.stable ? "1" : "0") + "," + modes + "\n";
        }
    }
    emit(c, "stability_map.csv", csv);
    // overlaid Hopf-curve polylines over the same d21 range
    int n_max = geti(c, "curves.n_max", 3), j_max = geti(c, "curves.j_max", 2);
    std::string cc = "n,branch,j,d21,tau\n";
    for (int n = 1; n <= n_max; ++n)
        for (char br : {'+', '-'})
            for (int j = 0; j <= j_max; ++j)
                for (int i = 0; i < nd; ++i) {
                    double d21 = nd == 1 ? d_lo : d_lo + (d_hi - d_lo) * i / (nd - 1);
                    auto pt = curve_tau({n, br, j}, d21, m.mp, m.eq);
                    if (!pt || pt->tau_crit < t_lo || pt->tau_crit > t_hi) continue;
                    cc += std::to_string(n) + "," + br + "," + std::to_string(j) + "," +
                          num(d21) + "," + num(pt->tau_crit) + "\n";
                }
    emit(c, "hopf_curves.csv", cc);
    emit_manifest(c, "stability-map");
}

void verb_hopf_curves(const Ctx& c) {
    Model m = load_model(c);
    double d_lo = getd(c, "curves.d21_min"), d_hi = getd(c, "curves.d21_max");
    int nd = geti(c, "curves.d21_steps");
    int n_max = geti(c, "curves.n_max", 3), j_max = geti(c, "curves.j_max", 2);
    std::string cc = "n,branch,j,d21,tau,omega\n";
    for (int n = 1; n <= n_max; ++n)
        for (char br : {'+', '-'})
            for (int j = 0; j <= j_max; ++j)
                for (int i = 0; i < nd; ++i) {
                    double d21 = nd == 1 ? d_lo : d_lo + (d_hi - d_lo) * i / (nd - 1);
                    auto pt = curve_tau({n, br, j}, d21, m.mp, m.eq);
                    if (!pt) continue;
                    cc += std::to_string(n) + "," + br + "," + std::to_string(j) + "," +
                          num(d21) + "," + num(pt->tau_crit) + "," + num(pt->omega) + "\n";
                }
    emit(c, "hopf_curves.csv", cc);
    emit_manifest(c, "hopf-curves");
}

void verb_double_hopf(const Ctx& c) {
    Model m = load_model(c);
    DoubleHopfPoint dh = locate_from_config(c, m);
    emit(c, "double_hopf.json", double_hopf_report(dh).dump(2) + "\n");
    emit_manifest(c, "double-hopf");
}

json nf_document(const DoubleHopfPoint& dh, const NormalFormCoefficients& nfc,
                 const AmplitudeSystem& amp) {
    auto cz = [](const cplx& z) { return json::array({z.real(), z.imag()}); };
    return json{{"point",
                 {{"d21_c", dh.d21_c},
                  {"tau_c", dh.tau_c},
                  {"n1", dh.n1},
                  {"n2", dh.n2},
                  {"omega1", dh.omega1},
                  {"omega2", dh.omega2}}},
                {"B",
                 {{"B1_1", cz(nfc.B1_1)},
                  {"B2_1", cz(nfc.B2_1)},
                  {"B1_3", cz(nfc.B1_3)},
                  {"B2_3", cz(nfc.B2_3)},
                  {"B11", cz(nfc.B11)},
                  {"B12", cz(nfc.B12)},
                  {"B31", cz(nfc.B31)},
                  {"B32", cz(nfc.B32)}}},
                {"amplitude",
                 {{"delta1", json::array({amp.delta1(0), amp.delta1(1)})},
                  {"delta2", json::array({amp.delta2(0), amp.delta2(1)})},
                  {"p", json::array({json::array({amp.p11, amp.p12}),
                                     json::array({amp.p21, amp.p22})})},
                  {"case", amp.simple_case ? "simple" : "difficult"}}}};
}

void verb_normal_form(const Ctx& c) {
    Model m = load_model(c);
    DoubleHopfPoint dh = locate_from_config(c, m);
    ModelParams mc = m.mp;
    mc.d21 = dh.d21_c;
    mc.tau = dh.tau_c;
    auto [nfc, amp] = normal_form(dh, mc, m.eq);
    emit(c, "normal_form.json", nf_document(dh, nfc, amp).dump(2) + "\n");
    emit_manifest(c, "normal-form");
}

void verb_classify(const Ctx& c) {
    Model m = load_model(c);
    DoubleHopfPoint dh = locate_from_config(c, m);
    ModelParams mc = m.mp;
    mc.d21 = dh.d21_c;
    mc.tau = dh.tau_c;
    auto [nfc, amp] = normal_form(dh, mc, m.eq);
    std::vector<std::pair<double, double>> pts;
    if (c.kv.count("classify.d21_steps")) {
        double d_lo = getd(c, "classify.d21_min"), d_hi = getd(c, "classify.d21_max");
        double t_lo = getd(c, "classify.tau_min"), t_hi = getd(c, "classify.tau_max");
        int nd = geti(c, "classify.d21_steps"), nt = geti(c, "classify.tau_steps");
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nt; ++j)
                pts.push_back({nd == 1 ? d_lo : d_lo + (d_hi - d_lo) * i / (nd - 1),
                               nt == 1 ? t_lo : t_lo + (t_hi - t_lo) * j / (nt - 1)});
    } else {
        pts.push_back({getd(c, "classify.d21"), getd(c, "classify.tau")});
    }
    std::string csv = "d21,tau,mu1,mu2,region,label\n";
    for (auto [d21, tau] : pts) {
        PointClassification pc = classify_point(amp, dh, d21, tau);
        csv += num(d21) + "," + num(tau) + "," + num(pc.mu1) + "," + num(pc.mu2) + "," +
               std::to_string(pc.region) + "," + label_name(pc.label) + "\n";
    }
    emit(c, "classification.csv", csv);
    emit(c, "regions.json", region_report(region_partition(amp, dh)).dump(2) + "\n");
    emit_manifest(c, "classify");
}

void verb_simulate(const Ctx& c) {
    Model m = load_model(c);
    double T = getd(c, "sim.T");
    int M = geti(c, "sim.M", 256);
    double amp = getd(c, "sim.ic_amp", 0.005);
    double ic_mode = getd(c, "sim.ic_mode", 1.0);
    double probe_x = getd(c, "sim.probe_x", -1.0);
    double cadence = getd(c, "sim.snapshot_cadence", 0.0);
    double dt = getd(c, "sim.dt", -1.0);
    double window = getd(c, "sim.window", 0.0);
    Grid g{M, m.mp.ell};
    std::vector<double> u0(M), v0(M);
    for (int i = 0; i < M; ++i) {
        double x = g.x(i);
        u0[i] = m.eq.u + amp * std::cos(ic_mode * x);
        v0[i] = m.eq.v + amp * std::cos(ic_mode * x);
    }
    SimResult r = simulate(m.mp, u0, v0, T, M, probe_x, cadence, dt);
    std::string probe = "t,u,v\n";
    for (size_t i = 0; i < r.t.size(); ++i)
        probe += num(r.t[i]) + "," + num(r.u_probe[i]) + "," + num(r.v_probe[i]) + "\n";
    emit(c, "probe.csv", probe);
    std::string modes = "n,avg_amplitude\n";
    for (size_t n = 0; n < r.mode_avg.size(); ++n)
        modes += std::to_string(n) + "," + num(r.mode_avg[n]) + "\n";
    emit(c, "modes.csv", modes);
    if (cadence > 0) {
        std::string snap = "t,x,u,v\n";
        for (size_t k = 0; k < r.snap_t.size(); ++k)
            for (int i = 0; i < M; ++i)
                snap += num(r.snap_t[k]) + "," + num(g.x(i)) + "," + num(r.snap_u[k][i]) + "," +
                        num(r.snap_v[k][i]) + "\n";
        emit(c, "snapshots.csv", snap);
    }
    if (window > 0) {
        AttractorReport rep = classify_attractor(r.t, r.u_probe, window);
        int dom = 1;
        for (int n = 2; n < (int)r.mode_avg.size(); ++n)
            if (r.mode_avg[n] > r.mode_avg[dom]) dom = n;
        rep.dominant_mode = dom;
        emit(c, "attractor.json", attractor_report(rep).dump(2) + "\n");
    }
    // numerical provenance beyond the config echo
    json man = run_manifest("simulate", c.kv, c.seed);
    man["resolved"] = {{"M", r.M},          {"dt", r.dt},
                       {"probe_x", r.probe_x}, {"history", "constant gradient on [-tau,0]"},
                       {"ic", "equilibrium + ic_amp*cos(ic_mode*x) in both components"}};
    emit(c, "simulate-manifest.json", man.dump(2) + "\n");
}

void verb_pipeline(const Ctx& c) {
    Model m = load_model(c);
    DoubleHopfPoint dh = locate_from_config(c, m);
    ModelParams mc = m.mp;
    mc.d21 = dh.d21_c;
    mc.tau = dh.tau_c;
    auto [nfc, amp] = normal_form(dh, mc, m.eq);
    json doc;
    doc["model"] = model_report(m.mp, m.eq);
    doc["point"] = double_hopf_report(dh);
    doc["normal_form"] = nf_document(dh, nfc, amp);
    doc["regions"] = region_report(region_partition(amp, dh));
    doc["notes"] = json::array();
    double res1 = std::abs(char_det(dh.n1, cplx(0, dh.omega1), mc, m.eq));
    double res2 = std::abs(char_det(dh.n2, cplx(0, dh.omega2), mc, m.eq));
    doc["residuals"] = json::array({res1, res2});
    emit(c, "pipeline.json", doc.dump(2) + "\n");
    emit_manifest(c, "pipeline");
}

int verb_validate(const Ctx& c, bool no_sims, bool sims_only) {
    AcceptanceOptions opt;
    opt.with_sims = !no_sims;
    opt.threads = c.threads;
    opt.seed = c.seed;
    opt.sim_M = c.kv.count("validate.sim_M") ? geti(c, "validate.sim_M") : 256;
    opt.tamper_p11 = c.kv.count("validate.tamper_p11") && geti(c, "validate.tamper_p11") != 0;
    auto results = run_acceptance(opt);
    json doc = json::array();
    for (const auto& r : results) {
        if (sims_only && r.index != 9 && r.index != 10) continue;
        doc.push_back({{"criterion", r.index},
                       {"name", r.name},
                       {"status", r.skipped ? "SKIPPED" : (r.pass ? "PASS" : "FAIL")},
                       {"detail", r.detail}});
        std::printf("criterion %2d: %s  %s\n", r.index,
                    r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL"), r.name.c_str());
    }
    emit(c, "validation.json", doc.dump(2) + "\n");
    emit_manifest(c, "validate");
    return 0;  // failures are data, not process errors
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delayed-gradient predator-prey analysis toolkit"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    int threads = 6;
    unsigned long seed = 12345;
    app.add_option("--config", config_path, "model + verb configuration file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--seed", seed, "seed for randomized sweeps");

    const char* verbs[] = {"equilibrium", "stability-map", "hopf-curves", "double-hopf",
                           "normal-form", "classify",      "simulate",    "pipeline"};
    for (const char* v : verbs) app.add_subcommand(v);
    auto* val = app.add_subcommand("validate");
    bool no_sims = false, sims_only = false;
    val->add_flag("--no-sims", no_sims, "skip the long simulation criteria");
    val->add_flag("--sims-only", sims_only, "report only the simulation criteria");

    CLI11_PARSE(app, argc, argv);

    Ctx c;
    c.out = out_dir;
    c.threads = threads;
    c.seed = seed;
    try {
        c.kv = parse_config_file(config_path);
        std::string verb = app.get_subcommands().front()->get_name();
        if (verb == "equilibrium")
            verb_equilibrium(c);
        else if (verb == "stability-map")
            verb_stability_map(c);
        else if (verb == "hopf-curves")
            verb_hopf_curves(c);
        else if (verb == "double-hopf")
            verb_double_hopf(c);
        else if (verb == "normal-form")
            verb_normal_form(c);
        else if (verb == "classify")
            verb_classify(c);
        else if (verb == "simulate")
            verb_simulate(c);
        else if (verb == "pipeline")
            verb_pipeline(c);
        else if (verb == "validate")
            return verb_validate(c, no_sims, sims_only);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
