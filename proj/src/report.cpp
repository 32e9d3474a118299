#include "memdiff/report.hpp"

#include <fstream>

namespace memdiff {

namespace {
json cplx_json(const cplx& z) { return json::array({z.real(), z.imag()}); }
}

json model_report(const ModelParams& mp, const Equilibrium& eq) {
    return json{{"d11", mp.d11},
                {"d22", mp.d22},
                {"d21", mp.d21},
                {"tau", mp.tau},
                {"ell", mp.ell},
                {"kinetics", {{"name", mp.kinetics.name}, {"a", mp.ka}, {"b", mp.kb}, {"c", mp.kc}}},
                {"equilibrium",
                 {{"u", eq.u},
                  {"v", eq.v},
                  {"jacobian", json::array({eq.a11, eq.a12, eq.a21, eq.a22})}}}};
}

json double_hopf_report(const DoubleHopfPoint& dhp) {
    static const char* res[] = {"strong", "weak", "nonresonant"};
    return json{{"d21_c", dhp.d21_c},
                {"tau_c", dhp.tau_c},
                {"n1", dhp.n1},
                {"n2", dhp.n2},
                {"omega1", dhp.omega1},
                {"omega2", dhp.omega2},
                {"omega1_scaled", dhp.omega1c},
                {"omega2_scaled", dhp.omega2c},
                {"branch1", std::string(1, dhp.branch1)},
                {"branch2", std::string(1, dhp.branch2)},
                {"resonance", res[(int)dhp.resonance]}};
}

json normal_form_report(const NormalFormCoefficients& nfc, const AmplitudeSystem& amp) {
    return json{{"B1_1", cplx_json(nfc.B1_1)},
                {"B2_1", cplx_json(nfc.B2_1)},
                {"B1_3", cplx_json(nfc.B1_3)},
                {"B2_3", cplx_json(nfc.B2_3)},
                {"B11", cplx_json(nfc.B11)},
                {"B12", cplx_json(nfc.B12)},
                {"B31", cplx_json(nfc.B31)},
                {"B32", cplx_json(nfc.B32)},
                {"delta1", json::array({amp.delta1(0), amp.delta1(1)})},
                {"delta2", json::array({amp.delta2(0), amp.delta2(1)})},
                {"p", json::array({amp.p11, amp.p12, amp.p21, amp.p22})},
                {"case", amp.simple_case ? "simple" : "difficult"}};
}

std::string label_name(const DynamicsLabel& lb) {
    switch (lb.kind) {
        case LabelKind::StableEquilibrium: return "StableEquilibrium";
        case LabelKind::PeriodicMode:
            return "PeriodicMode(" + std::to_string(lb.mode[0]) + "," + lb.branch[0] + ")";
        case LabelKind::QuasiPeriodic: return "QuasiPeriodic";
        case LabelKind::Bistable:
            return "Bistable(" + std::to_string(lb.mode[0]) + "," + std::to_string(lb.mode[1]) +
                   ")";
        case LabelKind::ConnectingOrbit:
            return "ConnectingOrbit(" + std::to_string(lb.mode[0]) + "->" +
                   std::to_string(lb.mode[1]) + ")";
        default: return "Unclassified";
    }
}

json region_report(const UnfoldingClassification& uc) {
    json lines = json::array();
    for (const auto& L : uc.lines)
        lines.push_back({{"name", L.name},
                         {"slope", L.slope},
                         {"vertical", L.vertical},
                         {"dir", json::array({L.dir_mu1, L.dir_mu2})}});
    json regions = json::array();
    for (size_t i = 0; i < uc.regions.size(); ++i)
        regions.push_back({{"index", i + 1},
                           {"angle_lo", uc.regions[i].angle_lo},
                           {"angle_hi", uc.regions[i].angle_hi},
                           {"label", label_name(uc.regions[i].label)}});
    return json{{"lines", lines}, {"regions", regions}};
}

json attractor_report(const AttractorReport& rep) {
    static const char* kinds[] = {"Equilibrium", "Periodic", "QuasiPeriodic", "Unclassified"};
    return json{{"kind", kinds[(int)rep.kind]},
                {"dominant_mode", rep.dominant_mode},
                {"frequencies", rep.frequencies},
                {"power_fraction", rep.power_fraction},
                {"amplitude", rep.amplitude},
                {"note", rep.note}};
}

json run_manifest(const std::string& verb, const std::map<std::string, std::string>& config,
                  unsigned long seed) {
    json cfg = json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    return json{{"verb", verb}, {"config", cfg}, {"seed", seed}, {"format", 1}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

}  // namespace memdiff
