#pragma once
// Serialization of analysis products: JSON reports, CSV tables, run manifests.
#include <map>
#include <string>

#include <json.hpp>

#include "memdiff/normalform.hpp"
#include "memdiff/simulator.hpp"
#include "memdiff/unfolding.hpp"

namespace memdiff {

using json = nlohmann::json;

json model_report(const ModelParams& mp, const Equilibrium& eq);
json double_hopf_report(const DoubleHopfPoint& dhp);
json normal_form_report(const NormalFormCoefficients& nfc, const AmplitudeSystem& amp);
json region_report(const UnfoldingClassification& uc);
json attractor_report(const AttractorReport& rep);

// manifest: verb, full config echo, seed, code version tag
json run_manifest(const std::string& verb, const std::map<std::string, std::string>& config,
                  unsigned long seed);

void write_text(const std::string& path, const std::string& text);
std::string label_name(const DynamicsLabel& lb);

}  // namespace memdiff
