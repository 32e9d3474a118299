#pragma once
// Self-check battery: reference thresholds, double Hopf targets, normal form
// tables, region geometry, stability sweeps, simulation-vs-prediction runs,
// and always-runnable property suites. Used by the CLI `validate` verb and by
// the acceptance test driver.
#include <string>
#include <vector>

#include "memdiff/linear.hpp"

namespace memdiff {

struct AcceptanceOptions {
    bool with_sims = true;  // include the long PDE simulation criteria
    int threads = 6;        // worker threads for the simulation batch
    int sim_M = 256;        // grid resolution of the simulation criteria
    unsigned long seed = 12345;  // randomized property suites
    bool tamper_p11 = false;     // fault-injection hook: flips the sign of the
                                 // first cubic coefficient before comparison,
                                 // to prove the reporter catches regressions
};

struct CriterionResult {
    int index;
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;  // measured vs target, one clause per sub-item
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// the two reference parameter sets and their Hopf-Hopf points
ModelParams reference_params_1();
ModelParams reference_params_2();
DoubleHopfPoint locate_hh_1(const ModelParams& mp, const Equilibrium& eq);
DoubleHopfPoint locate_hh_2(const ModelParams& mp, const Equilibrium& eq);

}  // namespace memdiff
