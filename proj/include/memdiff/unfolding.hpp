#pragma once
// Planar amplitude system near the Hopf-Hopf point: equilibria E0-E3, their
// stability, the (mu1, mu2) region partition, and the local dynamics label.
#include <string>
#include <vector>

#include "memdiff/normalform.hpp"

namespace memdiff {

struct DegenerateCubic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EqKind { E0, E1, E2, E3 };

struct AmplitudeEquilibrium {
    EqKind kind;
    double r1, r2;
    // linear inequality c1*mu1 + c2*mu2 > 0 governing existence (all-zero for E0)
    double exist_c1, exist_c2;
    cplx eig[2];  // amplitude-Jacobian eigenvalues
    bool stable;
};

enum class LabelKind {
    StableEquilibrium,
    PeriodicMode,
    QuasiPeriodic,
    Bistable,
    ConnectingOrbit,
    Unclassified,
};

struct DynamicsLabel {
    LabelKind kind = LabelKind::Unclassified;
    // populated for PeriodicMode / Bistable / ConnectingOrbit: spatial modes and
    // branch tags of the periodic states involved (from = index 0, to = index 1)
    int mode[2] = {-1, -1};
    char branch[2] = {'?', '?'};
    std::string text;
};

struct RegionLine {
    std::string name;           // H1, H2, L1, L2
    double slope;               // mu1 = slope * mu2; meaningless when vertical
    bool vertical;              // line is mu2 = 0
    double dir_mu1, dir_mu2;    // unit direction of the half-line
};

struct Sector {
    double angle_lo, angle_hi;  // radians, counterclockwise, lo < hi
    DynamicsLabel label;
};

struct UnfoldingClassification {
    std::vector<RegionLine> lines;   // the four partition lines (full lines)
    std::vector<Sector> regions;     // merged sectors, region 1 first
};

struct PointClassification {
    double mu1, mu2;
    int region;                       // 1-based index into regions
    DynamicsLabel label;
    bool outside_validity;
    std::vector<AmplitudeEquilibrium> equilibria;
};

std::vector<AmplitudeEquilibrium> amplitude_equilibria(const AmplitudeSystem& amp, double mu1,
                                                       double mu2);

// eigenvalues + verdict of one equilibrium under the amplitude flow
AmplitudeEquilibrium stability_of(AmplitudeEquilibrium eq, const AmplitudeSystem& amp,
                                  double mu1, double mu2);

std::vector<RegionLine> region_lines(const AmplitudeSystem& amp);

UnfoldingClassification region_partition(const AmplitudeSystem& amp,
                                         const DoubleHopfPoint& dhp);

PointClassification classify_point(const AmplitudeSystem& amp, const DoubleHopfPoint& dhp,
                                   double d21, double tau, double validity_radius = 1.5);

// label from equilibrium existence/stability at given (mu1, mu2)
DynamicsLabel label_at(const AmplitudeSystem& amp, const DoubleHopfPoint& dhp, double mu1,
                       double mu2);

struct AmplitudeTrajectory {
    std::vector<double> t;
    std::vector<double> r1, r2;
};

AmplitudeTrajectory simulate_amplitude(const AmplitudeSystem& amp, double mu1, double mu2,
                                       double r1_0, double r2_0, double T,
                                       double tol = 1e-10);

}  // namespace memdiff
