#pragma once
// Independent cross-checks used by the test suites. Everything here is derived
// from first principles with implementations deliberately different from the
// library code paths it verifies.
#include <array>
#include <utility>
#include <vector>

#include "memdiff/normalform.hpp"

namespace oracle {

// amplitude-equation cubic coefficients (p11, p12, p21, p22) by a
// multiple-scales expansion: order-2 responses from direct matrix solves at
// the forcing frequencies, order-3 solvability against the adjoint row
std::array<double, 4> ms_amplitude_coeffs(const memdiff::ModelParams& mp_at_crit,
                                          const memdiff::Equilibrium& eq, int n1, int n2,
                                          double om1, double om2);

// Richardson-extrapolated central differences of the reaction terms
memdiff::Partials fd_partials(const memdiff::Kinetics& kin, double u, double v);

// positive roots of w^4 + P w^2 + Q = 0, descending
std::vector<double> quartic_hopf_roots(double P, double Q);

// base frequency of an oscillatory tail from mean upward zero-crossing spacing
double zero_crossing_freq(const std::vector<double>& t, const std::vector<double>& y,
                          double window);

// endpoint of the planar amplitude flow by plain fixed-step RK4
std::pair<double, double> rk4_amplitude(const memdiff::AmplitudeSystem& amp, double mu1,
                                        double mu2, double r1, double r2, double T, double h);

}  // namespace oracle
