#pragma once
// Maps between the transformed solution u(t,x) and the physical film height
// h(t,z): forward von Mises transforms of initial data, reconstruction of
// height profiles and contact-line kinematics, and verification of the
// near-boundary expansion u = u0 + u_beta x^beta + o(x^{beta+delta}).

#include <utility>
#include <vector>

#include "tflab/calculus.hpp"
#include "tflab/trajectory.hpp"

namespace tflab {

struct HeightProfile {
    double z_offset = 0.0;                          // contact-line position
    std::vector<std::pair<double, double>> samples; // (z_tilde, h), increasing
};

struct ExpansionReport {
    double u0 = 0.0;
    double ubeta = 0.0;
    double constant = 0.0;       // fitted C in |r| <= C x^{beta+delta}
    double remainder_slope = 0.0; // measured log-log slope of |r|
    bool passes = false;          // slope >= beta + delta
};

GridFunction initial_from_height_profile(const MobilityParams& par,
                                         const HeightProfile& profile,
                                         GridPtr grid);

HeightProfile reconstruct_height(const MobilityParams& par,
                                 const GridFunction& u, double z0);

double contact_line_velocity(const MobilityParams& par, double u0,
                             double ubeta);

std::vector<std::pair<double, double>>
contact_line_evolve(const Trajectory& traj, const MobilityParams& par);

ExpansionReport expansion_fit_check(const MobilityParams& par,
                                    const GridFunction& u, double delta);

} // namespace tflab
