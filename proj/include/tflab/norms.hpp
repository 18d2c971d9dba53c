#pragma once
// Weighted Sobolev norms |u|_{k,alpha}, the Sobolev-Slobodeckij surrogate of
// the real-interpolation trace norms, the explicit K-method double integral
// for p > 2, and the composite parabolic norms used as run diagnostics.

#include <map>
#include <string>

#include "tflab/mobility.hpp"
#include "tflab/trajectory.hpp"

namespace tflab {

struct ExponentConfig {
    double p = 2.0;
    int k = 0;
    int k_tilde = 0;
    double delta = 0.0;
    double delta_tilde = 0.0;

    // theorem hypotheses; throws DomainError when violated
    void validate(const MobilityParams& par) const;
};

using NormReport = std::map<std::string, double>;

enum class NormFamily { Solution, Initial, RHS };

// sqrt of sum_{j<=k} int x^{-2 alpha} (D^j u)^2 dx/x
double weighted_sobolev_norm(const GridFunction& u, int k, double alpha,
                             TailPolicy policy = {});

// Sobolev-Slobodeckij norm of order `order` of v(s) = e^{-(alpha-1/p)s} u(e^s)
// on the truncated line; Fourier multiplier (1+xi^2)^{order/2} for p = 2,
// integer derivatives plus the Gagliardo double integral otherwise.
double fractional_log_norm(const GridFunction& u, double order, double alpha,
                           double p);

// ( int (int tau^{2/p} x^{2-2alpha}/(x^2+tau^2) u^2 dx/x)^{p/2} dtau/tau )^{1/p}
// for p > 2; tau on a log grid spanning [x_min/10, 10 x_max] with 4N nodes
double k_functional_zeroth(const GridFunction& u, double alpha, double p);

// every summand of the selected composite norm family, evaluated on the
// trajectory (trapezoid in time, sup over snapshots, finite differences for
// the time derivative)
NormReport triple_bar_norms(const Trajectory& traj, const MobilityParams& par,
                            const ExponentConfig& cfg, NormFamily which);

// the interpolation-surrogate norm used for the trace-space entries
// |u|_{k'+2-4/p, alpha'-1/p, p}: order per the p <= 2 / p > 2 character
double interp_surrogate_norm(const GridFunction& u, double k_plus_2_minus_4p,
                             double alpha_prime, double p);

} // namespace tflab
