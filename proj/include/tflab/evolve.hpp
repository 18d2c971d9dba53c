#pragma once
// Time integration: implicit treatment of A, explicit treatment of N(u),
// the linear maximal-regularity solve behind the Picard map u <- S N(u),
// and decay reporting for stability runs.

#include <functional>

#include "tflab/calculus.hpp"
#include "tflab/norms.hpp"
#include "tflab/trajectory.hpp"

namespace tflab {

enum class Scheme { IMEX_BE, IMEX_BDF2, PicardGlobal };

struct SolveOptions {
    Scheme scheme = Scheme::IMEX_BE;
    double dt_init = 1e-3;
    double t_final = 10.0;
    int snapshot_stride = 50;
    int picard_max_iter = 12;
    double picard_tol = 1e-10;
    bool adapt = false;

    void validate() const {
        if (!(dt_init > 0.0) || !(dt_init < t_final))
            throw DomainError("SolveOptions: need 0 < dt_init < t_final");
        if (!(picard_tol > 0.0))
            throw DomainError("SolveOptions: picard_tol must be positive");
        if (snapshot_stride < 1)
            throw DomainError("SolveOptions: snapshot_stride must be >= 1");
    }
};

struct StabilityReport {
    std::vector<double> times;
    std::vector<double> u0;
    std::vector<double> ubeta;
    std::vector<double> sup_norm;
    std::vector<double> initial_norm;   // |u(t)|_0 snapshot norm
    std::vector<double> energy;         // weighted L2 energy at alpha-1/2
    double u0_decay_exponent = 0.0;     // log-linear fit, trailing half
    double sup_decay_exponent = 0.0;
    bool ubeta_tbeta_to_zero = false;   // u_beta(t) t^beta trend
};

// right-hand side indexed by time; called at each accepted step time
using TimeIndexedRHS = std::function<GridFunction(double t)>;

Trajectory linear_mr_solve(const OperatorStencil& st, const GridFunction& u_init,
                           const TimeIndexedRHS& f, const SolveOptions& opts);

Trajectory imex_simulate(const OperatorStencil& st, const GridFunction& u_init,
                         const SolveOptions& opts);

struct PicardResult {
    Trajectory trajectory;
    std::vector<double> iterate_distances;
    bool converged = false;
};

PicardResult picard_solve(const OperatorStencil& st, const GridFunction& u_init,
                          const SolveOptions& opts, const ExponentConfig& cfg);

StabilityReport stability_report(const Trajectory& traj,
                                 const MobilityParams& par,
                                 const ExponentConfig& cfg);

// distance between two trajectories on matched snapshot times: the Solution
// norm restricted to the sup-in-time interpolation entries and the non-
// time-derivative integral entries
double trajectory_distance(const Trajectory& a, const Trajectory& b,
                           const MobilityParams& par, const ExponentConfig& cfg);

} // namespace tflab
