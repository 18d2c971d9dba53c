#include "tflab/evolve.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace tflab {

namespace {

constexpr double kMinDt = 1e-12;

class ImplicitStep {
  public:
    ImplicitStep(const OperatorStencil& st, double coef)
        : n_(st.grid().n_nodes) {
        Eigen::SparseMatrix<double> I(n_, n_);
        I.setIdentity();
        Eigen::SparseMatrix<double> M = coef * I - st.matrix_A();
        solver_.compute(M);
        if (solver_.info() != Eigen::Success)
            throw LinAlgError("implicit step: factorization failed");
    }
    std::vector<double> solve(const std::vector<double>& rhs) const {
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_);
        Eigen::VectorXd v = solver_.solve(b);
        if (solver_.info() != Eigen::Success)
            throw LinAlgError("implicit step: solve failed");
        return std::vector<double>(v.data(), v.data() + n_);
    }

  private:
    int n_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver_;
};

int fit_window_for(const LogGrid& g) {
    int w = 12;
    for (int i = 0; i < g.n_nodes; ++i)
        if (g.x[i] < 1e-3) w = std::max(w, i + 1);
    return std::min(w, g.n_nodes / 2);
}

void record(Trajectory& tr, const OperatorStencil& st, double t,
            const GridFunction& u, double dt, int window) {
    tr.times.push_back(t);
    tr.snapshots.push_back(u);
    const auto bc = extract_boundary_coefficients(st.params(), u, window);
    tr.u0_series.push_back(bc.u0);
    tr.ubeta_series.push_back(bc.ubeta);
    tr.dt_history.push_back(dt);
}

} // namespace

Trajectory linear_mr_solve(const OperatorStencil& st, const GridFunction& u_init,
                           const TimeIndexedRHS& f, const SolveOptions& opts) {
    opts.validate();
    if (!st.grid().same_as(u_init.grid()))
        throw GridMismatch("linear_mr_solve: initial data on wrong grid");
    const double dt = opts.dt_init;
    const int nsteps = static_cast<int>(std::llround(opts.t_final / dt));
    const int window = fit_window_for(st.grid());
    const bool bdf2 = opts.scheme == Scheme::IMEX_BDF2;

    Trajectory tr;
    std::vector<double> u = u_init.values();
    std::vector<double> uprev;
    record(tr, st, 0.0, u_init, dt, window);

    ImplicitStep be(st, 1.0 / dt);
    std::unique_ptr<ImplicitStep> b2;
    if (bdf2) b2 = std::make_unique<ImplicitStep>(st, 1.5 / dt);

    double t = 0.0;
    const int n = st.grid().n_nodes;
    std::vector<double> rhs(n);
    for (int k = 0; k < nsteps; ++k) {
        const GridFunction fk = f(t + dt);
        if (!st.grid().same_as(fk.grid()))
            throw GridMismatch("linear_mr_solve: rhs on wrong grid");
        std::vector<double> unew;
        if (bdf2 && k >= 1) {
            for (int i = 0; i < n; ++i)
                rhs[i] = (2.0 * u[i] - 0.5 * uprev[i]) / dt + fk[i];
            unew = b2->solve(rhs);
        } else {
            for (int i = 0; i < n; ++i) rhs[i] = u[i] / dt + fk[i];
            unew = be.solve(rhs);
        }
        uprev = std::move(u);
        u = std::move(unew);
        t += dt;
        if ((k + 1) % opts.snapshot_stride == 0 || k + 1 == nsteps)
            record(tr, st, t, GridFunction(u_init.grid_ptr(), u), dt, window);
    }
    return tr;
}

Trajectory imex_simulate(const OperatorStencil& st, const GridFunction& u_init,
                         const SolveOptions& opts) {
    opts.validate();
    if (!st.grid().same_as(u_init.grid()))
        throw GridMismatch("imex_simulate: initial data on wrong grid");
    {
        double hmin = 1e300;
        for (int i = 0; i < u_init.size(); ++i)
            hmin = std::min(hmin, 1.0 + u_init[i]);
        if (hmin <= 0.1)
            throw DegenerateState("imex_simulate: 1+u too close to zero");
    }
    const int window = fit_window_for(st.grid());
    const int n = st.grid().n_nodes;

    Trajectory tr;
    record(tr, st, 0.0, u_init, opts.dt_init, window);

    double dt = opts.dt_init;
    ImplicitStep step(st, 1.0 / dt);
    double t = 0.0;
    std::vector<double> u = u_init.values();
    std::vector<double> rhs(n);
    long accepted = 0;
    while (t < opts.t_final - 1e-12 * opts.t_final) {
        dt = std::min(dt, opts.t_final - t);
        const GridFunction Nu =
            nonlinearity(st, GridFunction(u_init.grid_ptr(), u));
        for (int i = 0; i < n; ++i) rhs[i] = u[i] / dt + Nu[i];
        std::vector<double> unew = step.solve(rhs);

        if (opts.adapt) {
            double change = 0.0, scale = 0.0;
            for (int i = 0; i < n; ++i) {
                change = std::max(change, std::abs(unew[i] - u[i]));
                scale = std::max(scale, std::abs(u[i]));
            }
            const double rel = change / std::max(scale, 1e-30);
            if (rel > 0.10 && dt > kMinDt) {
                dt *= 0.5;
                if (dt < kMinDt)
                    throw StepError("imex_simulate: step size collapsed");
                step = ImplicitStep(st, 1.0 / dt);
                continue; // retry the step
            }
            if (rel < 1e-3 && 2.0 * dt <= opts.dt_init) {
                u = std::move(unew);
                t += dt;
                dt *= 2.0;
                step = ImplicitStep(st, 1.0 / dt);
                ++accepted;
            } else {
                u = std::move(unew);
                t += dt;
                ++accepted;
            }
        } else {
            u = std::move(unew);
            t += dt;
            ++accepted;
        }
        if (accepted % opts.snapshot_stride == 0 ||
            t >= opts.t_final - 1e-12 * opts.t_final)
            record(tr, st, t, GridFunction(u_init.grid_ptr(), u), dt, window);
    }
    return tr;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b,
                           const MobilityParams& par,
                           const ExponentConfig& cfg) {
    if (a.size() != b.size())
        throw IncompleteTrajectory("trajectory_distance: snapshot mismatch");
    Trajectory diff;
    diff.times = a.times;
    diff.dt_history = a.dt_history;
    for (int i = 0; i < a.size(); ++i) {
        GridFunction d = a.snapshots[i];
        for (int j = 0; j < d.size(); ++j) d[j] -= b.snapshots[i][j];
        diff.snapshots.push_back(std::move(d));
        diff.u0_series.push_back(a.u0_series[i] - b.u0_series[i]);
        diff.ubeta_series.push_back(a.ubeta_series[i] - b.ubeta_series[i]);
    }
    const NormReport rep = triple_bar_norms(diff, par, cfg, NormFamily::Solution);
    double acc = 0.0;
    for (const auto& [key, val] : rep) {
        if (key.rfind("S5", 0) == 0 || key.rfind("S6", 0) == 0 ||
            key.rfind("S7", 0) == 0 || key.rfind("S8", 0) == 0)
            continue; // time-derivative entries excluded from the distance
        acc += val;
    }
    return std::pow(acc, 1.0 / cfg.p);
}

PicardResult picard_solve(const OperatorStencil& st, const GridFunction& u_init,
                          const SolveOptions& opts, const ExponentConfig& cfg) {
    opts.validate();
    SolveOptions inner = opts;
    inner.scheme = Scheme::IMEX_BE;
    inner.adapt = false;

    // iterates must be available at every step time; keep full resolution
    const double dt = opts.dt_init;
    const int nsteps = static_cast<int>(std::llround(opts.t_final / dt));
    const int n = st.grid().n_nodes;
    const int window = fit_window_for(st.grid());

    // iterate 0: constant-in-time extension of the initial data
    std::vector<std::vector<double>> cur(nsteps + 1, u_init.values());
    auto to_traj = [&](const std::vector<std::vector<double>>& full) {
        Trajectory tr;
        for (int k = 0; k <= nsteps; ++k) {
            if (k % opts.snapshot_stride == 0 || k == nsteps)
                record(tr, st, k * dt, GridFunction(u_init.grid_ptr(), full[k]),
                       dt, window);
        }
        return tr;
    };

    PicardResult result;
    Trajectory prev_traj = to_traj(cur);
    ImplicitStep step(st, 1.0 / dt);
    std::vector<double> rhs(n);
    int grow_streak = 0;
    for (int it = 0; it < opts.picard_max_iter; ++it) {
        std::vector<std::vector<double>> nxt(nsteps + 1, u_init.values());
        for (int k = 0; k < nsteps; ++k) {
            const GridFunction Nu =
                nonlinearity(st, GridFunction(u_init.grid_ptr(), cur[k + 1]));
            for (int i = 0; i < n; ++i) rhs[i] = nxt[k][i] / dt + Nu[i];
            nxt[k + 1] = step.solve(rhs);
        }
        Trajectory traj = to_traj(nxt);
        const double dist =
            trajectory_distance(traj, prev_traj, st.params(), cfg);
        result.iterate_distances.push_back(dist);
        if (result.iterate_distances.size() >= 2) {
            const auto& d = result.iterate_distances;
            if (d[d.size() - 1] > d[d.size() - 2]) {
                if (++grow_streak >= 3)
                    throw NoContraction(
                        "picard_solve: iterate distances grew three times");
            } else {
                grow_streak = 0;
            }
        }
        cur = std::move(nxt);
        prev_traj = std::move(traj);
        if (dist < opts.picard_tol) {
            result.converged = true;
            break;
        }
    }
    result.trajectory = std::move(prev_traj);
    return result;
}

namespace {

double trailing_fit_exponent(const std::vector<double>& t,
                             const std::vector<double>& y) {
    // log-linear fit log|y| ~ c + e * log t over the trailing half
    const int m = static_cast<int>(t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = m / 2; i < m; ++i) {
        if (!(t[i] > 0.0) || !(std::abs(y[i]) > 0.0)) continue;
        const double lx = std::log(t[i]), ly = std::log(std::abs(y[i]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++cnt;
    }
    if (cnt < 2) return 0.0;
    const double den = cnt * sxx - sx * sx;
    return den != 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
}

} // namespace

StabilityReport stability_report(const Trajectory& tr,
                                 const MobilityParams& par,
                                 const ExponentConfig& cfg) {
    if (tr.empty())
        throw IncompleteTrajectory("stability_report: empty trajectory");
    StabilityReport rep;
    rep.times = tr.times;
    rep.u0 = tr.u0_series;
    rep.ubeta = tr.ubeta_series;
    const double alpha_mid =
        0.5 * (par.coercivity.lo + par.coercivity.hi);
    const TailPolicy lenient{false, 0.1};
    for (int i = 0; i < tr.size(); ++i) {
        const auto& u = tr.snapshots[i];
        rep.sup_norm.push_back(u.sup_norm());
        GridFunction du = u;
        for (int j = 0; j < du.size(); ++j) du[j] -= tr.u0_series[i];
        const double p = cfg.p;
        const double n1 = interp_surrogate_norm(
            u, cfg.k_tilde + 8.0 - 4.0 / p, -cfg.delta_tilde + 1.0 / p, p);
        const double n2 = interp_surrogate_norm(
            du, cfg.k_tilde + 8.0 - 4.0 / p, cfg.delta_tilde + 1.0 / p, p);
        rep.initial_norm.push_back(
            std::pow(std::pow(n1, p) + std::pow(n2, p), 1.0 / p));
        rep.energy.push_back(weighted_integral(u, alpha_mid - 0.5, lenient));
    }
    rep.u0_decay_exponent = trailing_fit_exponent(tr.times, tr.u0_series);
    rep.sup_decay_exponent = trailing_fit_exponent(tr.times, rep.sup_norm);
    // u_beta t^beta -> 0 trend over the trailing half
    std::vector<double> ub_t(tr.size());
    for (int i = 0; i < tr.size(); ++i)
        ub_t[i] = tr.ubeta_series[i] * std::pow(std::max(tr.times[i], 0.0),
                                                par.beta);
    const int m = tr.size();
    if (m >= 4) {
        double head = 0.0, tail = 0.0;
        for (int i = m / 2; i < m / 2 + (m - m / 2) / 2; ++i)
            head = std::max(head, std::abs(ub_t[i]));
        for (int i = m / 2 + (m - m / 2) / 2; i < m; ++i)
            tail = std::max(tail, std::abs(ub_t[i]));
        rep.ubeta_tbeta_to_zero = tail <= head;
    }
    return rep;
}

} // namespace tflab
