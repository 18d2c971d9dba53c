#include "tflab/norms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace tflab {

void ExponentConfig::validate(const MobilityParams& par) const {
    const double beta = par.beta;
    if (!(p > 1.0)) throw DomainError("ExponentConfig: p must exceed 1");
    if (!(1.0 / p < beta)) throw DomainError("ExponentConfig: 1/p < beta fails");
    if (!(delta > 0.0) || !(delta < delta_tilde))
        throw DomainError("ExponentConfig: need 0 < delta < delta_tilde");
    const double cap = std::min(std::min(-par.gamma[1], beta - 1.0 / p),
                                std::min(1.0 / p, 1.0 - 1.0 / p));
    if (!(delta_tilde < cap))
        throw DomainError("ExponentConfig: delta_tilde exceeds the theorem cap");
    if (k < 0 || k_tilde < 0) throw DomainError("ExponentConfig: negative order");
    const double need =
        std::min(k + 4.0 - 4.0 / p, k + 0.5 + 4.0 / p);
    if (!(k_tilde > need))
        throw DomainError("ExponentConfig: k_tilde too small for the theorem");
    for (double w : {-1.0 + 1.0 / p - delta_tilde, -1.0 + 1.0 / p + delta_tilde,
                     -1.0 + beta - delta, -1.0 + beta + delta})
        if (!par.coercivity.contains(w))
            throw DomainError("ExponentConfig: shifted weight outside the "
                              "coercivity range");
}

namespace {

// D^j via the grid first-derivative (order guard does not apply to repeated
// first-order application)
std::vector<GridFunction> derivative_ladder(const GridFunction& u, int k) {
    std::vector<GridFunction> lad;
    lad.reserve(k + 1);
    lad.push_back(u);
    for (int j = 1; j <= k; ++j) lad.push_back(derivative(lad.back(), 1));
    return lad;
}

} // namespace

double weighted_sobolev_norm(const GridFunction& u, int k, double alpha,
                             TailPolicy policy) {
    double tot = 0.0;
    GridFunction w = u;
    for (int j = 0; j <= k; ++j) {
        tot += weighted_integral(w, alpha, policy);
        if (j < k) w = derivative(w, 1);
    }
    return std::sqrt(tot);
}

namespace {

std::mutex fftw_mutex;

// |v|^2 with multiplier (1+xi^2)^order via the DFT; Plancherel normalization
// matches the Riemann sum sum v_i^2 h
double multiplier_norm_sq(const std::vector<double>& v, double h, double order) {
    const int n = static_cast<int>(v.size());
    std::vector<double> in(v);
    std::vector<std::complex<double>> out(n / 2 + 1);
    {
        std::lock_guard<std::mutex> lk(fftw_mutex);
        fftw_plan plan = fftw_plan_dft_r2c_1d(
            n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
            FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    const double dxi = 2.0 * std::numbers::pi / (n * h);
    double acc = 0.0;
    for (int kk = 0; kk <= n / 2; ++kk) {
        const double xi = kk * dxi;
        const double m = std::pow(1.0 + xi * xi, order);
        const double mag2 = std::norm(out[kk]);
        const bool shared = (kk == 0) || (2 * kk == n);
        acc += (shared ? 1.0 : 2.0) * m * mag2;
    }
    return acc * h / n;
}

std::vector<double> log_weighted_samples(const GridFunction& u, double alpha,
                                         double p) {
    const auto& x = u.grid().x;
    std::vector<double> v(u.size());
    const double w = -(alpha - 1.0 / p);
    for (int i = 0; i < u.size(); ++i) v[i] = std::pow(x[i], w) * u[i];
    return v;
}

} // namespace

double fractional_log_norm(const GridFunction& u, double order, double alpha,
                           double p) {
    if (order < 0.0) throw DomainError("fractional_log_norm: negative order");
    std::vector<double> v = log_weighted_samples(u, alpha, p);
    const double h = u.grid().h;
    if (p == 2.0) return std::sqrt(multiplier_norm_sq(v, h, order));

    const int m = static_cast<int>(std::floor(order));
    const double theta = order - m;
    GridFunction vf(u.grid_ptr(), v);
    double acc = 0.0;
    GridFunction w = vf;
    for (int j = 0; j <= m; ++j) {
        double lp = 0.0;
        for (int i = 0; i < w.size(); ++i) lp += std::pow(std::abs(w[i]), p) * h;
        acc += lp;
        if (j < m || theta > 0.0) w = derivative(w, 1);
    }
    if (theta > 0.0) {
        // Gagliardo double integral of the m-th derivative
        const int n = w.size();
        double gag = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double d = std::abs(w[i] - w[j]);
                const double sep = (j - i) * h;
                gag += 2.0 * std::pow(d, p) / std::pow(sep, 1.0 + theta * p) *
                       h * h;
            }
        }
        acc += gag;
    }
    return std::pow(acc, 1.0 / p);
}

double interp_surrogate_norm(const GridFunction& u, double kp, double alpha_prime,
                             double p) {
    // |u|_{k'+2-4/p, alpha'-1/p, p} surrogate per the characterization lemma:
    //   p <= 2: W^{k'+2-4/p, 2};  p > 2: W^{k'+3/2-3/p, p}
    if (p <= 2.0) {
        // same weight alpha'-1/p, measured in the 2-norm
        const double alpha2 = alpha_prime - 1.0 / p + 0.5;
        return fractional_log_norm(u, kp, alpha2, 2.0);
    }
    const double order = kp - 0.5 + 1.0 / p; // (k'+2-4/p) -> k'+3/2-3/p
    return fractional_log_norm(u, order, alpha_prime, p);
}

double k_functional_zeroth(const GridFunction& u, double alpha, double p) {
    if (!(p > 2.0)) throw DomainError("k_functional_zeroth: requires p > 2");
    const auto& gr = u.grid();
    const auto& x = gr.x;
    const int n = u.size();
    const int ntau = 4 * n;
    const double t0 = std::log(gr.x_min / 10.0), t1 = std::log(10.0 * gr.x_max);
    const double dt = (t1 - t0) / (ntau - 1);
    std::vector<double> base(n);
    for (int i = 0; i < n; ++i)
        base[i] = std::pow(x[i], 2.0 - 2.0 * alpha) * u[i] * u[i];
    double outer = 0.0;
    double prev = 0.0;
    for (int k = 0; k < ntau; ++k) {
        const double tau = std::exp(t0 + k * dt);
        const double tau2 = tau * tau;
        double inner = 0.0;
        for (int i = 0; i < n; ++i)
            inner += base[i] / (x[i] * x[i] + tau2);
        inner *= gr.h; // trapezoid端 corrections negligible for decaying u
        const double val = std::pow(tau, 2.0 / p) * inner;
        const double term = std::pow(val, p / 2.0);
        if (k > 0) outer += 0.5 * dt * (prev + term);
        prev = term;
    }
    return std::pow(outer, 1.0 / p);
}

namespace {

GridFunction subtract_scalar(const GridFunction& u, double c) {
    GridFunction out = u;
    for (int i = 0; i < out.size(); ++i) out[i] -= c;
    return out;
}

GridFunction subtract_mode(const GridFunction& u, double c0, double cb,
                           double beta) {
    GridFunction out = u;
    const auto& x = u.grid().x;
    for (int i = 0; i < out.size(); ++i)
        out[i] -= c0 + cb * std::pow(x[i], beta);
    return out;
}

// second-order finite differences of snapshots in time
GridFunction time_derivative(const Trajectory& tr, int k) {
    const int m = tr.size();
    const auto& t = tr.times;
    auto axpy = [](double a, const GridFunction& u, double b,
                   const GridFunction& v) {
        GridFunction out = u;
        for (int i = 0; i < out.size(); ++i) out[i] = a * u[i] + b * v[i];
        return out;
    };
    if (m == 1) return zeros(tr.snapshots[0].grid_ptr());
    if (k == 0)
        return axpy(-1.0 / (t[1] - t[0]), tr.snapshots[0], 1.0 / (t[1] - t[0]),
                    tr.snapshots[1]);
    if (k == m - 1)
        return axpy(-1.0 / (t[m - 1] - t[m - 2]), tr.snapshots[m - 2],
                    1.0 / (t[m - 1] - t[m - 2]), tr.snapshots[m - 1]);
    const double dt = t[k + 1] - t[k - 1];
    return axpy(-1.0 / dt, tr.snapshots[k - 1], 1.0 / dt, tr.snapshots[k + 1]);
}

} // namespace

NormReport triple_bar_norms(const Trajectory& tr, const MobilityParams& par,
                            const ExponentConfig& cfg, NormFamily which) {
    if (tr.empty()) throw IncompleteTrajectory("triple_bar_norms: empty trajectory");
    if (tr.u0_series.size() != tr.times.size() ||
        tr.ubeta_series.size() != tr.times.size())
        throw IncompleteTrajectory("triple_bar_norms: boundary series missing");

    const double p = cfg.p, b = par.beta;
    const double dl = cfg.delta, dt_ = cfg.delta_tilde;
    const int k = cfg.k, kt = cfg.k_tilde;
    const int m = tr.size();
    NormReport rep;
    const TailPolicy lenient{false, 0.1};

    auto tpow = [&](double t) { return std::pow(t, p * b - 1.0); };
    auto timeint = [&](const std::vector<double>& f) {
        double acc = 0.0;
        for (int i = 0; i + 1 < m; ++i)
            acc += 0.5 * (f[i] + f[i + 1]) * (tr.times[i + 1] - tr.times[i]);
        return acc;
    };

    if (which == NormFamily::Initial) {
        const auto& u0f = tr.snapshots.front();
        const double c0 = tr.u0_series.front();
        rep["I1_interp_u_minus_dt"] = std::pow(
            interp_surrogate_norm(u0f, kt + 8.0 - 4.0 / p, -dt_ + 1.0 / p, p), p);
        rep["I2_interp_u_minus_u0_plus_dt"] = std::pow(
            interp_surrogate_norm(subtract_scalar(u0f, c0), kt + 8.0 - 4.0 / p,
                                  dt_ + 1.0 / p, p), p);
        return rep;
    }

    if (which == NormFamily::RHS) {
        std::vector<double> f1(m), f2(m), f3(m), f4(m);
        for (int i = 0; i < m; ++i) {
            const auto& f = tr.snapshots[i];
            f1[i] = std::pow(
                weighted_sobolev_norm(f, kt + 4, -1.0 + 1.0 / p - dt_, lenient), p);
            f2[i] = std::pow(
                weighted_sobolev_norm(f, kt + 4, -1.0 + 1.0 / p + dt_, lenient), p);
            f3[i] = tpow(tr.times[i]) * std::pow(
                weighted_sobolev_norm(f, k + 4, -1.0 + b - dl, lenient), p);
            f4[i] = tpow(tr.times[i]) * std::pow(
                weighted_sobolev_norm(f, k + 4, -1.0 + b + dl, lenient), p);
        }
        rep["F1_int_f_k4t_minus_dt"] = timeint(f1);
        rep["F2_int_f_k4t_plus_dt"] = timeint(f2);
        rep["F3_int_tw_f_k4_minus_d"] = timeint(f3);
        rep["F4_int_tw_f_k4_plus_d"] = timeint(f4);
        return rep;
    }

    // Solution family
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    std::vector<double> i5(m), i6(m), i7(m), i8(m), i9(m), i10(m), i11(m),
        i12(m);
    for (int i = 0; i < m; ++i) {
        const auto& u = tr.snapshots[i];
        const double c0 = tr.u0_series[i];
        const double cb = tr.ubeta_series[i];
        const GridFunction du = subtract_scalar(u, c0);
        const GridFunction rem = subtract_mode(u, c0, cb, b);
        const double tw = tpow(tr.times[i]);

        s1 = std::max(s1, std::pow(interp_surrogate_norm(
                              u, kt + 8.0 - 4.0 / p, -dt_ + 1.0 / p, p), p));
        s2 = std::max(s2, std::pow(interp_surrogate_norm(
                              du, kt + 8.0 - 4.0 / p, dt_ + 1.0 / p, p), p));
        if (i > 0) { // t^{p b - 1} weights vanish at t = 0
            s3 = std::max(s3, tw * std::pow(interp_surrogate_norm(
                                    du, k + 8.0 - 4.0 / p, b - dl, p), p));
            s4 = std::max(s4, tw * std::pow(interp_surrogate_norm(
                                    du, k + 8.0 - 4.0 / p, b + dl, p), p));
        }
        const GridFunction ut = time_derivative(tr, i);
        i5[i] = std::pow(
            weighted_sobolev_norm(ut, kt + 4, -1.0 - dt_ + 1.0 / p, lenient), p);
        i6[i] = std::pow(
            weighted_sobolev_norm(ut, kt + 4, -1.0 + dt_ + 1.0 / p, lenient), p);
        i7[i] = tw * std::pow(
            weighted_sobolev_norm(ut, k + 4, -1.0 - dl + b, lenient), p);
        i8[i] = tw * std::pow(
            weighted_sobolev_norm(ut, k + 4, -1.0 + dl + b, lenient), p);
        i9[i] = std::pow(
            weighted_sobolev_norm(du, kt + 8, 1.0 / p - dt_, lenient), p);
        i10[i] = std::pow(
            weighted_sobolev_norm(du, kt + 8, 1.0 / p + dt_, lenient), p);
        i11[i] = tw * std::pow(
            weighted_sobolev_norm(du, k + 8, b - dl, lenient), p);
        i12[i] = tw * std::pow(
            weighted_sobolev_norm(rem, k + 8, b + dl, lenient), p);
    }
    rep["S1_sup_interp_u_minus_dt"] = s1;
    rep["S2_sup_interp_du_plus_dt"] = s2;
    rep["S3_sup_tw_interp_du_minus_d"] = s3;
    rep["S4_sup_tw_interp_du_plus_d"] = s4;
    rep["S5_int_dtu_minus_dt"] = timeint(i5);
    rep["S6_int_dtu_plus_dt"] = timeint(i6);
    rep["S7_int_tw_dtu_minus_d"] = timeint(i7);
    rep["S8_int_tw_dtu_plus_d"] = timeint(i8);
    rep["S9_int_du_minus_dt"] = timeint(i9);
    rep["S10_int_du_plus_dt"] = timeint(i10);
    rep["S11_int_tw_du_minus_d"] = timeint(i11);
    rep["S12_int_tw_rem_plus_d"] = timeint(i12);
    return rep;
}

} // namespace tflab
