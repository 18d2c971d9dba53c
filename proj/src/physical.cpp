#include "tflab/physical.hpp"

#include <algorithm>
#include <cmath>

namespace tflab {

namespace {

// monotone cubic (Fritsch-Carlson) interpolation of y(t) through increasing t
class MonotoneInterp {
  public:
    MonotoneInterp(std::vector<double> t, std::vector<double> y)
        : t_(std::move(t)), y_(std::move(y)) {
        const int n = static_cast<int>(t_.size());
        if (n < 2) throw MonotonicityError("interpolation needs >= 2 samples");
        std::vector<double> d(n - 1);
        for (int i = 0; i + 1 < n; ++i) {
            const double dt = t_[i + 1] - t_[i];
            if (!(dt > 0.0))
                throw MonotonicityError("abscissae not strictly increasing");
            d[i] = (y_[i + 1] - y_[i]) / dt;
        }
        m_.resize(n);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (int i = 1; i + 1 < n; ++i)
            m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        for (int i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) { m_[i] = m_[i + 1] = 0.0; continue; }
            const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                m_[i] = tau * a * d[i];
                m_[i + 1] = tau * b * d[i];
            }
        }
    }

    double operator()(double tq) const {
        const int n = static_cast<int>(t_.size());
        if (tq < t_.front() || tq > t_.back())
            throw CoverageError("interpolation query outside the sampled range");
        int i = static_cast<int>(std::upper_bound(t_.begin(), t_.end(), tq) -
                                 t_.begin()) - 1;
        i = std::clamp(i, 0, n - 2);
        const double hh = t_[i + 1] - t_[i];
        const double s = (tq - t_[i]) / hh;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * y_[i] + h10 * hh * m_[i] + h01 * y_[i + 1] +
               h11 * hh * m_[i + 1];
    }

  private:
    std::vector<double> t_, y_, m_;
};

int left_window(const LogGrid& g) {
    int w = 12;
    for (int i = 0; i < g.n_nodes; ++i)
        if (g.x[i] < 1e-3) w = std::max(w, i + 1);
    return std::min(w, g.n_nodes / 2);
}

} // namespace

GridFunction initial_from_height_profile(const MobilityParams& par,
                                         const HeightProfile& profile,
                                         GridPtr grid) {
    const int np = static_cast<int>(profile.samples.size());
    if (np < 4) throw MonotonicityError("height profile needs >= 4 samples");
    std::vector<double> zt(np), hh(np);
    for (int i = 0; i < np; ++i) {
        zt[i] = profile.samples[i].first;
        hh[i] = profile.samples[i].second;
        if (i > 0 && (!(zt[i] > zt[i - 1]) || !(hh[i] > hh[i - 1])))
            throw MonotonicityError("height profile must increase strictly");
    }
    MonotoneInterp z_of_h(hh, zt); // invert h -> z_tilde

    const int n = grid->n_nodes;
    std::vector<double> Z(n);
    const double c = 4.0 - 2.0 * par.n;
    for (int i = 0; i < n; ++i) {
        double target; // h value pinned at this grid point
        if (par.branch == Branch::Upper) {
            target = std::pow(grid->x[i], 3.0 / par.n);
        } else {
            const double y = std::pow(std::pow(c, 4) * grid->x[i], 1.0 / c);
            target = y * y;
        }
        if (target < hh.front() || target > hh.back())
            throw CoverageError("height profile does not cover the grid span");
        Z[i] = z_of_h(target) + profile.z_offset;
    }
    // H = 1/Z_x (upper) or 1/Z_y (lower); derivatives via D = x d/dx in s
    GridFunction Zf(grid, Z);
    GridFunction DZ = derivative(Zf, 1);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
        double zy;
        if (par.branch == Branch::Upper) {
            zy = DZ[i] / grid->x[i];
        } else {
            const double y = std::pow(std::pow(c, 4) * grid->x[i], 1.0 / c);
            zy = c * DZ[i] / y; // dZ/dy = (4-2n) (DZ)/y
        }
        if (!(zy > 0.0))
            throw MonotonicityError("transformed profile is not monotone");
        u[i] = 1.0 / zy - 1.0;
    }
    return GridFunction(grid, std::move(u));
}

HeightProfile reconstruct_height(const MobilityParams& par,
                                 const GridFunction& u, double z0) {
    const auto& g = u.grid();
    const int n = u.size();
    double hmin = 1e300;
    for (int i = 0; i < n; ++i) hmin = std::min(hmin, 1.0 + u[i]);
    if (!(hmin > 0.0))
        throw DegenerateState("reconstruct_height: 1+u not positive");

    const auto bc = extract_boundary_coefficients(par, u, left_window(g));
    HeightProfile prof;
    prof.z_offset = z0;
    prof.samples.resize(n);
    const double c = 4.0 - 2.0 * par.n;
    if (par.branch == Branch::Upper) {
        // Z(x) = z0 + int_0^x dx'/(1+u); dx' = x' ds
        std::vector<double> integrand(n);
        for (int i = 0; i < n; ++i) integrand[i] = g.x[i] / (1.0 + u[i]);
        std::vector<double> C = cumulative_prefix(integrand, g.h);
        const double tail =
            g.x[0] / (1.0 + bc.u0) -
            bc.ubeta * std::pow(g.x[0], 1.0 + par.beta) /
                ((1.0 + par.beta) * (1.0 + bc.u0) * (1.0 + bc.u0));
        for (int i = 0; i < n; ++i)
            prof.samples[i] = {C[i] + tail, std::pow(g.x[i], 3.0 / par.n)};
    } else {
        // y = ((4-2n)^4 x)^{1/(4-2n)}, Z(y) = z0 + int_0^y dy'/(1+u);
        // dy' = y ds/(4-2n)
        std::vector<double> y(n), integrand(n);
        for (int i = 0; i < n; ++i) {
            y[i] = std::pow(std::pow(c, 4) * g.x[i], 1.0 / c);
            integrand[i] = y[i] / (c * (1.0 + u[i]));
        }
        std::vector<double> C = cumulative_prefix(integrand, g.h);
        const double tail = y[0] / (1.0 + bc.u0);
        for (int i = 0; i < n; ++i)
            prof.samples[i] = {C[i] + tail, y[i] * y[i]};
    }
    return prof;
}

double contact_line_velocity(const MobilityParams& par, double u0,
                             double ubeta) {
    if (!(1.0 + u0 > 0.0))
        throw DegenerateState("contact_line_velocity: 1+u0 must be positive");
    const double n = par.n;
    if (par.branch == Branch::Upper) {
        const double a = 3.0 / n;
        return (3.0 - a) * (2.0 - a) * (a - 1.0) * std::pow(1.0 + u0, 3);
    }
    const double num =
        2.0 * (3.0 - 2.0 * n) * (5.0 - 2.0 * n) * std::pow(1.0 + u0, 2) * ubeta;
    const double den =
        std::pow(4.0 - 2.0 * n, 2.0 * (3.0 - 2.0 * n) / (2.0 - n));
    return num / den;
}

std::vector<std::pair<double, double>>
contact_line_evolve(const Trajectory& tr, const MobilityParams& par) {
    if (tr.empty())
        throw IncompleteTrajectory("contact_line_evolve: empty trajectory");
    std::vector<std::pair<double, double>> out;
    out.reserve(tr.size());
    double z = 0.0;
    double vprev = contact_line_velocity(par, tr.u0_series[0], tr.ubeta_series[0]);
    out.emplace_back(tr.times[0], z);
    for (int i = 1; i < tr.size(); ++i) {
        const double v =
            contact_line_velocity(par, tr.u0_series[i], tr.ubeta_series[i]);
        z += 0.5 * (v + vprev) * (tr.times[i] - tr.times[i - 1]);
        out.emplace_back(tr.times[i], z);
        vprev = v;
    }
    return out;
}

ExpansionReport expansion_fit_check(const MobilityParams& par,
                                    const GridFunction& u, double delta) {
    const auto& g = u.grid();
    if (!(g.x_min < 1e-3))
        throw DomainError("expansion_fit_check: grid must reach below 1e-3");
    const int w = left_window(g);
    const auto bc = extract_boundary_coefficients(par, u, w);

    ExpansionReport rep;
    rep.u0 = bc.u0;
    rep.ubeta = bc.ubeta;
    double C = 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    const double floor = 1e-13 * std::max(u.sup_norm(), 1.0);
    for (int i = 0; i < w; ++i) {
        const double r =
            u[i] - bc.u0 - bc.ubeta * std::pow(g.x[i], par.beta);
        C = std::max(C, std::abs(r) / std::pow(g.x[i], par.beta + delta));
        if (std::abs(r) > floor) {
            const double lx = std::log(g.x[i]), ly = std::log(std::abs(r));
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++cnt;
        }
    }
    rep.constant = C;
    if (cnt >= 3) {
        const double den = cnt * sxx - sx * sx;
        rep.remainder_slope = den != 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
    }
    rep.passes = rep.remainder_slope >= par.beta + delta;
    return rep;
}

} // namespace tflab
