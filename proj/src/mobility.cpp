#include "tflab/mobility.hpp"

#include <cmath>
#include <limits>

namespace tflab {

namespace {

void check_admissible(double n) {
    if (!(n > 1.0 && n < 3.0))
        throw DomainError("mobility exponent must lie in (1,3)");
    if (std::abs(n - 1.5) < kResonanceGuard)
        throw DomainError("mobility exponent too close to the resonant value 3/2");
}

} // namespace

MobilityParams make_params(double n) {
    check_admissible(n);
    MobilityParams par;
    par.n = n;
    if (n < 1.5) {
        par.branch = Branch::Lower;
        par.gamma = {-1.0 / (2.0 - n), (1.0 - 2.0 * n) / (4.0 - 2.0 * n), 0.0,
                     (3.0 - 2.0 * n) / (4.0 - 2.0 * n)};
        par.mean_gamma = (1.0 - 2.0 * n) / (4.0 * (2.0 - n));
        par.sigma_gamma =
            std::sqrt(13.0 - 12.0 * n + 4.0 * n * n) / (4.0 * (2.0 - n));
    } else {
        par.branch = Branch::Upper;
        const double disc = std::sqrt(-27.0 + 36.0 * n - 8.0 * n * n);
        par.gamma = {-3.0 / n, (4.0 * n - 9.0 - disc) / (2.0 * n), 0.0,
                     (4.0 * n - 9.0 + disc) / (2.0 * n)};
        par.wave_speed = (3.0 / n) * (3.0 / n - 1.0) * (3.0 / n - 2.0);
        par.mean_gamma = (n - 3.0) / n;
        par.sigma_gamma = std::sqrt(3.0 / (2.0 * n));
    }
    par.beta = par.gamma[3];
    par.coercivity = coercivity_range(n);
    return par;
}

Interval coercivity_range(double n) {
    check_admissible(n);
    double g2, mean, radius;
    if (n < 1.5) {
        g2 = (1.0 - 2.0 * n) / (2.0 * (2.0 - n));
        mean = (1.0 - 2.0 * n) / (4.0 * (2.0 - n));
        radius = std::sqrt(13.0 - 12.0 * n + 4.0 * n * n) /
                 (std::sqrt(3.0) * 4.0 * (2.0 - n));
    } else {
        const double disc = std::sqrt(-27.0 + 36.0 * n - 8.0 * n * n);
        g2 = (4.0 * n - 9.0 - disc) / (2.0 * n);
        mean = (n - 3.0) / n;
        radius = 1.0 / std::sqrt(2.0 * n);
    }
    Interval r;
    r.lo = std::max(g2, mean - radius);
    r.hi = std::min(0.0, mean + radius);
    return r;
}

bool in_coercivity_range(double n, double alpha) {
    return coercivity_range(n).contains(alpha);
}

AdmissibleWindow admissible_p_interval(double n) {
    const auto par = make_params(n);
    const auto range = coercivity_range(n);
    AdmissibleWindow w;
    w.n = n;

    // the delta -> 0 idealization: p admissible iff
    //   1/p < beta,  -1 + 1/p in range,  -1 + beta in range
    if (!range.contains(-1.0 + par.beta)) {
        w.p_lo = 1.0;
        w.p_hi = 0.0;
        w.constraints_active.push_back("-1+beta outside coercivity range");
        return w;
    }

    // collect the constraints on theta = 1/p in (0,1)
    double th_hi = par.beta;            // 1/p < beta
    std::string hi_tag = "1/p<beta";
    if (range.hi + 1.0 < th_hi) {       // -1 + 1/p < range.hi
        th_hi = range.hi + 1.0;
        hi_tag = "-1+1/p below range top";
    }
    if (th_hi > 1.0) { th_hi = 1.0; hi_tag = "p>1"; }

    double th_lo = 0.0;                 // p < inf
    std::string lo_tag;
    if (range.lo + 1.0 > th_lo) {       // -1 + 1/p > range.lo
        th_lo = range.lo + 1.0;
        lo_tag = "-1+1/p above range bottom";
    }

    if (!(th_lo < th_hi)) {
        w.p_lo = 1.0;
        w.p_hi = 0.0;
        w.constraints_active.push_back("empty 1/p window");
        return w;
    }
    w.p_lo = 1.0 / th_hi;
    w.p_hi = th_lo > 0.0 ? 1.0 / th_lo : std::numeric_limits<double>::infinity();
    w.constraints_active.push_back(hi_tag);
    if (!lo_tag.empty()) w.constraints_active.push_back(lo_tag);
    if (w.p_lo < 1.0) w.p_lo = 1.0;
    return w;
}

bool AdmissibleWindow::unbounded() const {
    return std::isinf(p_hi);
}

double traveling_wave_residual(double n, double x) {
    check_admissible(n);
    if (n <= 1.5)
        throw BranchError("traveling wave profile exists on the upper branch only");
    if (!(x > 0.0))
        throw DomainError("traveling_wave_residual: x must be positive");
    const double a = 3.0 / n;
    const double V = a * (a - 1.0) * (a - 2.0);
    // h = x^a: h^{n-1} h''' = a(a-1)(a-2) x^{a(n-1)} x^{a-3}; exponent sums to 0
    const double expo = a * (n - 1.0) + a - 3.0;
    return V * std::pow(x, expo) - V;
}

double p_of_real(const MobilityParams& par, double z) {
    // expanded coefficients via elementary symmetric functions, Horner form
    const auto& g = par.gamma;
    const double e1 = g[0] + g[1] + g[2] + g[3];
    const double e2 = g[0] * g[1] + g[0] * g[2] + g[0] * g[3] + g[1] * g[2] +
                      g[1] * g[3] + g[2] * g[3];
    const double e3 = g[0] * g[1] * g[2] + g[0] * g[1] * g[3] +
                      g[0] * g[2] * g[3] + g[1] * g[2] * g[3];
    const double e4 = g[0] * g[1] * g[2] * g[3];
    return (((z - e1) * z + e2) * z - e3) * z + e4;
}

} // namespace tflab
