#pragma once
// Closed-form constants attached to a mobility exponent n in (1,3/2) u (3/2,3).
//
// The linearized operator is A = -x^{-1} p(D) with D = x d/dx and
//   p(z) = (z - g1)(z - g2)(z - g3)(z - g4),  g3 = 0,  g4 = beta.
// Lower branch (1 < n < 3/2):
//   g1 = -1/(2-n), g2 = (1-2n)/(4-2n), g4 = (3-2n)/(4-2n)
// Upper branch (3/2 < n < 3):
//   g1 = -3/n, g2,g4 = (4n-9 -+ sqrt(-27+36n-8n^2))/(2n),
//   wave speed V = (3/n)(3/n-1)(3/n-2) so that h = x^{3/n} is the profile.
// The coercivity range is the alpha-interval on which (w, p(D)w)_alpha
// controls |w|_{2,alpha}^2: the intersection of (g2, 0) with
// |alpha - m(gamma)| <= sigma(gamma)/sqrt(3).

#include <array>
#include <optional>
#include <vector>

#include "tflab/errors.hpp"

namespace tflab {

enum class Branch { Lower, Upper };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
    bool contains(double a) const { return lo < a && a < hi; }
    double length() const { return hi - lo; }
};

struct MobilityParams {
    double n = 0.0;
    Branch branch = Branch::Upper;
    std::array<double, 4> gamma{}; // ascending, gamma[2] = 0, gamma[3] = beta
    double beta = 0.0;
    std::optional<double> wave_speed; // V, Upper branch only
    double mean_gamma = 0.0;          // m(gamma)
    double sigma_gamma = 0.0;         // sigma(gamma) >= 0
    Interval coercivity;
};

struct AdmissibleWindow {
    double n = 0.0;
    double p_lo = 1.0;
    double p_hi = 0.0; // +inf allowed; empty when p_hi <= p_lo
    std::vector<std::string> constraints_active;
    bool empty() const { return !(p_lo < p_hi); }
    bool unbounded() const;
};

// guard half-width around the excluded resonant exponent n = 3/2
inline constexpr double kResonanceGuard = 1e-6;

MobilityParams make_params(double n);
Interval coercivity_range(double n);
bool in_coercivity_range(double n, double alpha);
AdmissibleWindow admissible_p_interval(double n);

// h^{n-1} h''' - V for h = x^{3/n}, evaluated from the monomial formula.
double traveling_wave_residual(double n, double x);

// p(z) on the real axis by Horner form of the expanded polynomial.
double p_of_real(const MobilityParams& par, double z);

} // namespace tflab
