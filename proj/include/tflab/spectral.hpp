#pragma once
// Symbol-level coercivity checks: Re p(alpha + i xi) against the H^2 symbol
// normalizer, sufficient-condition tables over alpha, and the dense spectrum
// of the discretized generator.

#include <complex>
#include <vector>

#include "tflab/calculus.hpp"

namespace tflab {

struct SymbolScan {
    double alpha = 0.0;
    std::vector<double> xi;
    std::vector<double> re_p;
    std::vector<double> ratio; // re_p / (1+xi^2)^2
    double inf_ratio = 0.0;
};

struct CoercivityRow {
    double alpha;
    double inf_ratio;
    bool condition_interval; // alpha in (-inf,g1) u (g2,g3) u (g4,inf)
    bool condition_variance; // |alpha - m| <= sigma/sqrt(3)
};

struct EigenPair {
    std::complex<double> lambda;
    std::vector<double> vec_real; // real part of the eigenvector
    double kernel_correlation = 0.0;
};

std::complex<double> symbol(const MobilityParams& par, double alpha, double xi);

SymbolScan coercivity_constant(const MobilityParams& par, double alpha,
                               double xi_max, int n_xi);

std::vector<CoercivityRow> verify_coercivity(const MobilityParams& par,
                                             int alpha_samples);

// eigenvalues of the assembled A, sorted by real part descending; each entry
// carries the correlation of its eigenvector with span{1, x^beta} in the
// (.,.)_{alpha-1/2} inner product
std::vector<EigenPair> discrete_spectrum(const OperatorStencil& st,
                                         double alpha);

} // namespace tflab
