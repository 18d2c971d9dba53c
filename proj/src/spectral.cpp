#include "tflab/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace tflab {

std::complex<double> symbol(const MobilityParams& par, double alpha, double xi) {
    std::complex<double> z(alpha, xi), acc(1.0, 0.0);
    for (double g : par.gamma) acc *= (z - g);
    return acc;
}

SymbolScan coercivity_constant(const MobilityParams& par, double alpha,
                               double xi_max, int n_xi) {
    double gmax = 0.0;
    for (double g : par.gamma) gmax = std::max(gmax, std::abs(g));
    if (!(xi_max >= 10.0 * gmax))
        throw DomainError("coercivity_constant: xi_max must be >= 10 max|gamma|");
    if (n_xi < 1000) throw DomainError("coercivity_constant: n_xi >= 1000");

    SymbolScan scan;
    scan.alpha = alpha;
    const int n_lin = n_xi / 2, n_log = n_xi - n_xi / 2;
    scan.xi.reserve(n_xi);
    for (int i = 0; i < n_lin; ++i)
        scan.xi.push_back(10.0 * i / (n_lin - 1));
    const double l0 = std::log(10.0), l1 = std::log(xi_max);
    for (int i = 1; i <= n_log; ++i)
        scan.xi.push_back(std::exp(l0 + (l1 - l0) * i / n_log));
    scan.re_p.reserve(scan.xi.size());
    scan.ratio.reserve(scan.xi.size());
    double inf = 1e300;
    for (double xi : scan.xi) {
        const double re = symbol(par, alpha, xi).real();
        const double norm = std::pow(1.0 + xi * xi, 2.0);
        scan.re_p.push_back(re);
        scan.ratio.push_back(re / norm);
        inf = std::min(inf, re / norm);
    }
    scan.inf_ratio = inf;
    return scan;
}

std::vector<CoercivityRow> verify_coercivity(const MobilityParams& par,
                                             int alpha_samples) {
    if (alpha_samples < 50)
        throw DomainError("verify_coercivity: need at least 50 samples");
    const double lo = par.gamma[0] - 1.0, hi = par.gamma[3] + 1.0;
    double gmax = 0.0;
    for (double g : par.gamma) gmax = std::max(gmax, std::abs(g));
    const double xi_max = std::max(10.0 * gmax, 100.0);
    std::vector<CoercivityRow> rows;
    rows.reserve(alpha_samples);
    for (int i = 0; i < alpha_samples; ++i) {
        const double a = lo + (hi - lo) * i / (alpha_samples - 1);
        CoercivityRow r;
        r.alpha = a;
        r.inf_ratio = coercivity_constant(par, a, xi_max, 2000).inf_ratio;
        r.condition_interval = (a < par.gamma[0]) ||
                               (a > par.gamma[1] && a < par.gamma[2]) ||
                               (a > par.gamma[3]);
        r.condition_variance =
            std::abs(a - par.mean_gamma) <= par.sigma_gamma / std::sqrt(3.0);
        rows.push_back(r);
    }
    return rows;
}

std::vector<EigenPair> discrete_spectrum(const OperatorStencil& st,
                                         double alpha) {
    const int n = st.grid().n_nodes;
    if (n > 2048)
        throw DomainError("discrete_spectrum: dense solve capped at N = 2048");
    Eigen::MatrixXd A = Eigen::MatrixXd(st.matrix_A());
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw EigFailure("discrete_spectrum: eigensolver did not converge");

    // correlation with span{1, x^beta} in the weighted inner product
    const auto& x = st.grid().x;
    const double h = st.grid().h;
    Eigen::VectorXd wgt(n), one(n), xb(n);
    for (int i = 0; i < n; ++i) {
        wgt(i) = std::pow(x[i], -2.0 * (alpha - 0.5)) * h;
        one(i) = 1.0;
        xb(i) = std::pow(x[i], st.params().beta);
    }
    Eigen::MatrixXd B(n, 2);
    B.col(0) = one;
    B.col(1) = xb;
    Eigen::Matrix2d G;
    G(0, 0) = (one.array() * wgt.array() * one.array()).sum();
    G(0, 1) = G(1, 0) = (one.array() * wgt.array() * xb.array()).sum();
    G(1, 1) = (xb.array() * wgt.array() * xb.array()).sum();
    auto correlation = [&](const Eigen::VectorXd& v) {
        Eigen::Vector2d rhs;
        rhs(0) = (one.array() * wgt.array() * v.array()).sum();
        rhs(1) = (xb.array() * wgt.array() * v.array()).sum();
        const Eigen::Vector2d c = G.ldlt().solve(rhs);
        const Eigen::VectorXd proj = B * c;
        const double nv = std::sqrt((v.array().square() * wgt.array()).sum());
        const double np = std::sqrt((proj.array().square() * wgt.array()).sum());
        return nv > 0.0 ? np / nv : 0.0;
    };

    std::vector<EigenPair> out(n);
    for (int k = 0; k < n; ++k) {
        EigenPair ep;
        ep.lambda = es.eigenvalues()(k);
        Eigen::VectorXd vr(n);
        if (std::abs(ep.lambda.imag()) > 0.0) {
            for (int i = 0; i < n; ++i) vr(i) = std::abs(es.eigenvectors()(i, k));
        } else {
            for (int i = 0; i < n; ++i) vr(i) = es.eigenvectors()(i, k).real();
        }
        ep.kernel_correlation = correlation(vr);
        ep.vec_real.assign(vr.data(), vr.data() + n);
        out[k] = std::move(ep);
    }
    std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
        return a.lambda.real() > b.lambda.real();
    });
    return out;
}

} // namespace tflab
