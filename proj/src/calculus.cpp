#include "tflab/calculus.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace tflab {

namespace {

constexpr std::array<double, 5> kRight1{-1.0 / 12, 0.5, -1.5, 5.0 / 6, 0.25};
constexpr std::array<double, 5> kRight0{0.25, -4.0 / 3, 3.0, -4.0, 25.0 / 12};

} // namespace

OperatorStencil::OperatorStencil(MobilityParams par, GridPtr grid,
                                 int fit_window)
    : par_(std::move(par)), grid_(std::move(grid)), fit_window_(fit_window) {
    if (fit_window_ < 4 || fit_window_ > grid_->n_nodes / 2)
        throw DomainError("OperatorStencil: bad fit window");
    build_rows();
    assemble_matrix();
}

void OperatorStencil::build_rows() {
    const int n = grid_->n_nodes;
    const double h = grid_->h;
    const auto& x = grid_->x;
    const double beta = par_.beta;
    row_start_.assign(n, 0);
    row_coef_.assign(n, {});

    // ghost rows: evaluate the least-squares fit of the leftmost fit_window_
    // nodes on span{1, x^beta, x} at the two ghost points s_0 - h, s_0 - 2h.
    // The recentered basis {1, x^beta - x0^beta, x - x0} carries the same
    // span with bounded conditioning over the narrow window.
    const int w = fit_window_;
    Eigen::MatrixXd W(w, 3);
    const double x0 = x[0];
    const double xb0 = std::pow(x0, beta);
    for (int i = 0; i < w; ++i) {
        W(i, 0) = 1.0;
        W(i, 1) = std::pow(x[i], beta) - xb0;
        W(i, 2) = x[i] - x0;
    }
    Eigen::Vector3d col;
    for (int j = 0; j < 3; ++j) col(j) = W.col(j).norm();
    for (int j = 0; j < 3; ++j) W.col(j) /= col(j);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(w, 3);
    Eigen::MatrixXd R =
        qr.matrixQR().topRows(3).triangularView<Eigen::Upper>();
    auto ghost_row = [&](int k) {
        const double xg = std::exp(grid_->s[0] - k * h);
        Eigen::Vector3d b(1.0, std::pow(xg, beta) - xb0, xg - x0);
        for (int j = 0; j < 3; ++j) b(j) /= col(j);
        Eigen::Vector3d y = R.transpose().triangularView<Eigen::Lower>().solve(b);
        Eigen::VectorXd row = Q * y;
        return row;
    };
    const Eigen::VectorXd g1r = ghost_row(1);
    const Eigen::VectorXd g2r = ghost_row(2);

    const double inv12h = 1.0 / (12.0 * h);
    {
        // row 0: (g(-2) - 8 g(-1) + 8 u1 - u2) / 12h
        std::vector<double> r(std::max(w, 3), 0.0);
        for (int k = 0; k < w; ++k) r[k] = (g2r(k) - 8.0 * g1r(k)) * inv12h;
        r[1] += 8.0 * inv12h;
        r[2] -= inv12h;
        row_start_[0] = 0;
        row_coef_[0] = std::move(r);
    }
    {
        // row 1: (g(-1) - 8 u0 + 8 u2 - u3) / 12h
        std::vector<double> r(std::max(w, 4), 0.0);
        for (int k = 0; k < w; ++k) r[k] = g1r(k) * inv12h;
        r[0] -= 8.0 * inv12h;
        r[2] += 8.0 * inv12h;
        r[3] -= inv12h;
        row_start_[1] = 0;
        row_coef_[1] = std::move(r);
    }
    for (int i = 2; i < n - 2; ++i) {
        row_start_[i] = i - 2;
        row_coef_[i] = {inv12h, -8.0 * inv12h, 0.0, 8.0 * inv12h, -inv12h};
    }
    row_start_[n - 2] = n - 5;
    row_coef_[n - 2].assign(kRight1.begin(), kRight1.end());
    for (double& c : row_coef_[n - 2]) c /= h;
    row_start_[n - 1] = n - 5;
    row_coef_[n - 1].assign(kRight0.begin(), kRight0.end());
    for (double& c : row_coef_[n - 1]) c /= h;

    // exact zero row sums (rows annihilate constants even in fp when applied
    // with the row-local shift; zero sums keep the assembled matrix close)
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (double c : row_coef_[i]) sum += c;
        auto& r = row_coef_[i];
        int jmax = 0;
        for (size_t k = 1; k < r.size(); ++k)
            if (std::abs(r[k]) > std::abs(r[jmax])) jmax = static_cast<int>(k);
        r[jmax] -= sum;
    }
    bandwidth_ = std::max(fit_window_, 5);
}

std::vector<double> OperatorStencil::apply_D(const std::vector<double>& f) const {
    const int n = grid_->n_nodes;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const auto& r = row_coef_[i];
        const int s0 = row_start_[i];
        const double fi = f[i];
        double acc = 0.0;
        for (size_t k = 0; k < r.size(); ++k) acc += r[k] * (f[s0 + k] - fi);
        out[i] = acc;
    }
    return out;
}

std::vector<double> OperatorStencil::apply_factor(const std::vector<double>& f,
                                                  double gamma) const {
    std::vector<double> out = apply_D(f);
    for (size_t i = 0; i < out.size(); ++i) out[i] -= gamma * f[i];
    return out;
}

void OperatorStencil::assemble_matrix() {
    const int n = grid_->n_nodes;
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    trips.reserve(static_cast<size_t>(n) * 6);
    for (int i = 0; i < n; ++i) {
        const auto& r = row_coef_[i];
        for (size_t k = 0; k < r.size(); ++k)
            if (r[k] != 0.0)
                trips.emplace_back(i, row_start_[i] + static_cast<int>(k), r[k]);
    }
    Eigen::SparseMatrix<double> D(n, n);
    D.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();
    Eigen::SparseMatrix<double> P = I;
    for (double g : par_.gamma) {
        Eigen::SparseMatrix<double> F = D - g * I;
        P = (P * F).pruned();
    }
    Eigen::SparseMatrix<double> Xinv(n, n);
    Xinv.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int i = 0; i < n; ++i) Xinv.insert(i, i) = -1.0 / grid_->x[i];
    A_ = (Xinv * P).pruned();
    A_.makeCompressed();
}

double OperatorStencil::closure_tolerance() const {
    // stencil truncation on the x^beta mode, amplified by x^{beta-1} at the
    // left end of the grid
    const double h = grid_->h;
    const double b = par_.beta;
    double prod = 1.0;
    for (int j = 0; j < 3; ++j) prod *= std::abs(b - par_.gamma[j]);
    const double rel = std::pow(h, 4) * std::pow(b, 5) / 30.0 * prod;
    return 10.0 * rel * std::pow(grid_->x_min, b - 1.0);
}

namespace {

void require_same_grid(const OperatorStencil& st, const GridFunction& u) {
    if (!st.grid().same_as(u.grid()))
        throw GridMismatch("grid function does not live on the stencil grid");
}

} // namespace

GridFunction apply_p_of_D(const OperatorStencil& st, const GridFunction& u) {
    require_same_grid(st, u);
    std::vector<double> w = u.values();
    const auto& g = st.params().gamma;
    for (int j = 3; j >= 0; --j) w = st.apply_factor(w, g[j]);
    return GridFunction(u.grid_ptr(), std::move(w));
}

GridFunction apply_A(const OperatorStencil& st, const GridFunction& u) {
    GridFunction p = apply_p_of_D(st, u);
    const auto& x = st.grid().x;
    for (int i = 0; i < p.size(); ++i) p[i] = -p[i] / x[i];
    return p;
}

GridFunction apply_M(const OperatorStencil& st, const GridFunction& H1,
                     const GridFunction& H2, const GridFunction& H3,
                     const GridFunction& H4, const GridFunction& H5) {
    for (const auto* f : {&H1, &H2, &H3, &H4, &H5}) require_same_grid(st, *f);
    const int n = st.grid().n_nodes;
    const double nn = st.params().n;
    std::vector<double> t;
    auto mul = [&](const GridFunction& Hf, std::vector<double>& v) {
        for (int i = 0; i < n; ++i) v[i] *= Hf[i];
    };
    auto shift = [&](std::vector<double>& v, double c) {
        std::vector<double> d = st.apply_D(v);
        for (int i = 0; i < n; ++i) d[i] += c * v[i];
        v = std::move(d);
    };
    if (st.params().branch == Branch::Upper) {
        // H1 H2 D (D+3/n) H3 (D+3/n-2) H4 (D+3/n-1) H5
        const double a = 3.0 / nn;
        t = H5.values();
        shift(t, a - 1.0);
        mul(H4, t);
        shift(t, a - 2.0);
        mul(H3, t);
        shift(t, a);
        shift(t, 0.0);
    } else {
        // H1 H2 (D+(2n-3)/(4-2n)) (D+(2n-1)/(4-2n)) H3 D H4 (D+1/(4-2n)) H5
        const double ca = (2.0 * nn - 3.0) / (4.0 - 2.0 * nn);
        const double cb = (2.0 * nn - 1.0) / (4.0 - 2.0 * nn);
        const double cc = 1.0 / (4.0 - 2.0 * nn);
        t = H5.values();
        shift(t, cc);
        mul(H4, t);
        shift(t, 0.0);
        mul(H3, t);
        shift(t, cb);
        shift(t, ca);
    }
    for (int i = 0; i < n; ++i) t[i] *= H1[i] * H2[i];
    return GridFunction(H1.grid_ptr(), std::move(t));
}

GridFunction nonlinearity(const OperatorStencil& st, const GridFunction& u) {
    require_same_grid(st, u);
    const int n = st.grid().n_nodes;
    double hmin = 1e300;
    for (int i = 0; i < n; ++i) hmin = std::min(hmin, 1.0 + u[i]);
    if (hmin <= 0.1)
        throw DegenerateState("nonlinearity: 1+u too close to zero");

    // M(1+u,...,1+u) with every chain stage written as (constant + variation)
    // and only the variation field passed through D; the constant part of
    // each stage is exact, so N has no spurious linear-in-u content.
    const double nn = st.params().n;
    std::vector<double> w(n), H(n);
    for (int i = 0; i < n; ++i) H[i] = 1.0 + u[i];
    auto dplus = [&](std::vector<double>& v, double c) {
        std::vector<double> d = st.apply_D(v);
        for (int i = 0; i < n; ++i) d[i] += c * v[i];
        v = std::move(d);
    };
    if (st.params().branch == Branch::Upper) {
        const double c1 = 3.0 / nn - 1.0, c2 = 3.0 / nn - 2.0, c3 = 3.0 / nn;
        w = st.apply_D(u.values());
        for (int i = 0; i < n; ++i) w[i] += c1 * u[i];         // t1 = c1 + w
        for (int i = 0; i < n; ++i) w[i] = c1 * u[i] + H[i] * w[i]; // t2
        dplus(w, c2);                                          // t3 = c1 c2 + w
        for (int i = 0; i < n; ++i) w[i] = c1 * c2 * u[i] + H[i] * w[i]; // t4
        dplus(w, c3);                                          // t5 = c1c2c3 + w
        w = st.apply_D(w);                                     // t6 = w
    } else {
        const double ca = (2.0 * nn - 3.0) / (4.0 - 2.0 * nn);
        const double cb = (2.0 * nn - 1.0) / (4.0 - 2.0 * nn);
        const double cc = 1.0 / (4.0 - 2.0 * nn);
        w = st.apply_D(u.values());
        for (int i = 0; i < n; ++i) w[i] += cc * u[i];         // t1 = cc + w
        for (int i = 0; i < n; ++i) w[i] = cc * u[i] + H[i] * w[i]; // t2
        w = st.apply_D(w);                                     // t3 = w
        for (int i = 0; i < n; ++i) w[i] *= H[i];              // t4
        dplus(w, cb);                                          // t5
        dplus(w, ca);                                          // t6
    }
    std::vector<double> m(n);
    for (int i = 0; i < n; ++i) m[i] = H[i] * H[i] * w[i];

    std::vector<double> p = u.values();
    const auto& g = st.params().gamma;
    for (int j = 3; j >= 0; --j) p = st.apply_factor(p, g[j]);

    const auto& x = st.grid().x;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = (-m[i] + p[i]) / x[i];
    return GridFunction(u.grid_ptr(), std::move(out));
}

namespace {

// prefix integral whose integrand behaves like
//   d/ds [ ca x^pa + cb x^pb ]
// near x = 0: the model is subtracted over the left window where it
// dominates, integrated in closed form, and the rule handles the rest
std::vector<double> prefix_with_model(const std::vector<double>& g,
                                      const LogGrid& gr, double ca, double pa,
                                      double cb, double pb) {
    const int n = gr.n_nodes;
    const auto& x = gr.x;
    std::vector<double> model(n);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    for (int i = 0; i < n; ++i)
        model[i] = ca * pa * std::pow(x[i], pa) + cb * pb * std::pow(x[i], pb);
    int mstar = n;
    for (int i = 0; i < n; ++i)
        if (std::abs(model[i]) > 1e-4 * gmax) { mstar = i; break; }
    mstar = std::clamp(mstar, 8, n - 8);

    static const double W[4][5] = {
        {251.0 / 720, 323.0 / 360, -11.0 / 30, 53.0 / 360, -19.0 / 720},
        {-19.0 / 720, 173.0 / 360, 19.0 / 30, -37.0 / 360, 11.0 / 720},
        {11.0 / 720, -37.0 / 360, 19.0 / 30, 173.0 / 360, -19.0 / 720},
        {-19.0 / 720, 53.0 / 360, -11.0 / 30, 323.0 / 360, 251.0 / 720}};
    std::vector<double> C(n, 0.0);
    const double h = gr.h;
    for (int i = 0; i + 1 < n; ++i) {
        const int lo = std::clamp(i - 2, 0, n - 5);
        const double* w = W[i - lo];
        double inc = 0.0;
        if (i + 1 <= mstar)
            for (int k = 0; k < 5; ++k)
                inc += w[k] * (g[lo + k] - model[lo + k]);
        else
            for (int k = 0; k < 5; ++k) inc += w[k] * g[lo + k];
        C[i + 1] = C[i] + h * inc;
    }
    // add back the analytic cumulative of the model up to min(x_i, x_{m*})
    const double capA = ca * std::pow(x[mstar], pa);
    const double capB = cb * std::pow(x[mstar], pb);
    for (int i = 0; i < n; ++i) {
        if (i <= mstar)
            C[i] += ca * std::pow(x[i], pa) + cb * std::pow(x[i], pb);
        else
            C[i] += capA + capB;
    }
    return C;
}

std::vector<double> suffix_integral(const std::vector<double>& g,
                                    const LogGrid& gr) {
    std::vector<double> C = cumulative_prefix(g, gr.h);
    const double total = C.back();
    const double tr = tail_right(g, gr.h);
    std::vector<double> out(g.size());
    for (size_t i = 0; i < g.size(); ++i) out[i] = (total - C[i]) + tr;
    return out;
}

} // namespace

std::pair<GridFunction, BoundaryCoefficients>
elliptic_inverse_B(const OperatorStencil& st, const GridFunction& v) {
    require_same_grid(st, v);
    const auto& par = st.params();
    const LogGrid& gr = st.grid();
    const auto& x = gr.x;
    const int n = gr.n_nodes;
    const double b = par.beta;
    const double g1 = par.gamma[0], g2 = par.gamma[1];

    // integrability precondition (Lemma hypotheses, checked numerically)
    {
        const double a1 = 0.5 * g2, a2 = 0.5 * b;
        try {
            weighted_integral(v, a1 - 1.0);
            weighted_integral(v, a2 - 1.0);
        } catch (const TailError&) {
            throw IntegrabilityError(
                "elliptic_inverse_B: v fails the weighted integrability check");
        }
    }

    std::vector<double> gI1(n);
    for (int i = 0; i < n; ++i) gI1[i] = std::pow(x[i], 1.0 - b) * v[i];
    const std::vector<double> I1 = suffix_integral(gI1, gr);

    const double a = x[0];
    const double v0 = v[0];
    const double I10 = I1[0] + v0 * std::pow(a, 1.0 - b) / (1.0 - b);
    const double cb_ = I10 / b;          // J ~ cb x^b + c1 x near 0
    const double c1_ = -v0 / (1.0 - b);

    std::vector<double> gJ(n);
    for (int i = 0; i < n; ++i) gJ[i] = std::pow(x[i], b) * I1[i];
    std::vector<double> J = prefix_with_model(gJ, gr, cb_, b, c1_, 1.0);
    const double Jtail = tail_right(gJ, gr.h);
    const double Jinf = J.back() + Jtail;
    if (std::abs(Jtail) > 0.1 * std::max(std::abs(Jinf), 1e-300))
        throw TailError("elliptic_inverse_B: unresolved right tail in u0 integral");
    const double u0 = -Jinf / (g1 * g2);

    const double kb_ = cb_ / (b - g2), k1_ = c1_ / (1.0 - g2);
    std::vector<double> gK(n);
    for (int i = 0; i < n; ++i) gK[i] = std::pow(x[i], -g2) * J[i];
    std::vector<double> K = prefix_with_model(gK, gr, kb_, b - g2, k1_, 1.0 - g2);

    const double lb_ = kb_ / (b - g1), l1_ = k1_ / (1.0 - g1);
    std::vector<double> gL(n);
    for (int i = 0; i < n; ++i) gL[i] = std::pow(x[i], g2 - g1) * K[i];
    std::vector<double> L = prefix_with_model(gL, gr, lb_, b - g1, l1_, 1.0 - g1);

    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = u0 + std::pow(x[i], g1) * L[i];

    std::vector<double> gub(n);
    for (int i = 0; i < n; ++i) gub[i] = std::pow(x[i], 1.0 - b) * v[i];
    const std::vector<double> Cub = cumulative_prefix(gub, gr.h);
    const double ub_total = Cub.back() + v0 * std::pow(a, 1.0 - b) / (1.0 - b) +
                            tail_right(gub, gr.h);
    BoundaryCoefficients bc;
    bc.u0 = u0;
    bc.ubeta = ub_total / (b * (b - g1) * (b - g2));
    bc.fit_residual = 0.0;
    return {GridFunction(v.grid_ptr(), std::move(u)), bc};
}

BoundaryCoefficients extract_boundary_coefficients(const MobilityParams& par,
                                                   const GridFunction& u,
                                                   int window) {
    if (window < 4) throw DomainError("extract_boundary_coefficients: window < 4");
    const int n = u.size();
    window = std::min(window, n);
    const auto& x = u.grid().x;
    Eigen::MatrixXd W(window, 3);
    for (int i = 0; i < window; ++i) {
        W(i, 0) = 1.0;
        W(i, 1) = std::pow(x[i], par.beta);
        W(i, 2) = x[i];
    }
    // Gram condition guard on the raw basis
    Eigen::Matrix3d G = W.transpose() * W;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(G);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
        throw IllConditioned("extract_boundary_coefficients: basis Gram matrix "
                             "condition exceeds 1e12");
    // solve the equilibrated least-squares problem
    Eigen::Vector3d col;
    for (int j = 0; j < 3; ++j) col(j) = W.col(j).norm();
    Eigen::MatrixXd Wn = W;
    for (int j = 0; j < 3; ++j) Wn.col(j) /= col(j);
    Eigen::VectorXd rhs(window);
    for (int i = 0; i < window; ++i) rhs(i) = u[i];
    Eigen::Vector3d c = Wn.colPivHouseholderQr().solve(rhs);
    for (int j = 0; j < 3; ++j) c(j) /= col(j);
    Eigen::VectorXd fit = W * c;
    double res = 0.0;
    for (int i = 0; i < window; ++i)
        res = std::max(res, std::abs(u[i] - fit(i)));
    BoundaryCoefficients bc;
    bc.u0 = c(0);
    bc.ubeta = c(1);
    bc.fit_residual = res;
    return bc;
}

} // namespace tflab
