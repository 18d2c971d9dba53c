#include "tflab/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace tflab {

GridPtr make_log_grid(double x_min, double x_max, int n_nodes) {
    if (!(x_min > 0.0) || !(x_min < x_max))
        throw DomainError("make_log_grid: need 0 < x_min < x_max");
    if (n_nodes < 16)
        throw DomainError("make_log_grid: need at least 16 nodes");
    auto g = std::make_shared<LogGrid>();
    g->x_min = x_min;
    g->x_max = x_max;
    g->n_nodes = n_nodes;
    const double s0 = std::log(x_min), s1 = std::log(x_max);
    g->h = (s1 - s0) / (n_nodes - 1);
    g->s.resize(n_nodes);
    g->x.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        g->s[i] = s0 + i * g->h;
        g->x[i] = std::exp(g->s[i]);
    }
    g->s.back() = s1; // endpoint reproducible bit-exactly
    g->x.back() = std::exp(s1);
    return g;
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_ || static_cast<int>(values_.size()) != grid_->n_nodes)
        throw GridMismatch("GridFunction: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v))
            throw EvalError("GridFunction: non-finite value");
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction sample(const std::function<double(double)>& f, GridPtr grid) {
    std::vector<double> v(grid->n_nodes);
    for (int i = 0; i < grid->n_nodes; ++i) {
        v[i] = f(grid->x[i]);
        if (!std::isfinite(v[i]))
            throw EvalError("sample: function produced a non-finite value");
    }
    return GridFunction(std::move(grid), std::move(v));
}

GridFunction zeros(GridPtr grid) {
    std::vector<double> v(grid->n_nodes, 0.0);
    return GridFunction(std::move(grid), std::move(v));
}

namespace {

// one-sided 4th-order first-derivative weights (in units of 1/h)
constexpr std::array<double, 5> kLeft0{-25.0 / 12, 4.0, -3.0, 4.0 / 3, -0.25};
constexpr std::array<double, 5> kLeft1{-0.25, -5.0 / 6, 1.5, -0.5, 1.0 / 12};
constexpr std::array<double, 5> kRight1{-1.0 / 12, 0.5, -1.5, 5.0 / 6, 0.25};
constexpr std::array<double, 5> kRight0{0.25, -4.0 / 3, 3.0, -4.0, 25.0 / 12};

// first derivative in s with row-local constant shift: rows sum to zero, so
// subtracting u[i] per row changes nothing in exact arithmetic but keeps the
// dot products on locally small values (the x^{-1} weight amplifies any
// boundary-row rounding by up to 1e6)
std::vector<double> d1_apply(const std::vector<double>& u, double h) {
    const int n = static_cast<int>(u.size());
    std::vector<double> out(n);
    auto row5 = [&](int i, const std::array<double, 5>& c, int start) {
        double acc = 0.0;
        for (int k = 0; k < 5; ++k) acc += c[k] * (u[start + k] - u[i]);
        return acc / h;
    };
    out[0] = row5(0, kLeft0, 0);
    out[1] = row5(1, kLeft1, 0);
    const double inv12h = 1.0 / (12.0 * h);
    for (int i = 2; i < n - 2; ++i) {
        const double a = u[i - 2] - u[i], b = u[i - 1] - u[i];
        const double c = u[i + 1] - u[i], d = u[i + 2] - u[i];
        out[i] = (a - 8.0 * b + 8.0 * c - d) * inv12h;
    }
    out[n - 2] = row5(n - 2, kRight1, n - 5);
    out[n - 1] = row5(n - 1, kRight0, n - 5);
    return out;
}

} // namespace

GridFunction derivative(const GridFunction& u, int j) {
    if (j < 0 || j > 8)
        throw OrderError("derivative: order must be in [0,8]");
    std::vector<double> v = u.values();
    for (int k = 0; k < j; ++k) v = d1_apply(v, u.grid().h);
    return GridFunction(u.grid_ptr(), std::move(v));
}

std::vector<double> cumulative_prefix(const std::vector<double>& g, double h) {
    const int n = static_cast<int>(g.size());
    std::vector<double> C(n, 0.0);
    if (n < 5) { // trapezoid fallback for tiny vectors
        for (int i = 0; i + 1 < n; ++i)
            C[i + 1] = C[i] + 0.5 * h * (g[i] + g[i + 1]);
        return C;
    }
    // weights for integrating the quartic through nodes {0..4} over [k, k+1]
    static const double W[4][5] = {
        {251.0 / 720, 323.0 / 360, -11.0 / 30, 53.0 / 360, -19.0 / 720},
        {-19.0 / 720, 173.0 / 360, 19.0 / 30, -37.0 / 360, 11.0 / 720},
        {11.0 / 720, -37.0 / 360, 19.0 / 30, 173.0 / 360, -19.0 / 720},
        {-19.0 / 720, 53.0 / 360, -11.0 / 30, 323.0 / 360, 251.0 / 720}};
    for (int i = 0; i + 1 < n; ++i) {
        int lo = std::clamp(i - 2, 0, n - 5);
        const double* w = W[i - lo];
        double inc = 0.0;
        for (int k = 0; k < 5; ++k) inc += w[k] * g[lo + k];
        C[i + 1] = C[i] + h * inc;
    }
    return C;
}

namespace {
constexpr double kTiny = 1e-300;
}

double tail_left(const std::vector<double>& g, double h) {
    if (std::abs(g[0]) < kTiny || std::abs(g[1]) < kTiny || g[0] * g[1] <= 0.0)
        return 0.0;
    const double slope = std::log(std::abs(g[1]) / std::abs(g[0])) / h;
    if (slope < 1e-12) return 0.0;
    return g[0] / slope;
}

double tail_right(const std::vector<double>& g, double h) {
    const size_t n = g.size();
    if (std::abs(g[n - 1]) < kTiny || std::abs(g[n - 2]) < kTiny ||
        g[n - 1] * g[n - 2] <= 0.0)
        return 0.0;
    const double slope = std::log(std::abs(g[n - 1]) / std::abs(g[n - 2])) / h;
    if (slope > -1e-12) return 0.0;
    return -g[n - 1] / slope;
}

double weighted_integral(const GridFunction& u, double alpha, TailPolicy policy) {
    const auto& x = u.grid().x;
    const double h = u.grid().h;
    const int n = u.size();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::pow(x[i], -2.0 * alpha) * u[i] * u[i];
    double interior = 0.0;
    for (int i = 0; i + 1 < n; ++i) interior += 0.5 * h * (g[i] + g[i + 1]);
    const double tl = tail_left(g, h), tr = tail_right(g, h);
    const double tails = tl + tr;
    if (policy.strict && std::abs(tails) > policy.max_fraction *
            std::max(std::abs(interior), kTiny))
        throw TailError("weighted_integral: unresolved tail contribution");
    return interior + tails;
}

} // namespace tflab
