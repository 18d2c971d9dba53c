#pragma once
// Logarithmic discretization of (0,infty). Nodes are uniform in s = ln x,
// D = x d/dx becomes d/ds, and all quadrature runs in s with power-law tail
// models beyond the span.

#include <functional>
#include <memory>
#include <vector>

#include "tflab/errors.hpp"

namespace tflab {

struct LogGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_nodes = 0;
    double h = 0.0;          // s-spacing
    std::vector<double> s;   // ln x, uniform
    std::vector<double> x;   // exp(s), strictly increasing

    bool same_as(const LogGrid& o) const {
        return x_min == o.x_min && x_max == o.x_max && n_nodes == o.n_nodes;
    }
};

using GridPtr = std::shared_ptr<const LogGrid>;

GridPtr make_log_grid(double x_min, double x_max, int n_nodes);

class GridFunction {
  public:
    GridFunction() = default;
    GridFunction(GridPtr grid, std::vector<double> values);

    const LogGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double sup_norm() const;

  private:
    GridPtr grid_;
    std::vector<double> values_;
};

GridFunction sample(const std::function<double(double)>& f, GridPtr grid);
GridFunction zeros(GridPtr grid);

// D^j u by repeated application of the 4th-order first-derivative stencil
// in s (one-sided closures at both ends). j <= 8.
GridFunction derivative(const GridFunction& u, int j);

// int_0^infty x^{-2 alpha} u^2 dx/x: trapezoid in s plus power-law tail
// corrections fitted on the outermost two nodes of each end.
struct TailPolicy {
    bool strict = true;          // throw TailError when tails dominate
    double max_fraction = 0.10;  // tail / interior threshold
};
double weighted_integral(const GridFunction& u, double alpha,
                         TailPolicy policy = {});

// ---- quadrature substrate (shared with the operator calculus) ----

// cumulative integral C_i = int_{s_0}^{s_i} g ds by per-interval integration
// of the quartic through the five nearest nodes (clamped at the ends)
std::vector<double> cumulative_prefix(const std::vector<double>& g, double h);

// power-law tail estimates from the outermost two nodes; zero when the
// samples do not look like a one-signed decaying/growing power
double tail_left(const std::vector<double>& g, double h);
double tail_right(const std::vector<double>& g, double h);

} // namespace tflab
