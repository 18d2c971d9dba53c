#pragma once
// Operator calculus on the log grid: the quartic p(D) as a product of four
// first-order factors, A = -x^{-1} p(D), the five-slot multilinear form M_n,
// the nonlinearity N(u), the explicit elliptic inverse B with its boundary
// coefficients, and boundary-coefficient extraction by least squares.
//
// The first-derivative rows are 4th-order centered in s. The two leftmost
// rows use ghost values from a least-squares fit of the 8 leftmost nodes on
// span{1, x^beta, x}, so the discrete kernel of A stays aligned with the
// continuum kernel {1, x^beta}; the right end uses one-sided stencils.

#include <Eigen/SparseCore>

#include "tflab/grid.hpp"
#include "tflab/mobility.hpp"

namespace tflab {

struct BoundaryCoefficients {
    double u0 = 0.0;
    double ubeta = 0.0;
    double fit_residual = 0.0; // 0 by convention for the integral formulas
};

class OperatorStencil {
  public:
    OperatorStencil(MobilityParams par, GridPtr grid, int fit_window = 8);

    const MobilityParams& params() const { return par_; }
    const LogGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    int bandwidth() const { return bandwidth_; }

    // interior residual bound for the discrete kernel modes {1, x^beta}
    double closure_tolerance() const;

    // first derivative in s with the beta-aligned left closure;
    // every row is applied with a row-local constant shift
    std::vector<double> apply_D(const std::vector<double>& f) const;

    // (D - gamma) f
    std::vector<double> apply_factor(const std::vector<double>& f,
                                     double gamma) const;

    // assembled sparse matrix of -x^{-1} p(D) (for implicit solves and
    // eigensolves; the factored application below is what tests kernel
    // exactness)
    const Eigen::SparseMatrix<double>& matrix_A() const { return A_; }

  private:
    MobilityParams par_;
    GridPtr grid_;
    int fit_window_;
    int bandwidth_ = 0;
    // row i covers columns [row_start_[i], row_start_[i] + row_coef_[i].size())
    std::vector<int> row_start_;
    std::vector<std::vector<double>> row_coef_;
    Eigen::SparseMatrix<double> A_;

    void build_rows();
    void assemble_matrix();
};

// p(D) u as the composition of the four first-order factors, rightmost first
GridFunction apply_p_of_D(const OperatorStencil& st, const GridFunction& u);

// A u = -x^{-1} p(D) u
GridFunction apply_A(const OperatorStencil& st, const GridFunction& u);

// the five-slot form M_n(H1,...,H5); operators act on everything right
GridFunction apply_M(const OperatorStencil& st, const GridFunction& H1,
                     const GridFunction& H2, const GridFunction& H3,
                     const GridFunction& H4, const GridFunction& H5);

// N(u) = -x^{-1} M_n(1+u,...,1+u) + x^{-1} p(D) u; the constant backbone of
// the factor chain is propagated in closed form so the output carries no
// linear-in-u part down to rounding
GridFunction nonlinearity(const OperatorStencil& st, const GridFunction& u);

// elliptic inverse u = B v with boundary coefficients u0, ubeta
std::pair<GridFunction, BoundaryCoefficients>
elliptic_inverse_B(const OperatorStencil& st, const GridFunction& v);

// least-squares fit of u on the leftmost `window` nodes against {1, x^beta, x}
BoundaryCoefficients extract_boundary_coefficients(const MobilityParams& par,
                                                   const GridFunction& u,
                                                   int window);

} // namespace tflab
