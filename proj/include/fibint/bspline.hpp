#ifndef FIBINT_BSPLINE_HPP
#define FIBINT_BSPLINE_HPP

#include <vector>

#include "fibint/common.hpp"

namespace fibint {

/// Values and derivatives of the active B-spline basis functions at xi.
/// ders[k][j] is the k-th derivative of basis function (first_index + j).
struct BasisEval {
    int span = 0;         ///< knot span index
    int first_index = 0;  ///< index of the first active control point (= span - degree)
    std::vector<std::vector<double>> ders;
};

/// Cox-de Boor evaluation with derivatives (stable recurrence form).
/// `order` is the highest derivative requested (0..2 used here, higher allowed).
BasisEval basis_eval(int degree, const std::vector<double>& knots, double xi, int order);

/// Open (clamped) uniform knot vector on [0, 1] for n_cp control points.
std::vector<double> open_uniform_knots(int degree, int n_cp);

/// Greville abscissae of a clamped knot vector.
std::vector<double> greville_abscissae(int degree, const std::vector<double>& knots);

/// Number of non-empty knot spans (elements).
int element_count(int degree, const std::vector<double>& knots);

/// Parametric bounds [xi0, xi1] of element e (non-empty spans in order).
void element_span(int degree, const std::vector<double>& knots, int element, double& xi0,
                  double& xi1);

}  // namespace fibint

#endif
