#ifndef FIBINT_VERIFY_HPP
#define FIBINT_VERIFY_HPP

#include <utility>
#include <vector>

#include "fibint/potential_laws.hpp"
#include "fibint/quadrature.hpp"
#include "fibint/solver.hpp"

namespace fibint {

struct OracleResult {
    double value = 0.0;
    bool domain_clipped = false;  ///< an arccos slice was genuinely empty
};

/// Reduced 2D quadrature reference for the section-section integral
/// I_phi_m = int int r^-m dA_x dA_y: adaptive integration of
/// 4 (p^2 + q1^2)^(-m/2) t p arccos-limits over the (t, p) strip, with the
/// arccos arguments clamped to [-1, 1] against roundoff.
OracleResult quad_oracle_reduced(double q1, double q2, double m, const SectionPairGeometry& geom,
                                 const QuadratureSpec& spec = {1e-7, 1e-300, 4000});

/// 4D Cartesian quadrature of r^-m over both disks. Reliable for moderate
/// gaps (q2 of order 0.1 R and above).
OracleResult quad_oracle_cartesian(double q1, double q2, double m,
                                   const SectionPairGeometry& geom,
                                   const QuadratureSpec& spec = {1e-6, 1e-300, 2000});

/// Section-section potential of a composite law via the reduced oracle.
double oracle_potential(double q1, double q2, const CompositeLaw& law,
                        const SectionPairGeometry& geom,
                        const QuadratureSpec& spec = {1e-7, 1e-300, 4000});

/// One column of the tangent via a complex-step perturbation of DOF k:
/// Im[residual(q + i eps e_k)] / eps. Branch decisions inside the residual
/// are taken on the real part, so no subtractive cancellation occurs.
Eigen::VectorXd complex_step_tangent(TwoBeamSystem& system, const Eigen::VectorXd& q, int k,
                                     double epsilon = 1e-30);

/// Central finite-difference column of the tangent (cross-check only).
Eigen::VectorXd finite_difference_tangent(TwoBeamSystem& system, const Eigen::VectorXd& q, int k,
                                          double h = 1e-6);

/// Least-squares slope of log|value| against log q2.
double loglog_slope_fit(const std::vector<std::pair<double, double>>& samples);

}  // namespace fibint

#endif
