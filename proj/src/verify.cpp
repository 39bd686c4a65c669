#include "fibint/verify.hpp"

#include <algorithm>
#include <cmath>

namespace fibint {

namespace {

// arccos with the argument clamped against roundoff; flags genuinely
// out-of-range arguments (empty slice) through `clipped`.
double arccos_clamped(double arg, bool* clipped) {
    if (arg > 1.0) {
        if (arg > 1.0 + 1e-9 && clipped)
            *clipped = true;
        arg = 1.0;
    } else if (arg < -1.0) {
        if (arg < -1.0 - 1e-9 && clipped)
            *clipped = true;
        arg = -1.0;
    }
    return std::acos(arg);
}

}  // namespace

OracleResult quad_oracle_reduced(double q1, double q2, double m, const SectionPairGeometry& geom,
                                 const QuadratureSpec& spec) {
    if (!(q2 > 0.0))
        throw domain_error("quad_oracle_reduced: q2 must be positive");
    if (!(m > 0.0))
        throw domain_error("quad_oracle_reduced: m must be positive");
    const double r_x = geom.R_x, r_y = geom.R_y;
    const double q2_hat = q2 + r_x + r_y;
    OracleResult out;

    QuadratureSpec inner = spec;
    inner.rel_tol = 0.1 * spec.rel_tol;

    const auto outer = [&](double t) {
        const double psi =
            arccos_clamped((t * t + q2_hat * q2_hat - r_y * r_y) / (2.0 * t * q2_hat),
                           &out.domain_clipped);
        if (psi == 0.0)
            return 0.0;
        const auto inner_f = [&](double p) {
            const double phi = arccos_clamped((t * t + p * p - r_x * r_x) / (2.0 * t * p),
                                              &out.domain_clipped);
            return std::pow(p * p + q1 * q1, -0.5 * m) * p * phi;
        };
        return 4.0 * t * psi * integrate_adaptive(inner_f, t - r_x, t + r_x, inner);
    };
    out.value = integrate_adaptive(outer, q2 + r_x, q2 + r_x + 2.0 * r_y, spec);
    return out;
}

OracleResult quad_oracle_cartesian(double q1, double q2, double m,
                                   const SectionPairGeometry& geom, const QuadratureSpec& spec) {
    if (!(q2 > 0.0))
        throw domain_error("quad_oracle_cartesian: q2 must be positive");
    const double r_x = geom.R_x, r_y = geom.R_y;
    const double q2_hat = q2 + r_x + r_y;
    // Disk x centered at the origin, disk y at distance q2_hat along the first
    // in-plane axis; r^2 = (in-plane distance)^2 + q1^2.
    QuadratureSpec l2 = spec;
    l2.rel_tol = 0.5 * spec.rel_tol;
    QuadratureSpec l3 = spec;
    l3.rel_tol = 0.25 * spec.rel_tol;
    QuadratureSpec l4 = spec;
    l4.rel_tol = 0.1 * spec.rel_tol;

    const auto f_x1 = [&](double x1) {
        const double wx = std::sqrt(std::max(0.0, r_x * r_x - x1 * x1));
        const auto f_x3 = [&](double x3) {
            const auto f_y1 = [&](double y1) {
                const double dy = y1 - q2_hat;
                const double wy = std::sqrt(std::max(0.0, r_y * r_y - dy * dy));
                const auto f_y3 = [&](double y3) {
                    const double dx1 = x1 - y1;
                    const double dx3 = x3 - y3;
                    return std::pow(dx1 * dx1 + dx3 * dx3 + q1 * q1, -0.5 * m);
                };
                return integrate_adaptive(f_y3, -wy, wy, l4);
            };
            return integrate_adaptive(f_y1, q2_hat - r_y, q2_hat + r_y, l3);
        };
        return integrate_adaptive(f_x3, -wx, wx, l2);
    };
    OracleResult out;
    out.value = integrate_adaptive(f_x1, -r_x, r_x, spec);
    return out;
}

double oracle_potential(double q1, double q2, const CompositeLaw& law,
                        const SectionPairGeometry& geom, const QuadratureSpec& spec) {
    double v = 0.0;
    for (const auto& term : law.terms)
        v += term.k * geom.beta_x * geom.beta_y *
             quad_oracle_reduced(q1, q2, term.m, geom, spec).value;
    return v;
}

Eigen::VectorXd complex_step_tangent(TwoBeamSystem& system, const Eigen::VectorXd& q, int k,
                                     double epsilon) {
    system.refresh_pairs(q);  // pair list from the primal configuration
    Eigen::VectorXcd qc = q.cast<Cx>();
    qc[k] += Cx(0.0, epsilon);
    Eigen::VectorXcd rc;
    system.residual_t<Cx>(qc, system.pairs(), rc);
    return rc.imag() / epsilon;
}

Eigen::VectorXd finite_difference_tangent(TwoBeamSystem& system, const Eigen::VectorXd& q, int k,
                                          double h) {
    system.refresh_pairs(q);
    const PairList pairs = system.pairs();
    Eigen::VectorXd qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    Eigen::VectorXd rp, rm;
    system.residual_t<double>(qp, pairs, rp);
    system.residual_t<double>(qm, pairs, rm);
    return (rp - rm) / (2.0 * h);
}

double loglog_slope_fit(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3)
        throw domain_error("loglog_slope_fit: need at least 3 samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [q, v] : samples) {
        if (!(q > 0.0) || v == 0.0)
            throw domain_error("loglog_slope_fit: samples must have q > 0 and value != 0");
        const double x = std::log(q);
        const double y = std::log(std::abs(v));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(samples.size());
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw domain_error("loglog_slope_fit: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace fibint
