#include "fibint/beam.hpp"

#include <cmath>

namespace fibint {

CrossSection CrossSection::from_radius(double radius) {
    if (!(radius > 0.0))
        throw domain_error("CrossSection: radius must be positive");
    CrossSection s;
    s.R = radius;
    s.A = M_PI * radius * radius;
    s.I = M_PI * radius * radius * radius * radius / 4.0;
    return s;
}

BSplineBeam::BSplineBeam(int degree, std::vector<double> knots, std::vector<Vec2> control_points,
                         CrossSection section, Material material)
    : degree_(degree),
      knots_(std::move(knots)),
      control_points_(std::move(control_points)),
      section_(section),
      material_(material) {
    if (degree_ < 2)
        throw domain_error("BSplineBeam: degree must be at least 2");
    if (control_points_.size() < static_cast<std::size_t>(degree_ + 1))
        throw domain_error("BSplineBeam: not enough control points");
    if (knots_.size() != control_points_.size() + degree_ + 1)
        throw domain_error("BSplineBeam: knot vector size mismatch");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (knots_[i] < knots_[i - 1])
            throw domain_error("BSplineBeam: knots must be non-decreasing");
    build_quadrature();
}

BSplineBeam BSplineBeam::straight(int degree, int n_cp, double length, const Vec2& axis,
                                  const Vec2& offset, CrossSection section, Material material) {
    auto knots = open_uniform_knots(degree, n_cp);
    const auto greville = greville_abscissae(degree, knots);
    std::vector<Vec2> cps(n_cp);
    for (int i = 0; i < n_cp; ++i)
        cps[i] = offset + axis * (length * greville[i]);
    return BSplineBeam(degree, std::move(knots), std::move(cps), section, material);
}

void BSplineBeam::build_quadrature() {
    std::vector<double> nodes, weights;
    gauss_legendre(degree_ + 1, nodes, weights);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_dofs());
    gauss_points_.clear();
    for (int e = 0; e < n_elements(); ++e) {
        double xi0, xi1;
        element_span(degree_, knots_, e, xi0, xi1);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            GaussPoint gp;
            gp.xi = 0.5 * (xi0 + xi1) + 0.5 * (xi1 - xi0) * nodes[q];
            gp.weight = 0.5 * (xi1 - xi0) * weights[q];
            gp.basis = basis(gp.xi, 2);
            const AxisMetric ref = axis_metric(zero, gp.xi);
            gp.g_ref = ref.g;
            gp.sqrt_g_ref = ref.sqrt_g;
            gp.K_ref = ref.K;
            gauss_points_.push_back(std::move(gp));
        }
    }
}

AxisMetric BSplineBeam::metric_from_vectors(const Vec2& x1, const Vec2& x11) const {
    AxisMetric m;
    m.g = x1.dot(x1);
    m.sqrt_g = std::sqrt(m.g);
    if (m.sqrt_g < 1e-12)
        throw degenerate_error("axis_metric: vanishing tangent");
    m.t = x1 / m.sqrt_g;
    m.n = rot90(m.t);
    m.K_tilde = x11.dot(m.n);
    m.K = m.K_tilde / m.g;
    return m;
}

AxisMetric BSplineBeam::axis_metric(const Eigen::Ref<const Eigen::VectorXd>& u, double xi) const {
    Vec2 x, x1, x11;
    evaluate<double>(u, xi, 2, x, &x1, &x11);
    return metric_from_vectors(x1, x11);
}

StrainState BSplineBeam::strains(const Eigen::Ref<const Eigen::VectorXd>& u, double xi) const {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_dofs());
    const AxisMetric ref = axis_metric(zero, xi);
    const AxisMetric cur = axis_metric(u, xi);
    StrainState s;
    s.eps11 = 0.5 * (cur.g - ref.g);
    s.kappa = cur.K_tilde - ref.K_tilde;
    s.chi = cur.K - ref.K;
    return s;
}

StressOutputs BSplineBeam::stress_outputs(const Eigen::Ref<const Eigen::VectorXd>& u,
                                          double xi) const {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_dofs());
    const AxisMetric ref = axis_metric(zero, xi);
    const StrainState s = strains(u, xi);
    StressOutputs out;
    out.N = EA() * s.eps11 / ref.g;
    out.M = EI() * s.chi;
    return out;
}

SectionFrame BSplineBeam::frame(const Eigen::Ref<const Eigen::VectorXd>& u, double xi) const {
    Vec2 x, x1;
    evaluate<double>(u, xi, 1, x, &x1);
    SectionFrame f;
    f.position = x;
    f.sqrt_g = x1.norm();
    if (f.sqrt_g < 1e-12)
        throw degenerate_error("frame: vanishing tangent");
    f.t = x1 / f.sqrt_g;
    f.n = rot90(f.t);
    return f;
}

double BSplineBeam::reference_length() const {
    double len = 0.0;
    for (const auto& gp : gauss_points_)
        len += gp.weight * gp.sqrt_g_ref;
    return len;
}

double BSplineBeam::reference_arc_coord(double xi) const {
    // Integrate sqrt(g_ref) up to xi with per-element Gauss quadrature.
    std::vector<double> nodes, weights;
    gauss_legendre(degree_ + 1, nodes, weights);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_dofs());
    double s = 0.0;
    for (int e = 0; e < n_elements(); ++e) {
        double xi0, xi1;
        element_span(degree_, knots_, e, xi0, xi1);
        const double hi = std::min(xi, xi1);
        if (hi <= xi0)
            break;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double x = 0.5 * (xi0 + hi) + 0.5 * (hi - xi0) * nodes[q];
            s += 0.5 * (hi - xi0) * weights[q] * axis_metric(zero, x).sqrt_g;
        }
    }
    return s;
}

double BSplineBeam::internal_energy(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    double energy = 0.0;
    for (const auto& gp : gauss_points_) {
        Vec2 a = Vec2::Zero(), b = Vec2::Zero();
        for (int j = 0; j <= degree_; ++j) {
            const int cp = gp.basis.first_index + j;
            const Vec2 p = control_points_[cp] + Vec2(u[2 * cp], u[2 * cp + 1]);
            a += gp.basis.ders[1][j] * p;
            b += gp.basis.ders[2][j] * p;
        }
        const double g = a.dot(a);
        const double eps = (g - gp.g_ref) / (2.0 * gp.g_ref);
        const double chi = cross2(a, b) / (g * std::sqrt(g)) - gp.K_ref;
        energy += 0.5 * (EA() * eps * eps + EI() * chi * chi) * gp.weight * gp.sqrt_g_ref;
    }
    return energy;
}

void BSplineBeam::internal_forces_and_tangent(const Eigen::Ref<const Eigen::VectorXd>& u,
                                              Eigen::Ref<Eigen::VectorXd> residual,
                                              Eigen::MatrixXd* tangent) const {
    const double ea = EA();
    const double ei = EI();
    const int nloc = 2 * (degree_ + 1);
    Eigen::VectorXd de(nloc), dk(nloc);
    for (const auto& gp : gauss_points_) {
        Vec2 a = Vec2::Zero(), b = Vec2::Zero();
        for (int j = 0; j <= degree_; ++j) {
            const int cp = gp.basis.first_index + j;
            const Vec2 p = control_points_[cp] + Vec2(u[2 * cp], u[2 * cp + 1]);
            a += gp.basis.ders[1][j] * p;
            b += gp.basis.ders[2][j] * p;
        }
        const double g = a.dot(a);
        const double sq_g = std::sqrt(g);
        const double g32 = g * sq_g;
        const double eps = (g - gp.g_ref) / (2.0 * gp.g_ref);
        const double cr = cross2(a, b);
        const double curv = cr / g32;
        const double chi = curv - gp.K_ref;

        const Vec2 lam_b = rot90(b);
        const Vec2 lam_a = rot90(a);
        const Vec2 dK_da = -lam_b / g32 - 3.0 * (curv / g) * a;
        const Vec2 dK_db = lam_a / g32;
        const Vec2 deps_da = a / gp.g_ref;

        // Local gradients of eps and K w.r.t. the 2(p+1) element DOFs.
        for (int j = 0; j <= degree_; ++j) {
            const double n1 = gp.basis.ders[1][j];
            const double n2 = gp.basis.ders[2][j];
            for (int alpha = 0; alpha < 2; ++alpha) {
                de[2 * j + alpha] = deps_da[alpha] * n1;
                dk[2 * j + alpha] = dK_da[alpha] * n1 + dK_db[alpha] * n2;
            }
        }

        const double w = gp.weight * gp.sqrt_g_ref;
        for (int j = 0; j <= degree_; ++j) {
            const int cp = gp.basis.first_index + j;
            for (int alpha = 0; alpha < 2; ++alpha)
                residual[2 * cp + alpha] +=
                    w * (ea * eps * de[2 * j + alpha] + ei * chi * dk[2 * j + alpha]);
        }
        if (!tangent)
            continue;

        // Second derivatives of K w.r.t. (a, b).
        const double g52 = g32 * g;
        const double g72 = g52 * g;
        Mat2 H_aa = 3.0 * (lam_b * a.transpose() + a * lam_b.transpose()) / g52 -
                    3.0 * cr * Mat2::Identity() / g52 + 15.0 * cr * (a * a.transpose()) / g72;
        Mat2 H_ab = -rotation_90() / g32 - 3.0 * (a * lam_a.transpose()) / g52;

        for (int j = 0; j <= degree_; ++j) {
            const int cpj = gp.basis.first_index + j;
            const double nj1 = gp.basis.ders[1][j];
            const double nj2 = gp.basis.ders[2][j];
            for (int l = 0; l <= degree_; ++l) {
                const int cpl = gp.basis.first_index + l;
                const double nl1 = gp.basis.ders[1][l];
                const double nl2 = gp.basis.ders[2][l];
                for (int alpha = 0; alpha < 2; ++alpha) {
                    for (int beta = 0; beta < 2; ++beta) {
                        double kjl = ea * de[2 * j + alpha] * de[2 * l + beta] +
                                     ei * dk[2 * j + alpha] * dk[2 * l + beta];
                        // eps is quadratic: d2(eps)/da2 = I / g_ref.
                        if (alpha == beta)
                            kjl += ea * eps * nj1 * nl1 / gp.g_ref;
                        kjl += ei * chi *
                               (H_aa(alpha, beta) * nj1 * nl1 + H_ab(alpha, beta) * nj1 * nl2 +
                                H_ab(beta, alpha) * nj2 * nl1);
                        (*tangent)(2 * cpj + alpha, 2 * cpl + beta) += w * kjl;
                    }
                }
            }
        }
    }
}

}  // namespace fibint
