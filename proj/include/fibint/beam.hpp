#ifndef FIBINT_BEAM_HPP
#define FIBINT_BEAM_HPP

#include <vector>

#include "fibint/bspline.hpp"
#include "fibint/common.hpp"
#include "fibint/kinematics.hpp"
#include "fibint/quadrature.hpp"

namespace fibint {

struct CrossSection {
    double R = 0.0;  ///< radius
    double A = 0.0;  ///< pi R^2
    double I = 0.0;  ///< pi R^4 / 4

    static CrossSection from_radius(double radius);
};

struct Material {
    double E = 0.0;  ///< Young's modulus
};

/// Metric quantities of the beam axis at one parameter value.
struct AxisMetric {
    double g = 0.0;        ///< squared tangent norm g11
    double sqrt_g = 0.0;
    Vec2 t = Vec2::Zero();
    Vec2 n = Vec2::Zero();
    double K = 0.0;        ///< signed curvature per arc length
    double K_tilde = 0.0;  ///< signed curvature per parametric coordinate (= g K)
};

/// Strain measures relative to the reference configuration.
struct StrainState {
    double eps11 = 0.0;  ///< Green-Lagrange axis strain (parametric)
    double kappa = 0.0;  ///< curvature change per parametric coordinate
    double chi = 0.0;    ///< curvature change per arc length
};

struct StressOutputs {
    double N = 0.0;  ///< axial stress resultant
    double M = 0.0;  ///< stress couple
};

/// Rotation-free isogeometric Bernoulli-Euler beam (one clamped patch).
/// Displacement DOFs are ordered [u0x, u0y, u1x, u1y, ...] per control point.
class BSplineBeam {
public:
    BSplineBeam() = default;
    BSplineBeam(int degree, std::vector<double> knots, std::vector<Vec2> control_points,
                CrossSection section, Material material);

    /// Straight beam of given length along `axis`, shifted by `offset`;
    /// control points at the Greville abscissae give an exact arc-length
    /// parametrization x(xi) = offset + axis * L * xi.
    static BSplineBeam straight(int degree, int n_cp, double length, const Vec2& axis,
                                const Vec2& offset, CrossSection section, Material material);

    int degree() const { return degree_; }
    int n_cp() const { return static_cast<int>(control_points_.size()); }
    int n_dofs() const { return 2 * n_cp(); }
    int n_elements() const { return element_count(degree_, knots_); }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<Vec2>& control_points() const { return control_points_; }
    const CrossSection& section() const { return section_; }
    const Material& material() const { return material_; }
    double EA() const { return material_.E * section_.A; }
    double EI() const { return material_.E * section_.I; }

    /// Reference arc length of the whole patch.
    double reference_length() const;
    /// Reference arc-length coordinate of parameter xi.
    double reference_arc_coord(double xi) const;

    BasisEval basis(double xi, int order) const { return basis_eval(degree_, knots_, xi, order); }

    /// Current position / tangent base vector at xi for displacement vector u.
    template <class T>
    void evaluate(const Eigen::Ref<const Eigen::Matrix<T, Eigen::Dynamic, 1>>& u, double xi,
                  int order, Vec2T<T>& x, Vec2T<T>* x1 = nullptr, Vec2T<T>* x11 = nullptr) const {
        const BasisEval be = basis(xi, order);
        x.setZero();
        if (x1) x1->setZero();
        if (x11) x11->setZero();
        for (int j = 0; j <= degree_; ++j) {
            const int cp = be.first_index + j;
            const Vec2& ref = control_points_[cp];
            const Vec2T<T> p(ref[0] + u[2 * cp], ref[1] + u[2 * cp + 1]);
            x += be.ders[0][j] * p;
            if (x1 && order >= 1) *x1 += be.ders[1][j] * p;
            if (x11 && order >= 2) *x11 += be.ders[2][j] * p;
        }
    }

    /// Metric of the (reference + u) configuration at xi.
    AxisMetric axis_metric(const Eigen::Ref<const Eigen::VectorXd>& u, double xi) const;

    /// Strain measures of configuration u relative to the reference.
    StrainState strains(const Eigen::Ref<const Eigen::VectorXd>& u, double xi) const;

    /// Stress resultant and couple of the decoupled resultant model.
    StressOutputs stress_outputs(const Eigen::Ref<const Eigen::VectorXd>& u, double xi) const;

    /// Section frame (position, unit tangent/normal, sqrt_g) at xi.
    SectionFrame frame(const Eigen::Ref<const Eigen::VectorXd>& u, double xi) const;

    /// Internal strain-energy value of configuration u.
    double internal_energy(const Eigen::Ref<const Eigen::VectorXd>& u) const;

    /// Assemble dPhi/du and d2Phi/du2 into residual/tangent blocks of size
    /// n_dofs(); Gaussian quadrature with degree+1 points per element.
    void internal_forces_and_tangent(const Eigen::Ref<const Eigen::VectorXd>& u,
                                     Eigen::Ref<Eigen::VectorXd> residual,
                                     Eigen::MatrixXd* tangent) const;

    /// Residual only, generic scalar (complex-step capable).
    template <class T>
    void internal_residual(const Eigen::Ref<const Eigen::Matrix<T, Eigen::Dynamic, 1>>& u,
                           Eigen::Matrix<T, Eigen::Dynamic, 1>& residual) const;

private:
    struct GaussPoint {
        double xi = 0.0;
        double weight = 0.0;  ///< parametric weight
        BasisEval basis;
        // reference quantities
        double g_ref = 0.0;
        double sqrt_g_ref = 0.0;
        double K_ref = 0.0;
    };

    void build_quadrature();
    AxisMetric metric_from_vectors(const Vec2& x1, const Vec2& x11) const;

    int degree_ = 0;
    std::vector<double> knots_;
    std::vector<Vec2> control_points_;
    CrossSection section_;
    Material material_;
    std::vector<GaussPoint> gauss_points_;
};

template <class T>
void BSplineBeam::internal_residual(
    const Eigen::Ref<const Eigen::Matrix<T, Eigen::Dynamic, 1>>& u,
    Eigen::Matrix<T, Eigen::Dynamic, 1>& residual) const {
    using std::sqrt;
    residual.setZero(n_dofs());
    const double ea = EA();
    const double ei = EI();
    for (const auto& gp : gauss_points_) {
        Vec2T<T> a, b;
        a.setZero();
        b.setZero();
        for (int j = 0; j <= degree_; ++j) {
            const int cp = gp.basis.first_index + j;
            const Vec2& ref = control_points_[cp];
            const Vec2T<T> p(ref[0] + u[2 * cp], ref[1] + u[2 * cp + 1]);
            a += gp.basis.ders[1][j] * p;
            b += gp.basis.ders[2][j] * p;
        }
        const T g = dot2(a, a);
        const T eps = (g - gp.g_ref) / (2.0 * gp.g_ref);
        const T cr = cross2(a, b);
        const T g32 = g * sqrt(g);
        const T curv = cr / g32;
        const T chi = curv - gp.K_ref;

        // dK/da = -Lambda b / g^(3/2) - 3 cr a / g^(5/2); dK/db = Lambda a / g^(3/2)
        const Vec2T<T> dK_da = -rot90(b) / g32 - 3.0 * curv / g * a;
        const Vec2T<T> dK_db = rot90(a) / g32;
        const Vec2T<T> deps_da = a / gp.g_ref;

        const double w = gp.weight * gp.sqrt_g_ref;
        const T cN = w * ea * eps;
        const T cM = w * ei * chi;
        for (int j = 0; j <= degree_; ++j) {
            const int cp = gp.basis.first_index + j;
            const double n1 = gp.basis.ders[1][j];
            const double n2 = gp.basis.ders[2][j];
            for (int alpha = 0; alpha < 2; ++alpha) {
                residual[2 * cp + alpha] +=
                    cN * deps_da[alpha] * n1 + cM * (dK_da[alpha] * n1 + dK_db[alpha] * n2);
            }
        }
    }
}

}  // namespace fibint

#endif
