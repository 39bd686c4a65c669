#ifndef FIBINT_POTENTIAL_LAWS_HPP
#define FIBINT_POTENTIAL_LAWS_HPP

#include <cmath>
#include <vector>

#include "fibint/common.hpp"
#include "fibint/special_functions.hpp"

namespace fibint {

/// One inverse-power point-pair law k_m r^(-m).
struct PowerLawSpec {
    double m = 6.0;  ///< exponent (dimensionless)
    double k = 0.0;  ///< physical coefficient, energy * length^m per particle pair
};

/// Sum of inverse-power terms. Lennard-Jones is {m=6, k6} + {m=12, k12}.
struct CompositeLaw {
    std::vector<PowerLawSpec> terms;

    static CompositeLaw lennard_jones(double k6, double k12) {
        return CompositeLaw{{{6.0, k6}, {12.0, k12}}};
    }
    void validate() const;
};

/// Radii and reference particle densities of an interacting section pair.
struct SectionPairGeometry {
    double R_x = 0.02;
    double R_y = 0.02;
    double beta_x = 1.0;
    double beta_y = 1.0;

    double radius_sum() const { return R_x + R_y; }
    void validate() const;
};

/// Offset/gap state of one interacting cross-section pair.
/// q1 is the offset along the reference tangent, q2 the surface gap along the
/// reference normal; q2_hat = q2 + R_x + R_y is the projected centroid
/// distance and s_alpha the sign of d . n_ref.
template <class T>
struct SectionKinematicsT {
    T q1{};
    T q2{};
    T q2_hat{};
    double s_alpha = 1.0;
};
using SectionKinematics = SectionKinematicsT<double>;

struct PotentialFirstDerivs {
    double phi = 0.0;
    double phi_1 = 0.0;  ///< d(phi)/d(q1)
    double phi_2 = 0.0;  ///< d(phi)/d(q2)
};

struct PotentialSecondDerivs {
    double phi_11 = 0.0;
    double phi_12 = 0.0;
    double phi_22 = 0.0;
};

/// c_{m,ss}: the physical constant of the section-section closed form.
/// Requires m > 7/2.
double section_constant(const PowerLawSpec& law, const SectionPairGeometry& geom);

namespace detail {

/// Dimensionless part of c_{m,ss} (k excluded), m > 7/2.
double section_constant_base(double m, const SectionPairGeometry& geom);

// phi(q1, q2) = q2^(7/2-m) 2F1((2m-7)/4, (2m-5)/4; m/2; -(q1/q2)^2),
// the unscaled section-section kernel.
template <class T>
T issip_kernel(const T& q1, const T& q2, double m) {
    const T z = -(q1 / q2) * (q1 / q2);
    return pow_t(q2, 3.5 - m) * hyp2f1_t((2.0 * m - 7.0) / 4.0, (2.0 * m - 5.0) / 4.0, m / 2.0, z);
}

// First partials of the kernel in their full hypergeometric form.
template <class T>
void issip_kernel_derivs(const T& q1, const T& q2, double m, T& phi, T& phi_1, T& phi_2) {
    const double a0 = (2.0 * m - 7.0) / 4.0;
    const double b0 = (2.0 * m - 5.0) / 4.0;
    const double c0 = m / 2.0;
    const T z = -(q1 / q2) * (q1 / q2);
    const T f0 = hyp2f1_t(a0, b0, c0, z);
    const T f1 = hyp2f1_t(a0 + 1.0, b0 + 1.0, c0 + 1.0, z);
    const double d0 = (2.0 * m - 7.0) * (2.0 * m - 5.0) / (8.0 * m);
    phi = pow_t(q2, 3.5 - m) * f0;
    phi_1 = -2.0 * d0 * q1 * pow_t(q2, 1.5 - m) * f1;
    phi_2 = (3.5 - m) * pow_t(q2, 2.5 - m) * f0 + 2.0 * d0 * q1 * q1 * pow_t(q2, 0.5 - m) * f1;
}

}  // namespace detail

/// Section-section potential (single power-law term), scaled by c_{m,ss}.
double issip_value(const SectionKinematics& kin, const PowerLawSpec& law,
                   const SectionPairGeometry& geom);
double issip_value(const SectionKinematics& kin, const CompositeLaw& law,
                   const SectionPairGeometry& geom);

/// Potential and its first partials w.r.t. (q1, q2).
PotentialFirstDerivs issip_first_derivs(const SectionKinematics& kin, const PowerLawSpec& law,
                                        const SectionPairGeometry& geom);
PotentialFirstDerivs issip_first_derivs(const SectionKinematics& kin, const CompositeLaw& law,
                                        const SectionPairGeometry& geom);

/// Second partials (analytic differentiation of the hypergeometric forms).
PotentialSecondDerivs issip_second_derivs(const SectionKinematics& kin, const PowerLawSpec& law,
                                          const SectionPairGeometry& geom);
PotentialSecondDerivs issip_second_derivs(const SectionKinematics& kin, const CompositeLaw& law,
                                          const SectionPairGeometry& geom);

/// Value plus first and second partials with shared hypergeometric
/// evaluations (used in the innermost assembly loop).
void issip_all_derivs(const SectionKinematics& kin, const CompositeLaw& law,
                      const SectionPairGeometry& geom, PotentialFirstDerivs& first,
                      PotentialSecondDerivs& second);

/// Composite law with the per-term section constants and hypergeometric
/// parameters precomputed; the evaluation path of the assembly loops.
class CompiledLaw {
public:
    CompiledLaw() = default;
    CompiledLaw(const CompositeLaw& law, const SectionPairGeometry& geom);

    void first_derivs(const SectionKinematics& kin, PotentialFirstDerivs& first) const;
    void all_derivs(const SectionKinematics& kin, PotentialFirstDerivs& first,
                    PotentialSecondDerivs& second) const;

private:
    struct Term {
        double m, c, a0, b0, c0, d0, d1, s;
    };
    std::vector<Term> terms_;
};

/// Templated potential + first partials for perturbed (complex-step) evaluation.
template <class T>
void issip_first_derivs_t(const SectionKinematicsT<T>& kin, const CompositeLaw& law,
                          const SectionPairGeometry& geom, T& phi, T& phi_1, T& phi_2) {
    if (primal(kin.q2) <= 0.0)
        throw contact_error("issip: q2 <= 0");
    phi = T(0.0);
    phi_1 = T(0.0);
    phi_2 = T(0.0);
    for (const auto& term : law.terms) {
        const double c = section_constant(term, geom);
        T p, p1, p2;
        detail::issip_kernel_derivs(kin.q1, kin.q2, term.m, p, p1, p2);
        phi += c * p;
        phi_1 += c * p1;
        phi_2 += c * p2;
    }
}

struct LssipResult {
    double phi_bar = 0.0;
    Vec2 f_x = Vec2::Zero();  ///< force on beam x; force on y is the negative
};

/// Coplanar-disk law: pure power of the centroid-distance gap, with the
/// central force pair acting along the distance unit vector.
LssipResult lssip_value_and_force(const Vec2& d, const PowerLawSpec& law,
                                  const SectionPairGeometry& geom);
LssipResult lssip_value_and_force(const Vec2& d, const CompositeLaw& law,
                                  const SectionPairGeometry& geom);

/// Potential between one section of beam x and an infinite parallel cylinder y.
/// Requires m > 9/2.
double cylinder_per_length(double q2, const PowerLawSpec& law, const SectionPairGeometry& geom);
double cylinder_per_length(double q2, const CompositeLaw& law, const SectionPairGeometry& geom);

/// d/dq2 of cylinder_per_length (exact per-length normal force magnitude).
double cylinder_per_length_dq2(double q2, const PowerLawSpec& law,
                               const SectionPairGeometry& geom);
double cylinder_per_length_dq2(double q2, const CompositeLaw& law,
                               const SectionPairGeometry& geom);

/// Gap minimizing the summed per-length potential of a two-term law with one
/// attractive and one repulsive component.
double equilibrium_gap(const CompositeLaw& lj, const SectionPairGeometry& geom);

}  // namespace fibint

#endif
