#include "fibint/potential_laws.hpp"

#include <algorithm>
#include <cmath>

namespace fibint {

void CompositeLaw::validate() const {
    if (terms.empty())
        throw domain_error("CompositeLaw: at least one term required");
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i].m == terms[j].m)
                throw domain_error("CompositeLaw: exponents must be distinct");
}

void SectionPairGeometry::validate() const {
    if (!(R_x > 0.0) || !(R_y > 0.0) || !(beta_x > 0.0) || !(beta_y > 0.0))
        throw domain_error("SectionPairGeometry: radii and densities must be positive");
}

namespace detail {

double section_constant_base(double m, const SectionPairGeometry& geom) {
    if (!(m > 3.5))
        throw domain_error("section_constant: requires m > 7/2");
    const double gm = gamma_fn(m / 2.0);
    return geom.beta_x * geom.beta_y * std::pow(2.0, 2.5 - m) * std::pow(M_PI, 1.5) *
           std::sqrt(geom.R_x * geom.R_y / (geom.R_x + geom.R_y)) * gamma_fn(m - 3.5) / (gm * gm);
}

}  // namespace detail

double section_constant(const PowerLawSpec& law, const SectionPairGeometry& geom) {
    return law.k * detail::section_constant_base(law.m, geom);
}

double issip_value(const SectionKinematics& kin, const PowerLawSpec& law,
                   const SectionPairGeometry& geom) {
    if (kin.q2 <= 0.0)
        throw contact_error("issip_value: q2 <= 0");
    return section_constant(law, geom) * detail::issip_kernel(kin.q1, kin.q2, law.m);
}

double issip_value(const SectionKinematics& kin, const CompositeLaw& law,
                   const SectionPairGeometry& geom) {
    double v = 0.0;
    for (const auto& term : law.terms)
        v += issip_value(kin, term, geom);
    return v;
}

PotentialFirstDerivs issip_first_derivs(const SectionKinematics& kin, const PowerLawSpec& law,
                                        const SectionPairGeometry& geom) {
    if (kin.q2 <= 0.0)
        throw contact_error("issip_first_derivs: q2 <= 0");
    const double c = section_constant(law, geom);
    double p, p1, p2;
    detail::issip_kernel_derivs(kin.q1, kin.q2, law.m, p, p1, p2);
    return {c * p, c * p1, c * p2};
}

PotentialFirstDerivs issip_first_derivs(const SectionKinematics& kin, const CompositeLaw& law,
                                        const SectionPairGeometry& geom) {
    PotentialFirstDerivs out;
    for (const auto& term : law.terms) {
        const auto d = issip_first_derivs(kin, term, geom);
        out.phi += d.phi;
        out.phi_1 += d.phi_1;
        out.phi_2 += d.phi_2;
    }
    return out;
}

PotentialSecondDerivs issip_second_derivs(const SectionKinematics& kin, const PowerLawSpec& law,
                                          const SectionPairGeometry& geom) {
    if (kin.q2 <= 0.0)
        throw contact_error("issip_second_derivs: q2 <= 0");
    const double m = law.m;
    const double q1 = kin.q1;
    const double q2 = kin.q2;
    const double c = section_constant(law, geom);
    const double a0 = (2.0 * m - 7.0) / 4.0;
    const double b0 = (2.0 * m - 5.0) / 4.0;
    const double c0 = m / 2.0;
    const double z = -(q1 / q2) * (q1 / q2);
    const double f0 = hyp2f1_t(a0, b0, c0, z);
    const double f1 = hyp2f1_t(a0 + 1.0, b0 + 1.0, c0 + 1.0, z);
    const double f2 = hyp2f1_t(a0 + 2.0, b0 + 2.0, c0 + 2.0, z);
    const double d0 = (2.0 * m - 7.0) * (2.0 * m - 5.0) / (8.0 * m);
    const double d1 = (2.0 * m - 3.0) * (2.0 * m - 1.0) / (8.0 * (m + 2.0));
    const double s = 3.5 - m;
    // phi_1 = -2 d0 q1 q2^(s-2) F1; differentiate once more in q1 and q2.
    PotentialSecondDerivs out;
    out.phi_11 =
        c * (-2.0 * d0) * std::pow(q2, s - 2.0) * (f1 - 2.0 * d1 * (q1 * q1) / (q2 * q2) * f2);
    out.phi_12 = c * (-2.0 * d0) * q1 * std::pow(q2, s - 3.0) *
                 ((s - 2.0) * f1 + 2.0 * d1 * (q1 * q1) / (q2 * q2) * f2);
    out.phi_22 = c * (s * (s - 1.0) * std::pow(q2, s - 2.0) * f0 +
                      2.0 * d0 * (2.0 * s - 3.0) * q1 * q1 * std::pow(q2, s - 4.0) * f1 +
                      4.0 * d0 * d1 * q1 * q1 * q1 * q1 * std::pow(q2, s - 6.0) * f2);
    return out;
}

PotentialSecondDerivs issip_second_derivs(const SectionKinematics& kin, const CompositeLaw& law,
                                          const SectionPairGeometry& geom) {
    PotentialSecondDerivs out;
    for (const auto& term : law.terms) {
        const auto d = issip_second_derivs(kin, term, geom);
        out.phi_11 += d.phi_11;
        out.phi_12 += d.phi_12;
        out.phi_22 += d.phi_22;
    }
    return out;
}

void issip_all_derivs(const SectionKinematics& kin, const CompositeLaw& law,
                      const SectionPairGeometry& geom, PotentialFirstDerivs& first,
                      PotentialSecondDerivs& second) {
    CompiledLaw(law, geom).all_derivs(kin, first, second);
}

CompiledLaw::CompiledLaw(const CompositeLaw& law, const SectionPairGeometry& geom) {
    terms_.reserve(law.terms.size());
    for (const auto& spec : law.terms) {
        Term t;
        t.m = spec.m;
        t.c = section_constant(spec, geom);
        t.a0 = (2.0 * spec.m - 7.0) / 4.0;
        t.b0 = (2.0 * spec.m - 5.0) / 4.0;
        t.c0 = spec.m / 2.0;
        t.d0 = (2.0 * spec.m - 7.0) * (2.0 * spec.m - 5.0) / (8.0 * spec.m);
        t.d1 = (2.0 * spec.m - 3.0) * (2.0 * spec.m - 1.0) / (8.0 * (spec.m + 2.0));
        t.s = 3.5 - spec.m;
        terms_.push_back(t);
    }
}

void CompiledLaw::first_derivs(const SectionKinematics& kin, PotentialFirstDerivs& first) const {
    if (kin.q2 <= 0.0)
        throw contact_error("CompiledLaw: q2 <= 0");
    first = {};
    const double q1 = kin.q1;
    const double q2 = kin.q2;
    const double z = -(q1 / q2) * (q1 / q2);
    for (const auto& t : terms_) {
        const double f0 = hyp2f1_t(t.a0, t.b0, t.c0, z);
        const double f1 = hyp2f1_t(t.a0 + 1.0, t.b0 + 1.0, t.c0 + 1.0, z);
        const double p_s = std::pow(q2, t.s);
        const double q2i = 1.0 / q2;
        first.phi += t.c * p_s * f0;
        first.phi_1 += t.c * (-2.0 * t.d0) * q1 * p_s * q2i * q2i * f1;
        first.phi_2 +=
            t.c * (t.s * p_s * q2i * f0 + 2.0 * t.d0 * q1 * q1 * p_s * q2i * q2i * q2i * f1);
    }
}

void CompiledLaw::all_derivs(const SectionKinematics& kin, PotentialFirstDerivs& first,
                             PotentialSecondDerivs& second) const {
    if (kin.q2 <= 0.0)
        throw contact_error("CompiledLaw: q2 <= 0");
    first = {};
    second = {};
    const double q1 = kin.q1;
    const double q2 = kin.q2;
    const double z = -(q1 / q2) * (q1 / q2);
    for (const auto& t : terms_) {
        const double f0 = hyp2f1_t(t.a0, t.b0, t.c0, z);
        const double f1 = hyp2f1_t(t.a0 + 1.0, t.b0 + 1.0, t.c0 + 1.0, z);
        const double f2 = hyp2f1_t(t.a0 + 2.0, t.b0 + 2.0, t.c0 + 2.0, z);
        const double p_s = std::pow(q2, t.s);
        const double q2i = 1.0 / q2;
        const double p_s1 = p_s * q2i;
        const double p_s2 = p_s1 * q2i;
        const double p_s3 = p_s2 * q2i;
        const double p_s4 = p_s3 * q2i;
        const double p_s6 = p_s4 * q2i * q2i;
        const double r2 = (q1 * q1) / (q2 * q2);
        first.phi += t.c * p_s * f0;
        first.phi_1 += t.c * (-2.0 * t.d0) * q1 * p_s2 * f1;
        first.phi_2 += t.c * (t.s * p_s1 * f0 + 2.0 * t.d0 * q1 * q1 * p_s3 * f1);
        second.phi_11 += t.c * (-2.0 * t.d0) * p_s2 * (f1 - 2.0 * t.d1 * r2 * f2);
        second.phi_12 +=
            t.c * (-2.0 * t.d0) * q1 * p_s3 * ((t.s - 2.0) * f1 + 2.0 * t.d1 * r2 * f2);
        second.phi_22 += t.c * (t.s * (t.s - 1.0) * p_s2 * f0 +
                                2.0 * t.d0 * (2.0 * t.s - 3.0) * q1 * q1 * p_s4 * f1 +
                                4.0 * t.d0 * t.d1 * q1 * q1 * q1 * q1 * p_s6 * f2);
    }
}

LssipResult lssip_value_and_force(const Vec2& d, const PowerLawSpec& law,
                                  const SectionPairGeometry& geom) {
    const double dist = d.norm();
    const double q2 = dist - geom.radius_sum();
    if (q2 <= 0.0)
        throw contact_error("lssip: centroid distance within radius sum");
    const double c = section_constant(law, geom);
    LssipResult out;
    out.phi_bar = c * std::pow(q2, 3.5 - law.m);
    out.f_x = (law.m - 3.5) * c * std::pow(q2, 2.5 - law.m) * (d / dist);
    return out;
}

LssipResult lssip_value_and_force(const Vec2& d, const CompositeLaw& law,
                                  const SectionPairGeometry& geom) {
    LssipResult out;
    for (const auto& term : law.terms) {
        const auto r = lssip_value_and_force(d, term, geom);
        out.phi_bar += r.phi_bar;
        out.f_x += r.f_x;
    }
    return out;
}

namespace {

double cylinder_coefficient(const PowerLawSpec& law, const SectionPairGeometry& geom) {
    if (!(law.m > 4.5))
        throw domain_error("cylinder_per_length: requires m > 9/2");
    return law.k * geom.beta_x * geom.beta_y * std::pow(2.0, 1.5) * std::pow(M_PI, 1.5) *
           std::sqrt(geom.R_x * geom.R_y / (geom.R_x + geom.R_y)) * gamma_fn(law.m - 4.5) /
           gamma_fn(law.m - 1.0);
}

}  // namespace

double cylinder_per_length(double q2, const PowerLawSpec& law, const SectionPairGeometry& geom) {
    if (q2 <= 0.0)
        throw contact_error("cylinder_per_length: q2 <= 0");
    return cylinder_coefficient(law, geom) * std::pow(q2, 4.5 - law.m);
}

double cylinder_per_length(double q2, const CompositeLaw& law, const SectionPairGeometry& geom) {
    double v = 0.0;
    for (const auto& term : law.terms)
        v += cylinder_per_length(q2, term, geom);
    return v;
}

double cylinder_per_length_dq2(double q2, const PowerLawSpec& law,
                               const SectionPairGeometry& geom) {
    if (q2 <= 0.0)
        throw contact_error("cylinder_per_length_dq2: q2 <= 0");
    return cylinder_coefficient(law, geom) * (4.5 - law.m) * std::pow(q2, 3.5 - law.m);
}

double cylinder_per_length_dq2(double q2, const CompositeLaw& law,
                               const SectionPairGeometry& geom) {
    double v = 0.0;
    for (const auto& term : law.terms)
        v += cylinder_per_length_dq2(q2, term, geom);
    return v;
}

double equilibrium_gap(const CompositeLaw& lj, const SectionPairGeometry& geom) {
    if (lj.terms.size() != 2)
        throw domain_error("equilibrium_gap: exactly two terms required");
    PowerLawSpec attract = lj.terms[0];
    PowerLawSpec repulse = lj.terms[1];
    if (attract.m > repulse.m)
        std::swap(attract, repulse);
    if (!(attract.k < 0.0 && repulse.k > 0.0))
        throw domain_error(
            "equilibrium_gap: need one attractive (k < 0, lower m) and one repulsive term");
    const double a1 = cylinder_coefficient(attract, geom);
    const double a2 = cylinder_coefficient(repulse, geom);
    const double m1 = attract.m;
    const double m2 = repulse.m;
    const double ratio = -((m2 - 4.5) * a2) / ((m1 - 4.5) * a1);
    if (!(ratio > 0.0))
        throw domain_error("equilibrium_gap: no positive root");
    return std::pow(ratio, 1.0 / (m2 - m1));
}

}  // namespace fibint
