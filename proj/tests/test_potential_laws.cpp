#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "fibint/potential_laws.hpp"

using namespace fibint;
using mp50 = boost::multiprecision::cpp_bin_float_50;

namespace {

const SectionPairGeometry kGeom{0.02, 0.02, 1.0, 1.0};
const CompositeLaw kLJ = CompositeLaw::lennard_jones(-1e-7, 5e-25);

SectionKinematics make_kin(double q1, double q2, const SectionPairGeometry& geom = kGeom) {
    SectionKinematics kin;
    kin.q1 = q1;
    kin.q2 = q2;
    kin.q2_hat = q2 + geom.R_x + geom.R_y;
    kin.s_alpha = 1.0;
    return kin;
}

// High-precision evaluation of the section-constant formula.
double section_constant_mp(double m, double k, const SectionPairGeometry& geom) {
    const mp50 mm(m);
    const mp50 pi = boost::math::constants::pi<mp50>();
    const mp50 value = mp50(k) * mp50(geom.beta_x) * mp50(geom.beta_y) *
                       pow(mp50(2), mp50(2.5) - mm) * pow(pi, mp50(1.5)) *
                       sqrt(mp50(geom.R_x) * mp50(geom.R_y) / (mp50(geom.R_x) + mp50(geom.R_y))) *
                       boost::math::tgamma(mm - mp50(3.5)) /
                       (boost::math::tgamma(mm / 2) * boost::math::tgamma(mm / 2));
    return static_cast<double>(value);
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    for (int i = 0; i < 400 && (b - a) > 1e-16 * (std::abs(a) + std::abs(b)); ++i) {
        if (f(c) < f(d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("section constant: frozen high-precision regression values") {
    // Frozen from the 50-digit evaluation of the closed formula.
    const double c6_unit = section_constant(PowerLawSpec{6.0, 1.0}, kGeom);
    const double c6_mp = section_constant_mp(6.0, 1.0, kGeom);
    CHECK(c6_unit == doctest::Approx(c6_mp).epsilon(1e-13));
    CHECK(c6_unit == doctest::Approx(0.016356712967903624).epsilon(1e-12));

    const double c12 = section_constant(PowerLawSpec{12.0, 5e-25}, kGeom);
    const double c12_mp = section_constant_mp(12.0, 5e-25, kGeom);
    CHECK(c12 == doctest::Approx(c12_mp).epsilon(1e-13));
    CHECK(c12 == doctest::Approx(3.747498248490492e-28).epsilon(1e-12));
}

TEST_CASE("section constant: sign and domain") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> pm(3.6, 13.0);
    std::uniform_real_distribution<double> pk(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double m = pm(rng);
        const double k = pk(rng);
        if (k == 0.0)
            continue;
        const double c = section_constant(PowerLawSpec{m, k}, kGeom);
        CHECK(std::signbit(c) == std::signbit(k));
    }
    CHECK_THROWS_AS(section_constant(PowerLawSpec{3.5, 1.0}, kGeom), domain_error);
    CHECK_THROWS_AS(section_constant(PowerLawSpec{2.0, 1.0}, kGeom), domain_error);
}

TEST_CASE("issip reduces to the coplanar law at zero offset") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> pm(3.6, 13.0);
    std::uniform_real_distribution<double> pq(1e-4, 1e-1);
    std::uniform_real_distribution<double> pr(1e-3, 1e-1);
    for (int i = 0; i < 1000; ++i) {
        const SectionPairGeometry geom{pr(rng), pr(rng), 1.0, 1.0};
        const PowerLawSpec law{pm(rng), -1.0};
        const double q2 = pq(rng);
        const double issip = issip_value(make_kin(0.0, q2, geom), law, geom);
        const double lssip = section_constant(law, geom) * std::pow(q2, 3.5 - law.m);
        CHECK(std::abs(issip - lssip) <= 1e-12 * std::abs(lssip));
    }
}

TEST_CASE("issip pure power scaling in q2 at zero offset") {
    const PowerLawSpec law{6.0, -1e-7};
    for (const double q2 : {2e-4, 1e-3, 7e-3}) {
        const double v1 = issip_value(make_kin(0.0, q2), law, kGeom);
        const double v2 = issip_value(make_kin(0.0, 2.0 * q2), law, kGeom);
        CHECK(v2 / v1 == doctest::Approx(std::pow(2.0, -law.m + 3.5)).epsilon(1e-12));
    }
}

TEST_CASE("issip is even in q1") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> pq1(-0.05, 0.05);
    std::uniform_real_distribution<double> pq2(2e-4, 5e-3);
    for (int i = 0; i < 300; ++i) {
        const double q1 = pq1(rng), q2 = pq2(rng);
        const double plus = issip_value(make_kin(q1, q2), kLJ, kGeom);
        const double minus = issip_value(make_kin(-q1, q2), kLJ, kGeom);
        CHECK(std::abs(plus - minus) <= 1e-12 * std::abs(plus));
        const auto dp = issip_first_derivs(make_kin(q1, q2), kLJ, kGeom);
        const auto dm = issip_first_derivs(make_kin(-q1, q2), kLJ, kGeom);
        CHECK(std::abs(dp.phi_1 + dm.phi_1) <= 1e-12 * (std::abs(dp.phi_1) + 1e-300));
    }
}

TEST_CASE("issip q2 <= 0 is a hard error") {
    CHECK_THROWS_AS(issip_value(make_kin(0.0, 0.0), kLJ, kGeom), contact_error);
    CHECK_THROWS_AS(issip_value(make_kin(0.0, -1e-4), kLJ, kGeom), contact_error);
}

TEST_CASE("first derivatives: parity, identity, finite differences") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pq1(-0.06, 0.06);
    std::uniform_real_distribution<double> pq2(3e-4, 8e-3);

    CHECK(issip_first_derivs(make_kin(0.0, 1e-3), kLJ, kGeom).phi_1 == 0.0);

    for (int i = 0; i < 400; ++i) {
        const double q1 = pq1(rng), q2 = pq2(rng);
        const auto d = issip_first_derivs(make_kin(q1, q2), kLJ, kGeom);
        // phi_2 = (7-2m)/(2 q2) phi - (q1/q2) phi_1, summed per term.
        double identity = 0.0;
        for (const auto& term : kLJ.terms) {
            const auto dt = issip_first_derivs(make_kin(q1, q2), term, kGeom);
            identity += (7.0 - 2.0 * term.m) / (2.0 * q2) * dt.phi - (q1 / q2) * dt.phi_1;
        }
        CHECK(std::abs(d.phi_2 - identity) <= 1e-10 * std::abs(d.phi_2));

        // Central differences of the value.
        const double h1 = 1e-6 * q2;
        const double fd1 = (issip_value(make_kin(q1 + h1, q2), kLJ, kGeom) -
                            issip_value(make_kin(q1 - h1, q2), kLJ, kGeom)) /
                           (2.0 * h1);
        const double fd2 = (issip_value(make_kin(q1, q2 + h1), kLJ, kGeom) -
                            issip_value(make_kin(q1, q2 - h1), kLJ, kGeom)) /
                           (2.0 * h1);
        const double scale = std::abs(d.phi) / q2;
        CHECK(std::abs(fd1 - d.phi_1) <= 1e-5 * (std::abs(d.phi_1) + 1e-6 * scale));
        CHECK(std::abs(fd2 - d.phi_2) <= 1e-5 * (std::abs(d.phi_2) + 1e-6 * scale));
    }
}

TEST_CASE("second derivatives: symmetry limits and finite differences") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> pq1(-0.06, 0.06);
    std::uniform_real_distribution<double> pq2(3e-4, 8e-3);

    CHECK(issip_second_derivs(make_kin(0.0, 1e-3), kLJ, kGeom).phi_12 == 0.0);

    for (int i = 0; i < 300; ++i) {
        const double q1 = pq1(rng), q2 = pq2(rng);
        const auto s = issip_second_derivs(make_kin(q1, q2), kLJ, kGeom);
        const double h = 1e-6 * q2;
        const auto dp1 = issip_first_derivs(make_kin(q1 + h, q2), kLJ, kGeom);
        const auto dm1 = issip_first_derivs(make_kin(q1 - h, q2), kLJ, kGeom);
        const auto dp2 = issip_first_derivs(make_kin(q1, q2 + h), kLJ, kGeom);
        const auto dm2 = issip_first_derivs(make_kin(q1, q2 - h), kLJ, kGeom);
        const double fd11 = (dp1.phi_1 - dm1.phi_1) / (2.0 * h);
        const double fd12 = (dp2.phi_1 - dm2.phi_1) / (2.0 * h);
        const double fd21 = (dp1.phi_2 - dm1.phi_2) / (2.0 * h);
        const double fd22 = (dp2.phi_2 - dm2.phi_2) / (2.0 * h);
        const double scale =
            std::max({std::abs(s.phi_11), std::abs(s.phi_12), std::abs(s.phi_22)});
        CHECK(std::abs(fd11 - s.phi_11) <= 1e-4 * scale);
        CHECK(std::abs(fd12 - s.phi_12) <= 1e-4 * scale);
        CHECK(std::abs(fd21 - s.phi_12) <= 1e-4 * scale);
        CHECK(std::abs(fd22 - s.phi_22) <= 1e-4 * scale);

        // Differentiated phi_2 identity (per power-law term).
        for (const auto& term : kLJ.terms) {
            const auto d = issip_first_derivs(make_kin(q1, q2), term, kGeom);
            const auto st = issip_second_derivs(make_kin(q1, q2), term, kGeom);
            const double m = term.m;
            const double rhs = -(7.0 - 2.0 * m) / (2.0 * q2 * q2) * d.phi +
                               (7.0 - 2.0 * m) / (2.0 * q2) * d.phi_2 +
                               (q1 / (q2 * q2)) * d.phi_1 - (q1 / q2) * st.phi_12;
            CHECK(std::abs(st.phi_22 - rhs) <= 1e-9 * (std::abs(st.phi_22) + 1e-300));
        }
    }
}

TEST_CASE("lssip value and central force") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pd(0.041, 0.08);
    std::uniform_real_distribution<double> pang(0.0, 2.0 * M_PI);
    for (int i = 0; i < 200; ++i) {
        const double dist = pd(rng), ang = pang(rng);
        const Vec2 d(dist * std::cos(ang), dist * std::sin(ang));
        const auto r = lssip_value_and_force(d, kLJ, kGeom);
        // Force parallel to d.
        CHECK(std::abs(cross2(r.f_x, d)) <= 1e-12 * r.f_x.norm() * dist);
        // -grad phi matches the force.
        const double h = 1e-7 * dist;
        for (int axis = 0; axis < 2; ++axis) {
            Vec2 dp = d, dm = d;
            dp[axis] += h;
            dm[axis] -= h;
            const double fd = -(lssip_value_and_force(dp, kLJ, kGeom).phi_bar -
                                lssip_value_and_force(dm, kLJ, kGeom).phi_bar) /
                              (2.0 * h);
            CHECK(std::abs(fd - r.f_x[axis]) <= 1e-6 * (r.f_x.norm() + 1e-300));
        }
    }
    CHECK_THROWS_AS(lssip_value_and_force(Vec2(0.03, 0.0), kLJ, kGeom), contact_error);

    // Perpendicular approach reduces to the zero-offset section law.
    const Vec2 d(0.0, 0.0415);
    const auto r = lssip_value_and_force(d, kLJ, kGeom);
    CHECK(r.phi_bar ==
          doctest::Approx(issip_value(make_kin(0.0, 0.0015), kLJ, kGeom)).epsilon(1e-12));
}

TEST_CASE("cylinder per-length law: scaling, sign, domain") {
    const PowerLawSpec m6{6.0, -1e-7};
    // Log-log slope equals -(m - 9/2) exactly for a pure power law.
    const double v1 = cylinder_per_length(1e-3, m6, kGeom);
    const double v2 = cylinder_per_length(2e-3, m6, kGeom);
    CHECK(std::log(std::abs(v2) / std::abs(v1)) / std::log(2.0) ==
          doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(v1 < 0.0);
    CHECK(cylinder_per_length(1e-3, PowerLawSpec{12.0, 5e-25}, kGeom) > 0.0);
    CHECK_THROWS_AS(cylinder_per_length(1e-3, PowerLawSpec{4.4, 1.0}, kGeom), domain_error);
}

TEST_CASE("cylinder law equals the q1-integrated section law") {
    // Truncated quadrature of the section-section law over the offset
    // converges to the closed per-length expression.
    const PowerLawSpec m6{6.0, -1e-7};
    const double q2 = 1e-3;
    const double w = 1e3 * q2;
    const int n = 400000;
    const double h = 2.0 * w / n;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double q1 = -w + (k + 0.5) * h;
        sum += issip_value(make_kin(q1, q2), m6, kGeom);
    }
    sum *= h;
    CHECK(sum == doctest::Approx(cylinder_per_length(q2, m6, kGeom)).epsilon(1e-3));
}

TEST_CASE("equilibrium gap: closed root, stability, numeric minimum") {
    const double gap = equilibrium_gap(kLJ, kGeom);
    // Minimum of the summed per-length potential.
    const auto phi = [&](double q2) { return cylinder_per_length(q2, kLJ, kGeom); };
    const double numeric = golden_section_minimize(phi, 1e-4, 5e-3);
    CHECK(std::abs(gap - numeric) <= 1e-8 * gap);
    // Second derivative positive at the root.
    const double h = 1e-6 * gap;
    CHECK(phi(gap + h) + phi(gap - h) - 2.0 * phi(gap) > 0.0);
    // Both terms sharing a sign leaves no equilibrium.
    CHECK_THROWS_AS(equilibrium_gap(CompositeLaw::lennard_jones(1e-7, 5e-25), kGeom),
                    domain_error);
}

TEST_CASE("complex-step path matches the double path") {
    SectionKinematicsT<Cx> kin;
    kin.q1 = Cx(0.013, 0.0);
    kin.q2 = Cx(0.0011, 0.0);
    kin.q2_hat = kin.q2 + Cx(kGeom.radius_sum(), 0.0);
    kin.s_alpha = 1.0;
    Cx phi, p1, p2;
    issip_first_derivs_t(kin, kLJ, kGeom, phi, p1, p2);
    const auto d = issip_first_derivs(make_kin(0.013, 0.0011), kLJ, kGeom);
    CHECK(phi.real() == doctest::Approx(d.phi).epsilon(1e-14));
    CHECK(p1.real() == doctest::Approx(d.phi_1).epsilon(1e-14));
    CHECK(p2.real() == doctest::Approx(d.phi_2).epsilon(1e-14));

    // Imaginary parts carry the q1-derivatives when q1 is perturbed.
    const double eps = 1e-30;
    kin.q1 = Cx(0.013, eps);
    issip_first_derivs_t(kin, kLJ, kGeom, phi, p1, p2);
    const auto s = issip_second_derivs(make_kin(0.013, 0.0011), kLJ, kGeom);
    CHECK(phi.imag() / eps == doctest::Approx(d.phi_1).epsilon(1e-10));
    CHECK(p1.imag() / eps == doctest::Approx(s.phi_11).epsilon(1e-10));
    CHECK(p2.imag() / eps == doctest::Approx(s.phi_12).epsilon(1e-10));
}
