#ifndef FIBINT_SPECIAL_FUNCTIONS_HPP
#define FIBINT_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <cstdlib>

#include "fibint/common.hpp"

namespace fibint {

/// Parameters of the Gauss hypergeometric function 2F1(a, b; c; z), z <= 0.
struct Hyp2F1Params {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
    double z = 0.0;
};

/// Gamma function for x > 0. Relative accuracy better than 1e-13 on (0, 50].
double gamma_fn(double x);

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
double pochhammer(double a, long k);

namespace detail {

/// Gamma on the real line excluding non-positive integers (reflection formula).
double gamma_signed(double x);

/// Reciprocal gamma, zero at the poles of gamma.
double rgamma_signed(double x);

inline bool near_integer(double x, double tol = 1e-9) {
    return std::abs(x - std::round(x)) < tol;
}

// Direct series. Converges for |z| < 1; intended for primal(z) in (-0.6, 1).
template <class T>
T hyp2f1_series(double a, double b, double c, const T& z) {
    if (c <= 0.0 && near_integer(c))
        throw domain_error("hyp2f1: c is a non-positive integer");
    T term(1.0);
    T sum(1.0);
    constexpr int max_terms = 10000;
    for (int k = 0; k < max_terms; ++k) {
        const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0));
        term = term * ratio * z;
        sum += term;
        if (std::abs(primal(term)) < 1e-16 * std::abs(primal(sum)) + 1e-300)
            return sum;
    }
    throw convergence_error("hyp2f1: series did not converge within 10000 terms");
}

template <class T>
T pow_t(const T& base, double e) {
    using std::pow;
    return pow(base, e);
}

}  // namespace detail

/// 2F1(a, b; c; z) for z <= 0 (analytic continuation of the series).
///
/// Direct series on (-0.5, 0], Pfaff transformation z -> z/(z-1) on
/// (-2, -0.5], and the 1/z connection formula below that (fastest for deep
/// arguments). The connection needs b - a away from an integer; otherwise
/// the Pfaff series is used and may legitimately fail its term cap for
/// extreme arguments.
template <class T>
T hyp2f1_t(double a, double b, double c, const T& z) {
    const double zp = primal(z);
    // Perturbed evaluation (complex step) can push a mathematically zero z to
    // a tiny positive value; only reject genuinely positive arguments.
    if (zp > 1e-6)
        throw domain_error("hyp2f1: z > 0 not supported");
    if (zp > -0.5)
        return detail::hyp2f1_series(a, b, c, z);

    const bool ab_gap_integer = detail::near_integer(b - a);
    if (zp > -2.0 || ab_gap_integer) {
        // Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)).
        const T w = z / (z - 1.0);
        return detail::pow_t(T(1.0) - z, -a) * detail::hyp2f1_series(a, c - b, c, w);
    }

    // z -> 1/z connection formula (valid for b - a not an integer).
    const T w = T(1.0) / z;
    const T mz = -z;
    const double g_c = detail::gamma_signed(c);
    const double coef1 = g_c * detail::gamma_signed(b - a) * detail::rgamma_signed(b) *
                         detail::rgamma_signed(c - a);
    const double coef2 = g_c * detail::gamma_signed(a - b) * detail::rgamma_signed(a) *
                         detail::rgamma_signed(c - b);
    T result(0.0);
    if (coef1 != 0.0)
        result += coef1 * detail::pow_t(mz, -a) *
                  detail::hyp2f1_series(a, a - c + 1.0, a - b + 1.0, w);
    if (coef2 != 0.0)
        result += coef2 * detail::pow_t(mz, -b) *
                  detail::hyp2f1_series(b, b - c + 1.0, b - a + 1.0, w);
    return result;
}

/// Double-precision evaluation driven by a parameter pack.
double hyp2f1(const Hyp2F1Params& p);

}  // namespace fibint

#endif
