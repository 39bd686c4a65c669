#ifndef FIBINT_COMMON_HPP
#define FIBINT_COMMON_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace fibint {

template <class T>
using Vec2T = Eigen::Matrix<T, 2, 1>;
using Vec2 = Vec2T<double>;
template <class T>
using Mat2T = Eigen::Matrix<T, 2, 2>;
using Mat2 = Mat2T<double>;

using Cx = std::complex<double>;

/// Base class for all errors raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mathematical-domain violation (invalid exponent, non-positive gamma argument, ...).
struct domain_error : error {
    using error::error;
};

/// Cross sections interpenetrate (q2 <= 0). Signals a solver failure, never clamped.
struct contact_error : error {
    using error::error;
};

/// Degenerate geometry (vanishing tangent, opposed frames, ...).
struct degenerate_error : error {
    using error::error;
};

/// An iterative process failed to meet its tolerance.
struct convergence_error : error {
    using error::error;
};

/// Configuration parse or validation failure.
struct config_error : error {
    using error::error;
};

/// Real part of a scalar; branch decisions are always taken on this value.
inline double primal(double x) { return x; }
inline double primal(const Cx& z) { return z.real(); }

template <class T>
inline T abs_branch(const T& x) {
    return primal(x) < 0.0 ? T(-x) : x;
}

template <class T>
inline double sign_of(const T& x) {
    return primal(x) < 0.0 ? -1.0 : 1.0;
}

/// Fixed 90-degree anti-clockwise rotation: (x, y) -> (-y, x).
template <class T>
inline Vec2T<T> rot90(const Vec2T<T>& v) {
    return Vec2T<T>(-v[1], v[0]);
}

/// Scalar cross product a x b in the plane.
template <class T>
inline T cross2(const Vec2T<T>& a, const Vec2T<T>& b) {
    return a[0] * b[1] - a[1] * b[0];
}

/// Unconjugated (bilinear) dot product. Eigen's dot() is Hermitian, which
/// would strip the derivative carried in the imaginary part.
template <class T>
inline T dot2(const Vec2T<T>& a, const Vec2T<T>& b) {
    return a[0] * b[0] + a[1] * b[1];
}

inline const Mat2& rotation_90() {
    static const Mat2 lambda = (Mat2() << 0.0, -1.0, 1.0, 0.0).finished();
    return lambda;
}

}  // namespace fibint

#endif
