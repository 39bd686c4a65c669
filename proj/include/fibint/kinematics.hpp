#ifndef FIBINT_KINEMATICS_HPP
#define FIBINT_KINEMATICS_HPP

#include <cmath>
#include <utility>

#include "fibint/common.hpp"
#include "fibint/potential_laws.hpp"

namespace fibint {

/// Beam-axis frame at one section: position, unit tangent/normal and the
/// current metric scalar sqrt_g = |dx/dxi|.
template <class T>
struct SectionFrameT {
    Vec2T<T> position;
    Vec2T<T> t;
    Vec2T<T> n;
    T sqrt_g{};
};
using SectionFrame = SectionFrameT<double>;

/// Reference frame built from the summed unit tangents of both beams.
/// When t_x . t_y < 0 the beam-y tangent is rotated by pi first; `flipped`
/// records that so downstream gradients use the flipped vector consistently.
template <class T>
struct AveragedFrameT {
    Vec2T<T> t_hat;
    Vec2T<T> n_hat;
    Vec2T<T> t_xy;    ///< un-normalized sum t_x + (flipped ? -t_y : t_y)
    T t_xy_sq{};      ///< squared magnitude of t_xy
    bool flipped = false;
};
using AveragedFrame = AveragedFrameT<double>;

/// First-order gradients of (q1, q2) w.r.t. the positions and the tangent
/// base vectors of both beams.
struct GapOffsetGradients {
    Vec2 dq1_dx = Vec2::Zero(), dq2_dx = Vec2::Zero();
    Vec2 dq1_dy = Vec2::Zero(), dq2_dy = Vec2::Zero();
    Vec2 dq1_dx1 = Vec2::Zero(), dq2_dx1 = Vec2::Zero();
    Vec2 dq1_dy1 = Vec2::Zero(), dq2_dy1 = Vec2::Zero();
};

/// n = Lambda t for a unit tangent.
Vec2 normal_from_tangent(const Vec2& t);

template <class T>
AveragedFrameT<T> averaged_frame(const Vec2T<T>& t_x, const Vec2T<T>& t_y) {
    AveragedFrameT<T> out;
    const double dot = primal(dot2(t_x, t_y));
    out.flipped = dot < 0.0;
    const Vec2T<T> ty_eff = out.flipped ? Vec2T<T>(-t_y) : t_y;
    out.t_xy = t_x + ty_eff;
    out.t_xy_sq = dot2(out.t_xy, out.t_xy);
    const double norm_p = std::sqrt(primal(out.t_xy_sq));
    if (norm_p < 1e-8)
        throw degenerate_error("averaged_frame: opposed tangents, no average direction");
    using std::sqrt;
    const T inv = T(1.0) / sqrt(out.t_xy_sq);
    out.t_hat = out.t_xy * inv;
    out.n_hat = rot90(out.t_hat);
    return out;
}

/// Project the centroid distance d = x - y onto a reference frame.
/// Throws contact_error when the surface gap is non-positive.
template <class T>
SectionKinematicsT<T> gap_offset(const Vec2T<T>& t_ref, const Vec2T<T>& n_ref,
                                 const Vec2T<T>& d, const SectionPairGeometry& geom) {
    SectionKinematicsT<T> kin;
    kin.q1 = dot2(d, t_ref);
    const T dn = dot2(d, n_ref);
    kin.s_alpha = sign_of(dn);
    kin.q2_hat = abs_branch(dn);
    kin.q2 = kin.q2_hat - geom.radius_sum();
    if (primal(kin.q2) <= 0.0)
        throw contact_error("gap_offset: sections interpenetrate (q2 <= 0)");
    return kin;
}

inline SectionKinematics gap_offset(const AveragedFrame& frame, const Vec2& d,
                                    const SectionPairGeometry& geom) {
    return gap_offset<double>(frame.t_hat, frame.n_hat, d, geom);
}
inline SectionKinematics gap_offset(const SectionFrame& frame_x, const Vec2& d,
                                    const SectionPairGeometry& geom) {
    return gap_offset<double>(frame_x.t, frame_x.n, d, geom);
}

/// Position gradients in the averaged formulation. The frame depends on the
/// tangents only, so these are exact: grad_x q1 = t_hat, grad_x q2 = s_a n_hat,
/// with the beam-y gradients the exact negatives.
void position_gradients_averaged(const AveragedFrame& frame, double s_alpha,
                                 GapOffsetGradients& grads);

/// Projector d(t)/d(x_,1) = (n (x) n) / sqrt_g for a unit tangent from an
/// unnormalized base vector; sign covers a pi-flipped tangent.
Mat2 unit_tangent_gradient(const SectionFrame& frame, bool flipped = false);

/// d(t_hat)/d(t_j) mapped through the unit-tangent projector of beam j:
/// M_j = (I - t_hat (x) t_hat) P_j / sqrt(t_xy_sq).
Mat2 averaged_tangent_gradient(const AveragedFrame& frame, const Mat2& unit_grad_j);

/// Tangent-vector gradients of (q1, q2) for the averaged formulation.
/// Fills the dq*_dx1 / dq*_dy1 members of `grads`; position members are
/// filled as in position_gradients_averaged.
void gradients_averaged(const SectionFrame& frame_x, const SectionFrame& frame_y,
                        const AveragedFrame& frame, const Vec2& d,
                        const SectionKinematics& kin, GapOffsetGradients& grads);

/// Gradients when the beam-x frame is the reference (all beam-y tangent
/// gradients vanish identically).
GapOffsetGradients gradients_straightforward(const SectionFrame& frame_x, const Vec2& d,
                                             const SectionKinematics& kin);

/// Interaction-moment distribution weights (w_x, w_y), proportional to radii.
std::pair<double, double> moment_weights(const SectionPairGeometry& geom);

}  // namespace fibint

#endif
