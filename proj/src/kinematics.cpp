#include "fibint/kinematics.hpp"

namespace fibint {

Vec2 normal_from_tangent(const Vec2& t) {
    if (std::abs(t.norm() - 1.0) > 1e-12)
        throw domain_error("normal_from_tangent: tangent must have unit length");
    return rot90(t);
}

void position_gradients_averaged(const AveragedFrame& frame, double s_alpha,
                                 GapOffsetGradients& grads) {
    grads.dq1_dx = frame.t_hat;
    grads.dq2_dx = s_alpha * frame.n_hat;
    grads.dq1_dy = -grads.dq1_dx;
    grads.dq2_dy = -grads.dq2_dx;
}

Mat2 unit_tangent_gradient(const SectionFrame& frame, bool flipped) {
    const double sign = flipped ? -1.0 : 1.0;
    return (sign / frame.sqrt_g) * (frame.n * frame.n.transpose());
}

Mat2 averaged_tangent_gradient(const AveragedFrame& frame, const Mat2& unit_grad_j) {
    const double sqrt_txy = std::sqrt(frame.t_xy_sq);
    return (Mat2::Identity() - frame.t_hat * frame.t_hat.transpose()) * unit_grad_j / sqrt_txy;
}

void gradients_averaged(const SectionFrame& frame_x, const SectionFrame& frame_y,
                        const AveragedFrame& frame, const Vec2& d,
                        const SectionKinematics& kin, GapOffsetGradients& grads) {
    position_gradients_averaged(frame, kin.s_alpha, grads);

    const double sqrt_txy = std::sqrt(frame.t_xy_sq);
    const Mat2 p_x = unit_tangent_gradient(frame_x, false);
    const Mat2 p_y = unit_tangent_gradient(frame_y, frame.flipped);

    // grad_{j,1} q1 = P_j (d - q1 t_hat) / sqrt(t_xy_sq)
    // grad_{j,1} q2 = P_j (s_a Lambda^T d - q2_hat t_hat) / sqrt(t_xy_sq)
    const Vec2 v1 = (d - kin.q1 * frame.t_hat) / sqrt_txy;
    const Vec2 lam_t_d(d[1], -d[0]);  // Lambda^T d
    const Vec2 v2 = (kin.s_alpha * lam_t_d - kin.q2_hat * frame.t_hat) / sqrt_txy;
    grads.dq1_dx1 = p_x * v1;
    grads.dq2_dx1 = p_x * v2;
    grads.dq1_dy1 = p_y * v1;
    grads.dq2_dy1 = p_y * v2;
}

GapOffsetGradients gradients_straightforward(const SectionFrame& frame_x, const Vec2& d,
                                             const SectionKinematics& kin) {
    (void)d;
    GapOffsetGradients grads;
    grads.dq1_dx = frame_x.t;
    grads.dq2_dx = kin.s_alpha * frame_x.n;
    grads.dq1_dy = -grads.dq1_dx;
    grads.dq2_dy = -grads.dq2_dx;
    grads.dq1_dx1 = (kin.s_alpha / frame_x.sqrt_g) * kin.q2_hat * frame_x.n;
    grads.dq2_dx1 = -(kin.s_alpha / frame_x.sqrt_g) * kin.q1 * frame_x.n;
    grads.dq1_dy1.setZero();
    grads.dq2_dy1.setZero();
    return grads;
}

std::pair<double, double> moment_weights(const SectionPairGeometry& geom) {
    geom.validate();
    const double w_x = geom.R_x / (geom.R_x + geom.R_y);
    return {w_x, 1.0 - w_x};
}

}  // namespace fibint
