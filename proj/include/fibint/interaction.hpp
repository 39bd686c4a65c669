#ifndef FIBINT_INTERACTION_HPP
#define FIBINT_INTERACTION_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "fibint/kinematics.hpp"
#include "fibint/model.hpp"
#include "fibint/potential_laws.hpp"
#include "fibint/quadrature.hpp"

namespace fibint {

/// One interaction quadrature point (mid-point rule segment midpoint).
struct GridPoint {
    int beam = 0;
    double xi = 0.0;
    double weight = 0.0;      ///< parametric mid-point weight
    double sqrt_g_ref = 0.0;  ///< reference metric at xi
    double s_ref = 0.0;       ///< reference arc-length coordinate
    int first_cp = 0;
    std::vector<double> N;    ///< basis values (degree + 1)
    std::vector<double> dN;   ///< first parametric derivatives
    Vec2 position = Vec2::Zero();
    SectionFrame frame;       ///< current-configuration frame
};

/// Interaction quadrature points of both beams. The parametric layout is
/// fixed at build time; positions and frames follow the current configuration
/// via update().
class InteractionGrid {
public:
    InteractionGrid() = default;
    InteractionGrid(const TwoBeamModel& model, double density);

    void update(const TwoBeamModel& model, const Eigen::VectorXd& q);

    const std::vector<GridPoint>& points() const { return points_; }
    std::vector<GridPoint>& points() { return points_; }
    int count(int beam) const { return beam == 0 ? n_x_ : n_y_; }
    int first(int beam) const { return beam == 0 ? 0 : n_x_; }
    double density() const { return density_; }

private:
    std::vector<GridPoint> points_;
    int n_x_ = 0;
    int n_y_ = 0;
    double density_ = 0.0;
};

InteractionGrid build_grid(const TwoBeamModel& model, const Eigen::VectorXd& q, double density);

using PairList = std::vector<std::pair<std::int32_t, std::int32_t>>;

/// All cross-beam point pairs with centroid distance <= cutoff, found with a
/// uniform spatial hash (cell size = cutoff, 9-cell lookup). Sorted by index.
PairList find_pairs(const InteractionGrid& grid, double cutoff);

struct InteractionOptions {
    CompositeLaw law;
    SectionPairGeometry geom;
    double cutoff = 0.05;
    double density = 3200.0;
    Formulation formulation = Formulation::averaged;
    bool moments = false;
    int threads = 1;
};

/// Force state of one interacting pair. `f` multiplies the x-side variation;
/// the y side receives -f. The moment scalars are the n-projected couple
/// terms per beam (already weighted).
struct PairContribution {
    std::int32_t ix = 0;
    std::int32_t iy = 0;
    SectionKinematics kin;
    Vec2 f = Vec2::Zero();
    double fhat_x = 0.0;  ///< coefficient of n_x . delta u_,1
    double fhat_y = 0.0;  ///< coefficient of n_y . delta v_,1
    double w = 0.0;       ///< w_xi_x * w_xi_y * sqrt_g_x * sqrt_g_y (reference metrics)
};

/// Evaluate the section-section force (and optional moment terms) of a pair.
PairContribution pair_force(const GridPoint& px, const GridPoint& py,
                            const InteractionOptions& opts);

struct InteractionStats {
    Vec2 total_force_x = Vec2::Zero();  ///< sum of w f over pairs (x side)
    Vec2 total_force_y = Vec2::Zero();  ///< sum of -w f  (exact negative)
    std::size_t n_pairs = 0;
    double min_gap = 0.0;
};

/// Assemble the interaction residual (and optionally the consistent tangent of
/// the moment-free force terms) into global arrays. The moment terms, when
/// enabled, enter the residual only; their linearization is omitted.
InteractionStats assemble_interaction(const TwoBeamModel& model, const InteractionGrid& grid,
                                      const PairList& pairs, const InteractionOptions& opts,
                                      Eigen::VectorXd& residual, Eigen::MatrixXd* tangent);

/// Relative error of the cutoff-truncated per-length normal force against the
/// analytic infinite-line value at gap q2.
double cutoff_error_estimate(double q2, const CompositeLaw& law, const SectionPairGeometry& geom,
                             double cutoff);

/// Interaction residual with generic scalar for perturbed (complex-step)
/// evaluation. The pair list and all branch decisions are taken from the
/// primal configuration.
template <class T>
void interaction_residual_t(const TwoBeamModel& model, const InteractionGrid& grid,
                            const PairList& pairs, const InteractionOptions& opts,
                            const Eigen::Matrix<T, Eigen::Dynamic, 1>& q,
                            Eigen::Matrix<T, Eigen::Dynamic, 1>& residual) {
    using std::sqrt;
    using VecT = Vec2T<T>;
    const auto [w_mx, w_my] = moment_weights(opts.geom);
    for (const auto& [ix, iy] : pairs) {
        const GridPoint& px = grid.points()[ix];
        const GridPoint& py = grid.points()[iy];
        // Re-evaluate positions and tangents with perturbed DOFs.
        VecT xx = VecT::Zero(), x1 = VecT::Zero(), yy = VecT::Zero(), y1 = VecT::Zero();
        const int off_x = model.offset(0), off_y = model.offset(1);
        const auto& cpx = model.beam_x.control_points();
        const auto& cpy = model.beam_y.control_points();
        const int px_deg = model.beam_x.degree();
        const int py_deg = model.beam_y.degree();
        for (int j = 0; j <= px_deg; ++j) {
            const int cp = px.first_cp + j;
            const VecT p(cpx[cp][0] + q[off_x + 2 * cp], cpx[cp][1] + q[off_x + 2 * cp + 1]);
            xx += px.N[j] * p;
            x1 += px.dN[j] * p;
        }
        for (int j = 0; j <= py_deg; ++j) {
            const int cp = py.first_cp + j;
            const VecT p(cpy[cp][0] + q[off_y + 2 * cp], cpy[cp][1] + q[off_y + 2 * cp + 1]);
            yy += py.N[j] * p;
            y1 += py.dN[j] * p;
        }
        const T sg_x = sqrt(dot2(x1, x1));
        const T sg_y = sqrt(dot2(y1, y1));
        const VecT t_x = x1 / sg_x;
        const VecT t_y = y1 / sg_y;
        const VecT d = xx - yy;

        VecT t_ref, n_ref;
        if (opts.formulation == Formulation::averaged) {
            const auto frame = averaged_frame<T>(t_x, t_y);
            t_ref = frame.t_hat;
            n_ref = frame.n_hat;
        } else {
            t_ref = t_x;
            n_ref = rot90(t_x);
        }
        const auto kin = gap_offset<T>(t_ref, n_ref, d, opts.geom);
        T phi, phi_1, phi_2;
        issip_first_derivs_t(kin, opts.law, opts.geom, phi, phi_1, phi_2);

        const VecT f = phi_1 * t_ref + phi_2 * kin.s_alpha * n_ref;
        const double w = px.weight * py.weight * px.sqrt_g_ref * py.sqrt_g_ref;
        for (int j = 0; j <= px_deg; ++j) {
            const int cp = px.first_cp + j;
            residual[off_x + 2 * cp] += w * px.N[j] * f[0];
            residual[off_x + 2 * cp + 1] += w * px.N[j] * f[1];
        }
        for (int j = 0; j <= py_deg; ++j) {
            const int cp = py.first_cp + j;
            residual[off_y + 2 * cp] -= w * py.N[j] * f[0];
            residual[off_y + 2 * cp + 1] -= w * py.N[j] * f[1];
        }
        if (opts.moments) {
            const T couple = kin.s_alpha * (phi_1 * kin.q2_hat - phi_2 * kin.q1);
            const VecT n_x = rot90(t_x);
            const VecT n_y = rot90(t_y);
            const T fx = w_mx * couple / sg_x;
            const T fy = w_my * couple / sg_y;
            if (opts.formulation == Formulation::straightforward) {
                // Exact one-sided variation: the whole couple acts on beam x.
                for (int j = 0; j <= px_deg; ++j) {
                    const int cp = px.first_cp + j;
                    const T c = (couple / sg_x) * px.dN[j];
                    residual[off_x + 2 * cp] += w * c * n_x[0];
                    residual[off_x + 2 * cp + 1] += w * c * n_x[1];
                }
            } else {
                for (int j = 0; j <= px_deg; ++j) {
                    const int cp = px.first_cp + j;
                    residual[off_x + 2 * cp] += w * fx * px.dN[j] * n_x[0];
                    residual[off_x + 2 * cp + 1] += w * fx * px.dN[j] * n_x[1];
                }
                for (int j = 0; j <= py_deg; ++j) {
                    const int cp = py.first_cp + j;
                    residual[off_y + 2 * cp] += w * fy * py.dN[j] * n_y[0];
                    residual[off_y + 2 * cp + 1] += w * fy * py.dN[j] * n_y[1];
                }
            }
        }
    }
}

}  // namespace fibint

#endif
