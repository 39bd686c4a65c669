#ifndef FIBINT_SOLVER_HPP
#define FIBINT_SOLVER_HPP

#include <functional>
#include <optional>
#include <vector>

#include "fibint/interaction.hpp"
#include "fibint/model.hpp"

namespace fibint {

/// One constrained DOF with its prescribed value as a function of the load
/// factor t.
struct Constraint {
    int dof = 0;
    std::function<double(double)> value;
};

struct BoundaryConditions {
    std::vector<Constraint> constraints;

    void apply(Eigen::VectorXd& q, double t) const;
    std::vector<bool> mask(int n_dofs) const;
};

struct ContinuationConfig {
    double t_start = 0.00016;
    double t_end = 1.0;
    double initial_step = 1e-3;
    double max_step = 0.025;
    double growth = 1.25;
    double shrink = 0.5;
    int target_iterations = 8;
    int max_iterations = 25;
    double newton_tol = 1e-5;
    double force_scale_floor = 1.0;
    double min_step = 1e-8;
    bool freeze_pairs_per_step = false;  ///< default: re-search pairs every iteration
};

struct NewtonStats {
    int iterations = 0;
    double final_norm = 0.0;        ///< relative residual norm at acceptance
    std::vector<double> history;    ///< relative residual norm per iteration
    InteractionStats interaction;   ///< stats of the last assembly
};

struct PathPoint {
    double t = 0.0;
    Vec2 reaction_x = Vec2::Zero();  ///< summed support reactions on beam x
    Vec2 reaction_y = Vec2::Zero();
    int iterations = 0;
    bool post_snap = false;
};

enum class MarchStatus { reached_end, stalled };

struct EquilibriumPath {
    std::vector<PathPoint> points;
    MarchStatus status = MarchStatus::reached_end;
    double t_last = 0.0;
    int total_newton_iterations = 0;
};

/// Two interacting beams, their boundary conditions, and the combined
/// internal + interaction assembly.
class TwoBeamSystem {
public:
    TwoBeamSystem(TwoBeamModel model, InteractionOptions opts, BoundaryConditions bcs);

    const TwoBeamModel& model() const { return model_; }
    const InteractionOptions& interaction_options() const { return opts_; }
    InteractionOptions& interaction_options() { return opts_; }
    const BoundaryConditions& boundary_conditions() const { return bcs_; }
    int n_dofs() const { return model_.n_dofs(); }
    bool interaction_enabled() const { return interaction_enabled_; }
    void set_interaction_enabled(bool on) { interaction_enabled_ = on; }

    /// Update the grid to configuration q and (re)search the pair list.
    const PairList& refresh_pairs(const Eigen::VectorXd& q);
    const PairList& pairs() const { return pairs_; }
    const InteractionGrid& grid() const { return grid_; }

    struct Assembly {
        Eigen::VectorXd residual_internal;
        Eigen::VectorXd residual_interaction;
        Eigen::MatrixXd tangent;
        InteractionStats stats;
        bool has_tangent = false;

        Eigen::VectorXd residual() const { return residual_internal + residual_interaction; }
    };

    /// Assemble at q. When `research_pairs` is false the current pair list is
    /// reused (grid positions are still refreshed).
    Assembly assemble(const Eigen::VectorXd& q, bool need_tangent, bool research_pairs = true);

    /// Total potential (strain energy + interaction potential) at q.
    double total_potential(const Eigen::VectorXd& q);

    /// Residual with generic scalar on a frozen pair list (complex step).
    template <class T>
    void residual_t(const Eigen::Matrix<T, Eigen::Dynamic, 1>& q, const PairList& pairs,
                    Eigen::Matrix<T, Eigen::Dynamic, 1>& residual) const {
        residual.setZero(model_.n_dofs());
        Eigen::Matrix<T, Eigen::Dynamic, 1> rx, ry;
        const auto qx = q.segment(model_.offset(0), model_.beam_x.n_dofs()).eval();
        const auto qy = q.segment(model_.offset(1), model_.beam_y.n_dofs()).eval();
        model_.beam_x.internal_residual<T>(qx, rx);
        model_.beam_y.internal_residual<T>(qy, ry);
        residual.segment(model_.offset(0), model_.beam_x.n_dofs()) = rx;
        residual.segment(model_.offset(1), model_.beam_y.n_dofs()) = ry;
        if (interaction_enabled_)
            interaction_residual_t<T>(model_, grid_, pairs, opts_, q, residual);
    }

    /// Horizontal/vertical reaction sums per beam from residual entries at the
    /// constrained DOFs.
    void reaction_sums(const Eigen::VectorXd& residual, Vec2& beam_x, Vec2& beam_y) const;

private:
    TwoBeamModel model_;
    InteractionOptions opts_;
    BoundaryConditions bcs_;
    InteractionGrid grid_;
    PairList pairs_;
    bool interaction_enabled_ = true;
};

/// Newton-Raphson at fixed load factor t. The state q is updated in place;
/// throws convergence_error (iteration cap) or contact_error (q2 <= 0), in
/// which case q is restored to its entry value.
NewtonStats newton_solve(TwoBeamSystem& system, Eigen::VectorXd& q, double t,
                         const ContinuationConfig& cfg,
                         const std::function<void(int, const Eigen::VectorXd&,
                                                  const InteractionStats&)>& monitor = {});

/// Residual entries at the constrained DOFs of the converged state.
std::vector<std::pair<int, double>> reaction_recovery(TwoBeamSystem& system,
                                                      const Eigen::VectorXd& q);

/// Adaptive load stepping from t_start to t_end. `on_accept` (optional) runs
/// after every accepted step.
EquilibriumPath adaptive_march(
    TwoBeamSystem& system, Eigen::VectorXd& q, const ContinuationConfig& cfg,
    const std::function<void(const PathPoint&, const Eigen::VectorXd&)>& on_accept = {});

/// Re-solve with the interaction terms removed, yielding the separated
/// configuration. Falls back to a support-interpolated initial guess when the
/// pre-snap state does not converge. Returns false if neither converges.
bool snap_off(TwoBeamSystem& system, Eigen::VectorXd& q, double t,
              const ContinuationConfig& cfg);

/// Damped (pseudo-transient) relaxation towards an equilibrium at fixed t.
/// Used by the march to slide across snap instabilities that plain Newton
/// cannot reach; the damping is adapted and removed as the residual drops.
bool pseudo_transient_relax(TwoBeamSystem& system, Eigen::VectorXd& q, double t,
                            const ContinuationConfig& cfg, int max_iterations = 400);

/// Pure step-size controller of the adaptive march (unit-testable logic).
class StepController {
public:
    StepController(const ContinuationConfig& cfg) : cfg_(cfg), step_(cfg.initial_step) {}
    double step() const { return step_; }
    void on_converged(int iterations) {
        if (iterations <= cfg_.target_iterations)
            step_ = std::min(step_ * cfg_.growth, cfg_.max_step);
    }
    /// Returns false when the step has underflowed.
    bool on_failure() {
        step_ *= cfg_.shrink;
        return step_ >= cfg_.min_step;
    }

private:
    ContinuationConfig cfg_;
    double step_ = 0.0;
};

}  // namespace fibint

#endif
