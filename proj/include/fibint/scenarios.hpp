#ifndef FIBINT_SCENARIOS_HPP
#define FIBINT_SCENARIOS_HPP

#include <string>

#include "fibint/config.hpp"
#include "fibint/solver.hpp"
#include "fibint/verify.hpp"

namespace fibint {

/// Two straight parallel beams at the configured surface gap, with the
/// peeling boundary conditions (beam-x supports fixed, beam-y supports
/// prescribed so the surface gap equals length * t).
TwoBeamSystem build_peel_system(const ScenarioConfig& cfg);

/// Smoothly perturbed two-beam state for tangent verification (deterministic
/// in the study seed). Amplitude is a small fraction of the surface gap so
/// all pairs stay admissible.
Eigen::VectorXd build_deformed_state(const ScenarioConfig& cfg, const TwoBeamSystem& system);

/// Physical interaction force per unit reference length at every interaction
/// grid point, projected on the point's own (t, n) frame.
struct ForceProfilePoint {
    int beam = 0;
    double s = 0.0;
    Vec2 position = Vec2::Zero();
    double f1 = 0.0;
    double f2 = 0.0;
};
std::vector<ForceProfilePoint> interaction_force_profile(TwoBeamSystem& system,
                                                         const Eigen::VectorXd& q);

/// Total interaction force on beam x by adaptive quadrature over the current
/// smooth configuration (same cutoff truncation as the discrete sum).
Vec2 reference_interaction_force(TwoBeamSystem& system, const Eigen::VectorXd& q,
                                 double rel_tol = 1e-8);

/// Execute the configured scenario, writing its artifacts under
/// cfg.output.directory. Throws config_error / solver errors.
void run_scenario(const ScenarioConfig& cfg);

}  // namespace fibint

#endif
