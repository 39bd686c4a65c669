#ifndef FIBINT_CONFIG_HPP
#define FIBINT_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "fibint/model.hpp"
#include "fibint/potential_laws.hpp"
#include "fibint/solver.hpp"

namespace fibint {

/// Parameters of one scenario run. Defaults reproduce the reference peeling
/// setup except the material modulus, which has no default and must be given
/// for the scenarios that solve (peel, tangent-test).
struct ScenarioConfig {
    std::string scenario;

    CompositeLaw law = CompositeLaw::lennard_jones(-1e-7, 5e-25);

    struct Geometry {
        double R_x = 0.02;
        double R_y = 0.02;
        double beta_x = 1.0;
        double beta_y = 1.0;
        double length = 5.0;
        double initial_gap = 0.0008;  ///< surface gap of the reference configuration
    } geometry;

    struct Discretization {
        int degree = 4;
        int control_points = 161;
        double density = 3200.0;           ///< interaction points per unit reference length
        std::optional<double> cutoff;      ///< default 2.5 R_x
    } discretization;

    struct MaterialBlock {
        std::optional<double> E;
    } material;

    struct SolverBlock {
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
        std::string formulation = "averaged";
        bool moments = false;
        bool freeze_pairs_per_step = false;
    } solver;

    struct Output {
        std::string directory = "out";
        int snapshot_every = 10;
    } output;

    /// Scenario-specific sweep parameters.
    struct Study {
        std::vector<double> q1_values;        // potential-table
        double q2_min = 0.0006;
        double q2_max = 0.005;
        int q2_count = 25;
        std::vector<double> cutoff_values;    // cutoff-study
        std::vector<double> q2_values;
        std::vector<double> points_per_unit;  // integration-study
        double interval_half_width = 0.03;
        double gap = 0.0009;
        int columns = 20;                     // tangent-test
        unsigned seed = 20240915;
    } study;

    int threads = 1;

    double cutoff() const { return discretization.cutoff.value_or(2.5 * geometry.R_x); }
    SectionPairGeometry pair_geometry() const {
        return {geometry.R_x, geometry.R_y, geometry.beta_x, geometry.beta_y};
    }

    void validate() const;
    /// Canonical JSON form (defaults materialized).
    std::string canonical() const;
};

/// Strict parse of a JSON config document: unknown keys are errors with a
/// path-to-field diagnostic.
ScenarioConfig config_parse(const std::string& text);

/// Apply a `--set key.path=value` override onto a JSON config text.
std::string config_apply_override(const std::string& text, const std::string& assignment);

const std::vector<std::string>& known_scenarios();

}  // namespace fibint

#endif
