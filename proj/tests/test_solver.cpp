#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fibint/scenarios.hpp"
#include "fibint/solver.hpp"

using namespace fibint;

namespace {

ScenarioConfig desk_config() {
    ScenarioConfig cfg;
    cfg.scenario = "peel";
    cfg.material.E = 200.0;
    cfg.discretization.control_points = 21;
    cfg.discretization.density = 400.0;
    cfg.solver.newton_tol = 1e-9;
    return cfg;
}

}  // namespace

TEST_CASE("step controller: benign run keeps or grows the step") {
    ContinuationConfig cfg;
    cfg.initial_step = 1e-3;
    cfg.max_step = 4e-3;
    StepController ctl(cfg);
    for (int i = 0; i < 20; ++i)
        ctl.on_converged(5);
    CHECK(ctl.step() == doctest::Approx(cfg.max_step));
}

TEST_CASE("step controller: injected failure halves exactly once, then proceeds") {
    ContinuationConfig cfg;
    cfg.initial_step = 1e-3;
    StepController ctl(cfg);
    ctl.on_converged(20);  // slow step: no growth
    CHECK(ctl.step() == doctest::Approx(1e-3));
    CHECK(ctl.on_failure());
    CHECK(ctl.step() == doctest::Approx(5e-4));
    ctl.on_converged(3);
    CHECK(ctl.step() == doctest::Approx(6.25e-4));

    ContinuationConfig tiny = cfg;
    tiny.initial_step = 1.5e-8;
    StepController ctl2(tiny);
    CHECK_FALSE(ctl2.on_failure());  // underflow below min_step
}

TEST_CASE("newton: beam-only linear problem converges immediately") {
    ScenarioConfig cfg = desk_config();
    TwoBeamSystem system = build_peel_system(cfg);
    system.set_interaction_enabled(false);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(system.n_dofs());
    ContinuationConfig cc;
    cc.newton_tol = 1e-10;
    // A slightly displaced support: geometrically linear regime.
    const auto stats = newton_solve(system, q, 0.000161, cc);
    CHECK(stats.iterations <= 2);
    system.set_interaction_enabled(true);
}

TEST_CASE("first load step: convergence history is superlinear") {
    ScenarioConfig cfg = desk_config();
    TwoBeamSystem system = build_peel_system(cfg);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(system.n_dofs());
    ContinuationConfig cc;
    cc.newton_tol = 1e-12;
    cc.max_iterations = 40;
    const auto stats = newton_solve(system, q, cc.t_start, cc);
    REQUIRE(stats.history.size() >= 3);
    std::string hist;
    for (const double r : stats.history)
        hist += std::to_string(r) + " ";
    MESSAGE("residual history: ", hist);
    // Strong contraction in the terminal phase.
    const std::size_t n = stats.history.size();
    CHECK(stats.history[n - 1] <= 0.05 * stats.history[n - 2]);
    // Quadratic-type bound e_{k+1} <= C e_k^2 with a moderate constant,
    // measured above the roundoff floor of the assembly.
    bool quadratic_window_seen = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double r = stats.history[k];
        if (r < 1e-3 && r > 1e-8) {
            quadratic_window_seen = true;
            const double c_quad = stats.history[k + 1] / (r * r);
            MESSAGE("quadratic constant at r=", r, ": ", c_quad);
            CHECK(c_quad <= 1e4);
        }
    }
    CHECK(quadratic_window_seen);
}

TEST_CASE("first load step: determinism, symmetry, reactions, energy") {
    ScenarioConfig cfg = desk_config();
    TwoBeamSystem system = build_peel_system(cfg);
    ContinuationConfig cc;
    cc.newton_tol = 1e-11;
    cc.max_iterations = 40;

    Eigen::VectorXd q1 = Eigen::VectorXd::Zero(system.n_dofs());
    newton_solve(system, q1, cc.t_start, cc);

    SUBCASE("bit-exact reproducibility in single-thread mode") {
        Eigen::VectorXd q2 = Eigen::VectorXd::Zero(system.n_dofs());
        newton_solve(system, q2, cc.t_start, cc);
        REQUIRE(q1.size() == q2.size());
        for (int i = 0; i < q1.size(); ++i)
            CHECK(q1[i] == q2[i]);
    }

    SUBCASE("mirror-symmetric converged displacements") {
        const int n_beam = system.model().beam_x.n_dofs();
        for (int i = 0; i < n_beam; i += 2) {
            CHECK(std::abs(q1[i] + q1[n_beam + i]) <= 1e-9);
            CHECK(std::abs(q1[i + 1] - q1[n_beam + i + 1]) <= 1e-9);
        }
    }

    SUBCASE("reaction bookkeeping") {
        const auto reactions = reaction_recovery(system, q1);
        CHECK(reactions.size() == 8);
        Vec2 rx, ry;
        auto asm_out = system.assemble(q1, false);
        system.reaction_sums(asm_out.residual(), rx, ry);
        // The two beams' horizontal sums balance.
        CHECK(std::abs(rx[0] + ry[0]) <= 1e-3 * std::abs(rx[0]));
        // And equal the discrete interaction totals (translation invariance).
        CHECK(std::abs(rx[0] - asm_out.stats.total_force_x[0]) <=
              1e-3 * std::abs(asm_out.stats.total_force_x[0]));
    }

    SUBCASE("energy consistency at the converged state") {
        // With the interaction moments enabled and nearly parallel frames the
        // residual is the exact potential gradient; the directional
        // derivative along admissible directions must vanish to solver
        // accuracy.
        ScenarioConfig cfg_m = desk_config();
        cfg_m.solver.moments = true;
        TwoBeamSystem sys_m = build_peel_system(cfg_m);
        sys_m.interaction_options().moments = true;
        Eigen::VectorXd qm = Eigen::VectorXd::Zero(sys_m.n_dofs());
        const auto stats = newton_solve(sys_m, qm, cc.t_start, cc);
        auto asm_out = sys_m.assemble(qm, false);
        const auto mask = sys_m.boundary_conditions().mask(sys_m.n_dofs());
        const Eigen::VectorXd residual = asm_out.residual();
        double res_free = 0.0;
        for (int i = 0; i < sys_m.n_dofs(); ++i)
            if (!mask[i])
                res_free += residual[i] * residual[i];
        res_free = std::sqrt(res_free);

        std::mt19937 rng(41);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double h = 1e-8;
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::VectorXd dir = Eigen::VectorXd::Zero(sys_m.n_dofs());
            for (int i = 0; i < sys_m.n_dofs(); ++i)
                if (!mask[i])
                    dir[i] = gauss(rng);
            dir /= dir.norm();
            const double phi_p = sys_m.total_potential(qm + h * dir);
            const double phi_m = sys_m.total_potential(qm - h * dir);
            const double deriv = (phi_p - phi_m) / (2.0 * h);
            CHECK(std::abs(deriv) <= 100.0 * res_free + 1e-9);
        }
        (void)stats;
    }
}

TEST_CASE("adaptive march over a short horizon") {
    ScenarioConfig cfg = desk_config();
    TwoBeamSystem system = build_peel_system(cfg);
    ContinuationConfig cc;
    cc.newton_tol = 1e-8;
    cc.t_end = 0.0008;
    cc.initial_step = 0.00016;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(system.n_dofs());
    const auto path = adaptive_march(system, q, cc);
    CHECK(path.status == MarchStatus::reached_end);
    CHECK(path.t_last == doctest::Approx(cc.t_end).epsilon(1e-12));
    REQUIRE(path.points.size() >= 3);
    for (std::size_t i = 1; i < path.points.size(); ++i)
        CHECK(path.points[i].t > path.points[i - 1].t);
}

TEST_CASE("snap-off yields straight stress-free beams") {
    ScenarioConfig cfg = desk_config();
    TwoBeamSystem system = build_peel_system(cfg);
    ContinuationConfig cc;
    cc.newton_tol = 1e-9;
    cc.t_end = 0.0012;
    cc.initial_step = 0.0002;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(system.n_dofs());
    const auto path = adaptive_march(system, q, cc);
    REQUIRE(path.status == MarchStatus::reached_end);
    const double t = path.t_last;

    ContinuationConfig snap_cc = cc;
    snap_cc.newton_tol = 1e-12;  // the straightness check needs a deep solve
    REQUIRE(snap_off(system, q, t, snap_cc));
    // Separated beams: straight lines between the supports, zero stress.
    const TwoBeamModel& model = system.model();
    for (int beam_id = 0; beam_id < 2; ++beam_id) {
        const BSplineBeam& beam = model.beam(beam_id);
        const auto u = model.beam_dofs(q, beam_id).eval();
        Vec2 x0, x1;
        beam.evaluate<double>(u, 0.0, 0, x0);
        beam.evaluate<double>(u, 1.0, 0, x1);
        for (const double xi : {0.2, 0.5, 0.8}) {
            Vec2 x;
            beam.evaluate<double>(u, xi, 0, x);
            const Vec2 chord = x1 - x0;
            const Vec2 rel = x - x0;
            CHECK(std::abs(cross2(chord, rel)) / chord.norm() <= 1e-8);
            const auto stress = beam.stress_outputs(u, xi);
            CHECK(std::abs(stress.N) <= 1e-8 * beam.EA());
            CHECK(std::abs(stress.M) <= 1e-8 * beam.EA());
        }
    }
    // Zero reactions in the separated state.
    system.set_interaction_enabled(false);
    auto asm_out = system.assemble(q, false);
    Vec2 rx, ry;
    system.reaction_sums(asm_out.residual(), rx, ry);
    system.set_interaction_enabled(true);
    CHECK(rx.norm() <= 1e-8 * system.model().beam_x.EA());
    CHECK(ry.norm() <= 1e-8 * system.model().beam_x.EA());
}

TEST_CASE("newton failure restores the entry state") {
    ScenarioConfig cfg = desk_config();
    TwoBeamSystem system = build_peel_system(cfg);
    ContinuationConfig cc;
    cc.newton_tol = 1e-9;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(system.n_dofs());
    newton_solve(system, q, cc.t_start, cc);
    const Eigen::VectorXd saved = q;
    ContinuationConfig strangled = cc;
    strangled.max_iterations = 1;
    CHECK_THROWS_AS(newton_solve(system, q, 0.01, strangled), convergence_error);
    CHECK((q - saved).norm() == 0.0);
}
