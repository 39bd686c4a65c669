// Batch CLI: runs a configured scenario or one of the built-in verification
// suites. Exit codes: 0 success, 2 configuration/validation error, 3 solver
// or verification failure. Errors are emitted as JSON on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fibint/scenarios.hpp"
#include "fibint/verify.hpp"

namespace {

using nlohmann::json;

void emit_error(const std::string& kind, const std::string& message) {
    json diag;
    diag["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << diag.dump() << std::endl;
}

int run_command(const std::string& config_path, const std::vector<std::string>& overrides,
                const std::string& out_dir, int threads) {
    std::string text;
    {
        std::ifstream in(config_path);
        if (!in) {
            emit_error("config", "cannot open config file: " + config_path);
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        for (const auto& assignment : overrides)
            text = fibint::config_apply_override(text, assignment);
        fibint::ScenarioConfig cfg = fibint::config_parse(text);
        if (!out_dir.empty())
            cfg.output.directory = out_dir;
        if (threads > 0)
            cfg.threads = threads;
        cfg.validate();
        fibint::run_scenario(cfg);
        std::cout << "wrote " << cfg.output.directory << "/summary.json" << std::endl;
        return 0;
    } catch (const fibint::config_error& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("solver", e.what());
        return 3;
    }
}

int verify_oracles() {
    using namespace fibint;
    SectionPairGeometry geom;
    int failures = 0;
    const auto check = [&](const char* name, double got, double want, double tol) {
        const double err = std::abs(got - want) / std::abs(want);
        const bool ok = err <= tol;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "  rel_err=" << err << std::endl;
        if (!ok)
            ++failures;
    };
    // Reduced vs Cartesian oracle at a moderate gap.
    for (const double m : {6.0, 12.0}) {
        const double q2 = geom.R_x;
        const double red = quad_oracle_reduced(0.01, q2, m, geom).value;
        const double cart = quad_oracle_cartesian(0.01, q2, m, geom).value;
        check(m == 6.0 ? "oracle cross-check m=6" : "oracle cross-check m=12", red, cart, 1e-5);
    }
    // Closed form against the reduced oracle in its zero-offset regime.
    const CompositeLaw lj = CompositeLaw::lennard_jones(-1e-7, 5e-25);
    SectionKinematics kin;
    kin.q1 = 0.0;
    kin.q2 = 0.001;
    kin.q2_hat = kin.q2 + geom.radius_sum();
    kin.s_alpha = 1.0;
    check("issip vs reduced oracle", issip_value(kin, lj, geom),
          oracle_potential(kin.q1, kin.q2, lj, geom), 5e-2);
    // Parallel-cylinder scaling.
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 12; ++i) {
        const double q2 = 4e-4 * std::pow(10.0, i / 11.0);
        samples.emplace_back(q2, cylinder_per_length(q2, PowerLawSpec{6.0, -1e-7}, geom));
    }
    check("cylinder scaling m=6", loglog_slope_fit(samples), -1.5, 1e-9);
    return failures == 0 ? 0 : 3;
}

int verify_tangent() {
    using namespace fibint;
    ScenarioConfig cfg;
    cfg.scenario = "tangent-test";
    cfg.material.E = 200.0;
    cfg.geometry.initial_gap = 0.002;
    cfg.discretization.control_points = 25;
    cfg.discretization.density = 200.0;
    cfg.study.columns = 8;
    TwoBeamSystem system = build_peel_system(cfg);
    system.interaction_options().moments = false;
    const Eigen::VectorXd q = build_deformed_state(cfg, system);
    auto assembly = system.assemble(q, true);
    int failures = 0;
    std::mt19937 rng(cfg.study.seed);
    std::uniform_int_distribution<int> pick(0, system.n_dofs() - 1);
    for (int c = 0; c < cfg.study.columns; ++c) {
        const int k = pick(rng);
        const Eigen::VectorXd cs = complex_step_tangent(system, q, k);
        const double err = (cs - assembly.tangent.col(k)).norm() / assembly.tangent.col(k).norm();
        const bool ok = err <= 1e-6;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "tangent column " << k
                  << "  rel_err=" << err << std::endl;
        if (!ok)
            ++failures;
    }
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fibint: intermolecular interaction of slender in-plane fibers"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int threads = 0;
    auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
    run->add_option("config", config_path, "path to the JSON configuration")->required();
    run->add_option("--set", overrides, "override a config field: key.path=value");
    run->add_option("--out", out_dir, "output directory (overrides config)");
    run->add_option("--threads", threads, "worker threads for pair assembly");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a built-in verification suite");
    verify->add_option("suite", suite, "oracles | tangent | all")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed())
        return run_command(config_path, overrides, out_dir, threads);

    if (suite == "oracles")
        return verify_oracles();
    if (suite == "tangent")
        return verify_tangent();
    if (suite == "all") {
        const int a = verify_oracles();
        const int b = verify_tangent();
        return (a == 0 && b == 0) ? 0 : 3;
    }
    emit_error("config", "unknown verify suite: " + suite);
    return 2;
}
