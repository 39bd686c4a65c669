#include "fibint/scenarios.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace fibint {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
        if (!out_)
            throw error("csv: cannot open " + path.string());
        out_ << header << "\n";
    }
    void row(std::initializer_list<double> values) {
        bool first = true;
        for (const double v : values) {
            if (!first)
                out_ << ",";
            out_ << fmt17(v);
            first = false;
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

void write_summary(const fs::path& dir, const json& summary) {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
}

std::vector<double> log_sweep(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo * std::pow(hi / lo, n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
    return v;
}

InteractionOptions interaction_options_from(const ScenarioConfig& cfg) {
    InteractionOptions opts;
    opts.law = cfg.law;
    opts.geom = cfg.pair_geometry();
    opts.cutoff = cfg.cutoff();
    opts.density = cfg.discretization.density;
    opts.formulation = cfg.solver.formulation == "averaged" ? Formulation::averaged
                                                            : Formulation::straightforward;
    opts.moments = cfg.solver.moments;
    opts.threads = cfg.threads;
    return opts;
}

ContinuationConfig continuation_from(const ScenarioConfig& cfg) {
    ContinuationConfig c;
    c.t_start = cfg.solver.t_start;
    c.t_end = cfg.solver.t_end;
    c.initial_step = cfg.solver.initial_step;
    c.max_step = cfg.solver.max_step;
    c.growth = cfg.solver.growth;
    c.shrink = cfg.solver.shrink;
    c.target_iterations = cfg.solver.target_iterations;
    c.max_iterations = cfg.solver.max_iterations;
    c.newton_tol = cfg.solver.newton_tol;
    c.force_scale_floor = cfg.solver.force_scale_floor;
    c.min_step = cfg.solver.min_step;
    c.freeze_pairs_per_step = cfg.solver.freeze_pairs_per_step;
    return c;
}

SectionKinematics line_kinematics(double q1, double q2, const SectionPairGeometry& geom) {
    SectionKinematics kin;
    kin.q1 = q1;
    kin.q2 = q2;
    kin.q2_hat = q2 + geom.radius_sum();
    kin.s_alpha = 1.0;
    return kin;
}

void scenario_potential_table(const ScenarioConfig& cfg, const fs::path& dir, json& summary);
void scenario_cylinder_eq(const ScenarioConfig& cfg, const fs::path& dir, json& summary);
void scenario_cutoff_study(const ScenarioConfig& cfg, const fs::path& dir, json& summary);
void scenario_integration_study(const ScenarioConfig& cfg, const fs::path& dir, json& summary);
void scenario_tangent_test(const ScenarioConfig& cfg, const fs::path& dir, json& summary);
void scenario_peel(const ScenarioConfig& cfg, const fs::path& dir, json& summary);

}  // namespace

TwoBeamSystem build_peel_system(const ScenarioConfig& cfg) {
    const auto section_x = CrossSection::from_radius(cfg.geometry.R_x);
    const auto section_y = CrossSection::from_radius(cfg.geometry.R_y);
    const Material mat{cfg.material.E.value_or(1.0)};
    const double axis_offset = cfg.geometry.initial_gap + cfg.geometry.R_x + cfg.geometry.R_y;
    TwoBeamModel model;
    model.beam_x = BSplineBeam::straight(cfg.discretization.degree,
                                         cfg.discretization.control_points, cfg.geometry.length,
                                         Vec2(0.0, 1.0), Vec2(0.0, 0.0), section_x, mat);
    model.beam_y = BSplineBeam::straight(cfg.discretization.degree,
                                         cfg.discretization.control_points, cfg.geometry.length,
                                         Vec2(0.0, 1.0), Vec2(axis_offset, 0.0), section_y, mat);

    // Simply supported ends: both end control points of each beam pinned.
    // Beam-y supports translate horizontally so that the support surface gap
    // equals length * t throughout the march.
    BoundaryConditions bcs;
    const double length = cfg.geometry.length;
    const double initial_gap = cfg.geometry.initial_gap;
    const int off_y = model.offset(1);
    const int last_x = model.beam_x.n_cp() - 1;
    const int last_y = model.beam_y.n_cp() - 1;
    auto fixed = [](double) { return 0.0; };
    auto pulled = [length, initial_gap](double t) { return length * t - initial_gap; };
    bcs.constraints.push_back({0, fixed});
    bcs.constraints.push_back({1, fixed});
    bcs.constraints.push_back({2 * last_x, fixed});
    bcs.constraints.push_back({2 * last_x + 1, fixed});
    bcs.constraints.push_back({off_y + 0, pulled});
    bcs.constraints.push_back({off_y + 1, fixed});
    bcs.constraints.push_back({off_y + 2 * last_y, pulled});
    bcs.constraints.push_back({off_y + 2 * last_y + 1, fixed});

    return TwoBeamSystem(model, interaction_options_from(cfg), bcs);
}

Eigen::VectorXd build_deformed_state(const ScenarioConfig& cfg, const TwoBeamSystem& system) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(system.n_dofs());
    std::mt19937 rng(cfg.study.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double amplitude = 0.08 * cfg.geometry.initial_gap;
    for (int beam_id = 0; beam_id < 2; ++beam_id) {
        const BSplineBeam& beam = system.model().beam(beam_id);
        const auto greville = greville_abscissae(beam.degree(), beam.knots());
        double cx[3], cy[3];
        for (int k = 0; k < 3; ++k) {
            cx[k] = unit(rng);
            cy[k] = unit(rng);
        }
        const int off = system.model().offset(beam_id);
        for (int i = 0; i < beam.n_cp(); ++i) {
            double ux = 0.0, uy = 0.0;
            for (int k = 0; k < 3; ++k) {
                ux += cx[k] * std::sin((k + 1) * M_PI * greville[i]);
                uy += cy[k] * std::sin((k + 1) * M_PI * greville[i]);
            }
            q[off + 2 * i] = amplitude * ux;
            q[off + 2 * i + 1] = amplitude * uy;
        }
    }
    return q;
}

std::vector<ForceProfilePoint> interaction_force_profile(TwoBeamSystem& system,
                                                         const Eigen::VectorXd& q) {
    system.refresh_pairs(q);
    const auto& grid = system.grid();
    InteractionOptions opts = system.interaction_options();
    opts.moments = false;
    std::vector<Vec2> accumulated(grid.points().size(), Vec2::Zero());
    for (const auto& [ix, iy] : system.pairs()) {
        const GridPoint& px = grid.points()[ix];
        const GridPoint& py = grid.points()[iy];
        const auto pc = pair_force(px, py, opts);
        // Physical force per unit reference length: strip the own-side weight.
        accumulated[ix] -= py.weight * py.sqrt_g_ref * pc.f;
        accumulated[iy] += px.weight * px.sqrt_g_ref * pc.f;
    }
    std::vector<ForceProfilePoint> profile;
    profile.reserve(grid.points().size());
    for (std::size_t i = 0; i < grid.points().size(); ++i) {
        const GridPoint& gp = grid.points()[i];
        ForceProfilePoint p;
        p.beam = gp.beam;
        p.s = gp.s_ref;
        p.position = gp.position;
        p.f1 = accumulated[i].dot(gp.frame.t);
        p.f2 = accumulated[i].dot(gp.frame.n);
        profile.push_back(p);
    }
    return profile;
}

Vec2 reference_interaction_force(TwoBeamSystem& system, const Eigen::VectorXd& q,
                                 double rel_tol) {
    const TwoBeamModel& model = system.model();
    InteractionOptions opts = system.interaction_options();
    opts.moments = false;
    const double cutoff2 = opts.cutoff * opts.cutoff;
    const auto qx = model.beam_dofs(q, 0).eval();
    const auto qy = model.beam_dofs(q, 1).eval();
    const Eigen::VectorXd zero_x = Eigen::VectorXd::Zero(model.beam_x.n_dofs());
    const Eigen::VectorXd zero_y = Eigen::VectorXd::Zero(model.beam_y.n_dofs());

    const auto force_at = [&](double xi_x, double xi_y, int component) {
        const SectionFrame fx = model.beam_x.frame(qx, xi_x);
        const SectionFrame fy = model.beam_y.frame(qy, xi_y);
        const Vec2 d = fx.position - fy.position;
        if (d.squaredNorm() > cutoff2)
            return 0.0;
        const auto avg = averaged_frame<double>(fx.t, fy.t);
        const auto kin = gap_offset<double>(avg.t_hat, avg.n_hat, d, opts.geom);
        const auto derivs = issip_first_derivs(kin, opts.law, opts.geom);
        const Vec2 f = derivs.phi_1 * avg.t_hat + derivs.phi_2 * kin.s_alpha * avg.n_hat;
        return f[component];
    };

    // The inner integrand vanishes outside a narrow cutoff window that a
    // blind adaptive pass can miss entirely; locate the window per outer
    // abscissa from the interaction grid.
    system.refresh_pairs(q);
    const auto& grid = system.grid();
    const int y_first = grid.first(1);
    const int y_count = grid.count(1);
    if (y_count == 0 || system.pairs().empty())
        return Vec2::Zero();
    const double xi_pad =
        3.0 * std::max(grid.points()[y_first].weight,
                       grid.points()[y_first + y_count - 1].weight);
    double scale = 0.0;
    {
        InteractionOptions probe = opts;
        const std::size_t stride = std::max<std::size_t>(1, system.pairs().size() / 512);
        for (std::size_t i = 0; i < system.pairs().size(); i += stride) {
            const auto& [ix, iy] = system.pairs()[i];
            scale = std::max(
                scale, pair_force(grid.points()[ix], grid.points()[iy], probe).f.norm());
        }
    }
    if (scale == 0.0)
        return Vec2::Zero();

    const auto window_of = [&](double xi_x) {
        const SectionFrame fx = model.beam_x.frame(qx, xi_x);
        double lo = 2.0, hi = -1.0;
        const double c_pad = opts.cutoff * 1.05;
        for (int j = y_first; j < y_first + y_count; ++j) {
            if ((grid.points()[j].position - fx.position).norm() <= c_pad) {
                lo = std::min(lo, grid.points()[j].xi);
                hi = std::max(hi, grid.points()[j].xi);
            }
        }
        if (hi < lo)
            return std::make_pair(0.0, -1.0);  // empty
        return std::make_pair(std::max(0.0, lo - xi_pad), std::min(1.0, hi + xi_pad));
    };

    Vec2 total = Vec2::Zero();
    for (int component = 0; component < 2; ++component) {
        QuadratureSpec inner_spec{0.2 * rel_tol, 0.02 * rel_tol * scale, 8000};
        const auto outer = [&](double xi_x) {
            const auto [lo, hi] = window_of(xi_x);
            if (hi <= lo)
                return 0.0;
            const double sgx_ref = model.beam_x.axis_metric(zero_x, xi_x).sqrt_g;
            const auto inner = [&](double xi_y) {
                const double f = force_at(xi_x, xi_y, component);
                if (f == 0.0)
                    return 0.0;
                return f * model.beam_y.axis_metric(zero_y, xi_y).sqrt_g;
            };
            return integrate_adaptive(inner, lo, hi, inner_spec) * sgx_ref;
        };
        QuadratureSpec outer_spec{rel_tol, 0.02 * rel_tol * scale, 8000};
        total[component] = integrate_adaptive(outer, 0.0, 1.0, outer_spec);
    }
    return total;
}

namespace {

void scenario_potential_table(const ScenarioConfig& cfg, const fs::path& dir, json& summary) {
    const auto geom = cfg.pair_geometry();
    std::vector<double> q1_values = cfg.study.q1_values;
    if (q1_values.empty())
        q1_values = {0.0, 0.5 * geom.R_x, geom.R_x, 2.0 * geom.R_x};
    const auto q2_values = log_sweep(cfg.study.q2_min, cfg.study.q2_max, cfg.study.q2_count);

    CsvWriter csv(dir / "potential_table.csv", "q1,q2,issip,lssip,oracle");
    json errors = json::array();
    for (const double q1 : q1_values) {
        double num_issip = 0.0, num_lssip = 0.0, den = 0.0;
        for (const double q2 : q2_values) {
            const auto kin = line_kinematics(q1, q2, geom);
            const double issip = issip_value(kin, cfg.law, geom);
            const Vec2 d(q1, kin.q2_hat);
            const double lssip = lssip_value_and_force(d, cfg.law, geom).phi_bar;
            const double oracle = oracle_potential(q1, q2, cfg.law, geom);
            csv.row({q1, q2, issip, lssip, oracle});
            num_issip += (issip - oracle) * (issip - oracle);
            num_lssip += (lssip - oracle) * (lssip - oracle);
            den += oracle * oracle;
        }
        errors.push_back({{"q1", q1},
                          {"issip_l2_rel_error", std::sqrt(num_issip / den)},
                          {"lssip_l2_rel_error", std::sqrt(num_lssip / den)}});
    }
    summary["errors"] = errors;
}

void scenario_cylinder_eq(const ScenarioConfig& cfg, const fs::path& dir, json& summary) {
    const auto geom = cfg.pair_geometry();
    const double gap = equilibrium_gap(cfg.law, geom);
    summary["equilibrium_gap"] = gap;
    summary["equilibrium_gap_over_length"] = gap / cfg.geometry.length;

    const auto q2_values = log_sweep(gap * 0.2, gap * 20.0, 33);
    CsvWriter csv(dir / "cylinder.csv", "q2,per_length_total,per_length_term0,per_length_term1");
    json slopes = json::object();
    for (std::size_t ti = 0; ti < cfg.law.terms.size(); ++ti) {
        std::vector<std::pair<double, double>> samples;
        for (const double q2 : q2_values)
            samples.emplace_back(q2, cylinder_per_length(q2, cfg.law.terms[ti], geom));
        slopes["m" + std::to_string(static_cast<int>(cfg.law.terms[ti].m))] =
            loglog_slope_fit(samples);
    }
    for (const double q2 : q2_values) {
        csv.row({q2, cylinder_per_length(q2, cfg.law, geom),
                 cylinder_per_length(q2, cfg.law.terms[0], geom),
                 cylinder_per_length(q2, cfg.law.terms.size() > 1
                                             ? cfg.law.terms[1]
                                             : cfg.law.terms[0],
                                     geom)});
    }
    summary["loglog_slopes"] = slopes;
}

void scenario_cutoff_study(const ScenarioConfig& cfg, const fs::path& dir, json& summary) {
    const auto geom = cfg.pair_geometry();
    std::vector<double> cutoffs = cfg.study.cutoff_values;
    if (cutoffs.empty())
        cutoffs = {0.045, 0.05, 0.06, 0.07};
    std::vector<double> gaps = cfg.study.q2_values;
    if (gaps.empty())
        gaps = {0.0004, 0.0008, 0.0009, 0.001, 0.002};
    CsvWriter csv(dir / "cutoff_error.csv", "q2,cutoff,rel_error");
    json rows = json::array();
    for (const double q2 : gaps) {
        for (const double c : cutoffs) {
            const double err = cutoff_error_estimate(q2, cfg.law, geom, c);
            csv.row({q2, c, err});
            rows.push_back({{"q2", q2}, {"cutoff", c}, {"rel_error", err}});
        }
    }
    summary["cutoff_errors"] = rows;
}

void scenario_integration_study(const ScenarioConfig& cfg, const fs::path& dir, json& summary) {
    const auto geom = cfg.pair_geometry();
    std::vector<double> ppu = cfg.study.points_per_unit;
    if (ppu.empty())
        ppu = {200, 400, 800, 1600, 3200, 6400};
    const double w = cfg.study.interval_half_width;
    const double q2 = cfg.study.gap;
    const auto integrand = [&](double q1) {
        return issip_first_derivs(line_kinematics(q1, q2, geom), cfg.law, geom).phi_2;
    };
    QuadratureSpec spec{1e-12, 1e-300, 8000};
    const double reference = 2.0 * integrate_adaptive(integrand, 0.0, w, spec);

    CsvWriter csv(dir / "integration_error.csv", "points_per_unit,n_points,rel_error");
    json rows = json::array();
    for (const double density : ppu) {
        const int n = std::max(1, static_cast<int>(std::llround(2.0 * w * density)));
        const double h = 2.0 * w / n;
        double sum = 0.0;
        for (int k = 0; k < n; ++k)
            sum += integrand(-w + (k + 0.5) * h);
        sum *= h;
        const double err = std::abs(sum - reference) / std::abs(reference);
        csv.row({density, static_cast<double>(n), err});
        rows.push_back({{"points_per_unit", density}, {"n", n}, {"rel_error", err}});
        if (density == 3200.0)
            summary["midpoint_rel_error_3200"] = err;
    }
    summary["integration_errors"] = rows;
    summary["reference_value"] = reference;
}

void scenario_tangent_test(const ScenarioConfig& cfg, const fs::path& dir, json& summary) {
    TwoBeamSystem system = build_peel_system(cfg);
    system.interaction_options().moments = false;  // linearization covers the force terms
    const Eigen::VectorXd q = build_deformed_state(cfg, system);
    auto assembly = system.assemble(q, true);
    if (assembly.stats.n_pairs == 0)
        throw error("tangent-test: no interacting pairs in the deformed state");

    std::mt19937 rng(cfg.study.seed + 1);
    std::uniform_int_distribution<int> pick(0, system.n_dofs() - 1);
    CsvWriter csv(dir / "tangent_test.csv", "dof,rel_error");
    double max_err = 0.0;
    for (int c = 0; c < cfg.study.columns; ++c) {
        const int k = pick(rng);
        const Eigen::VectorXd cs = complex_step_tangent(system, q, k);
        const Eigen::VectorXd col = assembly.tangent.col(k);
        const double err = (cs - col).norm() / col.norm();
        csv.row({static_cast<double>(k), err});
        max_err = std::max(max_err, err);
    }
    summary["columns"] = cfg.study.columns;
    summary["max_rel_error"] = max_err;
    summary["n_pairs"] = assembly.stats.n_pairs;
}

void write_snapshot(const fs::path& dir, int index, TwoBeamSystem& system,
                    const Eigen::VectorXd& q) {
    const auto profile = interaction_force_profile(system, q);
    char name[64];
    std::snprintf(name, sizeof(name), "step_%05d.csv", index);
    CsvWriter csv(dir / name, "s,x,y,N,M,f1,f2");
    const TwoBeamModel& model = system.model();
    // Beam x rows first, then beam y; the s column restarts at the boundary.
    for (const auto& p : profile) {
        const BSplineBeam& beam = model.beam(p.beam);
        // Recover xi from the stored arc coordinate via the uniform reference
        // parametrization (straight reference beams).
        const double xi = p.s / beam.reference_length();
        const auto stress = beam.stress_outputs(model.beam_dofs(q, p.beam), xi);
        csv.row({p.s, p.position[0], p.position[1], stress.N, stress.M, p.f1, p.f2});
    }
}

void scenario_peel(const ScenarioConfig& cfg, const fs::path& dir, json& summary) {
    TwoBeamSystem system = build_peel_system(cfg);
    const ContinuationConfig continuation = continuation_from(cfg);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(system.n_dofs());

    const fs::path snap_dir = dir / "snapshots";
    fs::create_directories(snap_dir);

    CsvWriter path_csv(dir / "path.csv", "t,reaction_x,reaction_y,iterations,post_snap");
    int accepted = 0;
    int snapshot_count = 0;
    double peak_reaction = 0.0;
    double t_peak = 0.0;
    const auto on_accept = [&](const PathPoint& p, const Eigen::VectorXd& state) {
        path_csv.row({p.t, p.reaction_x[0], p.reaction_y[0], static_cast<double>(p.iterations),
                      0.0});
        const double mag = std::abs(p.reaction_x[0]);
        if (mag > peak_reaction) {
            peak_reaction = mag;
            t_peak = p.t;
        }
        if (accepted % cfg.output.snapshot_every == 0)
            write_snapshot(snap_dir, snapshot_count++, system, state);
        ++accepted;
    };

    EquilibriumPath path = adaptive_march(system, q, continuation, on_accept);
    summary["steps"] = path.points.size();
    summary["t_last_converged"] = path.t_last;
    summary["stalled"] = path.status == MarchStatus::stalled;
    summary["mean_newton_iterations"] =
        path.points.empty() ? 0.0
                            : static_cast<double>(path.total_newton_iterations) /
                                  static_cast<double>(path.points.size());
    summary["peak_reaction"] = peak_reaction;
    summary["t_peak"] = t_peak;

    // Separated configuration after pull-off (or after the final increment).
    const bool snap_ok = snap_off(system, q, path.t_last, continuation);
    summary["post_snap_converged"] = snap_ok;
    if (snap_ok) {
        system.set_interaction_enabled(false);
        auto asm_out = system.assemble(q, false);
        PathPoint p;
        p.t = path.t_last;
        p.post_snap = true;
        system.reaction_sums(asm_out.residual(), p.reaction_x, p.reaction_y);
        system.set_interaction_enabled(true);
        path_csv.row({p.t, p.reaction_x[0], p.reaction_y[0], 0.0, 1.0});
        write_snapshot(snap_dir, snapshot_count++, system, q);

        // Post-snap stress check: the separated beams should be stress-free.
        double max_n = 0.0, max_m = 0.0;
        for (int beam_id = 0; beam_id < 2; ++beam_id) {
            const BSplineBeam& beam = system.model().beam(beam_id);
            for (int i = 0; i <= 50; ++i) {
                const auto stress =
                    beam.stress_outputs(system.model().beam_dofs(q, beam_id), i / 50.0);
                max_n = std::max(max_n, std::abs(stress.N));
                max_m = std::max(max_m, std::abs(stress.M));
            }
        }
        summary["post_snap_max_N_over_EA"] = max_n / system.model().beam_x.EA();
        summary["post_snap_max_M"] = max_m;
    }
}

}  // namespace

void run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);
    json summary;
    summary["scenario"] = cfg.scenario;
    if (cfg.scenario == "potential-table")
        scenario_potential_table(cfg, dir, summary);
    else if (cfg.scenario == "cylinder-eq")
        scenario_cylinder_eq(cfg, dir, summary);
    else if (cfg.scenario == "cutoff-study")
        scenario_cutoff_study(cfg, dir, summary);
    else if (cfg.scenario == "integration-study")
        scenario_integration_study(cfg, dir, summary);
    else if (cfg.scenario == "tangent-test")
        scenario_tangent_test(cfg, dir, summary);
    else if (cfg.scenario == "peel")
        scenario_peel(cfg, dir, summary);
    else
        throw config_error("run_scenario: unknown scenario " + cfg.scenario);
    write_summary(dir, summary);
}

}  // namespace fibint
