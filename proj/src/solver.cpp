#include "fibint/solver.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace fibint {

void BoundaryConditions::apply(Eigen::VectorXd& q, double t) const {
    for (const auto& c : constraints)
        q[c.dof] = c.value(t);
}

std::vector<bool> BoundaryConditions::mask(int n_dofs) const {
    std::vector<bool> m(n_dofs, false);
    for (const auto& c : constraints)
        m[c.dof] = true;
    return m;
}

TwoBeamSystem::TwoBeamSystem(TwoBeamModel model, InteractionOptions opts, BoundaryConditions bcs)
    : model_(std::move(model)),
      opts_(std::move(opts)),
      bcs_(std::move(bcs)),
      grid_(model_, opts_.density) {}

const PairList& TwoBeamSystem::refresh_pairs(const Eigen::VectorXd& q) {
    grid_.update(model_, q);
    pairs_ = find_pairs(grid_, opts_.cutoff);
    return pairs_;
}

TwoBeamSystem::Assembly TwoBeamSystem::assemble(const Eigen::VectorXd& q, bool need_tangent,
                                                bool research_pairs) {
    Assembly out;
    const int n = model_.n_dofs();
    out.residual_internal.setZero(n);
    out.residual_interaction.setZero(n);
    if (need_tangent) {
        out.tangent.setZero(n, n);
        out.has_tangent = true;
    }
    // Beam tangents live in disjoint diagonal blocks.
    Eigen::MatrixXd kx, ky;
    if (need_tangent) {
        kx.setZero(model_.beam_x.n_dofs(), model_.beam_x.n_dofs());
        ky.setZero(model_.beam_y.n_dofs(), model_.beam_y.n_dofs());
    }
    model_.beam_x.internal_forces_and_tangent(
        model_.beam_dofs(q, 0),
        out.residual_internal.segment(model_.offset(0), model_.beam_x.n_dofs()),
        need_tangent ? &kx : nullptr);
    model_.beam_y.internal_forces_and_tangent(
        model_.beam_dofs(q, 1),
        out.residual_internal.segment(model_.offset(1), model_.beam_y.n_dofs()),
        need_tangent ? &ky : nullptr);
    if (need_tangent) {
        out.tangent.block(model_.offset(0), model_.offset(0), kx.rows(), kx.cols()) = kx;
        out.tangent.block(model_.offset(1), model_.offset(1), ky.rows(), ky.cols()) = ky;
    }
    if (interaction_enabled_) {
        if (research_pairs)
            refresh_pairs(q);
        else
            grid_.update(model_, q);
        out.stats = assemble_interaction(model_, grid_, pairs_, opts_, out.residual_interaction,
                                         need_tangent ? &out.tangent : nullptr);
    }
    return out;
}

double TwoBeamSystem::total_potential(const Eigen::VectorXd& q) {
    double phi = model_.beam_x.internal_energy(model_.beam_dofs(q, 0)) +
                 model_.beam_y.internal_energy(model_.beam_dofs(q, 1));
    if (interaction_enabled_) {
        refresh_pairs(q);
        for (const auto& [ix, iy] : pairs_) {
            const GridPoint& px = grid_.points()[ix];
            const GridPoint& py = grid_.points()[iy];
            InteractionOptions value_opts = opts_;
            value_opts.moments = false;
            const auto pc = pair_force(px, py, value_opts);
            phi += pc.w * issip_value(pc.kin, opts_.law, opts_.geom);
        }
    }
    return phi;
}

void TwoBeamSystem::reaction_sums(const Eigen::VectorXd& residual, Vec2& beam_x,
                                  Vec2& beam_y) const {
    beam_x.setZero();
    beam_y.setZero();
    const int split = model_.offset(1);
    for (const auto& c : bcs_.constraints) {
        Vec2& target = c.dof < split ? beam_x : beam_y;
        target[c.dof % 2] += residual[c.dof];
    }
}

NewtonStats newton_solve(TwoBeamSystem& system, Eigen::VectorXd& q, double t,
                         const ContinuationConfig& cfg,
                         const std::function<void(int, const Eigen::VectorXd&,
                                                  const InteractionStats&)>& monitor) {
    const Eigen::VectorXd q_entry = q;
    const int n = system.n_dofs();
    const auto mask = system.boundary_conditions().mask(n);
    system.boundary_conditions().apply(q, t);

    const auto free_norms = [&](const TwoBeamSystem::Assembly& a, double& norm_int,
                                double& norm_ia) {
        double ni = 0.0, na = 0.0, nf = 0.0;
        for (int i = 0; i < n; ++i) {
            if (mask[i])
                continue;
            ni += a.residual_internal[i] * a.residual_internal[i];
            na += a.residual_interaction[i] * a.residual_interaction[i];
            const double r = a.residual_internal[i] + a.residual_interaction[i];
            nf += r * r;
        }
        norm_int = std::sqrt(ni);
        norm_ia = std::sqrt(na);
        return std::sqrt(nf);
    };

    NewtonStats stats;
    double scale = cfg.force_scale_floor;
    try {
        bool researched_once = false;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            const bool research = !cfg.freeze_pairs_per_step || !researched_once;
            auto asm_out = system.assemble(q, true, research);
            researched_once = true;
            Eigen::VectorXd residual = asm_out.residual();
            if (monitor)
                monitor(it, residual, asm_out.stats);

            double norm_int = 0.0, norm_ia = 0.0;
            const double norm_free = free_norms(asm_out, norm_int, norm_ia);
            scale = std::max(scale, norm_int + norm_ia);
            const double rel = norm_free / scale;
            stats.history.push_back(rel);
            if (rel <= cfg.newton_tol) {
                stats.iterations = it;
                stats.final_norm = rel;
                stats.interaction = asm_out.stats;
                return stats;
            }

            // Row/column elimination of the constrained DOFs.
            Eigen::MatrixXd k = asm_out.tangent;
            for (int i = 0; i < n; ++i) {
                if (!mask[i])
                    continue;
                k.row(i).setZero();
                k.col(i).setZero();
                k(i, i) = 1.0;
                residual[i] = 0.0;
            }
            const Eigen::VectorXd dq = k.partialPivLu().solve(-residual);
            if (!dq.allFinite())
                throw convergence_error("newton_solve: singular tangent");

            // Backtracking on the free residual norm; an inadmissible trial
            // state (q2 <= 0) also backtracks. Keeps the iteration stable
            // when the residual carries unlinearized (moment) terms. Trials
            // never re-search pairs: the norm comparison needs a fixed set.
            const Eigen::VectorXd q_base = q;
            bool accepted = false;
            double alpha = 1.0;
            for (int ls = 0; ls < 8; ++ls) {
                q = q_base + alpha * dq;
                try {
                    const auto trial = system.assemble(q, false, false);
                    double ti = 0.0, ta = 0.0;
                    const double trial_norm = free_norms(trial, ti, ta);
                    if (trial_norm <= (1.0 - 1e-4 * alpha) * norm_free ||
                        trial_norm <= cfg.newton_tol * scale) {
                        accepted = true;
                        break;
                    }
                } catch (const contact_error&) {
                    // fall through to a shorter step
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                q = q_base;
                throw convergence_error("newton_solve: line search failed to reduce the residual");
            }
        }
    } catch (...) {
        q = q_entry;
        throw;
    }
    q = q_entry;
    throw convergence_error("newton_solve: no convergence within iteration cap");
}

bool pseudo_transient_relax(TwoBeamSystem& system, Eigen::VectorXd& q, double t,
                            const ContinuationConfig& cfg, int max_iterations) {
    const Eigen::VectorXd q_entry = q;
    const int n = system.n_dofs();
    const auto mask = system.boundary_conditions().mask(n);
    system.boundary_conditions().apply(q, t);

    double scale = cfg.force_scale_floor;
    double lambda_rel = 1e-3;
    double prev_norm = std::numeric_limits<double>::infinity();
    try {
        for (int it = 0; it < max_iterations; ++it) {
            TwoBeamSystem::Assembly asm_out;
            try {
                asm_out = system.assemble(q, true, it == 0);
            } catch (const contact_error&) {
                q = q_entry;
                return false;
            }
            Eigen::VectorXd residual = asm_out.residual();
            double norm_int = 0.0, norm_ia = 0.0, norm_free = 0.0;
            for (int i = 0; i < n; ++i) {
                if (mask[i])
                    continue;
                norm_int += asm_out.residual_internal[i] * asm_out.residual_internal[i];
                norm_ia += asm_out.residual_interaction[i] * asm_out.residual_interaction[i];
                norm_free += residual[i] * residual[i];
            }
            scale = std::max(scale, std::sqrt(norm_int) + std::sqrt(norm_ia));
            norm_free = std::sqrt(norm_free);
            if (norm_free / scale <= cfg.newton_tol)
                return true;

            Eigen::MatrixXd k = asm_out.tangent;
            const double lambda = lambda_rel * k.diagonal().cwiseAbs().mean();
            for (int i = 0; i < n; ++i) {
                if (mask[i]) {
                    k.row(i).setZero();
                    k.col(i).setZero();
                    k(i, i) = 1.0;
                    residual[i] = 0.0;
                } else {
                    k(i, i) += lambda;
                }
            }
            const Eigen::VectorXd dq = k.partialPivLu().solve(-residual);
            if (!dq.allFinite()) {
                q = q_entry;
                return false;
            }
            // Contact backtracking only; the damped update may legitimately
            // raise the static residual while sliding downhill.
            double alpha = 1.0;
            for (int bt = 0; bt < 12; ++bt) {
                try {
                    system.assemble(q + alpha * dq, false, false);
                    break;
                } catch (const contact_error&) {
                    alpha *= 0.5;
                }
            }
            q += alpha * dq;
            // Switching-evolution relaxation of the damping.
            if (norm_free < prev_norm)
                lambda_rel = std::max(1e-10, lambda_rel * 0.6);
            else
                lambda_rel = std::min(1e2, lambda_rel * 4.0);
            prev_norm = norm_free;
        }
    } catch (const error&) {
        q = q_entry;
        return false;
    }
    q = q_entry;
    return false;
}

std::vector<std::pair<int, double>> reaction_recovery(TwoBeamSystem& system,
                                                      const Eigen::VectorXd& q) {
    auto asm_out = system.assemble(q, false);
    const Eigen::VectorXd residual = asm_out.residual();
    std::vector<std::pair<int, double>> reactions;
    reactions.reserve(system.boundary_conditions().constraints.size());
    for (const auto& c : system.boundary_conditions().constraints)
        reactions.emplace_back(c.dof, residual[c.dof]);
    return reactions;
}

namespace {

PathPoint record_point(TwoBeamSystem& system, const Eigen::VectorXd& q, double t,
                       int iterations, bool post_snap) {
    auto asm_out = system.assemble(q, false);
    PathPoint p;
    p.t = t;
    p.iterations = iterations;
    p.post_snap = post_snap;
    system.reaction_sums(asm_out.residual(), p.reaction_x, p.reaction_y);
    return p;
}

}  // namespace

EquilibriumPath adaptive_march(
    TwoBeamSystem& system, Eigen::VectorXd& q, const ContinuationConfig& cfg,
    const std::function<void(const PathPoint&, const Eigen::VectorXd&)>& on_accept) {
    EquilibriumPath path;
    double t = cfg.t_start;
    {
        const auto stats = newton_solve(system, q, t, cfg);
        path.total_newton_iterations += static_cast<int>(stats.history.size());
        const auto p = record_point(system, q, t, stats.iterations, false);
        path.points.push_back(p);
        if (on_accept)
            on_accept(p, q);
    }
    StepController controller(cfg);
    int fail_streak = 0;
    while (t < cfg.t_end - 1e-14) {
        const double dt = std::min(controller.step(), cfg.t_end - t);
        try {
            const auto stats = newton_solve(system, q, t + dt, cfg);
            path.total_newton_iterations += static_cast<int>(stats.history.size());
            t += dt;
            const auto p = record_point(system, q, t, stats.iterations, false);
            path.points.push_back(p);
            if (on_accept)
                on_accept(p, q);
            controller.on_converged(stats.iterations);
            fail_streak = 0;
        } catch (const error&) {
            ++fail_streak;
            bool recovered = false;
            if (fail_streak >= 4) {
                // Shrinking converges into a local limit point (snapping
                // detachment); leap across the unstable region instead. The
                // ladder is anchored on the nominal step so nearby post-fold
                // basins are not overshot.
                for (const double factor : {2.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 64.0}) {
                    const double leap = std::min(factor * cfg.initial_step, cfg.t_end - t);
                    if (leap <= dt)
                        continue;
                    try {
                        const auto stats = newton_solve(system, q, t + leap, cfg);
                        path.total_newton_iterations += static_cast<int>(stats.history.size());
                        t += leap;
                        const auto p = record_point(system, q, t, stats.iterations, false);
                        path.points.push_back(p);
                        if (on_accept)
                            on_accept(p, q);
                        controller = StepController(cfg);
                        fail_streak = 0;
                        recovered = true;
                        break;
                    } catch (const error&) {
                    }
                }
                if (!recovered) {
                    // Last resort: damped relaxation slides across the fold.
                    for (const double factor : {1.0, 4.0, 16.0}) {
                        const double adv = std::min(factor * cfg.initial_step, cfg.t_end - t);
                        Eigen::VectorXd relaxed = q;
                        if (!pseudo_transient_relax(system, relaxed, t + adv, cfg))
                            continue;
                        q = relaxed;
                        t += adv;
                        const auto p = record_point(system, q, t, cfg.max_iterations, false);
                        path.points.push_back(p);
                        if (on_accept)
                            on_accept(p, q);
                        controller = StepController(cfg);
                        fail_streak = 0;
                        recovered = true;
                        break;
                    }
                }
                if (!recovered) {
                    path.status = MarchStatus::stalled;
                    break;
                }
            }
            if (!recovered && !controller.on_failure()) {
                path.status = MarchStatus::stalled;
                break;
            }
        }
    }
    path.t_last = t;
    return path;
}

bool snap_off(TwoBeamSystem& system, Eigen::VectorXd& q, double t,
              const ContinuationConfig& cfg) {
    system.set_interaction_enabled(false);
    ContinuationConfig relaxed = cfg;
    relaxed.max_iterations = std::max(cfg.max_iterations, 100);
    bool ok = false;
    try {
        newton_solve(system, q, t, relaxed);
        ok = true;
    } catch (const error&) {
        // Fall back to a support-interpolated straight configuration.
        Eigen::VectorXd guess = Eigen::VectorXd::Zero(system.n_dofs());
        system.boundary_conditions().apply(guess, t);
        for (int beam_id = 0; beam_id < 2; ++beam_id) {
            const BSplineBeam& beam = system.model().beam(beam_id);
            const int off = system.model().offset(beam_id);
            const auto greville = greville_abscissae(beam.degree(), beam.knots());
            const int last = beam.n_cp() - 1;
            const Vec2 u0(guess[off], guess[off + 1]);
            const Vec2 u1(guess[off + 2 * last], guess[off + 2 * last + 1]);
            for (int i = 0; i <= last; ++i) {
                const Vec2 ui = u0 + greville[i] * (u1 - u0);
                guess[off + 2 * i] = ui[0];
                guess[off + 2 * i + 1] = ui[1];
            }
        }
        try {
            newton_solve(system, guess, t, relaxed);
            q = guess;
            ok = true;
        } catch (const error&) {
            ok = false;
        }
    }
    system.set_interaction_enabled(true);
    return ok;
}

}  // namespace fibint
