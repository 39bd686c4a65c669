#include "fibint/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace fibint {

namespace {

std::int64_t cell_key(int cx, int cy) {
    return (static_cast<std::int64_t>(cx) << 32) ^
           static_cast<std::int64_t>(static_cast<std::uint32_t>(cy));
}

// Largest-remainder apportionment of n_total points over the element spans.
std::vector<int> apportion(const std::vector<double>& spans, int n_total) {
    const double total = std::accumulate(spans.begin(), spans.end(), 0.0);
    std::vector<int> counts(spans.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t e = 0; e < spans.size(); ++e) {
        const double exact = n_total * spans[e] / total;
        counts[e] = static_cast<int>(std::floor(exact));
        assigned += counts[e];
        remainders.emplace_back(exact - counts[e], e);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return a.second < b.second;
    });
    for (int i = 0; i < n_total - assigned; ++i)
        counts[remainders[i % remainders.size()].second] += 1;
    return counts;
}

}  // namespace

InteractionGrid::InteractionGrid(const TwoBeamModel& model, double density) : density_(density) {
    if (density < 1.0)
        throw domain_error("InteractionGrid: density must be >= 1");
    for (int beam_id = 0; beam_id < 2; ++beam_id) {
        const BSplineBeam& beam = model.beam(beam_id);
        const int n_total =
            static_cast<int>(std::ceil(beam.reference_length() * density));
        std::vector<double> spans(beam.n_elements());
        std::vector<double> xi0s(beam.n_elements());
        for (int e = 0; e < beam.n_elements(); ++e) {
            double xi0, xi1;
            element_span(beam.degree(), beam.knots(), e, xi0, xi1);
            spans[e] = xi1 - xi0;
            xi0s[e] = xi0;
        }
        const auto counts = apportion(spans, n_total);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(beam.n_dofs());
        int added = 0;
        for (int e = 0; e < beam.n_elements(); ++e) {
            const double h = spans[e] / counts[e];
            for (int k = 0; k < counts[e]; ++k) {
                GridPoint gp;
                gp.beam = beam_id;
                gp.xi = xi0s[e] + (k + 0.5) * h;
                gp.weight = h;
                const BasisEval be = beam.basis(gp.xi, 1);
                gp.first_cp = be.first_index;
                gp.N = be.ders[0];
                gp.dN = be.ders[1];
                gp.sqrt_g_ref = beam.axis_metric(zero, gp.xi).sqrt_g;
                gp.s_ref = beam.reference_arc_coord(gp.xi);
                points_.push_back(std::move(gp));
                ++added;
            }
        }
        if (beam_id == 0)
            n_x_ = added;
        else
            n_y_ = added;
    }
}

void InteractionGrid::update(const TwoBeamModel& model, const Eigen::VectorXd& q) {
    for (auto& gp : points_) {
        const BSplineBeam& beam = model.beam(gp.beam);
        const int off = model.offset(gp.beam);
        const auto& cps = beam.control_points();
        Vec2 x = Vec2::Zero(), x1 = Vec2::Zero();
        for (int j = 0; j <= beam.degree(); ++j) {
            const int cp = gp.first_cp + j;
            const Vec2 p = cps[cp] + Vec2(q[off + 2 * cp], q[off + 2 * cp + 1]);
            x += gp.N[j] * p;
            x1 += gp.dN[j] * p;
        }
        gp.position = x;
        gp.frame.position = x;
        gp.frame.sqrt_g = x1.norm();
        if (gp.frame.sqrt_g < 1e-12)
            throw degenerate_error("InteractionGrid: vanishing tangent at quadrature point");
        gp.frame.t = x1 / gp.frame.sqrt_g;
        gp.frame.n = rot90(gp.frame.t);
    }
}

InteractionGrid build_grid(const TwoBeamModel& model, const Eigen::VectorXd& q, double density) {
    InteractionGrid grid(model, density);
    grid.update(model, q);
    return grid;
}

PairList find_pairs(const InteractionGrid& grid, double cutoff) {
    if (!(cutoff > 0.0))
        throw domain_error("find_pairs: cutoff must be positive");
    const auto& pts = grid.points();
    std::unordered_map<std::int64_t, std::vector<std::int32_t>> cells;
    cells.reserve(static_cast<std::size_t>(grid.count(1)) * 2);
    for (int i = grid.first(1); i < grid.first(1) + grid.count(1); ++i) {
        const Vec2& p = pts[i].position;
        cells[cell_key(static_cast<int>(std::floor(p[0] / cutoff)),
                       static_cast<int>(std::floor(p[1] / cutoff)))]
            .push_back(i);
    }
    PairList pairs;
    const double c2 = cutoff * cutoff;
    for (int i = 0; i < grid.count(0); ++i) {
        const Vec2& p = pts[i].position;
        const int cx = static_cast<int>(std::floor(p[0] / cutoff));
        const int cy = static_cast<int>(std::floor(p[1] / cutoff));
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                const auto it = cells.find(cell_key(cx + dx, cy + dy));
                if (it == cells.end())
                    continue;
                for (const std::int32_t j : it->second) {
                    if ((pts[j].position - p).squaredNorm() <= c2)
                        pairs.emplace_back(i, j);
                }
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

namespace {

struct PairTangent {
    Mat2 B_xu;   ///< d f / d u   (positions, beam x); beam y is the negative
    Mat2 B_xu1;  ///< d f / d u_,1
    Mat2 B_yv1;  ///< d f / d v_,1
    // Partial linearization of the moment terms (couple scalar only; the
    // frame variation of n/sqrt_g is not linearized). Row direction is
    // n_j dN, columns follow the gap/offset gradients.
    bool with_moments = false;
    double mom_row_x = 0.0;  ///< w_x / sqrt_g_x prefactor
    double mom_row_y = 0.0;  ///< w_y / sqrt_g_y prefactor
    Vec2 dcouple_du;         ///< d(couple)/d(u) through q1, q2
    Vec2 dcouple_du1;        ///< d(couple)/d(u_,1) through q1, q2
    Vec2 dcouple_dv1;        ///< d(couple)/d(v_,1) through q1, q2
};

PairContribution evaluate_pair(const GridPoint& px, const GridPoint& py,
                               const InteractionOptions& opts, const CompiledLaw& law,
                               PairTangent* tangent) {
    PairContribution out;
    out.kin.s_alpha = 1.0;
    const Vec2 d = px.position - py.position;

    Vec2 t_ref, n_ref;
    AveragedFrame avg;
    if (opts.formulation == Formulation::averaged) {
        avg = averaged_frame<double>(px.frame.t, py.frame.t);
        t_ref = avg.t_hat;
        n_ref = avg.n_hat;
    } else {
        t_ref = px.frame.t;
        n_ref = px.frame.n;
    }
    out.kin = gap_offset<double>(t_ref, n_ref, d, opts.geom);
    PotentialFirstDerivs derivs;
    PotentialSecondDerivs second;
    if (tangent)
        law.all_derivs(out.kin, derivs, second);
    else
        law.first_derivs(out.kin, derivs);
    out.f = derivs.phi_1 * t_ref + derivs.phi_2 * out.kin.s_alpha * n_ref;
    out.w = px.weight * py.weight * px.sqrt_g_ref * py.sqrt_g_ref;

    if (opts.moments) {
        const double couple =
            out.kin.s_alpha * (derivs.phi_1 * out.kin.q2_hat - derivs.phi_2 * out.kin.q1);
        if (opts.formulation == Formulation::straightforward) {
            out.fhat_x = couple / px.frame.sqrt_g;
            out.fhat_y = 0.0;
        } else {
            const auto [w_mx, w_my] = moment_weights(opts.geom);
            out.fhat_x = w_mx * couple / px.frame.sqrt_g;
            out.fhat_y = w_my * couple / py.frame.sqrt_g;
        }
    }
    if (!tangent)
        return out;
    if (opts.formulation != Formulation::averaged)
        throw domain_error("assemble_interaction: tangent available for the averaged "
                           "formulation only");

    GapOffsetGradients grads;
    gradients_averaged(px.frame, py.frame, avg, d, out.kin, grads);
    const Mat2 p_x = unit_tangent_gradient(px.frame, false);
    const Mat2 p_y = unit_tangent_gradient(py.frame, avg.flipped);
    const Mat2 m_x = averaged_tangent_gradient(avg, p_x);
    const Mat2 m_y = averaged_tangent_gradient(avg, p_y);

    const Vec2 a1 = second.phi_11 * t_ref + out.kin.s_alpha * second.phi_12 * n_ref;
    const Vec2 a2 = second.phi_12 * t_ref + out.kin.s_alpha * second.phi_22 * n_ref;
    const Mat2 a_mat =
        derivs.phi_1 * Mat2::Identity() + derivs.phi_2 * out.kin.s_alpha * rotation_90();

    tangent->B_xu = a1 * grads.dq1_dx.transpose() + a2 * grads.dq2_dx.transpose();
    tangent->B_xu1 =
        a1 * grads.dq1_dx1.transpose() + a2 * grads.dq2_dx1.transpose() + a_mat * m_x;
    tangent->B_yv1 =
        a1 * grads.dq1_dy1.transpose() + a2 * grads.dq2_dy1.transpose() + a_mat * m_y;

    tangent->with_moments = opts.moments;
    if (opts.moments) {
        const auto [w_mx, w_my] = moment_weights(opts.geom);
        const double s = out.kin.s_alpha;
        // couple = s_a (phi_1 q2_hat - phi_2 q1); derivatives through the
        // potential arguments only.
        const double dc_dq1 =
            s * (second.phi_11 * out.kin.q2_hat - second.phi_12 * out.kin.q1 - derivs.phi_2);
        const double dc_dq2 =
            s * (second.phi_12 * out.kin.q2_hat + derivs.phi_1 - second.phi_22 * out.kin.q1);
        tangent->mom_row_x = w_mx / px.frame.sqrt_g;
        tangent->mom_row_y = w_my / py.frame.sqrt_g;
        tangent->dcouple_du = dc_dq1 * grads.dq1_dx + dc_dq2 * grads.dq2_dx;
        tangent->dcouple_du1 = dc_dq1 * grads.dq1_dx1 + dc_dq2 * grads.dq2_dx1;
        tangent->dcouple_dv1 = dc_dq1 * grads.dq1_dy1 + dc_dq2 * grads.dq2_dy1;
    }
    return out;
}

void scatter_pair(const TwoBeamModel& model, const GridPoint& px, const GridPoint& py,
                  const PairContribution& pc, const PairTangent* tangent, bool moments,
                  Eigen::VectorXd& residual, Eigen::MatrixXd* K) {
    const int off_x = model.offset(0), off_y = model.offset(1);
    const int deg_x = model.beam_x.degree(), deg_y = model.beam_y.degree();
    const double w = pc.w;
    for (int j = 0; j <= deg_x; ++j) {
        const int row = off_x + 2 * (px.first_cp + j);
        residual[row] += w * px.N[j] * pc.f[0];
        residual[row + 1] += w * px.N[j] * pc.f[1];
        if (moments) {
            residual[row] += w * pc.fhat_x * px.dN[j] * px.frame.n[0];
            residual[row + 1] += w * pc.fhat_x * px.dN[j] * px.frame.n[1];
        }
    }
    for (int j = 0; j <= deg_y; ++j) {
        const int row = off_y + 2 * (py.first_cp + j);
        residual[row] -= w * py.N[j] * pc.f[0];
        residual[row + 1] -= w * py.N[j] * pc.f[1];
        if (moments && pc.fhat_y != 0.0) {
            residual[row] += w * pc.fhat_y * py.dN[j] * py.frame.n[0];
            residual[row + 1] += w * pc.fhat_y * py.dN[j] * py.frame.n[1];
        }
    }
    if (!K)
        return;
    // Columns: beam-x DOF (l, beta) sees B_xu N_l + B_xu1 N_l';
    // beam-y DOF sees -B_xu N_l + B_yv1 N_l'. Rows scatter with +w N_i on
    // beam x and -w N_j on beam y.
    Mat2 col_x, col_y;
    for (int l = 0; l <= deg_x; ++l) {
        const int col = off_x + 2 * (px.first_cp + l);
        col_x = tangent->B_xu * px.N[l] + tangent->B_xu1 * px.dN[l];
        for (int i = 0; i <= deg_x; ++i) {
            const int row = off_x + 2 * (px.first_cp + i);
            const double wi = w * px.N[i];
            for (int alpha = 0; alpha < 2; ++alpha)
                for (int beta = 0; beta < 2; ++beta)
                    (*K)(row + alpha, col + beta) += wi * col_x(alpha, beta);
        }
        for (int j = 0; j <= deg_y; ++j) {
            const int row = off_y + 2 * (py.first_cp + j);
            const double wj = w * py.N[j];
            for (int alpha = 0; alpha < 2; ++alpha)
                for (int beta = 0; beta < 2; ++beta)
                    (*K)(row + alpha, col + beta) -= wj * col_x(alpha, beta);
        }
    }
    for (int l = 0; l <= deg_y; ++l) {
        const int col = off_y + 2 * (py.first_cp + l);
        col_y = -tangent->B_xu * py.N[l] + tangent->B_yv1 * py.dN[l];
        for (int i = 0; i <= deg_x; ++i) {
            const int row = off_x + 2 * (px.first_cp + i);
            const double wi = w * px.N[i];
            for (int alpha = 0; alpha < 2; ++alpha)
                for (int beta = 0; beta < 2; ++beta)
                    (*K)(row + alpha, col + beta) += wi * col_y(alpha, beta);
        }
        for (int j = 0; j <= deg_y; ++j) {
            const int row = off_y + 2 * (py.first_cp + j);
            const double wj = w * py.N[j];
            for (int alpha = 0; alpha < 2; ++alpha)
                for (int beta = 0; beta < 2; ++beta)
                    (*K)(row + alpha, col + beta) -= wj * col_y(alpha, beta);
        }
    }
    if (!moments || !tangent->with_moments)
        return;
    // Partial moment linearization: rows follow the couple scatter direction
    // n_j dN, columns the gap/offset gradients of the couple scalar.
    const auto mom_rows = [&](auto&& emit) {
        for (int i = 0; i <= deg_x; ++i) {
            const double c = w * tangent->mom_row_x * px.dN[i];
            const int row = off_x + 2 * (px.first_cp + i);
            emit(row, c * px.frame.n[0], c * px.frame.n[1]);
        }
        for (int j = 0; j <= deg_y; ++j) {
            const double c = w * tangent->mom_row_y * py.dN[j];
            const int row = off_y + 2 * (py.first_cp + j);
            emit(row, c * py.frame.n[0], c * py.frame.n[1]);
        }
    };
    mom_rows([&](int row, double r0, double r1) {
        for (int l = 0; l <= deg_x; ++l) {
            const int col = off_x + 2 * (px.first_cp + l);
            for (int beta = 0; beta < 2; ++beta) {
                const double dc =
                    tangent->dcouple_du[beta] * px.N[l] + tangent->dcouple_du1[beta] * px.dN[l];
                (*K)(row, col + beta) += r0 * dc;
                (*K)(row + 1, col + beta) += r1 * dc;
            }
        }
        for (int l = 0; l <= deg_y; ++l) {
            const int col = off_y + 2 * (py.first_cp + l);
            for (int beta = 0; beta < 2; ++beta) {
                const double dc = -tangent->dcouple_du[beta] * py.N[l] +
                                  tangent->dcouple_dv1[beta] * py.dN[l];
                (*K)(row, col + beta) += r0 * dc;
                (*K)(row + 1, col + beta) += r1 * dc;
            }
        }
    });
}

}  // namespace

PairContribution pair_force(const GridPoint& px, const GridPoint& py,
                            const InteractionOptions& opts) {
    const CompiledLaw law(opts.law, opts.geom);
    auto pc = evaluate_pair(px, py, opts, law, nullptr);
    pc.ix = -1;
    pc.iy = -1;
    return pc;
}

InteractionStats assemble_interaction(const TwoBeamModel& model, const InteractionGrid& grid,
                                      const PairList& pairs, const InteractionOptions& opts,
                                      Eigen::VectorXd& residual, Eigen::MatrixXd* tangent) {
    const int n = model.n_dofs();
    const int n_threads = std::max(1, opts.threads);
    InteractionStats stats;
    stats.n_pairs = pairs.size();
    stats.min_gap = std::numeric_limits<double>::infinity();
    if (pairs.empty()) {
        if (stats.n_pairs == 0)
            stats.min_gap = 0.0;
        return stats;
    }

    struct Accum {
        Eigen::VectorXd r;
        Eigen::MatrixXd k;
        Vec2 fx = Vec2::Zero();
        Vec2 fy = Vec2::Zero();
        double min_gap = std::numeric_limits<double>::infinity();
        std::exception_ptr err;
    };
    std::vector<Accum> acc(n_threads);
    const CompiledLaw compiled(opts.law, opts.geom);

    auto worker = [&](int tid, std::size_t begin, std::size_t end) {
        Accum& a = acc[tid];
        a.r.setZero(n);
        if (tangent)
            a.k.setZero(n, n);
        try {
            PairTangent pt;
            for (std::size_t idx = begin; idx < end; ++idx) {
                const auto& [ix, iy] = pairs[idx];
                const GridPoint& px = grid.points()[ix];
                const GridPoint& py = grid.points()[iy];
                PairContribution pc =
                    evaluate_pair(px, py, opts, compiled, tangent ? &pt : nullptr);
                pc.ix = ix;
                pc.iy = iy;
                scatter_pair(model, px, py, pc, tangent ? &pt : nullptr, opts.moments, a.r,
                             tangent ? &a.k : nullptr);
                a.fx += pc.w * pc.f;
                a.fy -= pc.w * pc.f;
                a.min_gap = std::min(a.min_gap, pc.kin.q2);
            }
        } catch (...) {
            a.err = std::current_exception();
        }
    };

    if (n_threads == 1) {
        worker(0, 0, pairs.size());
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (pairs.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const std::size_t begin = std::min(pairs.size(), t * chunk);
            const std::size_t end = std::min(pairs.size(), begin + chunk);
            threads.emplace_back(worker, t, begin, end);
        }
        for (auto& th : threads)
            th.join();
    }
    // Deterministic merge in thread order.
    for (int t = 0; t < n_threads; ++t) {
        if (acc[t].err)
            std::rethrow_exception(acc[t].err);
        if (acc[t].r.size() == 0)
            continue;
        residual += acc[t].r;
        if (tangent)
            *tangent += acc[t].k;
        stats.total_force_x += acc[t].fx;
        stats.total_force_y += acc[t].fy;
        stats.min_gap = std::min(stats.min_gap, acc[t].min_gap);
    }
    return stats;
}

double cutoff_error_estimate(double q2, const CompositeLaw& law, const SectionPairGeometry& geom,
                             double cutoff) {
    if (!(q2 > 0.0))
        throw domain_error("cutoff_error_estimate: q2 must be positive");
    if (!(cutoff > 0.0))
        throw domain_error("cutoff_error_estimate: cutoff must be positive");
    const double q2_hat = q2 + geom.radius_sum();
    const double exact = cylinder_per_length_dq2(q2, law, geom);
    if (cutoff <= q2_hat)
        return 1.0;  // the window is empty: full truncation
    const double w = std::sqrt(cutoff * cutoff - q2_hat * q2_hat);
    const auto integrand = [&](double q1) {
        SectionKinematics kin;
        kin.q1 = q1;
        kin.q2 = q2;
        kin.q2_hat = q2_hat;
        kin.s_alpha = 1.0;
        return issip_first_derivs(kin, law, geom).phi_2;
    };
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-14 * std::abs(exact);
    const double truncated = 2.0 * integrate_adaptive(integrand, 0.0, w, spec);
    return std::abs(truncated - exact) / std::abs(exact);
}

}  // namespace fibint
