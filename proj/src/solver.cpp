#include "maext/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "maext/error.hpp"

namespace maext {

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Exists: return "Exists";
        case Classification::FailsBoundary: return "FailsBoundary";
        case Classification::NotConverged: return "NotConverged";
    }
    return "?";
}

double outer_value(const QuadraticAsymptote& q, const Vector& x, OuterMode mode, double d_coef) {
    double v = q.eval(x);
    if (mode == OuterMode::Corrected && d_coef != 0.0)
        v += d_coef * std::pow(norm2(x), 2 - q.n);
    return v;
}

void apply_outer_data(GridField& u, const QuadraticAsymptote& q, OuterMode mode, double d_coef) {
    const AnnularGrid& g = u.grid();
    for (std::int64_t b : g.outer_boxes()) u.at_box(b) = outer_value(q, g.coords(b), mode, d_coef);
}

Classification classify_existence(double ma_residual, double boundary_residual, double tol_b,
                                  double tol_ma, bool converged) {
    if (!converged) return Classification::NotConverged;
    if (ma_residual <= tol_ma)
        return boundary_residual <= tol_b ? Classification::Exists
                                          : Classification::FailsBoundary;
    return Classification::NotConverged;
}

namespace {

// Precomputed sweep acceleration: most interior nodes have all stencil arms
// landing on stored nodes ("clean"); only the layer near the inner boundary
// needs cut-cell data, which is frozen for the whole solve.
struct SweepPlan {
    struct CutArm {
        double inv_theta;   // 1/theta
        double phi_over_t;  // phi(point)/theta
    };
    std::vector<std::int64_t> dir_offset;   // box offset per direction
    std::vector<double> inv_h2e2;           // 1/(h^2 |v|^2) per direction
    std::vector<std::uint8_t> clean;        // per interior node
    // arm tables for dirty nodes: key = interior index; per dir, +/- entries
    std::map<std::int64_t, std::vector<CutArm>> dirty;  // size 2*ndirs, inv_theta=0 => plain
    std::vector<double> rhs;                // g at interior nodes
    std::vector<std::vector<std::int64_t>> colors;  // interior indices by 3^n color

    SweepPlan(const ProblemSpec& p, const AnnularGrid& g, const StencilDictionary& d,
              const BoundaryBinding& bind) {
        const int n = g.dim();
        const std::size_t nd = d.directions.size();
        dir_offset.resize(nd);
        inv_h2e2.resize(nd);
        std::vector<std::int64_t> strides(n, 1);
        for (int a = n - 2; a >= 0; --a) strides[a] = strides[a + 1] * g.extent();
        for (std::size_t j = 0; j < nd; ++j) {
            std::int64_t off = 0;
            for (int a = 0; a < n; ++a) off += static_cast<std::int64_t>(d.directions[j][a]) * strides[a];
            dir_offset[j] = off;
            inv_h2e2[j] = 1.0 / (g.spacing() * g.spacing() * d.dir_norm2[j]);
        }

        const auto& interior = g.interior_boxes();
        clean.assign(interior.size(), 1);
        rhs.resize(interior.size());
        colors.assign(static_cast<std::size_t>(std::pow(3, n)), {});
        std::vector<int> idx(n);
        for (std::size_t i = 0; i < interior.size(); ++i) {
            const std::int64_t box = interior[i];
            rhs[i] = p.g.eval(g.coords(box));
            g.multi_index(box, idx);
            int color = 0;
            for (int a = 0; a < n; ++a) color = color * 3 + ((idx[a] % 3) + 3) % 3;
            colors[color].push_back(static_cast<std::int64_t>(i));

            std::vector<CutArm> arms;
            bool is_clean = true;
            for (std::size_t j = 0; j < nd && is_clean; ++j)
                for (int s : {+1, -1}) {
                    const auto hit = g.resolve_arm(box, d.directions[j].data(), n, s);
                    if (hit.crosses) {
                        is_clean = false;
                        break;
                    }
                }
            if (!is_clean) {
                arms.resize(2 * nd);
                for (std::size_t j = 0; j < nd; ++j)
                    for (int si = 0; si < 2; ++si) {
                        const int s = si == 0 ? +1 : -1;
                        const auto hit = g.resolve_arm(box, d.directions[j].data(), n, s);
                        CutArm& a = arms[2 * j + si];
                        if (hit.crosses) {
                            const double th = std::max(hit.theta, 1e-10);
                            a.inv_theta = 1.0 / th;
                            a.phi_over_t = bind.eval(hit.point) / th;
                        } else {
                            a.inv_theta = 0;
                            a.phi_over_t = 0;
                        }
                    }
                clean[i] = 0;
                dirty.emplace(static_cast<std::int64_t>(i), std::move(arms));
            }
        }
    }
};

// assemble the affine second-difference coefficients at one node
inline void assemble_node(const SweepPlan& plan, const GridField& u, const AnnularGrid& g,
                          std::int64_t box, std::int64_t interior_idx, NodeOperator& op) {
    const std::size_t nd = plan.dir_offset.size();
    op.a.resize(nd);
    op.b.resize(nd);
    if (plan.clean[interior_idx]) {
        for (std::size_t j = 0; j < nd; ++j) {
            const double vp = u[g.stored_id(box + plan.dir_offset[j])];
            const double vm = u[g.stored_id(box - plan.dir_offset[j])];
            op.a[j] = (vp + vm) * plan.inv_h2e2[j];
            op.b[j] = 2.0 * plan.inv_h2e2[j];
        }
        return;
    }
    const auto& arms = plan.dirty.at(interior_idx);
    for (std::size_t j = 0; j < nd; ++j) {
        double val_over_t[2], inv_t[2];
        for (int si = 0; si < 2; ++si) {
            const auto& arm = arms[2 * j + si];
            if (arm.inv_theta == 0) {
                const std::int64_t nb = si == 0 ? box + plan.dir_offset[j] : box - plan.dir_offset[j];
                val_over_t[si] = u[g.stored_id(nb)];
                inv_t[si] = 1.0;
            } else {
                val_over_t[si] = arm.phi_over_t;
                inv_t[si] = arm.inv_theta;
            }
        }
        const double k = 2.0 * plan.inv_h2e2[j] / (1.0 / inv_t[0] + 1.0 / inv_t[1]);
        op.a[j] = k * (val_over_t[0] + val_over_t[1]);
        op.b[j] = k * (inv_t[0] + inv_t[1]);
    }
}

// Attachment of the field to the inner Dirichlet data: at every axis-arm
// crossing, quadratically extrapolate u from the three nodes behind the arm
// to the exact intersection and compare with phi.  Axis arms keep the
// extrapolation short and well conditioned (and exact for quadratics); wide
// diagonal arms would amplify the extrapolation error by |v|^2.
double inner_boundary_residual(const GridField& u) {
    const AnnularGrid& g = u.grid();
    const int n = g.dim();
    double worst = 0;
    std::vector<int> dir(n, 0);
    for (std::int64_t box : g.interior_boxes()) {
        for (int axis = 0; axis < n; ++axis) {
            std::fill(dir.begin(), dir.end(), 0);
            dir[axis] = 1;
            for (int s : {+1, -1}) {
                const auto hit = g.resolve_arm(box, dir.data(), n, s);
                if (!hit.crosses) continue;
                const std::int64_t b1 = g.offset_box(box, dir.data(), n, -s);
                if (b1 < 0 || g.node_class(b1) == NodeClass::Excluded ||
                    g.node_class(b1) == NodeClass::InnerBoundary)
                    continue;
                const std::int64_t b2 = g.offset_box(b1, dir.data(), n, -s);
                if (b2 < 0 || g.node_class(b2) == NodeClass::Excluded ||
                    g.node_class(b2) == NodeClass::InnerBoundary)
                    continue;
                const double th = hit.theta;
                const double u0 = u.at_box(box);
                const double u1 = u[g.stored_id(b1)];
                const double u2 = u[g.stored_id(b2)];
                const double pred = 0.5 * (th + 1) * (th + 2) * u0 - th * (th + 2) * u1 +
                                    0.5 * th * (th + 1) * u2;
                worst = std::max(worst, std::fabs(pred - u.binding()->eval(hit.point)));
            }
        }
    }
    return worst;
}

SolveReport run_sweeps(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                       const StencilDictionary& d, const SolveOptions& opts, OuterMode mode,
                       double d_coef) {
    const AnnularGrid& g = *grid;
    auto binding = std::make_shared<const BoundaryBinding>(p.phi, p.domain);
    const SweepPlan plan(p, g, d, *binding);

    GridField u(grid, 0.0, binding);
    if (opts.initial) {
        if (!opts.initial->same_grid(u)) throw InvalidArgument("initial field grid mismatch");
        for (std::int64_t i = 0; i < u.size(); ++i) u[i] = (*opts.initial)[i];
    } else {
        for (std::int64_t b : g.stored_boxes()) u.at_box(b) = p.asymptote.eval(g.coords(b));
        // cosmetic ghost values: boundary data at the radial projection
        for (std::int64_t b : g.inner_ghost_boxes())
            u.at_box(b) = binding->eval(p.domain.ray_boundary_point(g.coords(b)));
    }
    apply_outer_data(u, p.asymptote, mode, d_coef);

    SolveReport rep{std::move(u)};
    GridField& field = rep.field;

    const auto& interior = g.interior_boxes();
    NodeOperator op;
    op.dict = &d;
    op.floor_delta = opts.floor_delta;
    op.penalty = 1.0 / g.spacing();

    bool converged = false;
    int sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        const double omega = sweep < opts.warmup_sweeps ? 1.0 : opts.omega;
        double sup_change = 0;
        const bool forward = (sweep % 2 == 0);
        for (std::size_t ci = 0; ci < plan.colors.size(); ++ci) {
            const auto& color = plan.colors[forward ? ci : plan.colors.size() - 1 - ci];
            for (std::size_t k = 0; k < color.size(); ++k) {
                const std::int64_t i = color[forward ? k : color.size() - 1 - k];
                const std::int64_t box = interior[i];
                assemble_node(plan, field, g, box, i, op);
                double& uv = field[g.stored_id(box)];
                const double root = op.solve_for(plan.rhs[i], uv);
                const double delta = root - uv;
                sup_change = std::max(sup_change, std::fabs(delta));
                uv += omega * delta;
            }
        }
        if (opts.log_sweeps) rep.sweep_changes.push_back(sup_change);
        if (sup_change <= opts.sweep_tol) {
            converged = true;
            ++sweep;
            break;
        }
    }
    rep.iterations = sweep;
    rep.fitted_correction = d_coef;

    // residuals on the converged field
    double ma_res = 0;
    for (std::size_t i = 0; i < interior.size(); ++i) {
        assemble_node(plan, field, g, interior[i], static_cast<std::int64_t>(i), op);
        ma_res = std::max(ma_res,
                          std::fabs(op.eval(field.at_box(interior[i])).first - plan.rhs[i]));
    }
    rep.ma_residual = ma_res;
    rep.boundary_residual = inner_boundary_residual(field);

    rep.tol_b = opts.tol_b > 0 ? opts.tol_b : 10.0 * g.spacing();
    rep.tol_ma = opts.tol_ma > 0 ? opts.tol_ma : 10.0 * g.spacing();
    rep.classification =
        classify_existence(rep.ma_residual, rep.boundary_residual, rep.tol_b, rep.tol_ma, converged);
    return rep;
}

}  // namespace

SolveReport solve_truncated(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                            const StencilDictionary& d, const SolveOptions& opts) {
    if (!p.is_normalized())
        throw PreconditionError("solve_truncated requires a normalized problem (A = I, b = 0)");
    if (grid->dim() != p.dim() || d.n != p.dim())
        throw InvalidArgument("solve_truncated: dimension mismatch");

    if (opts.mode == OuterMode::Plain) return run_sweeps(p, grid, d, opts, OuterMode::Plain, 0.0);

    // Corrected mode: one Richardson pass in R fits the |x|^(2-n) decay
    // coefficient of u - Q, then the final solve carries corrected data.
    const int n = p.dim();
    const double R = grid->truncation_radius();
    const double h = grid->spacing();
    const double r2 = R / std::sqrt(2.0);

    SolveOptions pass = opts;
    pass.mode = OuterMode::Plain;
    pass.initial = nullptr;

    double d_coef = 0.0;
    const double circ = p.domain.circumradius_origin();
    if (r2 > circ + 5 * h) {
        auto grid2 = build_grid(p.domain, r2, h, grid->stencil_width());
        const SolveReport s1 = run_sweeps(p, grid, d, pass, OuterMode::Plain, 0.0);
        const SolveReport s2 = run_sweeps(p, grid2, d, pass, OuterMode::Plain, 0.0);

        // Richardson-extrapolate u at a probe shell, read off d from u - Q
        const double rp = 0.5 * (circ + r2);
        const double w1 = std::pow(R, 2 - n), w2 = std::pow(r2, 2 - n);
        double num = 0;
        int count = 0;
        std::vector<int> idx;
        for (std::int64_t b : grid2->interior_boxes()) {
            const Vector x = grid2->coords(b);
            const double r = norm2(x);
            if (std::fabs(r - rp) > h) continue;
            grid2->multi_index(b, idx);
            const std::int64_t b1 = grid->box_index(idx);
            if (b1 < 0 || grid->node_class(b1) == NodeClass::Excluded) continue;
            const double u1 = s1.field.at_box(b1), u2 = s2.field.at_box(b);
            const double e = (u1 - u2) / (w1 - w2);
            const double u_extrap = u1 - e * w1;
            num += (u_extrap - p.asymptote.eval(x)) / std::pow(r, 2 - n);
            ++count;
        }
        if (count > 0) d_coef = num / count;
    }
    return run_sweeps(p, grid, d, opts, OuterMode::Corrected, d_coef);
}

// ---------------------------------------------------------------------------
// threshold estimation

namespace {

std::optional<double> radial_reference(const ProblemSpec& p, const QuadratureSettings& q) {
    if (!p.is_normalized() || !p.g.is_one()) return std::nullopt;
    if (p.domain.kind() != DomainKind::Ball) return std::nullopt;
    if (p.phi.form() != BoundaryData::Form::Constant) return std::nullopt;
    const double a = p.domain.radius();
    const double z2 = dot(p.domain.center(), p.domain.center());
    return p.phi.constant_value() + a * a * critical_constant_ball(p.dim(), q) - 0.5 * z2;
}

struct ThresholdDriver {
    const ProblemSpec& p;
    std::shared_ptr<const AnnularGrid> grid;
    const StencilDictionary& d;
    const ThresholdOptions& opts;
    ThresholdReport& rep;
    std::optional<GridField> last_field;
    double last_c = 0;

    Classification probe(double c) {
        ProblemSpec pc(p.domain, p.phi, p.g, p.asymptote.with_constant(c));
        SolveOptions so = opts.solve;
        GridField warm = last_field ? *last_field : GridField(grid);
        if (last_field) {
            for (std::int64_t i = 0; i < warm.size(); ++i) warm[i] += c - last_c;
            so.initial = &warm;
        }
        SolveReport r = solve_truncated(pc, grid, d, so);
        rep.evaluations.push_back({c, r.classification, r.boundary_residual});
        if (r.classification == Classification::NotConverged)
            throw Error(kErrNotConverged,
                        "threshold probe did not converge at c = " + std::to_string(c));
        last_field = std::move(r.field);
        last_c = c;
        return r.classification;
    }
};

double run_bisection(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                     const StencilDictionary& d, const ThresholdOptions& opts,
                     ThresholdReport& rep) {
    ThresholdDriver drv{p, grid, d, opts, rep};

    double lo, hi;
    if (opts.bracket) {
        lo = opts.bracket->first;
        hi = opts.bracket->second;
    } else {
        lo = nonexistence_bound(p, opts.quadrature);
        hi = lo + 10.0;
    }
    if (!(lo < hi)) throw InvalidArgument("threshold bracket invalid (c_lo >= c_hi)");

    int expand = 0;
    while (drv.probe(hi) != Classification::Exists) {
        hi += 10.0;
        if (++expand > 4) throw PreconditionError("threshold bracket: no existence at large c");
    }
    expand = 0;
    while (drv.probe(lo) == Classification::Exists) {
        lo -= std::max(1.0, 0.1 * (hi - lo));
        if (++expand > 8)
            throw PreconditionError("threshold bracket: lower seed still classifies Exists");
    }

    while (hi - lo > opts.tol_c) {
        const double mid = 0.5 * (lo + hi);
        if (drv.probe(mid) == Classification::Exists)
            hi = mid;
        else
            lo = mid;
    }
    rep.c_low = lo;
    rep.c_high = hi;
    return 0.5 * (lo + hi);
}

}  // namespace

ThresholdReport estimate_threshold(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                                   const StencilDictionary& d, const ThresholdOptions& opts) {
    if (!p.is_normalized())
        throw PreconditionError("estimate_threshold requires a normalized problem");
    ThresholdReport rep;
    rep.reference = radial_reference(p, opts.quadrature);
    const double est = run_bisection(p, grid, d, opts, rep);

    if (opts.richardson_in_R) {
        const int n = p.dim();
        const double R1 = grid->truncation_radius();
        const double R2 = 1.5 * R1;
        auto grid2 = build_grid(p.domain, R2, grid->spacing(), grid->stencil_width());
        ThresholdReport rep2;
        ThresholdOptions o2 = opts;
        o2.bracket = {rep.c_low - 2 * opts.tol_c, rep.c_high + 2 * opts.tol_c};
        const double est2 = run_bisection(p, grid2, d, o2, rep2);
        const double w1 = std::pow(R1, 2 - n), w2 = std::pow(R2, 2 - n);
        rep.richardson = (est2 * w1 - est * w2) / (w1 - w2);
        for (const auto& e : rep2.evaluations) rep.evaluations.push_back(e);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// radial oracle sampling

GridField solve_exterior_radial(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                                const QuadratureSettings& q) {
    if (!p.is_normalized())
        throw PreconditionError("solve_exterior_radial requires a normalized problem");
    if (p.domain.kind() != DomainKind::Ball || norm2(p.domain.center()) > 1e-12)
        throw PreconditionError("radial oracle requires a centered ball domain");
    if (p.phi.form() != BoundaryData::Form::Constant)
        throw PreconditionError("radial oracle requires constant boundary data");
    if (!p.g.is_one()) throw PreconditionError("radial oracle requires g == 1");

    const int n = p.dim();
    const double a = p.domain.radius();
    const double v0 = p.phi.constant_value();
    const double c_hat = (p.asymptote.c - v0) / (a * a);
    const double alpha = alpha_from_constant(c_hat, n, q);  // throws NoSolution below C*
    const RadialProfile prof(n, alpha);

    // incremental anchors over the sorted unique radii keep the per-node
    // quadrature short
    const AnnularGrid& g = *grid;
    std::vector<std::pair<double, std::int64_t>> radii;
    radii.reserve(g.stored_count());
    for (std::int64_t b : g.stored_boxes()) radii.push_back({norm2(g.coords(b)) / a, b});
    std::sort(radii.begin(), radii.end());

    auto binding = std::make_shared<const BoundaryBinding>(p.phi, p.domain);
    GridField u(grid, 0.0, binding);

    QuadratureSettings piece = q;
    piece.abs_tol = std::max(q.abs_tol / 64, 1e-15);
    double anchor_r = 1.0, anchor_v = 0.0;
    for (auto& [r, b] : radii) {
        double val;
        if (r < 1.0) {
            val = (std::pow(r, n) + alpha >= 1e-12)
                      ? radial_value_extended(prof, r, piece)
                      : 0.0;  // critical profiles do not extend inside; ghost gets phi
        } else {
            anchor_v += radial_value_between(prof, anchor_r, r, piece);
            anchor_r = r;
            val = anchor_v;
        }
        u.at_box(b) = v0 + a * a * val;
    }
    return u;
}

}  // namespace maext
