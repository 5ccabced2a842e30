#include "maext/discrete_op.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maext/error.hpp"

namespace maext {

namespace {

struct ArmSample {
    double value;  // u at node, or phi at the cut-cell intersection
    double theta;  // fraction of h|e| to the sample point
};

ArmSample resolve_arm_value(const GridField& u, std::int64_t box, const int* dir, int n, int sign) {
    const AnnularGrid& g = u.grid();
    if (u.binding()) {
        const auto hit = g.resolve_arm(box, dir, n, sign);
        if (hit.crosses) return {u.binding()->eval(hit.point), std::max(hit.theta, 1e-10)};
        return {u[g.stored_id(hit.nbr_box)], 1.0};
    }
    const std::int64_t nb = g.offset_box(box, dir, n, sign);
    if (nb < 0 || g.node_class(nb) == NodeClass::Excluded)
        throw PreconditionError("stencil arm neighbor unresolvable (unbound field)");
    return {u[g.stored_id(nb)], 1.0};
}

// Delta(t) = a - b t from the two arm samples; exact for quadratics at any
// theta (three-point Shortley-Weller formula)
void arm_coefficients(const GridField& u, std::int64_t box, const std::vector<int>& dir,
                      double norm2, double& a, double& b) {
    const AnnularGrid& g = u.grid();
    const int n = g.dim();
    const ArmSample p = resolve_arm_value(u, box, dir.data(), n, +1);
    const ArmSample m = resolve_arm_value(u, box, dir.data(), n, -1);
    const double h2e2 = g.spacing() * g.spacing() * norm2;
    const double k = 2.0 / (h2e2 * (p.theta + m.theta));
    a = k * (p.value / p.theta + m.value / m.theta);
    b = k * (1.0 / p.theta + 1.0 / m.theta);
}

}  // namespace

double second_difference(const GridField& u, std::int64_t box, const std::vector<int>& e) {
    const int n = u.grid().dim();
    if (static_cast<int>(e.size()) != n) throw InvalidArgument("direction dimension mismatch");
    double norm2 = 0;
    for (int x : e) norm2 += static_cast<double>(x) * x;
    if (norm2 == 0) throw InvalidArgument("zero direction");
    double a, b;
    arm_coefficients(u, box, e, norm2, a, b);
    return a - b * u.at_box(box);
}

NodeOperator make_node_operator(const GridField& u, std::int64_t box, const StencilDictionary& d,
                                double floor_delta) {
    if (u.grid().dim() != d.n) throw InvalidArgument("dictionary dimension mismatch");
    NodeOperator op;
    op.dict = &d;
    op.floor_delta = floor_delta;
    op.penalty = 1.0 / u.grid().spacing();
    const std::size_t nd = d.directions.size();
    op.a.resize(nd);
    op.b.resize(nd);
    for (std::size_t i = 0; i < nd; ++i)
        arm_coefficients(u, box, d.directions[i], d.dir_norm2[i], op.a[i], op.b[i]);
    return op;
}

std::pair<double, double> NodeOperator::eval(double t) const {
    const std::size_t nd = a.size();
    double min_prod = std::numeric_limits<double>::infinity();
    double min_dprod = 0;
    // scratch second differences
    thread_local std::vector<double> delta;
    delta.resize(nd);
    for (std::size_t i = 0; i < nd; ++i) delta[i] = a[i] - b[i] * t;

    for (const auto& frame : dict->frames) {
        double prod = 1, dlog = 0;
        for (int di : frame) {
            const double dv = delta[di];
            if (dv > floor_delta) {
                prod *= dv;
                dlog += -b[di] / dv;
            } else {
                prod *= floor_delta;
            }
        }
        if (prod < min_prod) {
            min_prod = prod;
            min_dprod = prod * dlog;
        }
    }
    double pen = 0, dpen = 0;
    for (std::size_t i = 0; i < nd; ++i) {
        if (delta[i] < 0) {
            pen += -delta[i];
            dpen += b[i];
        }
    }
    return {min_prod - penalty * pen, min_dprod - penalty * dpen};
}

double NodeOperator::solve_for(double rhs, double t_start) const {
    // eval is monotone nonincreasing in t: bracket then safeguarded Newton
    double t = t_start;
    auto [v, dv] = eval(t);
    if (v == rhs) return t;

    double step = 1.0;
    double lo, hi;  // eval(lo) >= rhs >= eval(hi)
    if (v > rhs) {
        lo = t;
        hi = t + step;
        while (eval(hi).first > rhs) {
            lo = hi;
            step *= 2;
            hi += step;
            if (step > 1e12) throw Error(kErrInternal, "node root bracketing failed");
        }
    } else {
        hi = t;
        lo = t - step;
        while (eval(lo).first < rhs) {
            hi = lo;
            step *= 2;
            lo -= step;
            if (step > 1e12) throw Error(kErrInternal, "node root bracketing failed");
        }
    }

    for (int it = 0; it < 200; ++it) {
        if (hi - lo < 1e-13 * (1.0 + std::fabs(lo))) break;
        double cand;
        if (dv < 0) {
            cand = t - (v - rhs) / dv;
            if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        } else {
            cand = 0.5 * (lo + hi);
        }
        t = cand;
        std::tie(v, dv) = eval(t);
        const double res = v - rhs;
        if (std::fabs(res) < 1e-13 * (1.0 + std::fabs(rhs))) return t;
        if (res > 0)
            lo = t;
        else
            hi = t;
    }
    return 0.5 * (lo + hi);
}

double ma_operator(const GridField& u, std::int64_t box, const StencilDictionary& d,
                   double floor_delta) {
    return make_node_operator(u, box, d, floor_delta).eval(u.at_box(box)).first;
}

namespace {

SubsolutionVerdict side_check(const GridField& u, const RhsField& g, const StencilDictionary& d,
                              double tol, bool sub) {
    SubsolutionVerdict verdict;
    verdict.margin = std::numeric_limits<double>::infinity();
    const AnnularGrid& grid = u.grid();
    for (std::int64_t box : grid.interior_boxes()) {
        const NodeOperator op = make_node_operator(u, box, d);
        const double t = u.at_box(box);
        const double gval = g.eval(grid.coords(box));
        double margin;
        auto reason = SubsolutionVerdict::Reason::Operator;
        if (sub) {
            margin = op.eval(t).first - gval;
            for (std::size_t i = 0; i < op.a.size(); ++i) {
                const double delta = op.a[i] - op.b[i] * t;
                if (delta < margin) {
                    margin = delta;
                    reason = SubsolutionVerdict::Reason::Convexity;
                }
            }
        } else {
            margin = gval - op.eval(t).first;
        }
        if (margin < verdict.margin) {
            verdict.margin = margin;
            verdict.worst_box = box;
            verdict.reason = reason;
        }
    }
    verdict.ok = verdict.margin >= -tol;
    if (verdict.ok) verdict.reason = SubsolutionVerdict::Reason::None;
    return verdict;
}

}  // namespace

SubsolutionVerdict is_discrete_subsolution(const GridField& u, const RhsField& g,
                                           const StencilDictionary& d, double tol) {
    return side_check(u, g, d, tol, true);
}

SubsolutionVerdict is_discrete_supersolution(const GridField& u, const RhsField& g,
                                             const StencilDictionary& d, double tol) {
    return side_check(u, g, d, tol, false);
}

ComparisonVerdict comparison_check(const GridField& u, const GridField& v, const RhsField& g,
                                   const StencilDictionary& d, double tol) {
    if (!u.same_grid(v)) throw InvalidArgument("comparison_check: grid mismatch");
    ComparisonVerdict out;
    const auto sub = is_discrete_subsolution(u, g, d, tol);
    if (!sub.ok) {
        out.status = ComparisonVerdict::Status::PreconditionSubsolution;
        out.worst_box = sub.worst_box;
        out.margin = sub.margin;
        return out;
    }
    const auto super = is_discrete_supersolution(v, g, d, tol);
    if (!super.ok) {
        out.status = ComparisonVerdict::Status::PreconditionSupersolution;
        out.worst_box = super.worst_box;
        out.margin = super.margin;
        return out;
    }
    const AnnularGrid& grid = u.grid();
    double worst = std::numeric_limits<double>::infinity();
    std::int64_t worst_box = -1;
    auto scan = [&](const std::vector<std::int64_t>& boxes) {
        for (std::int64_t b : boxes) {
            const double m = v.at_box(b) - u.at_box(b);
            if (m < worst) {
                worst = m;
                worst_box = b;
            }
        }
    };
    scan(grid.outer_boxes());
    scan(grid.inner_ghost_boxes());
    if (worst < -tol) {
        out.status = ComparisonVerdict::Status::PreconditionBoundary;
        out.worst_box = worst_box;
        out.margin = worst;
        return out;
    }
    scan(grid.interior_boxes());
    out.worst_box = worst_box;
    out.margin = worst;
    out.status = (worst >= -tol) ? ComparisonVerdict::Status::Holds
                                 : ComparisonVerdict::Status::Fails;
    return out;
}

// ---------------------------------------------------------------------------
// eps-upper envelope: separable parabolic max-transform

namespace {

// upper envelope of parabolas in[j] - coef*(i-j)^2 along one line; records the
// winning source index per output cell
void line_max_transform(const std::vector<double>& in, std::vector<double>& out,
                        std::vector<int>& arg, int m, double coef) {
    thread_local std::vector<int> hull;
    thread_local std::vector<double> breaks;
    hull.clear();
    breaks.clear();
    const double inf = std::numeric_limits<double>::infinity();

    for (int j = 0; j < m; ++j) {
        if (in[j] == -inf) continue;
        double s = -inf;
        while (!hull.empty()) {
            const int a = hull.back();
            // intersection of parabolas centered at a and j (j > a)
            s = 0.5 * (a + j) + (in[a] - in[j]) / (2.0 * coef * (j - a));
            if (s > breaks.back()) break;
            hull.pop_back();
            breaks.pop_back();
        }
        if (hull.empty()) s = -inf;
        hull.push_back(j);
        breaks.push_back(s);
    }
    if (hull.empty()) {
        std::fill(out.begin(), out.begin() + m, -inf);
        std::fill(arg.begin(), arg.begin() + m, -1);
        return;
    }
    std::size_t k = 0;
    for (int i = 0; i < m; ++i) {
        while (k + 1 < hull.size() && breaks[k + 1] < i) ++k;
        const int j = hull[k];
        out[i] = in[j] - coef * static_cast<double>(i - j) * (i - j);
        arg[i] = j;
    }
}

}  // namespace

GridField eps_upper_envelope(const GridField& u, double eps) {
    const AnnularGrid& g = u.grid();
    const int n = g.dim();
    const double h = g.spacing();
    if (!(eps > 0)) throw InvalidArgument("eps_upper_envelope: eps must be > 0");
    if (eps < h * h)
        throw InvalidArgument("eps_upper_envelope: eps below h^2 underflows the slack model");

    const std::int64_t bs = g.box_size();
    const int ext = g.extent();
    const double inf = std::numeric_limits<double>::infinity();
    const double coef = h * h / eps;

    std::vector<double> work(bs, -inf);
    for (std::int64_t b : g.stored_boxes()) work[b] = u.at_box(b);

    // one parabolic pass per axis, arg tables kept for reconstruction
    std::vector<std::vector<int>> args(n);
    std::vector<double> line_in(ext), line_out(ext);
    std::vector<int> line_arg(ext);
    std::vector<std::int64_t> strides(n, 1);
    for (int a = n - 2; a >= 0; --a) strides[a] = strides[a + 1] * ext;

    for (int axis = 0; axis < n; ++axis) {
        args[axis].assign(bs, -1);
        const std::int64_t stride = strides[axis];
        // iterate over all lines along `axis`
        for (std::int64_t base = 0; base < bs; ++base) {
            const std::int64_t coord = (base / stride) % ext;
            if (coord != 0) continue;  // not a line start
            for (int i = 0; i < ext; ++i) line_in[i] = work[base + i * stride];
            line_max_transform(line_in, line_out, line_arg, ext, coef);
            for (int i = 0; i < ext; ++i) {
                work[base + i * stride] = line_out[i];
                args[axis][base + i * stride] = line_arg[i];
            }
        }
    }

    GridField out(u.grid_ptr(), 0.0, nullptr);
    std::vector<int> cur(n), xi(n);
    for (std::int64_t b : g.stored_boxes()) {
        g.multi_index(b, xi);
        cur = xi;
        // walk the arg tables back to the winning source node
        for (int axis = n - 1; axis >= 0; --axis) {
            std::int64_t cb = 0;
            for (int a = 0; a < n; ++a)
                cb += static_cast<std::int64_t>(cur[a] + ext / 2) * strides[a];
            const int best = args[axis][cb];
            if (best < 0) throw Error(kErrInternal, "envelope reconstruction failed");
            cur[axis] = best - ext / 2;
        }
        std::int64_t src = 0;
        for (int a = 0; a < n; ++a)
            src += static_cast<std::int64_t>(cur[a] + ext / 2) * strides[a];
        double d2 = 0;
        for (int a = 0; a < n; ++a) {
            const double dd = static_cast<double>(xi[a] - cur[a]) * h;
            d2 += dd * dd;
        }
        const double canonical = u.at_box(src) - d2 / eps;
        out.at_box(b) = std::max(canonical, u.at_box(b));
    }
    return out;
}

// ---------------------------------------------------------------------------
// radialization

GridField radialize(const GridField& u, const Vector& center) {
    const AnnularGrid& g = u.grid();
    if (g.domain().kind() != DomainKind::Ball)
        throw PreconditionError("radialize: inner domain must be a centered ball");
    const Vector& z = g.domain().center();
    for (std::size_t i = 0; i < z.size(); ++i)
        if (std::fabs(z[i] - center[i]) > 1e-12)
            throw PreconditionError("radialize: ball not centered at the given point");

    const double bw = 0.5 * g.spacing();
    std::vector<double> bin_max;
    std::vector<int> bin_of(g.stored_count());
    for (std::int64_t b : g.stored_boxes()) {
        Vector x = g.coords(b);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= center[i];
        const int bin = static_cast<int>(std::floor(norm2(x) / bw + 1e-9));
        bin_of[g.stored_id(b)] = bin;
        if (bin >= static_cast<int>(bin_max.size()))
            bin_max.resize(bin + 1, -std::numeric_limits<double>::infinity());
    }
    for (std::int64_t i = 0; i < u.size(); ++i)
        bin_max[bin_of[i]] = std::max(bin_max[bin_of[i]], u[i]);

    GridField out(u.grid_ptr(), 0.0, nullptr);
    for (std::int64_t i = 0; i < u.size(); ++i) out[i] = bin_max[bin_of[i]];
    return out;
}

}  // namespace maext
