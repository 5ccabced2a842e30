#include "maext/perron.hpp"

#include <algorithm>
#include <cmath>

#include "maext/error.hpp"

namespace maext {

namespace {

std::shared_ptr<const BoundaryBinding> merge_binding(const GridField& a, const GridField& b) {
    if (!a.compatible_binding(b))
        throw InvalidArgument("lattice operation on fields with different boundary data");
    return a.binding() ? a.binding() : b.binding();
}

}  // namespace

GridField pointwise_max(const GridField& u, const GridField& v) {
    if (!u.same_grid(v)) throw InvalidArgument("pointwise_max: grid mismatch");
    GridField out(u.grid_ptr(), 0.0, merge_binding(u, v));
    for (std::int64_t i = 0; i < u.size(); ++i) out[i] = std::max(u[i], v[i]);
    return out;
}

GridField convex_combination(const GridField& u1, const GridField& u3, double alpha) {
    if (!u1.same_grid(u3)) throw InvalidArgument("convex_combination: grid mismatch");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidArgument("convex_combination: weight must lie in [0,1]");
    if (alpha == 0.0) return u1;
    if (alpha == 1.0) return u3;
    GridField out(u1.grid_ptr(), 0.0, merge_binding(u1, u3));
    for (std::int64_t i = 0; i < u1.size(); ++i) out[i] = alpha * u3[i] + (1 - alpha) * u1[i];
    return out;
}

namespace {

std::vector<std::int64_t> patch_nodes(const AnnularGrid& g, std::int64_t center_box, double radius,
                                      bool clip) {
    const int n = g.dim();
    const int rad = static_cast<int>(std::floor(radius + 1e-12));
    std::vector<int> cidx, idx(n);
    g.multi_index(center_box, cidx);
    std::vector<std::int64_t> nodes;
    std::vector<int> off(n, -rad);
    while (true) {
        double d2 = 0;
        for (int a = 0; a < n; ++a) d2 += static_cast<double>(off[a]) * off[a];
        if (d2 <= radius * radius + 1e-12) {
            for (int a = 0; a < n; ++a) idx[a] = cidx[a] + off[a];
            const std::int64_t b = g.box_index(idx);
            if (b >= 0 && g.node_class(b) == NodeClass::Interior) {
                nodes.push_back(b);
            } else if (!clip) {
                throw PreconditionError("perron_lift: patch touches the boundary");
            }
        }
        int a = n - 1;
        for (; a >= 0; --a) {
            if (++off[a] <= rad) break;
            off[a] = -rad;
        }
        if (a < 0) break;
    }
    return nodes;
}

// local Dirichlet solve on the patch (everything else frozen), then max
void lift_in_place(GridField& u, const RhsField& g, const StencilDictionary& d,
                   const std::vector<std::int64_t>& nodes, const PerronOptions& opts) {
    const AnnularGrid& grid = u.grid();
    std::vector<double> rhs(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) rhs[i] = g.eval(grid.coords(nodes[i]));

    std::vector<double> original(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) original[i] = u.at_box(nodes[i]);

    for (int sweep = 0; sweep < opts.lift_max_sweeps; ++sweep) {
        double change = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const NodeOperator op = make_node_operator(u, nodes[i], d, opts.floor_delta);
            double& uv = u.at_box(nodes[i]);
            const double root = op.solve_for(rhs[i], uv);
            change = std::max(change, std::fabs(root - uv));
            uv = root;
        }
        if (change <= opts.lift_tol) break;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        u.at_box(nodes[i]) = std::max(u.at_box(nodes[i]), original[i]);
}

}  // namespace

GridField perron_lift(const GridField& u, const RhsField& g, const StencilDictionary& d,
                      std::int64_t center_box, const PerronOptions& opts, bool clip) {
    if (u.grid().node_class(center_box) != NodeClass::Interior)
        throw PreconditionError("perron_lift: patch center must be an interior node");
    GridField out = u;
    lift_in_place(out, g, d, patch_nodes(u.grid(), center_box, opts.patch_radius, clip), opts);
    return out;
}

GridField perron_iterate(const GridField& seed, const GridField& cap, const RhsField& g,
                         const StencilDictionary& d, int max_passes, double tol,
                         const PerronOptions& opts) {
    if (!seed.same_grid(cap)) throw InvalidArgument("perron_iterate: grid mismatch");
    const AnnularGrid& grid = seed.grid();

    for (std::int64_t i = 0; i < seed.size(); ++i)
        if (seed[i] > cap[i] + tol)
            throw PreconditionError("perron_iterate: seed exceeds the supersolution cap");

    GridField cur = seed;
    const auto& interior = grid.interior_boxes();
    for (int pass = 0; pass < max_passes; ++pass) {
        GridField prev = cur;
        const bool forward = (pass % 2 == 0);
        for (std::size_t k = 0; k < interior.size(); ++k) {
            const std::int64_t center = interior[forward ? k : interior.size() - 1 - k];
            lift_in_place(cur, g, d, patch_nodes(grid, center, opts.patch_radius, true), opts);
        }
        double change = 0;
        for (std::int64_t i = 0; i < cur.size(); ++i) {
            if (cur[i] < prev[i] - 1e-11)
                throw Error(kErrInternal, "perron_iterate: lift decreased a node value");
            if (cur[i] > cap[i] + tol + 1e-11)
                throw Error(kErrInternal, "perron_iterate: iterate escaped above the cap");
            change = std::max(change, cur[i] - prev[i]);
        }
        if (change <= tol) break;
    }
    return cur;
}

GridField monotone_limit(const std::vector<GridField>& fields, const std::vector<double>& constants,
                         double c_limit, double tol) {
    if (fields.empty() || fields.size() != constants.size())
        throw InvalidArgument("monotone_limit: need matching nonempty field/constant lists");
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
        if (!(constants[j + 1] <= constants[j]))
            throw InvalidArgument("monotone_limit: constants must be nonincreasing (index " +
                                  std::to_string(j) + ")");
        if (!fields[j].same_grid(fields[j + 1]))
            throw InvalidArgument("monotone_limit: grid mismatch");
        const double gap = constants[j] - constants[j + 1];
        double worst_drop = 0, worst_rise = 0;
        for (std::int64_t i = 0; i < fields[j].size(); ++i) {
            const double diff = fields[j][i] - fields[j + 1][i];  // expected in [0, gap]
            worst_drop = std::min(worst_drop, diff);
            worst_rise = std::max(worst_rise, diff - gap);
        }
        if (worst_drop < -tol)
            throw PreconditionError("monotone_limit: monotonicity violated at index " +
                                    std::to_string(j));
        if (worst_rise > tol)
            throw PreconditionError("monotone_limit: comparison estimate violated at index " +
                                    std::to_string(j));
    }
    const GridField& last = fields.back();
    // uniform sandwich u_j >= u_inf >= u_j - (c_j - c_limit) - tol
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const double gap = constants[j] - c_limit;
        for (std::int64_t i = 0; i < last.size(); ++i) {
            if (last[i] > fields[j][i] + tol || last[i] < fields[j][i] - gap - tol)
                throw PreconditionError("monotone_limit: sandwich estimate violated at index " +
                                        std::to_string(j));
        }
    }
    return last;
}

}  // namespace maext
