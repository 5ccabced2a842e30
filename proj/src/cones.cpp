#include "maext/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maext/error.hpp"

namespace maext {

EigenTuple::EigenTuple(Vector l) : lambda(std::move(l)) {
    for (double v : lambda)
        if (!std::isfinite(v)) throw InvalidArgument("eigenvalue tuple must be finite");
    std::sort(lambda.begin(), lambda.end(), std::greater<double>());
}

double sigma_k(const Vector& lambda, int k) {
    const int n = static_cast<int>(lambda.size());
    if (k < 0 || k > n) throw InvalidArgument("sigma_k: k out of range");
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(k, i + 1); j >= 1; --j) e[j] += lambda[i] * e[j - 1];
    return e[k];
}

ConeOperator ConeOperator::det_root(int n, double level) {
    if (n < 2) throw InvalidArgument("cone operator needs n >= 2");
    return {ConeForm::DetRoot, n, n, 0, level};
}

ConeOperator ConeOperator::sigma_root(int k, int n, double level) {
    if (!(1 <= k && k <= n)) throw InvalidArgument("sigma_root requires 1 <= k <= n");
    return {ConeForm::SigmaKRoot, n, k, 0, level};
}

ConeOperator ConeOperator::sigma_quotient(int k, int l, int n, double level) {
    if (!(1 <= l && l < k && k <= n))
        throw InvalidArgument("sigma_quotient requires 1 <= l < k <= n");
    return {ConeForm::SigmaQuotient, n, k, l, level};
}

ConeLocation cone_membership(const ConeOperator& op, const EigenTuple& t, double tol) {
    if (t.size() != op.n) throw InvalidArgument("cone_membership: dimension mismatch");
    const double scale = norm2(t.lambda);
    if (scale == 0) return ConeLocation::OnBoundary;
    Vector hat = t.lambda;
    for (double& v : hat) v /= scale;
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= op.cone_k(); ++j) margin = std::min(margin, sigma_k(hat, j));
    if (margin > tol) return ConeLocation::Inside;
    if (margin < -tol) return ConeLocation::Outside;
    return ConeLocation::OnBoundary;
}

double f_eval(const ConeOperator& op, const EigenTuple& t) {
    if (t.size() != op.n) throw InvalidArgument("f_eval: dimension mismatch");
    if (cone_membership(op, t) == ConeLocation::Outside)
        throw PreconditionError("f_eval: tuple outside the operator cone");
    switch (op.form) {
        case ConeForm::DetRoot: {
            const double s = sigma_k(t.lambda, op.n);
            return s <= 0 ? 0.0 : std::pow(s, 1.0 / op.n);
        }
        case ConeForm::SigmaKRoot: {
            const double s = sigma_k(t.lambda, op.k);
            return s <= 0 ? 0.0 : std::pow(s, 1.0 / op.k);
        }
        case ConeForm::SigmaQuotient: {
            const double sl = sigma_k(t.lambda, op.l);
            if (sl <= 0) throw PreconditionError("f_eval: sigma_l not positive");
            const double sk = sigma_k(t.lambda, op.k);
            return sk <= 0 ? 0.0 : std::pow(sk / sl, 1.0 / (op.k - op.l));
        }
    }
    return 0;
}

EigenTuple eigenvalues_sym(const Matrix& m, int n) { return EigenTuple(sym_eigenvalues(m, n)); }

ComboVerdict combo_level_check(const ConeOperator& op, const Matrix& m1, const Matrix& m2,
                               double alpha) {
    if (!(alpha >= 0 && alpha <= 1)) throw InvalidArgument("combo weight must lie in [0,1]");
    const EigenTuple t1 = eigenvalues_sym(m1, op.n);
    const EigenTuple t2 = eigenvalues_sym(m2, op.n);
    const double tol_pre = 1e-9;
    if (f_eval(op, t1) < op.level - tol_pre || f_eval(op, t2) < op.level - tol_pre)
        throw PreconditionError("combo_level_check: inputs do not reach the level set");
    Matrix mc(m1.size());
    for (std::size_t i = 0; i < mc.size(); ++i) mc[i] = alpha * m1[i] + (1 - alpha) * m2[i];
    const double fc = f_eval(op, eigenvalues_sym(mc, op.n));
    return {fc >= op.level - 1e-10, fc - op.level};
}

namespace {

// full finite-difference Hessian at `box` (plain centered stencils only);
// returns false when a needed neighbor is missing or crosses the boundary
bool assemble_fd_hessian(const GridField& u, std::int64_t box, Matrix& hess) {
    const AnnularGrid& g = u.grid();
    const int n = g.dim();
    const double h2 = g.spacing() * g.spacing();
    hess.assign(n * n, 0.0);
    std::vector<int> dir(n, 0);

    auto stored_at = [&](const std::vector<int>& d, int sign, double& out) {
        const std::int64_t nb = g.offset_box(box, d.data(), n, sign);
        if (nb < 0 || g.node_class(nb) == NodeClass::Excluded ||
            g.node_class(nb) == NodeClass::InnerBoundary)
            return false;
        // reject arms that clip the inner boundary even between stored nodes
        Vector x = g.coords(box), step(n);
        for (int a = 0; a < n; ++a) step[a] = sign * d[a] * g.spacing();
        if (g.domain().segment_crossing(x, step)) return false;
        out = u[g.stored_id(nb)];
        return true;
    };

    const double u0 = u.at_box(box);
    for (int i = 0; i < n; ++i) {
        std::fill(dir.begin(), dir.end(), 0);
        dir[i] = 1;
        double up = 0, um = 0;
        if (!stored_at(dir, +1, up) || !stored_at(dir, -1, um)) return false;
        hess[i * n + i] = (up - 2 * u0 + um) / h2;
        for (int j = i + 1; j < n; ++j) {
            std::fill(dir.begin(), dir.end(), 0);
            dir[i] = 1;
            dir[j] = 1;
            double upp = 0, umm = 0;
            if (!stored_at(dir, +1, upp) || !stored_at(dir, -1, umm)) return false;
            dir[j] = -1;
            double upm = 0, ump = 0;
            if (!stored_at(dir, +1, upm) || !stored_at(dir, -1, ump)) return false;
            hess[i * n + j] = hess[j * n + i] = (upp - upm - ump + umm) / (4 * h2);
        }
    }
    return true;
}

}  // namespace

FieldConeVerdict general_discrete_subsolution(const GridField& u, const ConeOperator& op,
                                              double tol) {
    if (u.grid().dim() != op.n)
        throw InvalidArgument("general_discrete_subsolution: dimension mismatch");
    FieldConeVerdict v;
    v.margin = std::numeric_limits<double>::infinity();
    Matrix hess;
    for (std::int64_t box : u.grid().interior_boxes()) {
        if (!assemble_fd_hessian(u, box, hess)) continue;
        ++v.checked;
        const EigenTuple t = eigenvalues_sym(hess, op.n);
        double margin;
        if (cone_membership(op, t, tol) == ConeLocation::Outside) {
            margin = -std::numeric_limits<double>::infinity();
        } else {
            double f;
            try {
                f = f_eval(op, t);
            } catch (const Error&) {
                f = -std::numeric_limits<double>::infinity();
            }
            margin = f - op.level;
        }
        if (margin < v.margin) {
            v.margin = margin;
            v.worst_box = box;
        }
    }
    if (v.checked == 0) throw PreconditionError("no nodes with a resolvable stencil Hessian");
    v.ok = v.margin >= -tol;
    return v;
}

double field_cone_min(const GridField& u, const ConeOperator& op) {
    ConeOperator probe = op;
    probe.level = 0.0;
    const FieldConeVerdict v = general_discrete_subsolution(u, probe, 1e300);
    return v.margin;
}

}  // namespace maext
