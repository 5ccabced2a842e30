#include "maext/radial.hpp"

#include <cmath>

#include "maext/error.hpp"

namespace maext {

namespace {

double nth_root(double x, int n) { return std::pow(x, 1.0 / n); }

// integrand (s^n + alpha)^(1/n) - subtract*s on [a,b] with the s = 1 + w^n
// substitution applied on the portion next to s = 1
double integrate_profile(int n, double alpha, double a, double b, bool subtract_s,
                         const QuadratureSettings& q, double* err_acc) {
    QuadratureSettings piece = q;
    piece.abs_tol = q.abs_tol / 4;

    auto f = [&](double s) {
        const double v = nth_root(std::pow(s, n) + alpha, n);
        return subtract_s ? v - s : v;
    };

    double total = 0, err = 0, e;
    const double split = std::min(b, 2.0);
    if (a < split) {
        // s = 1 + w^n removes the (s-1)^(1/n) endpoint behavior at alpha = -1
        auto head = [&](double w) {
            const double s = 1.0 + std::pow(w, n);
            return f(s) * n * std::pow(w, n - 1);
        };
        total += integrate(head, nth_root(a - 1.0, n), nth_root(split - 1.0, n), piece, &e);
        err += e;
    }
    if (b > split) {
        total += integrate(f, std::max(a, split), b, piece, &e);
        err += e;
    }
    if (err_acc) *err_acc += err;
    return total;
}

}  // namespace

RadialProfile::RadialProfile(int n_in, double alpha_in) : n(n_in), alpha(alpha_in) {
    if (n < 3) throw InvalidArgument("radial profile requires n >= 3");
    if (alpha < -1.0)
        throw InvalidArgument("radial profile requires alpha >= -1 (derivative leaves the real domain)");
}

double radial_derivative(const RadialProfile& p, double r) {
    if (r < 1.0) throw InvalidArgument("radial_derivative: r must be >= 1");
    return nth_root(std::pow(r, p.n) + p.alpha, p.n);
}

double radial_second_derivative(const RadialProfile& p, double r) {
    if (r < 1.0) throw InvalidArgument("radial_second_derivative: r must be >= 1");
    const double rn = std::pow(r, p.n);
    return std::pow(r, p.n - 1) * std::pow(rn + p.alpha, (1.0 - p.n) / p.n);
}

double radial_value(const RadialProfile& p, double r, const QuadratureSettings& q) {
    if (r < 1.0) throw InvalidArgument("radial_value: r must be >= 1");
    q.validate();
    if (r == 1.0) return 0.0;
    return integrate_profile(p.n, p.alpha, 1.0, r, false, q, nullptr);
}

double radial_value_between(const RadialProfile& p, double r1, double r2,
                            const QuadratureSettings& q) {
    if (r1 < 1.0 || r2 < r1) throw InvalidArgument("radial_value_between: need 1 <= r1 <= r2");
    if (r1 == r2) return 0.0;
    return integrate_profile(p.n, p.alpha, r1, r2, false, q, nullptr);
}

double radial_value_extended(const RadialProfile& p, double r, const QuadratureSettings& q) {
    if (r >= 1.0) return radial_value(p, r, q);
    q.validate();
    if (std::pow(r, p.n) + p.alpha < 0)
        throw InvalidArgument("radial_value_extended: derivative undefined below r");
    QuadratureSettings piece = q;
    piece.abs_tol = q.abs_tol / 4;
    auto f = [&](double s) { return nth_root(std::pow(s, p.n) + p.alpha, p.n); };
    return -integrate(f, r, 1.0, piece, nullptr);
}

double asymptotic_constant(const RadialProfile& p, const QuadratureSettings& q,
                           double* err_bound) {
    q.validate();
    const int n = p.n;
    double err = 0;
    // ensure geometric convergence of the closed-form tail
    const double s_split =
        std::max({q.tail_split, nth_root(2.0 * std::fabs(p.alpha), n) + 1.0, 2.0});
    double total = -0.5;
    total += integrate_profile(n, p.alpha, 1.0, s_split, true, q, &err);
    double tail_err = 0;
    total += power_tail_integral(n, p.alpha, s_split, &tail_err);
    err += tail_err;
    if (err_bound) *err_bound = err;
    return total;
}

double critical_constant_ball(int n, const QuadratureSettings& q, double* err_bound) {
    if (n < 3) throw InvalidArgument("critical_constant_ball requires n >= 3");
    // the two forms of the Theorem-B integrand must agree pointwise
    for (double s : {1.5, 2.0, 3.0, 5.0, 10.0}) {
        const double lhs = s * nth_root(1.0 - std::pow(s, -n), n);
        const double rhs = nth_root(std::pow(s, n) - 1.0, n);
        if (std::fabs(lhs - rhs) > 1e-12 * std::max(1.0, rhs))
            throw Error(kErrInternal, "critical constant integrand identity failed");
    }
    return asymptotic_constant(RadialProfile(n, -1.0), q, err_bound);
}

double alpha_from_constant(double c, int n, const QuadratureSettings& q) {
    q.validate();
    const double c_star = critical_constant_ball(n, q);
    if (c < c_star - q.abs_tol)
        throw NoSolution("no radial solution: c = " + std::to_string(c) +
                         " below the sharp constant C* = " + std::to_string(c_star));
    if (c <= c_star) return -1.0;  // dead band resolves to the critical profile

    auto c_of = [&](double alpha) { return asymptotic_constant(RadialProfile(n, alpha), q); };
    double lo = -1.0, hi = 1.0;
    while (c_of(hi) < c) {
        hi = 2.0 * hi + 1.0;
        if (hi > 1e12) throw QuadratureError("alpha_from_constant: bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (c_of(mid) < c)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * (1.0 + std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

double general_rhs_lower_bound(double r, const RhsField& g, int n, const QuadratureSettings& q) {
    if (r < 1.0) throw InvalidArgument("general_rhs_lower_bound: r must be >= 1");
    if (n < 3) throw InvalidArgument("general_rhs_lower_bound requires n >= 3");
    q.validate();
    const double rn1 = std::pow(r, n) - 1.0;
    if (g.is_one()) return nth_root(rn1, n);
    QuadratureSettings piece = q;
    piece.abs_tol = q.abs_tol / 4;
    auto dev = [&](double s) { return n * std::pow(s, n - 1) * g.radial_majorant_deviation(s); };
    const double p = (r > 1.0) ? integrate(dev, 1.0, r, piece, nullptr) : 0.0;
    const double j = rn1 + p;
    if (j < 0) throw QuadratureError("general_rhs_lower_bound: inner integral negative");
    return nth_root(j, n);
}

namespace {

// tail of int_S^inf (Phi(l) - l) dl for the perturbed right-hand side, where
// Phi(l) = (l^n - 1 + P(l))^(1/n).  Uses log-substituted panels with an
// empirical decay estimate for the remainder.
double perturbed_bound_tail(int n, const RhsField& g, double s_split, double p_at_split,
                            const QuadratureSettings& q) {
    QuadratureSettings piece = q;
    piece.abs_tol = std::max(q.abs_tol / 8, 2e-14);
    QuadratureSettings inner = q;
    inner.abs_tol = std::max(q.abs_tol / 800, 1e-14);

    auto p_of = [&](double l) {
        if (l <= s_split) return p_at_split;
        auto f = [&](double tau) {
            const double s = s_split * std::exp(tau);
            return n * std::pow(s, n) * g.radial_majorant_deviation(s);
        };
        return p_at_split + integrate(f, 0.0, std::log(l / s_split), inner, nullptr);
    };
    auto integrand = [&](double l) {
        const double x = (p_of(l) - 1.0) / std::pow(l, n);
        if (std::fabs(x) < 0.5) return l * std::expm1(std::log1p(x) / n);
        return nth_root(std::pow(l, n) - 1.0 + p_of(l), n) - l;
    };

    double total = 0;
    double lo = s_split;
    for (int panel = 0; panel < 40; ++panel) {
        const double hi = lo * 4.0;
        auto f = [&](double tau) {
            const double l = lo * std::exp(tau);
            return integrand(l) * l;
        };
        total += integrate(f, 0.0, std::log(hi / lo), piece, nullptr);
        // remainder estimate from the local decay rate, with margin
        const double v1 = std::fabs(integrand(hi) * hi);
        const double v2 = std::fabs(integrand(2 * hi) * 2 * hi);
        if (v1 < 1e-300) return total;
        const double ratio = std::min(v2 / v1, 0.9);
        const double remainder = v1 * std::log(2.0) * ratio / (1.0 - ratio) * 10.0;
        if (remainder < q.abs_tol / 4) return total;
        lo = hi;
    }
    throw QuadratureError("nonexistence bound tail did not converge");
}

}  // namespace

double nonexistence_bound(const ProblemSpec& p, const QuadratureSettings& q) {
    if (!p.is_normalized())
        throw PreconditionError("nonexistence_bound requires a normalized problem (A = I, b = 0)");
    const int n = p.dim();
    if (n < 3) throw InvalidArgument("nonexistence_bound requires n >= 3");
    q.validate();

    const Vector& z = p.domain.center();
    const double rho = p.domain.max_semi_axis();
    const double z2 = dot(z, z);

    // min over the scaled boundary of the shifted data:
    // m = (min_{x in dD} (phi(x) - z.(x - z))) / rho^2
    const BoundaryData psi =
        BoundaryData::affine_composed(p.phi, identity(n), z, -z2, n);
    const double m = boundary_data_min(psi, p.domain) / (rho * rho);

    // scaled right-hand side majorant g_hat(r) = sup_{|y|=r} g(rho y + z)
    const RhsField gg = p.g.composed_shift_scale(rho, z);

    double limit;  // lim_r [ int_1^r Phi - r^2/2 ]
    if (gg.is_one()) {
        limit = critical_constant_ball(n, q);
    } else {
        QuadratureSettings piece = q;
        piece.abs_tol = std::max(q.abs_tol / 8, 2e-14);
        QuadratureSettings inner = q;
        inner.abs_tol = std::max(q.abs_tol / 800, 1e-14);

        const double s_split = std::max(q.tail_split, 2.0);
        auto p_of = [&](double l) {
            if (l <= 1.0) return 0.0;
            auto dev = [&](double s) {
                return n * std::pow(s, n - 1) * gg.radial_majorant_deviation(s);
            };
            return integrate(dev, 1.0, l, inner, nullptr);
        };
        auto phi_minus_l = [&](double l) {
            return nth_root(std::pow(l, n) - 1.0 + p_of(l), n) - l;
        };
        // [1,2] with the w-substitution, [2,S] plain, then the far tail
        auto head = [&](double w) {
            const double l = 1.0 + std::pow(w, n);
            return phi_minus_l(l) * n * std::pow(w, n - 1);
        };
        double total = -0.5;
        total += integrate(head, 0.0, 1.0, piece, nullptr);
        if (s_split > 2.0) total += integrate(phi_minus_l, 2.0, s_split, piece, nullptr);
        total += perturbed_bound_tail(n, gg, s_split, p_of(s_split), q);
        limit = total;
    }

    return (m + limit) * rho * rho - 0.5 * z2;
}

}  // namespace maext
