#pragma once

#include "maext/geometry.hpp"
#include "maext/quadrature.hpp"

namespace maext {

/// One member of the radial solution family on the exterior of the unit ball:
/// u(1) = 0 and u'(r) = (r^n + alpha)^(1/n).  alpha = -1 is the critical
/// profile (zero slope at the inner sphere); below -1 the derivative leaves
/// the real domain on part of [1, (-alpha)^(1/n)].
struct RadialProfile {
    int n;
    double alpha;

    RadialProfile(int n_in, double alpha_in);
};

/// u'(r) = (r^n + alpha)^(1/n); requires r >= 1.
double radial_derivative(const RadialProfile& p, double r);

/// Analytic u''(r) = r^(n-1) (r^n + alpha)^(1/n - 1).
double radial_second_derivative(const RadialProfile& p, double r);

/// u(r) = int_1^r (s^n + alpha)^(1/n) ds; 0 at r = 1.  The alpha = -1
/// endpoint singularity is removed by the substitution s = 1 + w^n.
double radial_value(const RadialProfile& p, double r, const QuadratureSettings& q);

/// Evaluation extended below r = 1 (used when sampling oracles onto grid
/// ghost nodes); requires r^n + alpha >= 0 on the integration range.
double radial_value_extended(const RadialProfile& p, double r, const QuadratureSettings& q);

/// Increment int_{r1}^{r2} (s^n + alpha)^(1/n) ds for 1 <= r1 <= r2; lets
/// oracle sampling walk sorted radii without re-integrating from 1.
double radial_value_between(const RadialProfile& p, double r1, double r2,
                            const QuadratureSettings& q);

/// c(alpha) = -1/2 + int_1^inf ((s^n+alpha)^(1/n) - s) ds, strictly increasing
/// in alpha; the improper tail beyond the split S is summed in closed form.
double asymptotic_constant(const RadialProfile& p, const QuadratureSettings& q,
                           double* err_bound = nullptr);

/// C*(n) = c(-1); also checks the determinant identity
/// s (1 - s^-n)^(1/n) = (s^n - 1)^(1/n) at sampled points to 1e-12.
double critical_constant_ball(int n, const QuadratureSettings& q, double* err_bound = nullptr);

/// Inverse of asymptotic_constant by bisection on [-1, inf).  Throws
/// NoSolution when c < C*(n) - tolerance (nonexistence regime); values inside
/// the dead band resolve to the critical profile alpha = -1.
double alpha_from_constant(double c, int n, const QuadratureSettings& q);

/// (int_1^r n s^(n-1) g1(s) ds)^(1/n) with g1 the exact spherical sup of g;
/// reduces to (r^n - 1)^(1/n) for g == 1.
double general_rhs_lower_bound(double r, const RhsField& g, int n, const QuadratureSettings& q);

/// Certified constant c2 such that no viscosity subsolution with asymptote
/// constant c < c2 exists: enclose D in a ball, rescale to the unit ball,
/// shift the data nonnegative and integrate the radial lower bound.
/// Conservative (<= the true sharp constant).  Requires a normalized spec.
double nonexistence_bound(const ProblemSpec& p, const QuadratureSettings& q);

}  // namespace maext
