#pragma once

#include <functional>

namespace maext {

/// Controls for the 1-D adaptive integrator and the improper-integral tails.
struct QuadratureSettings {
    double abs_tol = 1e-12;
    double tail_split = 10.0;  ///< S: quadrature on [a,S], analytic series beyond
    int max_subdivisions = 20000;

    void validate() const;
};

/// Adaptive Simpson on [a,b] to absolute tolerance `abs_tol`.
/// Throws QuadratureError when the subdivision budget is exhausted before the
/// local error estimates reach tolerance.  `err_est` (optional) receives the
/// accumulated error estimate.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSettings& q, double* err_est = nullptr);

/// Closed form for int_S^inf ((s^n + alpha)^(1/n) - s) ds via the binomial
/// series sum_k C(1/n,k) alpha^k S^(2-nk)/(nk-2).  Requires S^n > 2|alpha|
/// (geometric convergence); callers raise the split point to guarantee it.
double power_tail_integral(int n, double alpha, double S, double* err_bound = nullptr);

}  // namespace maext
