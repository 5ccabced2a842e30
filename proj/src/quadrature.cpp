#include "maext/quadrature.hpp"

#include <cmath>

#include "maext/error.hpp"

namespace maext {

void QuadratureSettings::validate() const {
    if (!(abs_tol > 0)) throw InvalidArgument("quadrature tolerance must be > 0");
    if (!(tail_split >= 2)) throw InvalidArgument("tail split S must be >= 2");
    if (max_subdivisions < 8) throw InvalidArgument("max_subdivisions too small");
}

namespace {

struct AdaptiveState {
    const std::function<double(double)>& f;
    int budget;
    double err_sum = 0;
};

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(AdaptiveState& st, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = st.f(lm), frm = st.f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;

    // accept at tolerance or at the double-precision plateau
    const double roundoff = 1e-15 * (std::fabs(left) + std::fabs(right) + std::fabs(whole));
    if (depth > 0 && (std::fabs(delta) <= 15.0 * tol || std::fabs(delta) <= roundoff)) {
        st.err_sum += std::fabs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    if (st.budget-- <= 0 || depth > 60)
        throw QuadratureError("adaptive quadrature failed to reach tolerance within max subdivisions");
    return adapt(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adapt(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSettings& q, double* err_est) {
    q.validate();
    if (a == b) {
        if (err_est) *err_est = 0;
        return 0.0;
    }
    AdaptiveState st{f, q.max_subdivisions};
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, b - a);
    const double result = adapt(st, a, b, fa, fm, fb, whole, q.abs_tol, 0);
    if (err_est) *err_est = st.err_sum;
    return result;
}

double power_tail_integral(int n, double alpha, double S, double* err_bound) {
    if (n < 3) throw InvalidArgument("power_tail_integral: n must be >= 3");
    const double Sn = std::pow(S, n);
    if (!(Sn > 2.0 * std::fabs(alpha)))
        throw InvalidArgument("power_tail_integral: split point too small for alpha");

    // sum_{k>=1} C(1/n,k) alpha^k S^(2-nk)/(nk-2), terms shrink by >= 1/2 each
    const double x = 1.0 / n;
    double coeff = 1.0;          // C(1/n, k) built incrementally
    double apow = 1.0;           // alpha^k
    double spow = S * S;         // S^(2-nk) running value
    double total = 0.0, last = 0.0;
    for (int k = 1; k <= 200; ++k) {
        coeff *= (x - (k - 1)) / k;
        apow *= alpha;
        spow /= Sn;
        last = coeff * apow * spow / (n * k - 2);
        total += last;
        if (std::fabs(last) < 1e-18 * (1.0 + std::fabs(total))) break;
    }
    if (err_bound) *err_bound = 2.0 * std::fabs(last);
    return total;
}

}  // namespace maext
