#include "maext/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "maext/error.hpp"

namespace maext {

double dot(const Vector& a, const Vector& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector matvec(const Matrix& m, const Vector& x, int n) {
    Vector y(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y[i] += m[i * n + j] * x[j];
    return y;
}

Matrix matmul(const Matrix& a, const Matrix& b, int n) {
    Matrix c(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            for (int j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

Matrix transpose(const Matrix& a, int n) {
    Matrix t(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t[j * n + i] = a[i * n + j];
    return t;
}

Matrix identity(int n) {
    Matrix m(n * n, 0.0);
    for (int i = 0; i < n; ++i) m[i * n + i] = 1.0;
    return m;
}

double max_abs(const Matrix& a) {
    double m = 0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

bool is_symmetric(const Matrix& a, int n, double tol) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::fabs(a[i * n + j] - a[j * n + i]) > tol) return false;
    return true;
}

Vector sym_eigenvalues(const Matrix& m, int n, Matrix* vectors) {
    const double scale = std::max(max_abs(m), 1e-300);
    if (!is_symmetric(m, n, 1e-12 * scale))
        throw InvalidArgument("sym_eigenvalues: matrix not symmetric");

    Matrix a = m;
    Matrix v = identity(n);

    auto offdiag = [&]() {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
        return std::sqrt(2 * s);
    };

    for (int sweep = 0; sweep < 100 && offdiag() > 1e-13 * scale; ++sweep) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::fabs(apq) < 1e-300) continue;
                const double app = a[p * n + p], aqq = a[q * n + q];
                const double theta = (aqq - app) / (2 * apq);
                // stable tangent of the rotation angle
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a[i * n + i] > a[j * n + j]; });

    Vector lambda(n);
    for (int i = 0; i < n; ++i) lambda[i] = a[order[i] * n + order[i]];
    if (vectors) {
        vectors->assign(n * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) (*vectors)[k * n + i] = v[k * n + order[i]];
    }
    return lambda;
}

static Matrix spectral_apply(const Matrix& m, int n, double (*f)(double), const char* who) {
    Matrix v;
    Vector lam = sym_eigenvalues(m, n, &v);
    for (double& l : lam) {
        if (l <= 0) throw InvalidArgument(std::string(who) + ": matrix not positive definite");
        l = f(l);
    }
    Matrix r(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int k = 0; k < n; ++k) s += v[i * n + k] * lam[k] * v[j * n + k];
            r[i * n + j] = s;
        }
    // exact symmetry by construction up to roundoff; enforce it
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (r[i * n + j] + r[j * n + i]);
            r[i * n + j] = r[j * n + i] = avg;
        }
    return r;
}

Matrix spd_sqrt(const Matrix& m, int n) {
    return spectral_apply(m, n, [](double l) { return std::sqrt(l); }, "spd_sqrt");
}

Matrix spd_inverse(const Matrix& m, int n) {
    return spectral_apply(m, n, [](double l) { return 1.0 / l; }, "spd_inverse");
}

double sym_det(const Matrix& m, int n) {
    Vector lam = sym_eigenvalues(m, n);
    double d = 1;
    for (double l : lam) d *= l;
    return d;
}

}  // namespace maext
