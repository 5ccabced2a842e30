#pragma once

#include <cstddef>
#include <vector>

namespace maext {

/// Dense symmetric n-by-n matrix, row-major, n small (2..8).
using Matrix = std::vector<double>;
using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);

/// y = M x for row-major n-by-n M.
Vector matvec(const Matrix& m, const Vector& x, int n);
/// C = A B, all row-major n-by-n.
Matrix matmul(const Matrix& a, const Matrix& b, int n);
Matrix transpose(const Matrix& a, int n);
Matrix identity(int n);

double max_abs(const Matrix& a);
bool is_symmetric(const Matrix& a, int n, double tol);

/// Cyclic Jacobi eigensolver for symmetric matrices.
/// Eigenvalues returned sorted descending; `vectors` (if non-null) receives
/// the orthonormal eigenvectors as columns of a row-major matrix, so that
/// M = V diag(lambda) V'.  Iterates until the off-diagonal Frobenius norm
/// drops below 1e-13 * ||M||.
Vector sym_eigenvalues(const Matrix& m, int n, Matrix* vectors = nullptr);

/// Principal (SPD) square root via spectral factorization.  Throws
/// InvalidArgument if any eigenvalue is <= 0.
Matrix spd_sqrt(const Matrix& m, int n);
Matrix spd_inverse(const Matrix& m, int n);

/// Determinant of a symmetric matrix via its eigenvalues.
double sym_det(const Matrix& m, int n);

}  // namespace maext
