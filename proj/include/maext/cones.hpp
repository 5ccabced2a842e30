#pragma once

#include "maext/field.hpp"
#include "maext/linalg.hpp"

namespace maext {

/// Eigenvalues of a symmetric matrix, sorted descending.
struct EigenTuple {
    Vector lambda;

    explicit EigenTuple(Vector l);
    int size() const { return static_cast<int>(lambda.size()); }
};

/// k-th elementary symmetric polynomial via the running-product recurrence.
double sigma_k(const Vector& lambda, int k);

enum class ConeForm { DetRoot, SigmaKRoot, SigmaQuotient };

/// Concave symmetric eigenvalue function f with its cone Gamma:
///   DetRoot        f = (sigma_n)^(1/n),            Gamma = Gamma_n
///   SigmaKRoot     f = (sigma_k)^(1/k),            Gamma = Gamma_k
///   SigmaQuotient  f = (sigma_k/sigma_l)^(1/(k-l)), Gamma = Gamma_k, k > l.
/// The equation is f(lambda(D^2 u)) = level.
struct ConeOperator {
    ConeForm form;
    int n;
    int k = 0, l = 0;
    double level = 1.0;

    static ConeOperator det_root(int n, double level = 1.0);
    static ConeOperator sigma_root(int k, int n, double level = 1.0);
    static ConeOperator sigma_quotient(int k, int l, int n, double level = 1.0);

    int cone_k() const { return form == ConeForm::DetRoot ? n : k; }
};

enum class ConeLocation { Inside, OnBoundary, Outside };

/// Sign conditions sigma_j > 0, j = 1..k, on the scale-normalized tuple;
/// OnBoundary when the minimal margin is within tol.
ConeLocation cone_membership(const ConeOperator& op, const EigenTuple& t, double tol = 1e-12);

/// f(lambda); requires lambda in the closed cone.
double f_eval(const ConeOperator& op, const EigenTuple& t);

/// Jacobi eigenvalues of a symmetric matrix (descending).
EigenTuple eigenvalues_sym(const Matrix& m, int n);

struct ComboVerdict {
    bool ok;
    double margin;  ///< f(lambda(alpha M1 + (1-alpha) M2)) - level
};

/// Matrix-level shadow of the convex-combination lemma: if f(lambda(M1)) and
/// f(lambda(M2)) sit at or above the level, so does the combination, up to
/// 1e-10.
ComboVerdict combo_level_check(const ConeOperator& op, const Matrix& m1, const Matrix& m2,
                               double alpha);

struct FieldConeVerdict {
    bool ok = true;
    std::int64_t worst_box = -1;
    double margin = 0;       ///< min over nodes of f - level
    std::int64_t checked = 0;
};

/// Full finite-difference Hessian test f(lambda(D_h^2 u)) >= level - tol with
/// lambda in the closed cone, at interior nodes whose 3^n neighborhood is
/// stored and clear of the inner boundary.
FieldConeVerdict general_discrete_subsolution(const GridField& u, const ConeOperator& op,
                                              double tol);

/// Minimum of f over the evaluable nodes (used to self-calibrate levels).
double field_cone_min(const GridField& u, const ConeOperator& op);

}  // namespace maext
