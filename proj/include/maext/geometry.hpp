#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "maext/linalg.hpp"

namespace maext {

enum class DomainKind { Ball, Ellipsoid };

/// Bounded strictly convex inner domain: a ball or an ellipsoid, stored as the
/// quadric {x : (x-z)' E (x-z) < 1} with E symmetric positive definite.
/// Affine normalization can produce non-axis-aligned ellipsoids, so E is kept
/// as a full matrix.
class Domain {
public:
    static Domain ball(Vector center, double radius, bool engineering_2d = false);
    static Domain ellipsoid(Vector center, Vector semi_axes, bool engineering_2d = false);
    /// General quadric form; used by normalize_affine for ellipsoid images.
    static Domain quadric(Vector center, Matrix shape, bool engineering_2d = false);

    int dim() const { return n_; }
    DomainKind kind() const { return kind_; }
    const Vector& center() const { return center_; }
    const Matrix& shape() const { return shape_; }
    bool engineering_2d() const { return engineering_; }

    /// (x-z)' E (x-z); < 1 inside, 1 on the boundary.
    double level(const Vector& x) const;
    bool contains_closed(const Vector& x) const { return level(x) <= 1.0; }

    double max_semi_axis() const { return max_axis_; }
    double min_semi_axis() const { return min_axis_; }
    /// max_{x in closure D} |x| about the origin.
    double circumradius_origin() const;
    /// radius of the ball (throws unless kind == Ball)
    double radius() const;

    /// First intersection of the segment x -> x+d with the boundary, as the
    /// fraction t in (0,1]; nullopt when the segment stays outside.
    std::optional<double> segment_crossing(const Vector& x, const Vector& d) const;

    /// Boundary point hit by the ray from the center through x (x != center).
    Vector ray_boundary_point(const Vector& x) const;

private:
    Domain(DomainKind k, int n, Vector z, Matrix e, bool eng);
    DomainKind kind_;
    int n_;
    Vector center_;
    Matrix shape_;
    double max_axis_, min_axis_;
    bool engineering_;
};

/// Target behavior at infinity: 1/2 x'Ax + b.x + c with A in the set of
/// symmetric positive definite matrices of determinant 1.
struct QuadraticAsymptote {
    int n;
    Matrix A;
    Vector b;
    double c;

    QuadraticAsymptote(Matrix a, Vector b_in, double c_in);

    double eval(const Vector& x) const;
    bool is_normalized() const;  ///< A == I and b == 0 exactly
    QuadraticAsymptote with_constant(double c_new) const;
};

/// Dirichlet data on the inner boundary.  All forms are smooth closed forms;
/// AffineComposed is produced by normalize_affine (base(M y) - p.y - q).
class BoundaryData {
public:
    enum class Form { Constant, Affine, QuadraticTrace, SphericalHarmonic, AffineComposed };

    static BoundaryData constant(double value);
    static BoundaryData affine(Vector p, double q);
    static BoundaryData quadratic_trace(QuadraticAsymptote q);
    /// a0 + a.w + w'Hw on unit directions w from `center`; H symmetric traceless.
    static BoundaryData spherical_harmonic(Vector center, double a0, Vector a, Matrix h);
    static BoundaryData affine_composed(BoundaryData base, Matrix m, Vector p, double q, int n);

    Form form() const { return form_; }
    double eval(const Vector& x) const;
    BoundaryData shifted(double delta) const;  ///< data + delta

    bool operator==(const BoundaryData& o) const;

    // form-specific accessors used by the certified minimizer and serializer
    double constant_value() const { return value_; }
    const Vector& affine_p() const { return p_; }
    double affine_q() const { return value_; }
    const QuadraticAsymptote* trace() const { return trace_.get(); }
    const Vector& sh_center() const { return center_; }
    double sh_a0() const { return value_; }
    const Vector& sh_a() const { return p_; }
    const Matrix& sh_h() const { return h_; }
    const BoundaryData* base() const { return base_.get(); }
    const Matrix& composed_m() const { return h_; }

private:
    BoundaryData() = default;
    Form form_ = Form::Constant;
    double value_ = 0;  // constant / affine q / sh a0 / composed q
    Vector p_;          // affine p / sh a / composed p
    Matrix h_;          // sh H / composed M
    Vector center_;     // sh center
    std::shared_ptr<const QuadraticAsymptote> trace_;
    std::shared_ptr<const BoundaryData> base_;
    int n_ = 0;
};

/// Right-hand side g.  Either identically 1 or a radial perturbation
/// max(g_min, 1 + a (1+rho^2)^(-beta/2)) with rho = |W x + w0|; the map
/// (W, w0) starts as the identity and accumulates affine normalizations,
/// which keeps the exact radial majorant computable.
class RhsField {
public:
    enum class Form { One, RadialPerturb };

    static RhsField one();
    static RhsField radial_perturb(double amplitude, double beta, double floor_gmin);

    Form form() const { return form_; }
    bool is_one() const { return form_ == Form::One; }
    double amplitude() const { return amplitude_; }
    double beta() const { return beta_; }
    double floor_gmin() const { return floor_; }

    double eval(const Vector& x) const;
    /// g as a function of the base radius rho (before clamping range effects).
    double profile(double rho) const;
    /// g(rho) - 1 evaluated without cancellation (the quadratures feed on it).
    double profile_deviation(double rho) const;

    /// Exact sup of g over the sphere |x| = r (accounts for the accumulated map).
    double radial_majorant(double r) const;
    /// sup over the sphere of g - 1, cancellation-free.
    double radial_majorant_deviation(double r) const;
    /// True when the majorant is exact also as a pointwise sup (identity map).
    bool is_centered_radial() const;

    /// g'(x) = g(M x + v) with M symmetric positive semi-definite.
    RhsField composed_linear(const Matrix& m, int n) const;
    RhsField composed_shift_scale(double scale, const Vector& shift) const;

    bool operator==(const RhsField& o) const;

private:
    Form form_ = Form::One;
    double amplitude_ = 0, beta_ = 3, floor_ = 0.5;
    // base radius over the sphere |x|=r lies in [max(0, k_lo r - m0), k_hi r + m0]
    double k_lo_ = 1, k_hi_ = 1, m0_ = 0;
    bool identity_map_ = true;
    Matrix map_a_;  // empty => identity
    Vector map_b_;  // empty => zero
    int map_n_ = 0;
};

/// Full problem data tuple (D, phi, g, A, b, c).
struct ProblemSpec {
    Domain domain;
    BoundaryData phi;
    RhsField g;
    QuadraticAsymptote asymptote;

    ProblemSpec(Domain d, BoundaryData phi_in, RhsField g_in, QuadraticAsymptote q);
    int dim() const { return domain.dim(); }
    bool is_normalized() const { return asymptote.is_normalized(); }
};

/// Volume-preserving normalization record: u solves the original problem iff
/// u_hat(x) = u(T x) - (p.x + q) solves the normalized one.
struct AffineMap {
    Matrix T;
    Vector p;
    double q = 0;
    int n = 0;
    bool identity = true;

    double det() const;
};

/// Reduce to A = I, b = 0 via the principal square root of A (scaled to
/// det 1 already by the asymptote invariant).  Exact identity when the spec
/// is already normalized.
std::pair<ProblemSpec, AffineMap> normalize_affine(const ProblemSpec& p);

/// Certified lower bound for min over the inner boundary of phi (exact for
/// every closed form on balls, and for constant/affine/quadratic data on
/// ellipsoids; spherical-harmonic data on ellipsoids falls back to dense
/// sampling with a Lipschitz slack, n == 3 only).
double boundary_data_min(const BoundaryData& phi, const Domain& d);

}  // namespace maext
