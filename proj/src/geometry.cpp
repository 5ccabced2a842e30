#include "maext/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "maext/error.hpp"

namespace maext {

namespace {

void check_dim(int n, bool engineering) {
    if (n < 2) throw InvalidArgument("dimension must be >= 2");
    if (n == 2 && !engineering)
        throw InvalidArgument("n = 2 requires the engineering-only flag (theory needs n >= 3)");
}

Vector sub(const Vector& a, const Vector& b) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

std::pair<double, double> singular_range(const Matrix& m, int n) {
    // eigenvalues of M'M give squared singular values
    Matrix mtm = matmul(transpose(m, n), m, n);
    Vector lam = sym_eigenvalues(mtm, n);
    return {std::sqrt(std::max(0.0, lam.back())), std::sqrt(std::max(0.0, lam.front()))};
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(DomainKind k, int n, Vector z, Matrix e, bool eng)
    : kind_(k), n_(n), center_(std::move(z)), shape_(std::move(e)), engineering_(eng) {
    Vector lam = sym_eigenvalues(shape_, n_);
    if (lam.back() <= 0) throw InvalidArgument("domain shape matrix must be positive definite");
    max_axis_ = 1.0 / std::sqrt(lam.back());
    min_axis_ = 1.0 / std::sqrt(lam.front());
}

Domain Domain::ball(Vector center, double radius, bool engineering_2d) {
    const int n = static_cast<int>(center.size());
    check_dim(n, engineering_2d);
    if (!(radius > 0)) throw InvalidArgument("ball radius must be > 0");
    Matrix e = identity(n);
    for (int i = 0; i < n; ++i) e[i * n + i] = 1.0 / (radius * radius);
    return Domain(DomainKind::Ball, n, std::move(center), std::move(e), engineering_2d);
}

Domain Domain::ellipsoid(Vector center, Vector semi_axes, bool engineering_2d) {
    const int n = static_cast<int>(center.size());
    check_dim(n, engineering_2d);
    if (static_cast<int>(semi_axes.size()) != n)
        throw InvalidArgument("semi-axes dimension mismatch");
    Matrix e = identity(n);
    for (int i = 0; i < n; ++i) {
        if (!(semi_axes[i] > 0)) throw InvalidArgument("semi-axes must be strictly positive");
        e[i * n + i] = 1.0 / (semi_axes[i] * semi_axes[i]);
    }
    return Domain(DomainKind::Ellipsoid, n, std::move(center), std::move(e), engineering_2d);
}

Domain Domain::quadric(Vector center, Matrix shape, bool engineering_2d) {
    const int n = static_cast<int>(center.size());
    check_dim(n, engineering_2d);
    return Domain(DomainKind::Ellipsoid, n, std::move(center), std::move(shape), engineering_2d);
}

double Domain::level(const Vector& x) const {
    Vector d = sub(x, center_);
    return dot(d, matvec(shape_, d, n_));
}

double Domain::circumradius_origin() const { return norm2(center_) + max_axis_; }

double Domain::radius() const {
    if (kind_ != DomainKind::Ball) throw InvalidArgument("radius(): domain is not a ball");
    return max_axis_;
}

std::optional<double> Domain::segment_crossing(const Vector& x, const Vector& d) const {
    // level(x + t d) = 1  <=>  a t^2 + 2 b t + c = 0
    Vector w = sub(x, center_);
    Vector ed = matvec(shape_, d, n_);
    const double a = dot(d, ed);
    const double b = dot(w, ed);
    const double c = dot(w, matvec(shape_, w, n_)) - 1.0;
    if (a <= 0) return std::nullopt;  // d == 0
    const double disc = b * b - a * c;
    if (disc < 0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // stable root pair
    const double q = -(b + (b >= 0 ? sq : -sq));
    double t1 = q / a, t2 = (q != 0) ? c / q : t1;
    if (t1 > t2) std::swap(t1, t2);
    const double eps = 1e-14;
    if (t1 > eps && t1 <= 1.0 + eps) return std::min(t1, 1.0);
    if (t2 > eps && t2 <= 1.0 + eps) return std::min(t2, 1.0);
    return std::nullopt;
}

Vector Domain::ray_boundary_point(const Vector& x) const {
    Vector d = sub(x, center_);
    double nd = norm2(d);
    if (nd == 0) {
        d.assign(n_, 0.0);
        d[0] = 1.0;
        nd = 1.0;
    }
    // (t d)' E (t d) = 1
    const double a = dot(d, matvec(shape_, d, n_));
    const double t = 1.0 / std::sqrt(a);
    Vector p(center_);
    for (int i = 0; i < n_; ++i) p[i] += t * d[i];
    return p;
}

// ---------------------------------------------------------------------------
// QuadraticAsymptote

QuadraticAsymptote::QuadraticAsymptote(Matrix a, Vector b_in, double c_in)
    : n(static_cast<int>(b_in.size())), A(std::move(a)), b(std::move(b_in)), c(c_in) {
    if (static_cast<int>(A.size()) != n * n)
        throw InvalidArgument("asymptote matrix size mismatch");
    const double scale = std::max(max_abs(A), 1.0);
    if (!is_symmetric(A, n, 1e-12 * scale))
        throw InvalidArgument("asymptote matrix must be symmetric");
    Vector lam = sym_eigenvalues(A, n);
    if (lam.back() <= 0) throw InvalidArgument("asymptote matrix must be positive definite");
    double det = 1;
    for (double l : lam) det *= l;
    if (std::fabs(det - 1.0) > 1e-12)
        throw InvalidArgument("asymptote matrix must have determinant 1 (got det = " +
                              std::to_string(det) + ")");
}

double QuadraticAsymptote::eval(const Vector& x) const {
    if (static_cast<int>(x.size()) != n)
        throw InvalidArgument("quadratic_eval: point dimension mismatch");
    return 0.5 * dot(x, matvec(A, x, n)) + dot(b, x) + c;
}

bool QuadraticAsymptote::is_normalized() const {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (A[i * n + j] != (i == j ? 1.0 : 0.0)) return false;
    for (double v : b)
        if (v != 0.0) return false;
    return true;
}

QuadraticAsymptote QuadraticAsymptote::with_constant(double c_new) const {
    QuadraticAsymptote q(*this);
    q.c = c_new;
    return q;
}

// ---------------------------------------------------------------------------
// BoundaryData

BoundaryData BoundaryData::constant(double value) {
    BoundaryData d;
    d.form_ = Form::Constant;
    d.value_ = value;
    return d;
}

BoundaryData BoundaryData::affine(Vector p, double q) {
    BoundaryData d;
    d.form_ = Form::Affine;
    d.p_ = std::move(p);
    d.value_ = q;
    d.n_ = static_cast<int>(d.p_.size());
    return d;
}

BoundaryData BoundaryData::quadratic_trace(QuadraticAsymptote q) {
    BoundaryData d;
    d.form_ = Form::QuadraticTrace;
    d.n_ = q.n;
    d.trace_ = std::make_shared<QuadraticAsymptote>(std::move(q));
    return d;
}

BoundaryData BoundaryData::spherical_harmonic(Vector center, double a0, Vector a, Matrix h) {
    BoundaryData d;
    const int n = static_cast<int>(center.size());
    if (static_cast<int>(a.size()) != n || static_cast<int>(h.size()) != n * n)
        throw InvalidArgument("spherical harmonic data dimension mismatch");
    if (!is_symmetric(h, n, 1e-12 * std::max(1.0, max_abs(h))))
        throw InvalidArgument("spherical harmonic quadratic part must be symmetric");
    double tr = 0;
    for (int i = 0; i < n; ++i) tr += h[i * n + i];
    if (std::fabs(tr) > 1e-10 * std::max(1.0, max_abs(h)))
        throw InvalidArgument("spherical harmonic quadratic part must be traceless");
    d.form_ = Form::SphericalHarmonic;
    d.center_ = std::move(center);
    d.value_ = a0;
    d.p_ = std::move(a);
    d.h_ = std::move(h);
    d.n_ = n;
    return d;
}

BoundaryData BoundaryData::affine_composed(BoundaryData base, Matrix m, Vector p, double q, int n) {
    BoundaryData d;
    d.form_ = Form::AffineComposed;
    d.base_ = std::make_shared<BoundaryData>(std::move(base));
    d.h_ = std::move(m);
    d.p_ = std::move(p);
    d.value_ = q;
    d.n_ = n;
    return d;
}

double BoundaryData::eval(const Vector& x) const {
    switch (form_) {
        case Form::Constant:
            return value_;
        case Form::Affine:
            return dot(p_, x) + value_;
        case Form::QuadraticTrace:
            return trace_->eval(x);
        case Form::SphericalHarmonic: {
            Vector w = x;
            for (int i = 0; i < n_; ++i) w[i] -= center_[i];
            const double r = norm2(w);
            if (r == 0) throw InvalidArgument("spherical harmonic data evaluated at its center");
            for (double& v : w) v /= r;
            return value_ + dot(p_, w) + dot(w, matvec(h_, w, n_));
        }
        case Form::AffineComposed: {
            Vector y = matvec(h_, x, n_);
            return base_->eval(y) - dot(p_, x) - value_;
        }
    }
    return 0;
}

BoundaryData BoundaryData::shifted(double delta) const {
    BoundaryData d(*this);
    switch (form_) {
        case Form::Constant:
        case Form::Affine:
        case Form::SphericalHarmonic:
            d.value_ += delta;
            break;
        case Form::QuadraticTrace:
            d.trace_ = std::make_shared<QuadraticAsymptote>(trace_->with_constant(trace_->c + delta));
            break;
        case Form::AffineComposed:
            d.value_ -= delta;
            break;
    }
    return d;
}

bool BoundaryData::operator==(const BoundaryData& o) const {
    if (form_ != o.form_) return false;
    if (value_ != o.value_ || p_ != o.p_ || h_ != o.h_ || center_ != o.center_) return false;
    if (static_cast<bool>(trace_) != static_cast<bool>(o.trace_)) return false;
    if (trace_ && (trace_->A != o.trace_->A || trace_->b != o.trace_->b || trace_->c != o.trace_->c))
        return false;
    if (static_cast<bool>(base_) != static_cast<bool>(o.base_)) return false;
    if (base_ && !(*base_ == *o.base_)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// RhsField

RhsField RhsField::one() { return RhsField(); }

RhsField RhsField::radial_perturb(double amplitude, double beta, double floor_gmin) {
    if (!(beta > 2)) throw InvalidArgument("radial perturbation requires beta > 2");
    if (!(floor_gmin > 0 && floor_gmin <= 1))
        throw InvalidArgument("g floor must satisfy 0 < g_min <= 1");
    if (1.0 + amplitude <= 0 && 1.0 + amplitude < floor_gmin) {
        // fine: the clamp keeps g positive
    }
    RhsField g;
    g.form_ = Form::RadialPerturb;
    g.amplitude_ = amplitude;
    g.beta_ = beta;
    g.floor_ = floor_gmin;
    return g;
}

double RhsField::profile(double rho) const { return 1.0 + profile_deviation(rho); }

double RhsField::profile_deviation(double rho) const {
    if (form_ == Form::One) return 0.0;
    const double d = amplitude_ * std::pow(1.0 + rho * rho, -0.5 * beta_);
    return std::max(floor_ - 1.0, d);
}

double RhsField::eval(const Vector& x) const {
    if (form_ == Form::One) return 1.0;
    double rho;
    if (identity_map_) {
        rho = norm2(x);
    } else {
        Vector y = matvec(map_a_, x, map_n_);
        for (int i = 0; i < map_n_; ++i) y[i] += map_b_[i];
        rho = norm2(y);
    }
    return profile(rho);
}

double RhsField::radial_majorant(double r) const {
    return 1.0 + radial_majorant_deviation(r);
}

double RhsField::radial_majorant_deviation(double r) const {
    if (form_ == Form::One) return 0.0;
    const double lo = std::max(0.0, k_lo_ * r - m0_);
    const double hi = k_hi_ * r + m0_;
    // profile is monotone in rho (clamping preserves monotonicity)
    return amplitude_ >= 0 ? profile_deviation(lo) : profile_deviation(hi);
}

bool RhsField::is_centered_radial() const { return identity_map_; }

RhsField RhsField::composed_linear(const Matrix& m, int n) const {
    RhsField g(*this);
    if (form_ == Form::One) return g;
    if (identity_map_) {
        g.map_a_ = m;
        g.map_b_.assign(n, 0.0);
        g.map_n_ = n;
    } else {
        g.map_a_ = matmul(map_a_, m, map_n_);
    }
    g.identity_map_ = false;
    auto [slo, shi] = singular_range(g.map_a_, g.map_n_);
    g.k_lo_ = slo;
    g.k_hi_ = shi;
    g.m0_ = norm2(g.map_b_);
    return g;
}

RhsField RhsField::composed_shift_scale(double scale, const Vector& shift) const {
    RhsField g(*this);
    if (form_ == Form::One) return g;
    const int n = static_cast<int>(shift.size());
    if (identity_map_) {
        g.map_a_ = identity(n);
        g.map_b_.assign(n, 0.0);
        g.map_n_ = n;
        g.identity_map_ = false;
    }
    // x = scale*y + shift: a' = scale*a, b' = a*shift + b
    Vector ash = matvec(g.map_a_, shift, g.map_n_);
    for (int i = 0; i < g.map_n_; ++i) g.map_b_[i] += ash[i];
    for (double& v : g.map_a_) v *= scale;
    auto [slo, shi] = singular_range(g.map_a_, g.map_n_);
    g.k_lo_ = slo;
    g.k_hi_ = shi;
    g.m0_ = norm2(g.map_b_);
    return g;
}

bool RhsField::operator==(const RhsField& o) const {
    return form_ == o.form_ && amplitude_ == o.amplitude_ && beta_ == o.beta_ &&
           floor_ == o.floor_ && identity_map_ == o.identity_map_ && map_a_ == o.map_a_ &&
           map_b_ == o.map_b_;
}

// ---------------------------------------------------------------------------
// ProblemSpec / normalize_affine

ProblemSpec::ProblemSpec(Domain d, BoundaryData phi_in, RhsField g_in, QuadraticAsymptote q)
    : domain(std::move(d)), phi(std::move(phi_in)), g(std::move(g_in)), asymptote(std::move(q)) {
    if (asymptote.n != domain.dim())
        throw InvalidArgument("asymptote dimension does not match domain");
}

double AffineMap::det() const {
    if (identity) return 1.0;
    return sym_det(T, n);
}

std::pair<ProblemSpec, AffineMap> normalize_affine(const ProblemSpec& p) {
    const int n = p.dim();
    AffineMap map;
    map.n = n;
    if (p.asymptote.is_normalized()) {
        map.T = identity(n);
        map.p.assign(n, 0.0);
        map.identity = true;
        return {p, map};
    }

    const Matrix s = spd_sqrt(p.asymptote.A, n);
    const Matrix t = spd_inverse(s, n);
    Vector lin = matvec(t, p.asymptote.b, n);

    // image domain: z_hat = S z, E_hat = T E T
    Vector z_hat = matvec(s, p.domain.center(), n);
    Matrix e_hat = matmul(matmul(t, p.domain.shape(), n), t, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (e_hat[i * n + j] + e_hat[j * n + i]);
            e_hat[i * n + j] = e_hat[j * n + i] = avg;
        }
    Domain d_hat = Domain::quadric(std::move(z_hat), std::move(e_hat), p.domain.engineering_2d());

    BoundaryData phi_hat = BoundaryData::affine_composed(p.phi, t, lin, 0.0, n);
    RhsField g_hat = p.g.composed_linear(t, n);
    QuadraticAsymptote q_hat(identity(n), Vector(n, 0.0), p.asymptote.c);

    map.T = t;
    map.p = lin;
    map.q = 0;
    map.identity = false;
    return {ProblemSpec(std::move(d_hat), std::move(phi_hat), std::move(g_hat), std::move(q_hat)),
            map};
}

// ---------------------------------------------------------------------------
// Certified boundary minimum

namespace {

// phi as a global quadratic 1/2 x'Qx + l.x + k, when the form permits
struct LoweredQuadratic {
    Matrix q;
    Vector l;
    double k = 0;
};

std::optional<LoweredQuadratic> lower_to_quadratic(const BoundaryData& phi, int n) {
    using Form = BoundaryData::Form;
    switch (phi.form()) {
        case Form::Constant:
            return LoweredQuadratic{Matrix(n * n, 0.0), Vector(n, 0.0), phi.constant_value()};
        case Form::Affine:
            return LoweredQuadratic{Matrix(n * n, 0.0), phi.affine_p(), phi.affine_q()};
        case Form::QuadraticTrace:
            return LoweredQuadratic{phi.trace()->A, phi.trace()->b, phi.trace()->c};
        case Form::SphericalHarmonic:
            return std::nullopt;
        case Form::AffineComposed: {
            auto base = lower_to_quadratic(*phi.base(), n);
            if (!base) return std::nullopt;
            const Matrix& m = phi.composed_m();
            Matrix q = matmul(matmul(transpose(m, n), base->q, n), m, n);
            Vector l = matvec(transpose(m, n), base->l, n);
            for (int i = 0; i < n; ++i) l[i] -= phi.affine_p()[i];
            return LoweredQuadratic{std::move(q), std::move(l), base->k - phi.affine_q()};
        }
    }
    return std::nullopt;
}

// min of 1/2 w'Bw + g.w over the unit sphere (trust-region boundary problem)
double min_quadratic_on_sphere(const Matrix& b, const Vector& g, int n) {
    Matrix v;
    Vector lam = sym_eigenvalues(b, n, &v);  // descending
    Vector gh(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) gh[i] += v[k * n + i] * g[k];

    const double lmin = lam.back();
    const double scale = std::max({1.0, std::fabs(lam.front()), norm2(g)});

    auto value_at = [&](double mu) {
        // w_i = -gh_i / (lam_i + mu); returns objective
        double val = 0;
        for (int i = 0; i < n; ++i) {
            const double d = lam[i] + mu;
            const double w = (std::fabs(d) > 1e-300) ? -gh[i] / d : 0.0;
            val += 0.5 * lam[i] * w * w + gh[i] * w;
        }
        return val;
    };
    auto norm_sq = [&](double mu) {
        double s = 0;
        for (int i = 0; i < n; ++i) {
            const double d = lam[i] + mu;
            const double w = (std::fabs(d) > 1e-300) ? -gh[i] / d : 0.0;
            s += w * w;
        }
        return s;
    };

    // hard case: components of g along the lowest eigenspace vanish
    double tail_sq = 0;
    bool low_g_zero = true;
    for (int i = 0; i < n; ++i) {
        if (lam[i] - lmin < 1e-12 * scale) {
            if (std::fabs(gh[i]) > 1e-12 * scale) low_g_zero = false;
        } else {
            const double w = gh[i] / (lam[i] - lmin);
            tail_sq += w * w;
        }
    }
    if (low_g_zero && tail_sq <= 1.0) {
        // mu = -lmin, slack absorbed by the lowest eigen-direction
        double val = 0;
        for (int i = 0; i < n; ++i) {
            if (lam[i] - lmin < 1e-12 * scale) continue;
            const double w = -gh[i] / (lam[i] - lmin);
            val += 0.5 * lam[i] * w * w + gh[i] * w;
        }
        val += 0.5 * lmin * (1.0 - tail_sq);
        return val;
    }

    // secular equation |w(mu)|^2 = 1, decreasing in mu on (-lmin, inf)
    double lo = -lmin, hi = -lmin + std::max(1.0, norm2(g)) + scale;
    while (norm_sq(hi) > 1.0) hi = -lmin + 2 * (hi + lmin);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (norm_sq(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return value_at(0.5 * (lo + hi));
}

}  // namespace

double boundary_data_min(const BoundaryData& phi, const Domain& d) {
    const int n = d.dim();
    const Matrix g_map = spd_sqrt(spd_inverse(d.shape(), n), n);  // E^{-1/2}
    const Vector& z = d.center();

    if (auto low = lower_to_quadratic(phi, n)) {
        // phi(z + G w) = 1/2 w'(G Q G)w + (G(Qz + l)).w + phi(z)
        Matrix b = matmul(matmul(g_map, low->q, n), g_map, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double avg = 0.5 * (b[i * n + j] + b[j * n + i]);
                b[i * n + j] = b[j * n + i] = avg;
            }
        Vector qz = matvec(low->q, z, n);
        for (int i = 0; i < n; ++i) qz[i] += low->l[i];
        Vector gv = matvec(g_map, qz, n);
        const double k0 = 0.5 * dot(z, matvec(low->q, z, n)) + dot(low->l, z) + low->k;
        const double m = min_quadratic_on_sphere(b, gv, n) + k0;
        const double slack = 1e-12 * std::max({1.0, std::fabs(m), max_abs(b), norm2(gv)});
        return m - slack;
    }

    if (phi.form() == BoundaryData::Form::SphericalHarmonic && d.kind() == DomainKind::Ball &&
        phi.sh_center() == z) {
        // directions live on the unit sphere directly
        Matrix b = phi.sh_h();
        for (double& v : b) v *= 2.0;  // our quadratic form carries the 1/2
        const double m = min_quadratic_on_sphere(b, phi.sh_a(), n) + phi.sh_a0();
        const double slack = 1e-12 * std::max({1.0, std::fabs(m), max_abs(b)});
        return m - slack;
    }

    // dense sampled fallback with Lipschitz slack (n == 3 only)
    if (n != 3)
        throw InvalidArgument("boundary_data_min: data form requires n == 3 sampling fallback");
    const int mres = 600;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= mres; ++i) {
        const double th = M_PI * i / mres;
        for (int j = 0; j < 2 * mres; ++j) {
            const double ph = M_PI * j / mres;
            Vector w = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
            Vector x = matvec(g_map, w, n);
            for (int k = 0; k < n; ++k) x[k] += z[k];
            best = std::min(best, phi.eval(x));
        }
    }
    // crude Lipschitz slack: data gradients are bounded by coefficient norms
    double lip = 1.0;
    if (phi.form() == BoundaryData::Form::SphericalHarmonic)
        lip = norm2(phi.sh_a()) + 2.0 * max_abs(phi.sh_h()) * 3.0;
    const double mesh = M_PI / mres * d.max_semi_axis() * 4.0;
    return best - lip * mesh;
}

}  // namespace maext
