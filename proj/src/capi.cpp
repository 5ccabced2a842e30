#include "maext.h"

#include <cstring>
#include <random>
#include <string>

#include "maext/cones.hpp"
#include "maext/error.hpp"
#include "maext/perron.hpp"
#include "maext/solver.hpp"
#include "maext/spec_io.hpp"

using namespace maext;

namespace {

thread_local std::string g_last_error;

maext_status fail(int code, const char* what) {
    g_last_error = what;
    return static_cast<maext_status>(code);
}

template <typename Fn>
maext_status guarded(Fn&& fn) {
    try {
        fn();
        return MAEXT_OK;
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail(kErrInternal, e.what());
    }
}

QuadratureSettings settings(double abs_tol) {
    QuadratureSettings q;
    if (abs_tol > 0) q.abs_tol = abs_tol;
    return q;
}

maext_classification to_c(Classification c) {
    switch (c) {
        case Classification::Exists: return MAEXT_EXISTS;
        case Classification::FailsBoundary: return MAEXT_FAILS_BOUNDARY;
        case Classification::NotConverged: return MAEXT_NOT_CONVERGED;
    }
    return MAEXT_NOT_CONVERGED;
}

ConeOperator make_cone(maext_cone_form form, int k, int l, int dim, double level) {
    switch (form) {
        case MAEXT_CONE_DET_ROOT: return ConeOperator::det_root(dim, level);
        case MAEXT_CONE_SIGMA_ROOT: return ConeOperator::sigma_root(k, dim, level);
        case MAEXT_CONE_SIGMA_QUOTIENT: return ConeOperator::sigma_quotient(k, l, dim, level);
    }
    throw InvalidArgument("unknown cone form");
}

}  // namespace

struct maext_problem {
    LoadedProblem loaded;       // as parsed
    ProblemSpec normalized;     // solver-facing spec
    AffineMap map;
};

struct maext_grid {
    std::shared_ptr<const AnnularGrid> grid;
    StencilDictionary dict;
};

struct maext_field {
    GridField field;
};

struct maext_threshold {
    ThresholdReport report;
};

extern "C" {

const char* maext_version(void) { return "0.1.0"; }
const char* maext_last_error(void) { return g_last_error.c_str(); }

/* ---- radial ------------------------------------------------------------ */

maext_status maext_cstar(int dim, double abs_tol, double* value, double* err_bound) {
    return guarded([&] {
        if (!value) throw InvalidArgument("value pointer is null");
        double err = 0;
        *value = critical_constant_ball(dim, settings(abs_tol), &err);
        if (err_bound) *err_bound = err;
    });
}

maext_status maext_radial_derivative(int dim, double alpha, double r, double* out) {
    return guarded([&] { *out = radial_derivative(RadialProfile(dim, alpha), r); });
}

maext_status maext_radial_value(int dim, double alpha, double r, double abs_tol, double* out) {
    return guarded([&] { *out = radial_value(RadialProfile(dim, alpha), r, settings(abs_tol)); });
}

maext_status maext_asymptotic_constant(int dim, double alpha, double abs_tol, double* out) {
    return guarded(
        [&] { *out = asymptotic_constant(RadialProfile(dim, alpha), settings(abs_tol)); });
}

maext_status maext_alpha_from_constant(double c, int dim, double abs_tol, double* alpha) {
    return guarded([&] { *alpha = alpha_from_constant(c, dim, settings(abs_tol)); });
}

/* ---- problems ----------------------------------------------------------- */

maext_status maext_problem_parse_file(const char* path, maext_problem** out) {
    return guarded([&] {
        if (!path || !out) throw InvalidArgument("null argument");
        LoadedProblem lp = parse_problem_file(path);
        auto [normalized, map] = normalize_affine(lp.spec);
        *out = new maext_problem{std::move(lp), std::move(normalized), std::move(map)};
    });
}

maext_status maext_problem_parse_text(const char* text, maext_problem** out) {
    return guarded([&] {
        if (!text || !out) throw InvalidArgument("null argument");
        LoadedProblem lp = parse_problem_text(text);
        auto [normalized, map] = normalize_affine(lp.spec);
        *out = new maext_problem{std::move(lp), std::move(normalized), std::move(map)};
    });
}

void maext_problem_release(maext_problem* p) { delete p; }

int maext_problem_dim(const maext_problem* p) { return p->loaded.spec.dim(); }
double maext_problem_constant(const maext_problem* p) { return p->loaded.spec.asymptote.c; }

void maext_problem_grid_params(const maext_problem* p, double* h, double* R, int* width) {
    if (h) *h = p->loaded.grid.h;
    if (R) *R = p->loaded.grid.R;
    if (width) *width = p->loaded.grid.width;
}

int maext_problem_was_normalized(const maext_problem* p) { return p->map.identity ? 1 : 0; }
double maext_problem_normalization_det(const maext_problem* p) { return p->map.det(); }

maext_status maext_nonexistence_bound(const maext_problem* p, double abs_tol, double* out) {
    return guarded([&] { *out = nonexistence_bound(p->normalized, settings(abs_tol)); });
}

/* ---- grids -------------------------------------------------------------- */

maext_status maext_grid_build(const maext_problem* p, double h, double R, int width,
                              maext_grid** out) {
    return guarded([&] {
        if (!out) throw InvalidArgument("null argument");
        const double hh = h > 0 ? h : p->loaded.grid.h;
        const double rr = R > 0 ? R : p->loaded.grid.R;
        const int w = width > 0 ? width : p->loaded.grid.width;
        auto grid = build_grid(p->normalized.domain, rr, hh, w);
        *out = new maext_grid{std::move(grid), StencilDictionary::build(p->normalized.dim(), w)};
    });
}

void maext_grid_release(maext_grid* g) { delete g; }
int64_t maext_grid_node_count(const maext_grid* g) { return g->grid->stored_count(); }
int64_t maext_grid_interior_count(const maext_grid* g) { return g->grid->interior_count(); }
double maext_grid_h(const maext_grid* g) { return g->grid->spacing(); }
double maext_grid_R(const maext_grid* g) { return g->grid->truncation_radius(); }

/* ---- fields ------------------------------------------------------------- */

void maext_field_release(maext_field* f) { delete f; }
int64_t maext_field_size(const maext_field* f) { return f->field.size(); }

maext_status maext_field_save(const maext_field* f, const char* path) {
    return guarded([&] { save_snapshot(f->field, path); });
}

maext_status maext_field_load(const maext_problem* p, const maext_grid* g, const char* path,
                              maext_field** out) {
    return guarded([&] {
        auto binding =
            std::make_shared<const BoundaryBinding>(p->normalized.phi, p->normalized.domain);
        *out = new maext_field{load_snapshot(g->grid, path, std::move(binding))};
    });
}

maext_status maext_field_write_csv(const maext_field* f, const char* path) {
    return guarded([&] { write_field_csv(f->field, path); });
}

maext_status maext_field_sup_diff(const maext_field* a, const maext_field* b, double* out) {
    return guarded([&] { *out = a->field.sup_diff(b->field); });
}

maext_status maext_field_envelope(const maext_field* f, double eps, maext_field** out) {
    return guarded([&] { *out = new maext_field{eps_upper_envelope(f->field, eps)}; });
}

/* ---- solver ------------------------------------------------------------- */

namespace {

SolveOptions to_options(const maext_solve_options* o) {
    SolveOptions s;
    if (!o) return s;
    if (o->sweep_tol > 0) s.sweep_tol = o->sweep_tol;
    if (o->max_sweeps > 0) s.max_sweeps = o->max_sweeps;
    if (o->tol_b > 0) s.tol_b = o->tol_b;
    if (o->tol_ma > 0) s.tol_ma = o->tol_ma;
    if (o->corrected_outer) s.mode = OuterMode::Corrected;
    if (o->omega > 0) s.omega = o->omega;
    return s;
}

}  // namespace

maext_status maext_solve(const maext_problem* p, const maext_grid* g,
                         const maext_solve_options* options, maext_field** field,
                         maext_solve_stats* stats) {
    return guarded([&] {
        SolveReport rep = solve_truncated(p->normalized, g->grid, g->dict, to_options(options));
        if (stats) {
            stats->ma_residual = rep.ma_residual;
            stats->boundary_residual = rep.boundary_residual;
            stats->iterations = rep.iterations;
            stats->classification = to_c(rep.classification);
            stats->fitted_correction = rep.fitted_correction;
            stats->tol_b = rep.tol_b;
            stats->tol_ma = rep.tol_ma;
        }
        if (field) *field = new maext_field{std::move(rep.field)};
    });
}

maext_status maext_solve_radial_oracle(const maext_problem* p, const maext_grid* g, double abs_tol,
                                       maext_field** field) {
    return guarded([&] {
        *field = new maext_field{solve_exterior_radial(p->normalized, g->grid, settings(abs_tol))};
    });
}

maext_status maext_estimate_threshold(const maext_problem* p, const maext_grid* g,
                                      const maext_solve_options* options, double tol_c,
                                      int richardson_in_R, maext_threshold** out) {
    return guarded([&] {
        ThresholdOptions topts;
        topts.solve = to_options(options);
        if (tol_c > 0) topts.tol_c = tol_c;
        topts.richardson_in_R = richardson_in_R != 0;
        *out = new maext_threshold{estimate_threshold(p->normalized, g->grid, g->dict, topts)};
    });
}

void maext_threshold_release(maext_threshold* t) { delete t; }

void maext_threshold_bracket(const maext_threshold* t, double* c_low, double* c_high) {
    if (c_low) *c_low = t->report.c_low;
    if (c_high) *c_high = t->report.c_high;
}

int maext_threshold_probe_count(const maext_threshold* t) {
    return static_cast<int>(t->report.evaluations.size());
}

void maext_threshold_probe(const maext_threshold* t, int i, double* c, maext_classification* cls,
                           double* boundary_residual) {
    const auto& e = t->report.evaluations.at(i);
    if (c) *c = e.c;
    if (cls) *cls = to_c(e.classification);
    if (boundary_residual) *boundary_residual = e.boundary_residual;
}

int maext_threshold_reference(const maext_threshold* t, double* out) {
    if (!t->report.reference) return 0;
    if (out) *out = *t->report.reference;
    return 1;
}

int maext_threshold_richardson(const maext_threshold* t, double* out) {
    if (!t->report.richardson) return 0;
    if (out) *out = *t->report.richardson;
    return 1;
}

/* ---- Perron ------------------------------------------------------------- */

maext_status maext_perron_iterate(const maext_problem* p, const maext_grid* g,
                                  const maext_field* seed, const maext_field* cap, int max_passes,
                                  double tol, maext_field** out) {
    return guarded([&] {
        const int passes = max_passes > 0 ? max_passes : 200;
        const double t = tol > 0 ? tol : 1e-8;
        *out = new maext_field{
            perron_iterate(seed->field, cap->field, p->normalized.g, g->dict, passes, t)};
    });
}

/* ---- cones -------------------------------------------------------------- */

maext_status maext_cones_combo_trials(maext_cone_form form, int k, int l, int dim, double level,
                                      int trials, uint64_t seed, double* min_margin,
                                      int64_t* violations, double* margins_out) {
    return guarded([&] {
        if (trials <= 0) throw InvalidArgument("trials must be positive");
        const ConeOperator op = make_cone(form, k, l, dim, level > 0 ? level : 1.0);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> lam_dist(-1.0, 4.0);
        std::uniform_real_distribution<double> pos_dist(0.1, 4.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);

        auto random_member = [&]() {
            for (int attempt = 0; attempt < 1000; ++attempt) {
                Vector lam(dim);
                for (double& v : lam)
                    v = (op.form == ConeForm::DetRoot) ? pos_dist(rng) : lam_dist(rng);
                if (cone_membership(op, EigenTuple(lam), 1e-6) != ConeLocation::Inside) continue;
                // random rotation from a few Givens passes
                Matrix q = identity(dim);
                for (int pass = 0; pass < 2; ++pass)
                    for (int i = 0; i < dim; ++i)
                        for (int j = i + 1; j < dim; ++j) {
                            const double a = gauss(rng);
                            const double c = std::cos(a), s = std::sin(a);
                            for (int r = 0; r < dim; ++r) {
                                const double qi = q[r * dim + i], qj = q[r * dim + j];
                                q[r * dim + i] = c * qi - s * qj;
                                q[r * dim + j] = s * qi + c * qj;
                            }
                        }
                Matrix m(dim * dim, 0.0);
                for (int r = 0; r < dim; ++r)
                    for (int cidx = 0; cidx < dim; ++cidx) {
                        double acc = 0;
                        for (int t = 0; t < dim; ++t)
                            acc += q[r * dim + t] * lam[t] * q[cidx * dim + t];
                        m[r * dim + cidx] = acc;
                    }
                for (int r = 0; r < dim; ++r)
                    for (int cidx = r + 1; cidx < dim; ++cidx) {
                        const double avg = 0.5 * (m[r * dim + cidx] + m[cidx * dim + r]);
                        m[r * dim + cidx] = m[cidx * dim + r] = avg;
                    }
                const double f = f_eval(op, eigenvalues_sym(m, dim));
                if (f <= 1e-8) continue;
                // degree-1 homogeneity lifts the sample onto/above the level set
                const double scale = op.level / f * (1.0 + 1e-12);
                if (f < op.level) {
                    for (double& v : m) v *= scale;
                }
                return m;
            }
            throw Error(kErrInternal, "cone sampling failed to find members");
        };

        double mm = 1e300;
        std::int64_t bad = 0;
        for (int t = 0; t < trials; ++t) {
            const Matrix m1 = random_member();
            const Matrix m2 = random_member();
            const ComboVerdict v = combo_level_check(op, m1, m2, unit(rng));
            if (!v.ok) ++bad;
            if (margins_out) margins_out[t] = v.margin;
            mm = std::min(mm, v.margin);
        }
        if (min_margin) *min_margin = mm;
        if (violations) *violations = bad;
    });
}

maext_status maext_cones_field_check(const maext_field* f, maext_cone_form form, int k, int l,
                                     double level, double tol, double* margin, int* ok,
                                     int64_t* checked) {
    return guarded([&] {
        const ConeOperator op =
            make_cone(form, k, l, f->field.grid().dim(), level > 0 ? level : 1.0);
        const FieldConeVerdict v =
            general_discrete_subsolution(f->field, op, tol > 0 ? tol : 1e-8);
        if (margin) *margin = v.margin;
        if (ok) *ok = v.ok ? 1 : 0;
        if (checked) *checked = v.checked;
    });
}

}  // extern "C"
