/* maext: exterior Monge-Ampere Dirichlet solver - public C API.
 *
 * The C++ core is wrapped behind opaque handles and status codes so the
 * library can be consumed from C, scripting FFIs and the bundled CLI.
 * Every function returning maext_status leaves a thread-local diagnostic
 * retrievable through maext_last_error() on failure.
 */
#ifndef MAEXT_H
#define MAEXT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum maext_status {
    MAEXT_OK = 0,
    MAEXT_ERR_INVALID_ARGUMENT = 1,
    MAEXT_ERR_PARSE = 2,
    MAEXT_ERR_NO_SOLUTION = 3,
    MAEXT_ERR_QUADRATURE = 4,
    MAEXT_ERR_NOT_CONVERGED = 5,
    MAEXT_ERR_IO = 6,
    MAEXT_ERR_PRECONDITION = 7,
    MAEXT_ERR_INTERNAL = 8
} maext_status;

typedef enum maext_classification {
    MAEXT_EXISTS = 0,
    MAEXT_FAILS_BOUNDARY = 1,
    MAEXT_NOT_CONVERGED = 2
} maext_classification;

typedef enum maext_cone_form {
    MAEXT_CONE_DET_ROOT = 0,
    MAEXT_CONE_SIGMA_ROOT = 1,
    MAEXT_CONE_SIGMA_QUOTIENT = 2
} maext_cone_form;

typedef struct maext_problem maext_problem;
typedef struct maext_grid maext_grid;
typedef struct maext_field maext_field;
typedef struct maext_threshold maext_threshold;

const char* maext_version(void);
/* thread-local diagnostic for the most recent failing call */
const char* maext_last_error(void);

/* ---- radial engine ---------------------------------------------------- */

/* sharp constant C*(n) for the unit-ball problem; err_bound receives the
 * quadrature error estimate */
maext_status maext_cstar(int dim, double abs_tol, double* value, double* err_bound);
maext_status maext_radial_derivative(int dim, double alpha, double r, double* out);
maext_status maext_radial_value(int dim, double alpha, double r, double abs_tol, double* out);
maext_status maext_asymptotic_constant(int dim, double alpha, double abs_tol, double* out);
/* inverse map; MAEXT_ERR_NO_SOLUTION when c < C*(n) - abs_tol */
maext_status maext_alpha_from_constant(double c, int dim, double abs_tol, double* alpha);

/* ---- problem specifications ------------------------------------------- */

maext_status maext_problem_parse_file(const char* path, maext_problem** out);
maext_status maext_problem_parse_text(const char* text, maext_problem** out);
void maext_problem_release(maext_problem* p);

int maext_problem_dim(const maext_problem* p);
double maext_problem_constant(const maext_problem* p); /* asymptote c */
void maext_problem_grid_params(const maext_problem* p, double* h, double* R, int* width);
/* 1 when the file already had A = I, b = 0; solves always run on the
 * normalized problem recorded inside the handle */
int maext_problem_was_normalized(const maext_problem* p);
double maext_problem_normalization_det(const maext_problem* p);
maext_status maext_nonexistence_bound(const maext_problem* p, double abs_tol, double* out);

/* ---- grids and fields -------------------------------------------------- */

/* h/R <= 0 or width <= 0 pick up the values from the problem file */
maext_status maext_grid_build(const maext_problem* p, double h, double R, int width,
                              maext_grid** out);
void maext_grid_release(maext_grid* g);
int64_t maext_grid_node_count(const maext_grid* g);
int64_t maext_grid_interior_count(const maext_grid* g);
double maext_grid_h(const maext_grid* g);
double maext_grid_R(const maext_grid* g);

void maext_field_release(maext_field* f);
int64_t maext_field_size(const maext_field* f);
maext_status maext_field_save(const maext_field* f, const char* path); /* MAEXT1 snapshot */
maext_status maext_field_load(const maext_problem* p, const maext_grid* g, const char* path,
                              maext_field** out);
maext_status maext_field_write_csv(const maext_field* f, const char* path);
maext_status maext_field_sup_diff(const maext_field* a, const maext_field* b, double* out);
/* eps-upper envelope (sup-convolution) */
maext_status maext_field_envelope(const maext_field* f, double eps, maext_field** out);

/* ---- solver ------------------------------------------------------------ */

typedef struct maext_solve_options {
    double sweep_tol;    /* <= 0: 1e-10 */
    int max_sweeps;      /* <= 0: 50000 */
    double tol_b;        /* <= 0: 10*h */
    double tol_ma;       /* <= 0: 10*h */
    int corrected_outer; /* 0 plain truncation, 1 fitted decay correction */
    double omega;        /* <= 0: 1.6 */
} maext_solve_options;

typedef struct maext_solve_stats {
    double ma_residual;
    double boundary_residual;
    int iterations;
    maext_classification classification;
    double fitted_correction;
    double tol_b;
    double tol_ma;
} maext_solve_stats;

/* options/stats pointers may be NULL */
maext_status maext_solve(const maext_problem* p, const maext_grid* g,
                         const maext_solve_options* options, maext_field** field,
                         maext_solve_stats* stats);
/* exact radial solution sampled on the grid (centered ball, constant phi,
 * g == 1); MAEXT_ERR_NO_SOLUTION below the sharp constant */
maext_status maext_solve_radial_oracle(const maext_problem* p, const maext_grid* g, double abs_tol,
                                       maext_field** field);

maext_status maext_estimate_threshold(const maext_problem* p, const maext_grid* g,
                                      const maext_solve_options* options, double tol_c,
                                      int richardson_in_R, maext_threshold** out);
void maext_threshold_release(maext_threshold* t);
void maext_threshold_bracket(const maext_threshold* t, double* c_low, double* c_high);
int maext_threshold_probe_count(const maext_threshold* t);
void maext_threshold_probe(const maext_threshold* t, int i, double* c, maext_classification* cls,
                           double* boundary_residual);
/* return 1 and fill *out when present, else 0 */
int maext_threshold_reference(const maext_threshold* t, double* out);
int maext_threshold_richardson(const maext_threshold* t, double* out);

/* ---- Perron construction ----------------------------------------------- */

maext_status maext_perron_iterate(const maext_problem* p, const maext_grid* g,
                                  const maext_field* seed, const maext_field* cap, int max_passes,
                                  double tol, maext_field** out);

/* ---- cone operators ----------------------------------------------------- */

/* randomized convex-combination trials at matrix level; margins_out (size
 * >= trials) is optional */
maext_status maext_cones_combo_trials(maext_cone_form form, int k, int l, int dim, double level,
                                      int trials, uint64_t seed, double* min_margin,
                                      int64_t* violations, double* margins_out);
/* finite-difference Hessian level-set check over a field */
maext_status maext_cones_field_check(const maext_field* f, maext_cone_form form, int k, int l,
                                     double level, double tol, double* margin, int* ok,
                                     int64_t* checked);

#ifdef __cplusplus
}
#endif

#endif /* MAEXT_H */
