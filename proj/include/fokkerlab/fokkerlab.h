/*
 * fokkerlab - numerical laboratory for drift-diffusion channels.
 *
 * C interface over the C++ core: opaque handles, integer status codes,
 * thread-local error messages. Every function returning fl_status sets the
 * out-parameters only on FL_OK. Handles are freed with their matching
 * fl_*_free function; freeing NULL is a no-op.
 */

#ifndef FOKKERLAB_H
#define FOKKERLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FL_API __declspec(dllexport)
#else
#define FL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fl_status {
  FL_OK = 0,
  FL_ERR_INVALID_ARGUMENT = 1,
  FL_ERR_DOMAIN = 2,      /* parameter outside its mathematical domain */
  FL_ERR_SUPPORT = 3,     /* support mismatch or absolute-continuity failure */
  FL_ERR_DEGENERATE = 4,  /* zero-mass density, degenerate ensemble */
  FL_ERR_NUMERIC = 5,     /* non-finite data, positive definiteness lost */
  FL_ERR_BLOWUP = 6,      /* diverging particle or state */
  FL_ERR_SAMPLE = 7,      /* not enough samples for the estimator */
  FL_ERR_SOLVER = 8,      /* linear solve or time-stepping failure */
  FL_ERR_POSITIVITY = 9,  /* density went negative beyond tolerance */
  FL_ERR_UNSUPPORTED = 10, /* model lacks the required closed form */
  FL_ERR_IO = 11,
  FL_ERR_INTERNAL = 12
} fl_status;

typedef enum fl_support {
  FL_SUPPORT_FULL_LINE = 0,
  FL_SUPPORT_POSITIVE_HALF_LINE = 1
} fl_support;

typedef enum fl_scheme {
  FL_SCHEME_CRANK_NICOLSON = 0,
  FL_SCHEME_IMPLICIT_EULER = 1
} fl_scheme;

typedef enum fl_mmse_target {
  FL_TARGET_X0 = 0,
  FL_TARGET_LOG_X0 = 1,
  FL_TARGET_SCORE = 2
} fl_mmse_target;

typedef enum fl_estimator {
  FL_ESTIMATOR_CONDITIONAL_MEAN = 0,
  FL_ESTIMATOR_ZERO = 1
} fl_estimator;

typedef struct fl_grid fl_grid;
typedef struct fl_density fl_density;
typedef struct fl_model fl_model;
typedef struct fl_trajectory fl_trajectory;
typedef struct fl_ensemble fl_ensemble;
typedef struct fl_joint fl_joint;
typedef struct fl_reports fl_reports;
typedef struct fl_curve fl_curve;

/* ---- library ---- */

FL_API const char* fl_version(void);
FL_API const char* fl_status_str(fl_status status);
/* Message of the last failing call on this thread; empty if none. */
FL_API const char* fl_last_error(void);

/* ---- grids ---- */

FL_API fl_status fl_grid_create(double lo, double hi, int64_t n, fl_grid** out);
FL_API void fl_grid_free(fl_grid* grid);
FL_API fl_status fl_grid_size(const fl_grid* grid, int64_t* out);
FL_API fl_status fl_grid_spacing(const fl_grid* grid, double* out);
/* nodes must hold fl_grid_size entries. */
FL_API fl_status fl_grid_nodes(const fl_grid* grid, double* nodes);

/* ---- densities ---- */

FL_API fl_status fl_density_gaussian(const fl_grid* grid, double mean, double var,
                                     fl_density** out);
FL_API fl_status fl_density_lognormal(const fl_grid* grid, double log_mean, double log_var,
                                      fl_density** out);
FL_API fl_status fl_density_mixture(const fl_grid* grid, int64_t n_components,
                                    const double* weights, const double* means,
                                    const double* vars, fl_density** out);
FL_API fl_status fl_density_from_values(const fl_grid* grid, const double* values,
                                        fl_support support, int renormalize, fl_density** out);
FL_API void fl_density_free(fl_density* density);
FL_API fl_status fl_density_size(const fl_density* density, int64_t* out);
FL_API fl_status fl_density_values(const fl_density* density, double* values);
FL_API fl_status fl_density_integral(const fl_density* density, double* out);
FL_API fl_status fl_density_support(const fl_density* density, fl_support* out);

/* ---- information functionals ----
 * weight_model == NULL selects the unit weight b = 1; otherwise b is the
 * model's squared diffusion at time t. */

FL_API fl_status fl_entropy(const fl_density* p, double* out);
FL_API fl_status fl_kl(const fl_density* p, const fl_density* q, double* out);
FL_API fl_status fl_fisher(const fl_density* p, const fl_model* weight_model, double t,
                           double* out);
FL_API fl_status fl_relative_fisher(const fl_density* p, const fl_density* q,
                                    const fl_model* weight_model, double t, double* out);

/* ---- channel models ---- */

FL_API fl_status fl_model_brownian(fl_model** out);
FL_API fl_status fl_model_ou(double alpha, fl_model** out);
FL_API fl_status fl_model_gbm(double mu, double sigma, fl_model** out);
/* Coefficients as expressions in x and t (+ - * / ^, exp log sin cos sqrt). */
FL_API fl_status fl_model_custom(const char* drift_expr, const char* diffusion_expr,
                                 fl_support support, fl_model** out);
FL_API void fl_model_free(fl_model* model);
FL_API const char* fl_model_name(const fl_model* model);
FL_API fl_status fl_model_has_kernel(const fl_model* model, int* out);
FL_API fl_status fl_model_drift(const fl_model* model, double x, double t, double* out);
FL_API fl_status fl_model_diffusion(const fl_model* model, double x, double t, double* out);
FL_API fl_status fl_model_kernel_density(const fl_model* model, double x0, double xt, double t,
                                         double* out);
FL_API fl_status fl_model_kernel_score(const fl_model* model, double x0, double xt, double t,
                                       double* out);
FL_API fl_status fl_model_conditional_fisher(const fl_model* model, double t, double* out);
/* Sup gap between the analytic score and a finite difference of the log
 * kernel density, reported as a one-row report set. */
FL_API fl_status fl_kernel_selfcheck(const fl_model* model, double x0, double t,
                                     fl_reports** out);

/* ---- conservative solver ---- */

/* dt <= 0 selects the default step h^2 / max b. */
FL_API fl_status fl_default_dt(const fl_model* model, const fl_grid* grid, double t, double* out);
FL_API fl_status fl_stable_dt(const fl_model* model, const fl_grid* grid, double t,
                              fl_scheme scheme, double* out);
FL_API fl_status fl_solve(const fl_model* model, const fl_density* initial, double t_end,
                          double dt, fl_scheme scheme, const double* snapshot_times,
                          int64_t n_snapshots, fl_trajectory** out);
FL_API void fl_trajectory_free(fl_trajectory* trajectory);
FL_API fl_status fl_trajectory_count(const fl_trajectory* trajectory, int64_t* out);
FL_API fl_status fl_trajectory_time(const fl_trajectory* trajectory, int64_t index, double* out);
FL_API fl_status fl_trajectory_field(const fl_trajectory* trajectory, int64_t index,
                                     fl_density** out);
/* Largest deviation of the conserved discrete mass from its initial value. */
FL_API fl_status fl_trajectory_mass_drift(const fl_trajectory* trajectory, double* out);
FL_API fl_status fl_trajectory_write_csv(const fl_trajectory* trajectory, const char* path);

/* ---- path sampling ---- */

FL_API fl_status fl_simulate(const fl_model* model, const double* x0, int64_t n_particles,
                             double t, double dt, uint64_t seed, fl_ensemble** out);
FL_API void fl_ensemble_free(fl_ensemble* ensemble);
FL_API fl_status fl_ensemble_size(const fl_ensemble* ensemble, int64_t* out);
FL_API fl_status fl_ensemble_x0(const fl_ensemble* ensemble, double* x0);
FL_API fl_status fl_ensemble_xt(const fl_ensemble* ensemble, double* xt);
FL_API fl_status fl_ensemble_write_csv(const fl_ensemble* ensemble, const char* path);
/* bandwidth <= 0 selects Silverman's rule. */
FL_API fl_status fl_kde_density(const fl_ensemble* ensemble, const fl_grid* grid,
                                double bandwidth, fl_density** out);
/* score_model is required for FL_TARGET_SCORE and ignored otherwise;
 * std_error may be NULL. */
FL_API fl_status fl_mc_mmse(const fl_ensemble* ensemble, fl_mmse_target target, int64_t bins,
                            const fl_model* score_model, double* value, double* std_error);

/* ---- joint laws of (X0, X_t) ---- */

FL_API fl_status fl_joint_build(const fl_density* prior, const fl_model* model,
                                const fl_grid* grid_xt, double t, fl_joint** out);
FL_API fl_status fl_joint_build_numeric(const fl_density* prior, const fl_model* model,
                                        const fl_grid* grid_xt, double t, double dt,
                                        fl_scheme scheme, fl_joint** out);
FL_API void fl_joint_free(fl_joint* joint);
FL_API fl_status fl_joint_marginal_xt(const fl_joint* joint, fl_density** out);
FL_API fl_status fl_joint_conditional_fisher(const fl_joint* joint, const fl_model* weight_model,
                                             double* out);
FL_API fl_status fl_joint_mutual_fisher(const fl_joint* joint, const fl_model* weight_model,
                                        double* out);
FL_API fl_status fl_joint_statistical_fisher(const fl_joint* joint, const fl_model* weight_model,
                                             double* out);
FL_API fl_status fl_joint_mmse(const fl_joint* joint, fl_mmse_target target,
                               const fl_model* weight_model, const fl_model* score_model,
                               double* out);
FL_API fl_status fl_joint_mutual_information(const fl_joint* joint, double* out);

/* ---- identity checks ----
 * Each check returns a report set; tolerance <= 0 selects the per-check
 * default. */

FL_API fl_status fl_check_entropy_rate(const fl_model* model, const fl_density* p0, double t,
                                       double h, double dt, fl_scheme scheme, double tolerance,
                                       fl_reports** out);
FL_API fl_status fl_check_kl_rate(const fl_model* model, const fl_density* p0,
                                  const fl_density* q0, double t, double h, double dt,
                                  fl_scheme scheme, double tolerance, fl_reports** out);
FL_API fl_status fl_check_mi_rate(const fl_model* model, const fl_density* prior,
                                  const fl_grid* grid_xt, double t, double h, double tolerance,
                                  fl_reports** out);
FL_API fl_status fl_check_fisher_bridge(const fl_joint* joint, const fl_model* weight_model,
                                        double tolerance, fl_reports** out);
FL_API fl_status fl_check_mmse_bridge(const fl_joint* joint, const fl_model* model,
                                      const fl_model* weight_model, double tolerance,
                                      fl_reports** out);
FL_API fl_status fl_check_van_trees(const fl_joint* joint, const fl_model* weight_model,
                                    fl_estimator estimator, double tolerance, fl_reports** out);
FL_API fl_status fl_check_ou_fisher_bound(double alpha, const fl_density* prior,
                                          const double* t_values, int64_t n_times,
                                          double tolerance, fl_reports** out);

/* ---- report sets ---- */

FL_API fl_status fl_reports_create(fl_reports** out);
FL_API void fl_reports_free(fl_reports* reports);
FL_API fl_status fl_reports_count(const fl_reports* reports, int64_t* out);
/* Appends copies of src's rows to dst. */
FL_API fl_status fl_reports_extend(fl_reports* dst, const fl_reports* src);
FL_API const char* fl_reports_name(const fl_reports* reports, int64_t index);
FL_API fl_status fl_reports_lhs(const fl_reports* reports, int64_t index, double* out);
FL_API fl_status fl_reports_rhs(const fl_reports* reports, int64_t index, double* out);
FL_API fl_status fl_reports_abs_err(const fl_reports* reports, int64_t index, double* out);
FL_API fl_status fl_reports_rel_err(const fl_reports* reports, int64_t index, double* out);
FL_API fl_status fl_reports_tolerance(const fl_reports* reports, int64_t index, double* out);
FL_API fl_status fl_reports_passed(const fl_reports* reports, int64_t index, int* out);
FL_API const char* fl_reports_lhs_method(const fl_reports* reports, int64_t index);
FL_API const char* fl_reports_rhs_method(const fl_reports* reports, int64_t index);
/* Parameters of row `index` as a JSON object string. */
FL_API const char* fl_reports_params_json(const fl_reports* reports, int64_t index);
FL_API fl_status fl_reports_all_passed(const fl_reports* reports, int* out);
FL_API fl_status fl_reports_write_csv(const fl_reports* reports, const char* path);
FL_API fl_status fl_reports_write_summary(const fl_reports* reports, const char* path);

/* ---- information vs estimation curves ---- */

FL_API fl_status fl_immse_curve(const fl_model* model, const fl_density* prior,
                                const fl_grid* grid_xt, const double* t_values, int64_t n_times,
                                fl_curve** out);
FL_API void fl_curve_free(fl_curve* curve);
FL_API fl_status fl_curve_count(const fl_curve* curve, int64_t* out);
FL_API fl_status fl_curve_point(const fl_curve* curve, int64_t index, double* t, double* mi,
                                double* mi_rate, double* mmse, double* predicted_rate);
FL_API fl_status fl_curve_write_csv(const fl_curve* curve, const char* path);

/* ---- linear multivariate channels (d <= 3, flat row-major matrices) ---- */

FL_API fl_status fl_lg_propagate(int dim, const double* A, const double* b, const double* mean0,
                                 const double* cov0, double t0, double t1, double* mean_out,
                                 double* cov_out);
FL_API fl_status fl_lg_entropy(int dim, const double* cov, double* out);
FL_API fl_status fl_lg_fisher(int dim, const double* cov, const double* weight, double* out);
FL_API fl_status fl_lg_mutual_information(int dim, const double* A, const double* b,
                                          const double* mean0, const double* cov0, double t,
                                          double* out);
FL_API fl_status fl_lg_check_entropy_rate(int dim, const double* A, const double* b,
                                          const double* mean, const double* cov, double t,
                                          double h, double tolerance, fl_reports** out);
FL_API fl_status fl_lg_check_van_trees(int dim, const double* A, const double* b,
                                       const double* mean0, const double* cov0, double t,
                                       double tolerance, fl_reports** out);

#ifdef __cplusplus
}
#endif

#endif /* FOKKERLAB_H */
