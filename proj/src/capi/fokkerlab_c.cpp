#include "fokkerlab/fokkerlab.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "core/identities.hpp"
#include "core/joint.hpp"
#include "core/lin_gauss.hpp"
#include "core/monte_carlo.hpp"

namespace {

thread_local std::string g_last_error;

fl_status map_code(fokker::ErrorCode code) {
  using fokker::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return FL_ERR_INVALID_ARGUMENT;
    case ErrorCode::domain: return FL_ERR_DOMAIN;
    case ErrorCode::support: return FL_ERR_SUPPORT;
    case ErrorCode::degenerate: return FL_ERR_DEGENERATE;
    case ErrorCode::numeric: return FL_ERR_NUMERIC;
    case ErrorCode::blowup: return FL_ERR_BLOWUP;
    case ErrorCode::sample: return FL_ERR_SAMPLE;
    case ErrorCode::solver: return FL_ERR_SOLVER;
    case ErrorCode::positivity: return FL_ERR_POSITIVITY;
    case ErrorCode::unsupported: return FL_ERR_UNSUPPORTED;
    case ErrorCode::io: return FL_ERR_IO;
  }
  return FL_ERR_INTERNAL;
}

template <typename F>
fl_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return FL_OK;
  } catch (const fokker::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FL_ERR_INTERNAL;
  }
}

void check_ptr(const void* p, const char* what) {
  fokker::require(p != nullptr, fokker::ErrorCode::invalid_argument,
                  std::string(what) + " must not be NULL");
}

fokker::Support to_support(fl_support s) {
  return s == FL_SUPPORT_POSITIVE_HALF_LINE ? fokker::Support::positive_half_line
                                            : fokker::Support::full_line;
}

fokker::Scheme to_scheme(fl_scheme s) {
  return s == FL_SCHEME_IMPLICIT_EULER ? fokker::Scheme::implicit_euler
                                       : fokker::Scheme::crank_nicolson;
}

void write_file(const char* path, const std::string& content) {
  check_ptr(path, "path");
  std::ofstream out(path, std::ios::binary);
  fokker::require(out.good(), fokker::ErrorCode::io,
                  std::string("cannot open '") + path + "' for writing");
  out << content;
  out.close();
  fokker::require(out.good(), fokker::ErrorCode::io, std::string("failed to write '") + path + "'");
}

}  // namespace

struct fl_grid {
  fokker::Grid1D grid;
};
struct fl_density {
  fokker::DensityField field;
};
struct fl_model {
  fokker::ModelPtr model;
};
struct fl_trajectory {
  fokker::Trajectory trajectory;
};
struct fl_ensemble {
  fokker::ParticleEnsemble ensemble;
};
struct fl_joint {
  fokker::JointDensity joint;
};
struct fl_reports {
  std::vector<fokker::IdentityReport> rows;
  std::vector<std::string> jsons;

  void push(std::vector<fokker::IdentityReport> add) {
    for (auto& r : add) {
      jsons.push_back(fokker::report_params_json(r));
      rows.push_back(std::move(r));
    }
  }
  const fokker::IdentityReport& at(int64_t i) const {
    fokker::require(i >= 0 && static_cast<std::size_t>(i) < rows.size(),
                    fokker::ErrorCode::invalid_argument, "report index out of range");
    return rows[static_cast<std::size_t>(i)];
  }
};
struct fl_curve {
  std::vector<fokker::CurvePoint> points;
};

namespace {

fokker::WeightFunction pick_weight(const fl_model* weight_model) {
  return weight_model == nullptr ? fokker::unit_weight()
                                 : fokker::model_weight(weight_model->model);
}

const fokker::TransitionKernel& kernel_of(const fl_model* model) {
  check_ptr(model, "model");
  fokker::require(model->model->has_kernel(), fokker::ErrorCode::unsupported,
                  "model '" + model->model->name + "' has no transition kernel");
  return *model->model->kernel;
}

fokker::lingauss::LinearSdeModel lg_model(int dim, const double* A, const double* b) {
  check_ptr(A, "A");
  check_ptr(b, "b");
  const std::size_t n = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
  return fokker::lingauss::make_linear_model(dim, std::span{A, n}, std::span{b, n});
}

fokker::lingauss::GaussianState lg_state(int dim, const double* mean, const double* cov,
                                         double t) {
  check_ptr(mean, "mean");
  check_ptr(cov, "cov");
  const std::size_t n = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
  return fokker::lingauss::make_state(dim, std::span{mean, static_cast<std::size_t>(dim)},
                                      std::span{cov, n}, t);
}

}  // namespace

extern "C" {

const char* fl_version(void) { return "0.1.0"; }

const char* fl_status_str(fl_status status) {
  switch (status) {
    case FL_OK: return "ok";
    case FL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FL_ERR_DOMAIN: return "domain error";
    case FL_ERR_SUPPORT: return "support error";
    case FL_ERR_DEGENERATE: return "degenerate input";
    case FL_ERR_NUMERIC: return "numeric error";
    case FL_ERR_BLOWUP: return "blow-up";
    case FL_ERR_SAMPLE: return "insufficient samples";
    case FL_ERR_SOLVER: return "solver failure";
    case FL_ERR_POSITIVITY: return "positivity violation";
    case FL_ERR_UNSUPPORTED: return "unsupported operation";
    case FL_ERR_IO: return "i/o error";
    case FL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fl_last_error(void) { return g_last_error.c_str(); }

/* ---- grids ---- */

fl_status fl_grid_create(double lo, double hi, int64_t n, fl_grid** out) {
  return guarded([&] {
    check_ptr(out, "out");
    fokker::require(n > 0, fokker::ErrorCode::domain, "grid size must be positive");
    *out = new fl_grid{fokker::make_uniform_grid(lo, hi, static_cast<std::size_t>(n))};
  });
}

void fl_grid_free(fl_grid* grid) { delete grid; }

fl_status fl_grid_size(const fl_grid* grid, int64_t* out) {
  return guarded([&] {
    check_ptr(grid, "grid");
    check_ptr(out, "out");
    *out = static_cast<int64_t>(grid->grid.size());
  });
}

fl_status fl_grid_spacing(const fl_grid* grid, double* out) {
  return guarded([&] {
    check_ptr(grid, "grid");
    check_ptr(out, "out");
    *out = grid->grid.spacing();
  });
}

fl_status fl_grid_nodes(const fl_grid* grid, double* nodes) {
  return guarded([&] {
    check_ptr(grid, "grid");
    check_ptr(nodes, "nodes");
    for (std::size_t i = 0; i < grid->grid.size(); ++i) nodes[i] = grid->grid.node(i);
  });
}

/* ---- densities ---- */

fl_status fl_density_gaussian(const fl_grid* grid, double mean, double var, fl_density** out) {
  return guarded([&] {
    check_ptr(grid, "grid");
    check_ptr(out, "out");
    *out = new fl_density{fokker::gaussian_density(mean, var, grid->grid)};
  });
}

fl_status fl_density_lognormal(const fl_grid* grid, double log_mean, double log_var,
                               fl_density** out) {
  return guarded([&] {
    check_ptr(grid, "grid");
    check_ptr(out, "out");
    *out = new fl_density{fokker::lognormal_density(log_mean, log_var, grid->grid)};
  });
}

fl_status fl_density_mixture(const fl_grid* grid, int64_t n_components, const double* weights,
                             const double* means, const double* vars, fl_density** out) {
  return guarded([&] {
    check_ptr(grid, "grid");
    check_ptr(weights, "weights");
    check_ptr(means, "means");
    check_ptr(vars, "vars");
    check_ptr(out, "out");
    fokker::require(n_components > 0, fokker::ErrorCode::invalid_argument,
                    "mixture needs at least one component");
    const std::size_t k = static_cast<std::size_t>(n_components);
    *out = new fl_density{fokker::gaussian_mixture_density(
        std::span{weights, k}, std::span{means, k}, std::span{vars, k}, grid->grid)};
  });
}

fl_status fl_density_from_values(const fl_grid* grid, const double* values, fl_support support,
                                 int renormalize, fl_density** out) {
  return guarded([&] {
    check_ptr(grid, "grid");
    check_ptr(values, "values");
    check_ptr(out, "out");
    *out = new fl_density{fokker::density_from_values(
        grid->grid, std::span{values, grid->grid.size()}, to_support(support), renormalize != 0)};
  });
}

void fl_density_free(fl_density* density) { delete density; }

fl_status fl_density_size(const fl_density* density, int64_t* out) {
  return guarded([&] {
    check_ptr(density, "density");
    check_ptr(out, "out");
    *out = static_cast<int64_t>(density->field.size());
  });
}

fl_status fl_density_values(const fl_density* density, double* values) {
  return guarded([&] {
    check_ptr(density, "density");
    check_ptr(values, "values");
    std::memcpy(values, density->field.values().data(), density->field.size() * sizeof(double));
  });
}

fl_status fl_density_integral(const fl_density* density, double* out) {
  return guarded([&] {
    check_ptr(density, "density");
    check_ptr(out, "out");
    *out = density->field.integral();
  });
}

fl_status fl_density_support(const fl_density* density, fl_support* out) {
  return guarded([&] {
    check_ptr(density, "density");
    check_ptr(out, "out");
    *out = density->field.support() == fokker::Support::positive_half_line
               ? FL_SUPPORT_POSITIVE_HALF_LINE
               : FL_SUPPORT_FULL_LINE;
  });
}

/* ---- functionals ---- */

fl_status fl_entropy(const fl_density* p, double* out) {
  return guarded([&] {
    check_ptr(p, "p");
    check_ptr(out, "out");
    *out = fokker::entropy(p->field);
  });
}

fl_status fl_kl(const fl_density* p, const fl_density* q, double* out) {
  return guarded([&] {
    check_ptr(p, "p");
    check_ptr(q, "q");
    check_ptr(out, "out");
    *out = fokker::kl(p->field, q->field);
  });
}

fl_status fl_fisher(const fl_density* p, const fl_model* weight_model, double t, double* out) {
  return guarded([&] {
    check_ptr(p, "p");
    check_ptr(out, "out");
    *out = fokker::fisher_b(p->field, pick_weight(weight_model), t);
  });
}

fl_status fl_relative_fisher(const fl_density* p, const fl_density* q,
                             const fl_model* weight_model, double t, double* out) {
  return guarded([&] {
    check_ptr(p, "p");
    check_ptr(q, "q");
    check_ptr(out, "out");
    *out = fokker::relative_fisher_b(p->field, q->field, pick_weight(weight_model), t);
  });
}

/* ---- models ---- */

fl_status fl_model_brownian(fl_model** out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = new fl_model{fokker::builtin_brownian()};
  });
}

fl_status fl_model_ou(double alpha, fl_model** out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = new fl_model{fokker::builtin_ou(alpha)};
  });
}

fl_status fl_model_gbm(double mu, double sigma, fl_model** out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = new fl_model{fokker::builtin_gbm(mu, sigma)};
  });
}

fl_status fl_model_custom(const char* drift_expr, const char* diffusion_expr, fl_support support,
                          fl_model** out) {
  return guarded([&] {
    check_ptr(drift_expr, "drift_expr");
    check_ptr(diffusion_expr, "diffusion_expr");
    check_ptr(out, "out");
    *out = new fl_model{fokker::make_custom_model(drift_expr, diffusion_expr, to_support(support))};
  });
}

void fl_model_free(fl_model* model) { delete model; }

const char* fl_model_name(const fl_model* model) {
  return model == nullptr ? "" : model->model->name.c_str();
}

fl_status fl_model_has_kernel(const fl_model* model, int* out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(out, "out");
    *out = model->model->has_kernel() ? 1 : 0;
  });
}

fl_status fl_model_drift(const fl_model* model, double x, double t, double* out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(out, "out");
    *out = model->model->drift(x, t);
  });
}

fl_status fl_model_diffusion(const fl_model* model, double x, double t, double* out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(out, "out");
    *out = model->model->diffusion(x, t);
  });
}

fl_status fl_model_kernel_density(const fl_model* model, double x0, double xt, double t,
                                  double* out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = kernel_of(model).density(x0, xt, t);
  });
}

fl_status fl_model_kernel_score(const fl_model* model, double x0, double xt, double t,
                                double* out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = kernel_of(model).score(x0, xt, t);
  });
}

fl_status fl_model_conditional_fisher(const fl_model* model, double t, double* out) {
  return guarded([&] {
    check_ptr(out, "out");
    const auto& k = kernel_of(model);
    fokker::require(k.has_conditional_fisher(), fokker::ErrorCode::unsupported,
                    "model has no closed-form conditional fisher information");
    *out = k.conditional_fisher(t);
  });
}

fl_status fl_kernel_selfcheck(const fl_model* model, double x0, double t, fl_reports** out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(out, "out");
    auto r = new fl_reports;
    r->push({fokker::kernel_selfcheck(*model->model, x0, t)});
    *out = r;
  });
}

/* ---- solver ---- */

fl_status fl_default_dt(const fl_model* model, const fl_grid* grid, double t, double* out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(grid, "grid");
    check_ptr(out, "out");
    *out = fokker::default_dt(*model->model, grid->grid, t);
  });
}

fl_status fl_stable_dt(const fl_model* model, const fl_grid* grid, double t, fl_scheme scheme,
                       double* out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(grid, "grid");
    check_ptr(out, "out");
    *out = fokker::stable_dt(*model->model, grid->grid, t, to_scheme(scheme));
  });
}

fl_status fl_solve(const fl_model* model, const fl_density* initial, double t_end, double dt,
                   fl_scheme scheme, const double* snapshot_times, int64_t n_snapshots,
                   fl_trajectory** out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(initial, "initial");
    check_ptr(out, "out");
    fokker::SolveSpec spec(model->model, initial->field);
    spec.t_end = t_end;
    spec.dt = dt;
    spec.scheme = to_scheme(scheme);
    if (n_snapshots > 0) {
      check_ptr(snapshot_times, "snapshot_times");
      spec.snapshot_times.assign(snapshot_times, snapshot_times + n_snapshots);
    }
    *out = new fl_trajectory{fokker::solve(spec)};
  });
}

void fl_trajectory_free(fl_trajectory* trajectory) { delete trajectory; }

fl_status fl_trajectory_count(const fl_trajectory* trajectory, int64_t* out) {
  return guarded([&] {
    check_ptr(trajectory, "trajectory");
    check_ptr(out, "out");
    *out = static_cast<int64_t>(trajectory->trajectory.times.size());
  });
}

fl_status fl_trajectory_time(const fl_trajectory* trajectory, int64_t index, double* out) {
  return guarded([&] {
    check_ptr(trajectory, "trajectory");
    check_ptr(out, "out");
    const auto& times = trajectory->trajectory.times;
    fokker::require(index >= 0 && static_cast<std::size_t>(index) < times.size(),
                    fokker::ErrorCode::invalid_argument, "trajectory index out of range");
    *out = times[static_cast<std::size_t>(index)];
  });
}

fl_status fl_trajectory_field(const fl_trajectory* trajectory, int64_t index, fl_density** out) {
  return guarded([&] {
    check_ptr(trajectory, "trajectory");
    check_ptr(out, "out");
    const auto& fields = trajectory->trajectory.fields;
    fokker::require(index >= 0 && static_cast<std::size_t>(index) < fields.size(),
                    fokker::ErrorCode::invalid_argument, "trajectory index out of range");
    *out = new fl_density{fields[static_cast<std::size_t>(index)]};
  });
}

fl_status fl_trajectory_mass_drift(const fl_trajectory* trajectory, double* out) {
  return guarded([&] {
    check_ptr(trajectory, "trajectory");
    check_ptr(out, "out");
    *out = trajectory->trajectory.max_mass_drift();
  });
}

fl_status fl_trajectory_write_csv(const fl_trajectory* trajectory, const char* path) {
  return guarded([&] {
    check_ptr(trajectory, "trajectory");
    write_file(path, trajectory->trajectory.to_csv());
  });
}

/* ---- path sampling ---- */

fl_status fl_simulate(const fl_model* model, const double* x0, int64_t n_particles, double t,
                      double dt, uint64_t seed, fl_ensemble** out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(x0, "x0");
    check_ptr(out, "out");
    fokker::require(n_particles >= 0, fokker::ErrorCode::invalid_argument,
                    "particle count must be non-negative");
    *out = new fl_ensemble{fokker::simulate(
        *model->model, std::span{x0, static_cast<std::size_t>(n_particles)}, t, dt, seed)};
  });
}

void fl_ensemble_free(fl_ensemble* ensemble) { delete ensemble; }

fl_status fl_ensemble_size(const fl_ensemble* ensemble, int64_t* out) {
  return guarded([&] {
    check_ptr(ensemble, "ensemble");
    check_ptr(out, "out");
    *out = static_cast<int64_t>(ensemble->ensemble.size());
  });
}

fl_status fl_ensemble_x0(const fl_ensemble* ensemble, double* x0) {
  return guarded([&] {
    check_ptr(ensemble, "ensemble");
    check_ptr(x0, "x0");
    std::memcpy(x0, ensemble->ensemble.x0.data(), ensemble->ensemble.size() * sizeof(double));
  });
}

fl_status fl_ensemble_xt(const fl_ensemble* ensemble, double* xt) {
  return guarded([&] {
    check_ptr(ensemble, "ensemble");
    check_ptr(xt, "xt");
    std::memcpy(xt, ensemble->ensemble.xt.data(), ensemble->ensemble.size() * sizeof(double));
  });
}

fl_status fl_ensemble_write_csv(const fl_ensemble* ensemble, const char* path) {
  return guarded([&] {
    check_ptr(ensemble, "ensemble");
    write_file(path, ensemble->ensemble.to_csv());
  });
}

fl_status fl_kde_density(const fl_ensemble* ensemble, const fl_grid* grid, double bandwidth,
                         fl_density** out) {
  return guarded([&] {
    check_ptr(ensemble, "ensemble");
    check_ptr(grid, "grid");
    check_ptr(out, "out");
    *out = new fl_density{fokker::kde_density(ensemble->ensemble, grid->grid, bandwidth)};
  });
}

fl_status fl_mc_mmse(const fl_ensemble* ensemble, fl_mmse_target target, int64_t bins,
                     const fl_model* score_model, double* value, double* std_error) {
  return guarded([&] {
    check_ptr(ensemble, "ensemble");
    check_ptr(value, "value");
    fokker::require(bins > 0, fokker::ErrorCode::invalid_argument, "bin count must be positive");
    const fokker::MmseTarget tgt = target == FL_TARGET_X0       ? fokker::MmseTarget::x0
                                   : target == FL_TARGET_LOG_X0 ? fokker::MmseTarget::log_x0
                                                                : fokker::MmseTarget::score;
    const fokker::SdeModel* m = score_model == nullptr ? nullptr : score_model->model.get();
    const fokker::McMmse r =
        fokker::mc_mmse(ensemble->ensemble, tgt, static_cast<std::size_t>(bins), m);
    *value = r.value;
    if (std_error != nullptr) *std_error = r.std_error;
  });
}

/* ---- joints ---- */

fl_status fl_joint_build(const fl_density* prior, const fl_model* model, const fl_grid* grid_xt,
                         double t, fl_joint** out) {
  return guarded([&] {
    check_ptr(prior, "prior");
    check_ptr(model, "model");
    check_ptr(grid_xt, "grid_xt");
    check_ptr(out, "out");
    *out = new fl_joint{fokker::build_joint(prior->field, *model->model, grid_xt->grid, t)};
  });
}

fl_status fl_joint_build_numeric(const fl_density* prior, const fl_model* model,
                                 const fl_grid* grid_xt, double t, double dt, fl_scheme scheme,
                                 fl_joint** out) {
  return guarded([&] {
    check_ptr(prior, "prior");
    check_ptr(model, "model");
    check_ptr(grid_xt, "grid_xt");
    check_ptr(out, "out");
    *out = new fl_joint{fokker::build_joint_numeric(prior->field, *model->model, grid_xt->grid, t,
                                                    dt, to_scheme(scheme))};
  });
}

void fl_joint_free(fl_joint* joint) { delete joint; }

fl_status fl_joint_marginal_xt(const fl_joint* joint, fl_density** out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    *out = new fl_density{joint->joint.marginal_xt()};
  });
}

fl_status fl_joint_conditional_fisher(const fl_joint* joint, const fl_model* weight_model,
                                      double* out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    *out = fokker::conditional_fisher_b(joint->joint, pick_weight(weight_model));
  });
}

fl_status fl_joint_mutual_fisher(const fl_joint* joint, const fl_model* weight_model,
                                 double* out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    *out = fokker::mutual_fisher_b(joint->joint, pick_weight(weight_model));
  });
}

fl_status fl_joint_statistical_fisher(const fl_joint* joint, const fl_model* weight_model,
                                      double* out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    *out = fokker::statistical_fisher_b(joint->joint, pick_weight(weight_model));
  });
}

fl_status fl_joint_mmse(const fl_joint* joint, fl_mmse_target target, const fl_model* weight_model,
                        const fl_model* score_model, double* out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    std::function<double(double, double)> g;
    const double t = joint->joint.t();
    switch (target) {
      case FL_TARGET_X0: g = [](double x0, double) { return x0; }; break;
      case FL_TARGET_LOG_X0:
        g = [](double x0, double) { return std::log(x0); };
        break;
      case FL_TARGET_SCORE: {
        const auto& k = kernel_of(score_model);
        g = [&k, t](double x0, double xt) { return k.score(x0, xt, t); };
        break;
      }
    }
    *out = fokker::mmse_b(joint->joint, g, pick_weight(weight_model));
  });
}

fl_status fl_joint_mutual_information(const fl_joint* joint, double* out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    *out = fokker::mutual_information(joint->joint);
  });
}

/* ---- identity checks ---- */

fl_status fl_check_entropy_rate(const fl_model* model, const fl_density* p0, double t, double h,
                                double dt, fl_scheme scheme, double tolerance, fl_reports** out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(p0, "p0");
    check_ptr(out, "out");
    const fokker::SolverRateOptions opts{dt, to_scheme(scheme), tolerance};
    auto r = new fl_reports;
    r->push(fokker::verify_entropy_rate(model->model, p0->field, t, h, opts));
    *out = r;
  });
}

fl_status fl_check_kl_rate(const fl_model* model, const fl_density* p0, const fl_density* q0,
                           double t, double h, double dt, fl_scheme scheme, double tolerance,
                           fl_reports** out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(p0, "p0");
    check_ptr(q0, "q0");
    check_ptr(out, "out");
    const fokker::SolverRateOptions opts{dt, to_scheme(scheme), tolerance};
    auto r = new fl_reports;
    r->push(fokker::verify_kl_rate(model->model, p0->field, q0->field, t, h, opts));
    *out = r;
  });
}

fl_status fl_check_mi_rate(const fl_model* model, const fl_density* prior, const fl_grid* grid_xt,
                           double t, double h, double tolerance, fl_reports** out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(prior, "prior");
    check_ptr(grid_xt, "grid_xt");
    check_ptr(out, "out");
    auto r = new fl_reports;
    r->push(fokker::verify_mi_rate(model->model, prior->field, grid_xt->grid, t, h, tolerance));
    *out = r;
  });
}

fl_status fl_check_fisher_bridge(const fl_joint* joint, const fl_model* weight_model,
                                 double tolerance, fl_reports** out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    auto r = new fl_reports;
    r->push(fokker::verify_fisher_bridge(joint->joint, pick_weight(weight_model), tolerance));
    *out = r;
  });
}

fl_status fl_check_mmse_bridge(const fl_joint* joint, const fl_model* model,
                               const fl_model* weight_model, double tolerance, fl_reports** out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(model, "model");
    check_ptr(out, "out");
    auto r = new fl_reports;
    r->push(fokker::verify_mmse_bridge(joint->joint, *model->model, pick_weight(weight_model),
                                       tolerance));
    *out = r;
  });
}

fl_status fl_check_van_trees(const fl_joint* joint, const fl_model* weight_model,
                             fl_estimator estimator, double tolerance, fl_reports** out) {
  return guarded([&] {
    check_ptr(joint, "joint");
    check_ptr(out, "out");
    const auto est = estimator == FL_ESTIMATOR_ZERO ? fokker::VanTreesEstimator::zero
                                                    : fokker::VanTreesEstimator::conditional_mean;
    auto r = new fl_reports;
    r->push(fokker::verify_van_trees(joint->joint, pick_weight(weight_model), est, tolerance));
    *out = r;
  });
}

fl_status fl_check_ou_fisher_bound(double alpha, const fl_density* prior, const double* t_values,
                                   int64_t n_times, double tolerance, fl_reports** out) {
  return guarded([&] {
    check_ptr(prior, "prior");
    check_ptr(t_values, "t_values");
    check_ptr(out, "out");
    auto r = new fl_reports;
    r->push(fokker::verify_ou_fisher_bound(
        alpha, prior->field, std::span{t_values, static_cast<std::size_t>(n_times)}, tolerance));
    *out = r;
  });
}

/* ---- report sets ---- */

fl_status fl_reports_create(fl_reports** out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = new fl_reports;
  });
}

void fl_reports_free(fl_reports* reports) { delete reports; }

fl_status fl_reports_count(const fl_reports* reports, int64_t* out) {
  return guarded([&] {
    check_ptr(reports, "reports");
    check_ptr(out, "out");
    *out = static_cast<int64_t>(reports->rows.size());
  });
}

fl_status fl_reports_extend(fl_reports* dst, const fl_reports* src) {
  return guarded([&] {
    check_ptr(dst, "dst");
    check_ptr(src, "src");
    dst->push(src->rows);
  });
}

const char* fl_reports_name(const fl_reports* reports, int64_t index) {
  if (reports == nullptr || index < 0 || static_cast<std::size_t>(index) >= reports->rows.size())
    return "";
  return reports->rows[static_cast<std::size_t>(index)].name.c_str();
}

#define FL_REPORT_FIELD(fn, field)                                      \
  fl_status fn(const fl_reports* reports, int64_t index, double* out) { \
    return guarded([&] {                                                \
      check_ptr(reports, "reports");                                    \
      check_ptr(out, "out");                                            \
      *out = reports->at(index).field;                                  \
    });                                                                 \
  }

FL_REPORT_FIELD(fl_reports_lhs, lhs)
FL_REPORT_FIELD(fl_reports_rhs, rhs)
FL_REPORT_FIELD(fl_reports_abs_err, abs_err)
FL_REPORT_FIELD(fl_reports_rel_err, rel_err)
FL_REPORT_FIELD(fl_reports_tolerance, tolerance)

#undef FL_REPORT_FIELD

fl_status fl_reports_passed(const fl_reports* reports, int64_t index, int* out) {
  return guarded([&] {
    check_ptr(reports, "reports");
    check_ptr(out, "out");
    *out = reports->at(index).passed ? 1 : 0;
  });
}

const char* fl_reports_lhs_method(const fl_reports* reports, int64_t index) {
  if (reports == nullptr || index < 0 || static_cast<std::size_t>(index) >= reports->rows.size())
    return "";
  return reports->rows[static_cast<std::size_t>(index)].lhs_method.c_str();
}

const char* fl_reports_rhs_method(const fl_reports* reports, int64_t index) {
  if (reports == nullptr || index < 0 || static_cast<std::size_t>(index) >= reports->rows.size())
    return "";
  return reports->rows[static_cast<std::size_t>(index)].rhs_method.c_str();
}

const char* fl_reports_params_json(const fl_reports* reports, int64_t index) {
  if (reports == nullptr || index < 0 || static_cast<std::size_t>(index) >= reports->jsons.size())
    return "";
  return reports->jsons[static_cast<std::size_t>(index)].c_str();
}

fl_status fl_reports_all_passed(const fl_reports* reports, int* out) {
  return guarded([&] {
    check_ptr(reports, "reports");
    check_ptr(out, "out");
    *out = fokker::all_passed(reports->rows) ? 1 : 0;
  });
}

fl_status fl_reports_write_csv(const fl_reports* reports, const char* path) {
  return guarded([&] {
    check_ptr(reports, "reports");
    write_file(path, fokker::reports_to_csv(reports->rows));
  });
}

fl_status fl_reports_write_summary(const fl_reports* reports, const char* path) {
  return guarded([&] {
    check_ptr(reports, "reports");
    write_file(path, fokker::reports_to_summary(reports->rows));
  });
}

/* ---- curves ---- */

fl_status fl_immse_curve(const fl_model* model, const fl_density* prior, const fl_grid* grid_xt,
                         const double* t_values, int64_t n_times, fl_curve** out) {
  return guarded([&] {
    check_ptr(model, "model");
    check_ptr(prior, "prior");
    check_ptr(grid_xt, "grid_xt");
    check_ptr(t_values, "t_values");
    check_ptr(out, "out");
    *out = new fl_curve{fokker::immse_curve(
        model->model, prior->field, grid_xt->grid,
        std::span{t_values, static_cast<std::size_t>(n_times)})};
  });
}

void fl_curve_free(fl_curve* curve) { delete curve; }

fl_status fl_curve_count(const fl_curve* curve, int64_t* out) {
  return guarded([&] {
    check_ptr(curve, "curve");
    check_ptr(out, "out");
    *out = static_cast<int64_t>(curve->points.size());
  });
}

fl_status fl_curve_point(const fl_curve* curve, int64_t index, double* t, double* mi,
                         double* mi_rate, double* mmse, double* predicted_rate) {
  return guarded([&] {
    check_ptr(curve, "curve");
    fokker::require(index >= 0 && static_cast<std::size_t>(index) < curve->points.size(),
                    fokker::ErrorCode::invalid_argument, "curve index out of range");
    const auto& p = curve->points[static_cast<std::size_t>(index)];
    if (t != nullptr) *t = p.t;
    if (mi != nullptr) *mi = p.mi;
    if (mi_rate != nullptr) *mi_rate = p.mi_rate;
    if (mmse != nullptr) *mmse = p.mmse;
    if (predicted_rate != nullptr) *predicted_rate = p.predicted_rate;
  });
}

fl_status fl_curve_write_csv(const fl_curve* curve, const char* path) {
  return guarded([&] {
    check_ptr(curve, "curve");
    write_file(path, fokker::curve_to_csv(curve->points));
  });
}

/* ---- linear multivariate channels ---- */

fl_status fl_lg_propagate(int dim, const double* A, const double* b, const double* mean0,
                          const double* cov0, double t0, double t1, double* mean_out,
                          double* cov_out) {
  return guarded([&] {
    check_ptr(mean_out, "mean_out");
    check_ptr(cov_out, "cov_out");
    const auto model = lg_model(dim, A, b);
    const auto state = lg_state(dim, mean0, cov0, t0);
    const auto out = fokker::lingauss::propagate(model, state, t1);
    for (int i = 0; i < dim; ++i) mean_out[i] = out.mean.v[static_cast<std::size_t>(i)];
    for (int i = 0; i < dim * dim; ++i) cov_out[i] = out.cov.v[static_cast<std::size_t>(i)];
  });
}

fl_status fl_lg_entropy(int dim, const double* cov, double* out) {
  return guarded([&] {
    check_ptr(out, "out");
    std::vector<double> mean(static_cast<std::size_t>(dim > 0 ? dim : 1), 0.0);
    *out = fokker::lingauss::gaussian_entropy(lg_state(dim, mean.data(), cov, 0.0));
  });
}

fl_status fl_lg_fisher(int dim, const double* cov, const double* weight, double* out) {
  return guarded([&] {
    check_ptr(weight, "weight");
    check_ptr(out, "out");
    std::vector<double> mean(static_cast<std::size_t>(dim > 0 ? dim : 1), 0.0);
    const auto state = lg_state(dim, mean.data(), cov, 0.0);
    fokker::lingauss::Mat b = fokker::lingauss::Mat::zero(dim);
    for (int i = 0; i < dim * dim; ++i) b.v[static_cast<std::size_t>(i)] = weight[i];
    *out = fokker::lingauss::gaussian_fisher_b(state, b);
  });
}

fl_status fl_lg_mutual_information(int dim, const double* A, const double* b, const double* mean0,
                                   const double* cov0, double t, double* out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = fokker::lingauss::gaussian_mutual_information(lg_model(dim, A, b),
                                                         lg_state(dim, mean0, cov0, 0.0), t);
  });
}

fl_status fl_lg_check_entropy_rate(int dim, const double* A, const double* b, const double* mean,
                                   const double* cov, double t, double h, double tolerance,
                                   fl_reports** out) {
  return guarded([&] {
    check_ptr(out, "out");
    auto r = new fl_reports;
    r->push(fokker::lingauss::verify_entropy_rate_mv(lg_model(dim, A, b),
                                                     lg_state(dim, mean, cov, t), h,
                                                     tolerance > 0.0 ? tolerance : 1e-6));
    *out = r;
  });
}

fl_status fl_lg_check_van_trees(int dim, const double* A, const double* b, const double* mean0,
                                const double* cov0, double t, double tolerance, fl_reports** out) {
  return guarded([&] {
    check_ptr(out, "out");
    auto r = new fl_reports;
    r->push(fokker::lingauss::verify_van_trees_mv(lg_model(dim, A, b),
                                                  lg_state(dim, mean0, cov0, 0.0), t,
                                                  tolerance > 0.0 ? tolerance : 1e-6));
    *out = r;
  });
}

}  // extern "C"
