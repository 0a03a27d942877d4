#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/grid.hpp"
#include "core/report.hpp"

namespace fokker {

using Coefficient = std::function<double(double x, double t)>;

//! Closed-form transition law of a channel: density p(x_t | x_0) at lag t,
//! its score d/dx_t log p, and (when known) the weighted conditional Fisher
//! information as a function of t.
struct TransitionKernel {
  std::function<double(double x0, double xt, double t)> density;
  std::function<double(double x0, double xt, double t)> score;
  std::function<double(double t)> conditional_fisher;  // may be empty

  bool has_conditional_fisher() const { return static_cast<bool>(conditional_fisher); }
};

//! SDE channel dX = a(X,t) dt + sigma(X,t) dW with weight b = sigma^2.
//! drift_dx and weight_dxx are the exact partial derivatives used by the
//! entropy-rate correction term; built-ins supply them analytically and
//! custom models fall back to finite differences.
struct SdeModel {
  std::string name;
  Coefficient drift;
  Coefficient diffusion;
  Coefficient weight;
  Coefficient drift_dx;
  Coefficient weight_dxx;
  Support support = Support::full_line;
  bool time_homogeneous = false;  // coefficients free of t: operators can be cached
  std::optional<TransitionKernel> kernel;

  // Per-model override for path simulation: maps (x, t, dt, z) to the next
  // state using an exact one-step law instead of Euler-Maruyama. Set for
  // gbm, where the exact update keeps particles positive.
  std::function<double(double x, double t, double dt, double z)> exact_step;

  // Named scalar parameters of the built-ins (alpha, mu, sigma).
  std::vector<std::pair<std::string, double>> params;

  bool has_kernel() const { return kernel.has_value(); }
};

double model_param(const SdeModel& model, const std::string& name);

using ModelPtr = std::shared_ptr<const SdeModel>;

ModelPtr builtin_brownian();
ModelPtr builtin_ou(double alpha);
ModelPtr builtin_gbm(double mu, double sigma);

// Coefficients given as expressions in x and t; no transition kernel.
// drift_dx / weight_dxx use second-order central differences in x.
ModelPtr make_custom_model(const std::string& drift_expr, const std::string& diffusion_expr,
                           Support support, const std::string& name = "custom");

// Samples sigma > 0 and weight == sigma^2 (1e-12 relative) over the grid
// at the given times; throws on violation.
void validate_coefficients(const SdeModel& model, const Grid1D& grid,
                           std::span<const double> times);

// Sup-norm gap between the analytic kernel score and a central finite
// difference of log kernel density over a probe grid around the
// conditional mean.
IdentityReport kernel_selfcheck(const SdeModel& model, double x0, double t);

}  // namespace fokker
