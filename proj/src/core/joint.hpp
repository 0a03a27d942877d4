#pragma once

#include <functional>
#include <vector>

#include "core/functionals.hpp"
#include "core/grid.hpp"
#include "core/model.hpp"
#include "core/solver.hpp"

namespace fokker {

//! Discretized joint law of (X_0, X_t) on a product grid, stored row-major
//! with x0 as the row index. Normalized under the product trapezoid rule;
//! marginalizing over x_t recovers the prior within L1 1e-4 (enforced).
class JointDensity {
public:
  JointDensity(DensityField prior, Grid1D grid_xt, std::vector<double> values, double t,
               Support support_xt);

  const Grid1D& grid_x0() const noexcept { return prior_.grid(); }
  const Grid1D& grid_xt() const noexcept { return grid_xt_; }
  const DensityField& prior() const noexcept { return prior_; }
  double t() const noexcept { return t_; }
  double value(std::size_t i0, std::size_t it) const noexcept {
    return values_[i0 * grid_xt_.size() + it];
  }
  std::span<const double> values() const noexcept { return values_; }

  DensityField marginal_xt() const;
  std::vector<double> marginal_xt_values() const;

private:
  DensityField prior_;
  Grid1D grid_xt_;
  std::vector<double> values_;
  double t_;
  Support support_xt_;
};

// Joint from a closed-form transition kernel: values = prior(x0) k(x0, xt).
JointDensity build_joint(const DensityField& prior, const SdeModel& model, const Grid1D& grid_xt,
                         double t);

// Kernel-free joint: each prior node launches a narrow Gaussian (std 2h)
// evolved by the conservative solver on grid_xt, all columns sharing one
// factorized time march.
JointDensity build_joint_numeric(const DensityField& prior, const SdeModel& model,
                                 const Grid1D& grid_xt, double t, double dt = 0.0,
                                 Scheme scheme = Scheme::crank_nicolson);

// int p_X0(x0) J_b(X_t | X_0 = x0) dx0, slice Fisher over x_t.
double conditional_fisher_b(const JointDensity& joint, const WeightFunction& b);

// Conditional minus marginal weighted Fisher information; non-negative.
double mutual_fisher_b(const JointDensity& joint, const WeightFunction& b);

// b-weighted average over p_Xt of the pointwise Fisher information of the
// posterior family x0 | xt, differentiated in the conditioning variable.
double statistical_fisher_b(const JointDensity& joint, const WeightFunction& b);

// int p_Xt(y) b(y) Var[g(X0, y) | X_t = y] dy.
double mmse_b(const JointDensity& joint, const std::function<double(double x0, double xt)>& g,
              const WeightFunction& b);

// H(X_t) - H(X_t | X_0), in nats.
double mutual_information(const JointDensity& joint);

}  // namespace fokker
