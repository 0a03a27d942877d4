#pragma once

#include <span>
#include <vector>

#include "core/joint.hpp"
#include "core/report.hpp"
#include "core/solver.hpp"

namespace fokker {

// Default tolerances: closed-form kernel routes are tighter than
// finite-difference-plus-solver routes.
inline constexpr double kKernelCheckTol = 1e-3;
inline constexpr double kSolverCheckTol = 1e-2;

struct SolverRateOptions {
  double dt = 0.0;  // <= 0 selects the solver default
  Scheme scheme = Scheme::crank_nicolson;
  double tolerance = 0.0;  // <= 0 selects the check default
};

// dH/dt against (1/2) J_{b_t}(X_t) + E[da/dx - (1/2) d^2b/dx^2]; the left
// side is a central difference of trajectory entropies, with the half-step
// value recorded in params as lhs_h_half.
std::vector<IdentityReport> verify_entropy_rate(ModelPtr model, const DensityField& p0, double t,
                                                double h, const SolverRateOptions& opts = {});

// dK(p_t || q_t)/dt against -(1/2) J_{b_t}(p_t || q_t), plus the
// monotone-decrease assertion on the measured rate.
std::vector<IdentityReport> verify_kl_rate(ModelPtr model, const DensityField& p0,
                                           const DensityField& q0, double t, double h,
                                           const SolverRateOptions& opts = {});

// dI(X_0; X_t)/dt against -(1/2) J_b(X_0; X_t) from transition-kernel
// joints, plus the monotone-decrease assertion.
std::vector<IdentityReport> verify_mi_rate(ModelPtr model, const DensityField& prior,
                                           const Grid1D& grid_xt, double t, double h,
                                           double tolerance = 0.0);

// Mutual Fisher information against the statistical Fisher information.
std::vector<IdentityReport> verify_fisher_bridge(const JointDensity& joint,
                                                 const WeightFunction& b, double tolerance = 0.0);

// Mutual Fisher information against the weighted conditional variance of
// the kernel score.
std::vector<IdentityReport> verify_mmse_bridge(const JointDensity& joint, const SdeModel& model,
                                               const WeightFunction& b, double tolerance = 0.0);

enum class VanTreesEstimator { conditional_mean, zero };

// Weighted Bayesian Cramer-Rao bound: estimator risk E[(T(Y)-X0)^2/b(X0)]
// against 1/(Phi_b(Y|X) + J_b(X0)), reported as a non-negative violation,
// plus the decomposition identity Phi_b(Y|X) + J_b(X0) = J_b(X0|Y).
std::vector<IdentityReport> verify_van_trees(const JointDensity& joint, const WeightFunction& b,
                                             VanTreesEstimator estimator, double tolerance = 0.0);

// J(X_t) <= 2 alpha / (1 - e^{-2 alpha t}) across a sweep of times.
std::vector<IdentityReport> verify_ou_fisher_bound(double alpha, const DensityField& prior,
                                                   std::span<const double> t_values,
                                                   double tolerance = 0.0);

struct CurvePoint {
  double t = 0.0;
  double mi = 0.0;
  double mi_rate = 0.0;
  double mmse = 0.0;
  double predicted_rate = 0.0;
};

// Mutual information, its measured time derivative, the model's natural
// estimation error (x0 for brownian/ou, log x0 for gbm), and the rate the
// closed-form coefficient predicts from that error.
std::vector<CurvePoint> immse_curve(ModelPtr model, const DensityField& prior,
                                    const Grid1D& grid_xt, std::span<const double> t_values);

std::string curve_to_csv(std::span<const CurvePoint> points);

// Marginal law of X_t under a transition-kernel model.
DensityField kernel_marginal(const SdeModel& model, const DensityField& prior,
                             const Grid1D& grid_xt, double t);

// Numeric lookup of a parameter frozen into a report.
double report_param(const IdentityReport& report, const std::string& key);

}  // namespace fokker
