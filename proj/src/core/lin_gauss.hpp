#pragma once

#include <array>
#include <span>
#include <vector>

#include "core/report.hpp"

namespace fokker::lingauss {

// Row-major square matrix of dimension d <= 3; closed-form determinant and
// inverse, no linear-algebra dependency needed at this size.
struct Mat {
  int d = 0;
  std::array<double, 9> v{};

  double& at(int i, int j) { return v[static_cast<std::size_t>(i * d + j)]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i * d + j)]; }

  static Mat zero(int d);
  static Mat identity(int d);
};

struct Vec {
  int d = 0;
  std::array<double, 3> v{};
};

Mat mat_add(const Mat& a, const Mat& b);
Mat mat_sub(const Mat& a, const Mat& b);
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_scale(const Mat& a, double s);
Mat transpose(const Mat& a);
double trace(const Mat& a);
double det(const Mat& a);
Mat inverse(const Mat& a);
bool is_spd(const Mat& a, double sym_tol = 1e-9);

//! Linear channel dX = A X dt + Sigma^(1/2) dW with constant SPD weight
//! matrix b = Sigma.
struct LinearSdeModel {
  int dim = 0;
  Mat A;
  Mat b;
};

struct GaussianState {
  int dim = 0;
  Vec mean;
  Mat cov;
  double t = 0.0;
};

LinearSdeModel make_linear_model(int dim, std::span<const double> A, std::span<const double> b);
GaussianState make_state(int dim, std::span<const double> mean, std::span<const double> cov,
                         double t);

// Moment propagation d(mean)/dt = A mean, d(cov)/dt = A cov + cov A^T + b
// by fixed-step fourth-order Runge-Kutta; covariance must stay positive
// definite.
GaussianState propagate(const LinearSdeModel& model, const GaussianState& state, double t_end);

double gaussian_entropy(const GaussianState& state);

// J_b = trace(b cov^{-1}), exact for Gaussian laws with constant b.
double gaussian_fisher_b(const GaussianState& state, const Mat& b);

// d/dt H(X_t) against (1/2) trace(b cov^{-1}) + trace(A), all closed form.
std::vector<IdentityReport> verify_entropy_rate_mv(const LinearSdeModel& model,
                                                   const GaussianState& state, double h,
                                                   double tolerance = 1e-6);

// Matrix-weighted Bayesian Cramer-Rao bound for estimating X_0 from X_t
// under the Gaussian joint law, plus the information decomposition
// Phi_b(Y|X) + J_b(X0) = J_b(X0|Y).
std::vector<IdentityReport> verify_van_trees_mv(const LinearSdeModel& model,
                                                const GaussianState& prior, double t,
                                                double tolerance = 1e-6);

// I(X_0; X_t) of the joint Gaussian law; requires t >= 1e-6 because the
// value diverges at t -> 0.
double gaussian_mutual_information(const LinearSdeModel& model, const GaussianState& prior,
                                   double t);

}  // namespace fokker::lingauss
