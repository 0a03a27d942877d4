#include "core/lin_gauss.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace fokker::lingauss {

namespace {

void check_dim(int d, const char* who) {
  require(d >= 1 && d <= 3, ErrorCode::domain, std::string(who) + ": dimension must be 1, 2, or 3");
}

}  // namespace

Mat Mat::zero(int d) {
  Mat m;
  m.d = d;
  return m;
}

Mat Mat::identity(int d) {
  Mat m = zero(d);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

Mat mat_add(const Mat& a, const Mat& b) {
  Mat r = a;
  for (int i = 0; i < a.d * a.d; ++i) r.v[static_cast<std::size_t>(i)] += b.v[static_cast<std::size_t>(i)];
  return r;
}

Mat mat_sub(const Mat& a, const Mat& b) {
  Mat r = a;
  for (int i = 0; i < a.d * a.d; ++i) r.v[static_cast<std::size_t>(i)] -= b.v[static_cast<std::size_t>(i)];
  return r;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  Mat r = Mat::zero(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int k = 0; k < a.d; ++k) {
      const double aik = a.at(i, k);
      for (int j = 0; j < a.d; ++j) r.at(i, j) += aik * b.at(k, j);
    }
  return r;
}

Mat mat_scale(const Mat& a, double s) {
  Mat r = a;
  for (double& x : r.v) x *= s;
  return r;
}

Mat transpose(const Mat& a) {
  Mat r = Mat::zero(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) r.at(i, j) = a.at(j, i);
  return r;
}

double trace(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i) s += a.at(i, i);
  return s;
}

double det(const Mat& a) {
  switch (a.d) {
    case 1: return a.at(0, 0);
    case 2: return a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0);
    case 3:
      return a.at(0, 0) * (a.at(1, 1) * a.at(2, 2) - a.at(1, 2) * a.at(2, 1)) -
             a.at(0, 1) * (a.at(1, 0) * a.at(2, 2) - a.at(1, 2) * a.at(2, 0)) +
             a.at(0, 2) * (a.at(1, 0) * a.at(2, 1) - a.at(1, 1) * a.at(2, 0));
    default: fail(ErrorCode::domain, "det: dimension must be 1, 2, or 3");
  }
}

Mat inverse(const Mat& a) {
  const double dd = det(a);
  require(std::abs(dd) > 1e-300, ErrorCode::numeric, "inverse: singular matrix");
  Mat r = Mat::zero(a.d);
  switch (a.d) {
    case 1: r.at(0, 0) = 1.0 / dd; break;
    case 2:
      r.at(0, 0) = a.at(1, 1) / dd;
      r.at(0, 1) = -a.at(0, 1) / dd;
      r.at(1, 0) = -a.at(1, 0) / dd;
      r.at(1, 1) = a.at(0, 0) / dd;
      break;
    case 3:
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
          const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
          // adjugate: cofactor of (j, i)
          r.at(i, j) = (a.at(j1, i1) * a.at(j2, i2) - a.at(j1, i2) * a.at(j2, i1)) / dd;
        }
      break;
    default: fail(ErrorCode::domain, "inverse: dimension must be 1, 2, or 3");
  }
  return r;
}

bool is_spd(const Mat& a, double sym_tol) {
  double scale = 1e-30;
  for (int i = 0; i < a.d; ++i) scale = std::max(scale, std::abs(a.at(i, i)));
  for (int i = 0; i < a.d; ++i)
    for (int j = i + 1; j < a.d; ++j)
      if (std::abs(a.at(i, j) - a.at(j, i)) > sym_tol * scale) return false;
  // Sylvester's criterion on leading principal minors.
  if (a.at(0, 0) <= 0.0) return false;
  if (a.d >= 2 && a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0) <= 0.0) return false;
  if (a.d == 3 && det(a) <= 0.0) return false;
  return true;
}

LinearSdeModel make_linear_model(int dim, std::span<const double> A, std::span<const double> b) {
  check_dim(dim, "make_linear_model");
  const std::size_t n = static_cast<std::size_t>(dim * dim);
  require(A.size() == n && b.size() == n, ErrorCode::invalid_argument,
          "make_linear_model: matrix arrays must hold dim*dim entries");
  LinearSdeModel m;
  m.dim = dim;
  m.A = Mat::zero(dim);
  m.b = Mat::zero(dim);
  for (std::size_t i = 0; i < n; ++i) {
    m.A.v[i] = A[i];
    m.b.v[i] = b[i];
  }
  require(is_spd(m.b), ErrorCode::domain,
          "make_linear_model: weight matrix must be symmetric positive definite");
  return m;
}

GaussianState make_state(int dim, std::span<const double> mean, std::span<const double> cov,
                         double t) {
  check_dim(dim, "make_state");
  require(mean.size() == static_cast<std::size_t>(dim), ErrorCode::invalid_argument,
          "make_state: mean must hold dim entries");
  require(cov.size() == static_cast<std::size_t>(dim * dim), ErrorCode::invalid_argument,
          "make_state: covariance must hold dim*dim entries");
  GaussianState s;
  s.dim = dim;
  s.mean.d = dim;
  for (int i = 0; i < dim; ++i) s.mean.v[static_cast<std::size_t>(i)] = mean[static_cast<std::size_t>(i)];
  s.cov = Mat::zero(dim);
  for (std::size_t i = 0; i < cov.size(); ++i) s.cov.v[i] = cov[i];
  require(is_spd(s.cov), ErrorCode::numeric,
          "make_state: covariance must be symmetric positive definite");
  s.t = t;
  return s;
}

namespace {

struct Moments {
  Vec mean;
  Mat cov;
  Mat fundamental;  // F(t) with dF/dt = A F, F(start) = I
};

// One Runge-Kutta stage: derivatives of (mean, cov, F) at the current
// values (coefficients are time-independent).
Moments derivs(const LinearSdeModel& m, const Moments& s) {
  Moments d;
  d.mean.d = s.mean.d;
  for (int i = 0; i < s.mean.d; ++i) {
    double acc = 0.0;
    for (int j = 0; j < s.mean.d; ++j) acc += m.A.at(i, j) * s.mean.v[static_cast<std::size_t>(j)];
    d.mean.v[static_cast<std::size_t>(i)] = acc;
  }
  d.cov = mat_add(mat_add(mat_mul(m.A, s.cov), mat_mul(s.cov, transpose(m.A))), m.b);
  d.fundamental = mat_mul(m.A, s.fundamental);
  return d;
}

Moments axpy(const Moments& s, const Moments& d, double h) {
  Moments r = s;
  for (int i = 0; i < s.mean.d; ++i) r.mean.v[static_cast<std::size_t>(i)] += h * d.mean.v[static_cast<std::size_t>(i)];
  r.cov = mat_add(s.cov, mat_scale(d.cov, h));
  r.fundamental = mat_add(s.fundamental, mat_scale(d.fundamental, h));
  return r;
}

Moments rk4_march(const LinearSdeModel& model, Moments s, double span) {
  if (span == 0.0) return s;
  const int nsteps = std::max(16, static_cast<int>(std::ceil(std::abs(span) / 1e-3)));
  const double h = span / nsteps;
  for (int k = 0; k < nsteps; ++k) {
    const Moments k1 = derivs(model, s);
    const Moments k2 = derivs(model, axpy(s, k1, 0.5 * h));
    const Moments k3 = derivs(model, axpy(s, k2, 0.5 * h));
    const Moments k4 = derivs(model, axpy(s, k3, h));
    Moments step = axpy(s, k1, h / 6.0);
    step = axpy(step, k2, h / 3.0);
    step = axpy(step, k3, h / 3.0);
    step = axpy(step, k4, h / 6.0);
    s = step;
  }
  return s;
}

Moments propagate_full(const LinearSdeModel& model, const GaussianState& state, double t_end) {
  require(model.dim == state.dim, ErrorCode::invalid_argument,
          "propagate: model and state dimensions differ");
  Moments s{state.mean, state.cov, Mat::identity(state.dim)};
  s = rk4_march(model, s, t_end - state.t);
  require(is_spd(s.cov, 1e-6), ErrorCode::numeric,
          "propagate: covariance lost positive definiteness");
  return s;
}

}  // namespace

GaussianState propagate(const LinearSdeModel& model, const GaussianState& state, double t_end) {
  const Moments s = propagate_full(model, state, t_end);
  GaussianState out;
  out.dim = state.dim;
  out.mean = s.mean;
  out.cov = s.cov;
  out.t = t_end;
  return out;
}

double gaussian_entropy(const GaussianState& state) {
  const double d = static_cast<double>(state.dim);
  return 0.5 * (d * std::log(2.0 * std::numbers::pi * std::numbers::e) + std::log(det(state.cov)));
}

double gaussian_fisher_b(const GaussianState& state, const Mat& b) {
  require(b.d == state.dim, ErrorCode::invalid_argument, "gaussian_fisher_b: dimension mismatch");
  require(is_spd(b), ErrorCode::domain, "gaussian_fisher_b: weight must be SPD");
  return trace(mat_mul(b, inverse(state.cov)));
}

std::vector<IdentityReport> verify_entropy_rate_mv(const LinearSdeModel& model,
                                                   const GaussianState& state, double h,
                                                   double tolerance) {
  require(h > 0.0, ErrorCode::domain, "verify_entropy_rate_mv: h must be positive");
  const GaussianState fwd = propagate(model, state, state.t + h);
  const GaussianState bwd = propagate(model, state, state.t - h);
  const double lhs = (gaussian_entropy(fwd) - gaussian_entropy(bwd)) / (2.0 * h);
  const double rhs = 0.5 * gaussian_fisher_b(state, model.b) + trace(model.A);
  IdentityReport r("entropy_rate_mv", lhs, rhs, tolerance, "fd-gaussian-entropy",
                   "trace-fisher-plus-divergence");
  r.add_param("dim", static_cast<double>(model.dim));
  r.add_param("t", state.t);
  r.add_param("h", h);
  return {r};
}

std::vector<IdentityReport> verify_van_trees_mv(const LinearSdeModel& model,
                                                const GaussianState& prior, double t,
                                                double tolerance) {
  require(t > prior.t, ErrorCode::domain, "verify_van_trees_mv: t must exceed the prior time");
  const Moments m = propagate_full(model, prior, t);
  const Mat F = m.fundamental;
  const Mat Ft = transpose(F);
  const Mat Sigma0 = prior.cov;
  const Mat SigmaT = m.cov;
  const Mat Q = mat_sub(SigmaT, mat_mul(F, mat_mul(Sigma0, Ft)));
  require(is_spd(Q, 1e-6), ErrorCode::numeric,
          "verify_van_trees_mv: conditional covariance not positive definite");

  // Posterior covariance of X0 given X_t via the Schur complement.
  const Mat C = mat_mul(Sigma0, Ft);  // Cov(X0, Xt)
  const Mat P = mat_sub(Sigma0, mat_mul(C, mat_mul(inverse(SigmaT), transpose(C))));
  require(is_spd(P, 1e-6), ErrorCode::numeric,
          "verify_van_trees_mv: posterior covariance not positive definite");

  const double risk = trace(mat_mul(inverse(model.b), P));
  const double phi = trace(mat_mul(model.b, mat_mul(Ft, mat_mul(inverse(Q), F))));
  const double prior_fisher = trace(mat_mul(model.b, inverse(Sigma0)));
  const double posterior_fisher = trace(mat_mul(model.b, inverse(P)));
  const double bound = 1.0 / (phi + prior_fisher);

  IdentityReport bound_report("van_trees_mv_bound", std::max(bound - risk, 0.0), 0.0, 1e-9,
                              "positive-part-of-bound-violation", "zero");
  bound_report.add_param("estimator_risk", risk);
  bound_report.add_param("bound", bound);
  bound_report.add_param("dim", static_cast<double>(model.dim));
  bound_report.add_param("t", t);

  IdentityReport decomposition("van_trees_mv_decomposition", phi + prior_fisher, posterior_fisher,
                               tolerance, "kernel-fisher-plus-prior-fisher", "posterior-fisher");
  decomposition.add_param("phi_b", phi);
  decomposition.add_param("prior_fisher", prior_fisher);
  return {bound_report, decomposition};
}

double gaussian_mutual_information(const LinearSdeModel& model, const GaussianState& prior,
                                   double t) {
  require(t - prior.t >= 1e-6, ErrorCode::domain,
          "gaussian_mutual_information: needs t - t0 >= 1e-6 (diverges at t -> t0)");
  const Moments m = propagate_full(model, prior, t);
  const Mat Q = mat_sub(m.cov, mat_mul(m.fundamental, mat_mul(prior.cov, transpose(m.fundamental))));
  require(is_spd(Q, 1e-6), ErrorCode::numeric,
          "gaussian_mutual_information: conditional covariance not positive definite");
  return 0.5 * std::log(det(m.cov) / det(Q));
}

}  // namespace fokker::lingauss
