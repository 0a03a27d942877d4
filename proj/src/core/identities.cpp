#include "core/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace fokker {

namespace {

double pick_tol(double requested, double fallback) {
  return requested > 0.0 ? requested : fallback;
}

double trapw(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

// E[da/dx - (1/2) d^2b/dx^2] under the field at time t.
double coefficient_correction(const SdeModel& model, const DensityField& p, double t) {
  std::vector<double> integrand(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p.grid().node(i);
    integrand[i] = p.value(i) * (model.drift_dx(x, t) - 0.5 * model.weight_dxx(x, t));
  }
  return integrate(integrand, p.grid());
}

void check_rate_window(double t, double h) {
  require(h > 0.0, ErrorCode::domain, "rate check: h must be positive");
  require(t - h > 0.0, ErrorCode::domain, "rate check: t - h must stay positive");
  require(h <= 0.25 * t, ErrorCode::domain, "rate check: h must be small against t");
}

IdentityReport monotone_report(const std::string& name, double rate) {
  IdentityReport r(name, std::max(rate, 0.0), 0.0, 1e-6, "positive-part-of-measured-rate", "zero");
  r.add_param("rate", rate);
  return r;
}

}  // namespace

double report_param(const IdentityReport& report, const std::string& key) {
  for (const auto& [k, v] : report.params)
    if (k == key) return std::strtod(v.c_str(), nullptr);
  fail(ErrorCode::invalid_argument, "report '" + report.name + "' has no parameter '" + key + "'");
}

std::vector<IdentityReport> verify_entropy_rate(ModelPtr model, const DensityField& p0, double t,
                                                double h, const SolverRateOptions& opts) {
  require(model != nullptr, ErrorCode::invalid_argument, "verify_entropy_rate: missing model");
  check_rate_window(t, h);
  SolveSpec spec(model, p0);
  spec.t_end = t + h;
  spec.dt = opts.dt;
  spec.scheme = opts.scheme;
  spec.snapshot_times = {t - h, t - 0.5 * h, t, t + 0.5 * h, t + h};
  const Trajectory traj = solve(spec);

  const double lhs =
      (entropy(traj.at_time(t + h)) - entropy(traj.at_time(t - h))) / (2.0 * h);
  const double lhs_half =
      (entropy(traj.at_time(t + 0.5 * h)) - entropy(traj.at_time(t - 0.5 * h))) / h;

  const DensityField& pt = traj.at_time(t);
  const double rhs =
      0.5 * fisher_b(pt, model_weight(model), t) + coefficient_correction(*model, pt, t);

  IdentityReport r("entropy_rate", lhs, rhs, pick_tol(opts.tolerance, kSolverCheckTol),
                   "fd-entropy-of-fp-trajectory", "weighted-fisher-plus-coefficient-term");
  r.add_param("model", model->name);
  r.add_param("t", t);
  r.add_param("h", h);
  r.add_param("lhs_h_half", lhs_half);
  r.add_param("mass_drift", traj.max_mass_drift());
  return {r};
}

std::vector<IdentityReport> verify_kl_rate(ModelPtr model, const DensityField& p0,
                                           const DensityField& q0, double t, double h,
                                           const SolverRateOptions& opts) {
  require(model != nullptr, ErrorCode::invalid_argument, "verify_kl_rate: missing model");
  check_rate_window(t, h);
  SolveSpec spec(model, p0);
  spec.t_end = t + h;
  spec.dt = opts.dt;
  spec.scheme = opts.scheme;
  spec.snapshot_times = {t - h, t - 0.5 * h, t, t + 0.5 * h, t + h};
  const Trajectory ptraj = solve(spec);
  SolveSpec qspec(model, q0);
  qspec.t_end = spec.t_end;
  qspec.dt = spec.dt;
  qspec.scheme = spec.scheme;
  qspec.snapshot_times = spec.snapshot_times;
  const Trajectory qtraj = solve(qspec);

  const auto kl_at = [&](double s) { return kl(ptraj.at_time(s), qtraj.at_time(s)); };
  const double lhs = (kl_at(t + h) - kl_at(t - h)) / (2.0 * h);
  const double lhs_half = (kl_at(t + 0.5 * h) - kl_at(t - 0.5 * h)) / h;
  const double rhs =
      -0.5 * relative_fisher_b(ptraj.at_time(t), qtraj.at_time(t), model_weight(model), t);

  IdentityReport r("kl_rate", lhs, rhs, pick_tol(opts.tolerance, kSolverCheckTol),
                   "fd-kl-of-fp-trajectories", "relative-weighted-fisher");
  r.add_param("model", model->name);
  r.add_param("t", t);
  r.add_param("h", h);
  r.add_param("lhs_h_half", lhs_half);
  return {r, monotone_report("kl_rate_monotone", lhs)};
}

std::vector<IdentityReport> verify_mi_rate(ModelPtr model, const DensityField& prior,
                                           const Grid1D& grid_xt, double t, double h,
                                           double tolerance) {
  require(model != nullptr, ErrorCode::invalid_argument, "verify_mi_rate: missing model");
  check_rate_window(t, h);
  const auto mi_at = [&](double s) {
    return mutual_information(build_joint(prior, *model, grid_xt, s));
  };
  const double lhs = (mi_at(t + h) - mi_at(t - h)) / (2.0 * h);
  const double lhs_half = (mi_at(t + 0.5 * h) - mi_at(t - 0.5 * h)) / h;
  const JointDensity joint = build_joint(prior, *model, grid_xt, t);
  const double rhs = -0.5 * mutual_fisher_b(joint, model_weight(model));

  IdentityReport r("mi_rate", lhs, rhs, pick_tol(tolerance, kSolverCheckTol),
                   "fd-mutual-information-of-kernel-joints", "mutual-weighted-fisher");
  r.add_param("model", model->name);
  r.add_param("t", t);
  r.add_param("h", h);
  r.add_param("lhs_h_half", lhs_half);
  return {r, monotone_report("mi_rate_monotone", lhs)};
}

std::vector<IdentityReport> verify_fisher_bridge(const JointDensity& joint,
                                                 const WeightFunction& b, double tolerance) {
  const double lhs = mutual_fisher_b(joint, b);
  const double rhs = statistical_fisher_b(joint, b);
  IdentityReport r("fisher_bridge", lhs, rhs, pick_tol(tolerance, kKernelCheckTol),
                   "conditional-minus-marginal-fisher", "posterior-family-fisher");
  r.add_param("t", joint.t());
  r.add_param("weight", b.name);
  return {r};
}

std::vector<IdentityReport> verify_mmse_bridge(const JointDensity& joint, const SdeModel& model,
                                               const WeightFunction& b, double tolerance) {
  require(model.has_kernel(), ErrorCode::unsupported,
          "verify_mmse_bridge: model '" + model.name + "' has no kernel score");
  const double t = joint.t();
  const auto& score = model.kernel->score;
  const double lhs = mutual_fisher_b(joint, b);
  const double rhs =
      mmse_b(joint, [&](double x0, double xt) { return score(x0, xt, t); }, b);
  IdentityReport r("mmse_bridge", lhs, rhs, pick_tol(tolerance, kKernelCheckTol),
                   "conditional-minus-marginal-fisher", "weighted-score-conditional-variance");
  r.add_param("model", model.name);
  r.add_param("t", t);
  r.add_param("weight", b.name);
  return {r};
}

std::vector<IdentityReport> verify_van_trees(const JointDensity& joint, const WeightFunction& b,
                                             VanTreesEstimator estimator, double tolerance) {
  const std::size_t n0 = joint.grid_x0().size(), nt = joint.grid_xt().size();
  const double h0 = joint.grid_x0().spacing(), ht = joint.grid_xt().spacing();
  const double t = joint.t();
  const std::vector<double> py = joint.marginal_xt_values();
  double py_max = 0.0;
  for (double v : py) py_max = std::max(py_max, v);

  // Estimator values per observation node.
  std::vector<double> T(nt, 0.0);
  if (estimator == VanTreesEstimator::conditional_mean) {
    for (std::size_t j = 0; j < nt; ++j) {
      if (py[j] < 1e-10 * py_max) continue;
      double mass = 0.0, mean = 0.0;
      for (std::size_t i = 0; i < n0; ++i) {
        const double w = trapw(i, n0) * joint.value(i, j);
        mass += w;
        mean += w * joint.grid_x0().node(i);
      }
      if (mass > 0.0) T[j] = mean / mass;
    }
  }

  // Risk E[(T(Y) - X0)^2 / b(X0)].
  double risk = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    const double x0 = joint.grid_x0().node(i);
    const double binv = 1.0 / b.eval(x0, t);
    for (std::size_t j = 0; j < nt; ++j) {
      const double d = T[j] - x0;
      risk += trapw(i, n0) * trapw(j, nt) * joint.value(i, j) * d * d * binv;
    }
  }
  risk *= h0 * ht;

  // Phi_b(Y|X): parametric Fisher information of the rows, differentiated
  // in the conditioning variable x0, prior- and b-weighted.
  const auto& prior = joint.prior();
  double phi = 0.0;
  for (std::size_t i = 1; i + 1 < n0; ++i) {
    if (prior.value(i) < 1e-10) continue;
    double inner = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      const double vm = joint.value(i - 1, j);
      const double vc = joint.value(i, j);
      const double vp = joint.value(i + 1, j);
      if (vm <= kDensityFloor || vc <= kDensityFloor || vp <= kDensityFloor) continue;
      // d/dx0 log k(y|x0) = d/dx0 log joint - d/dx0 log prior.
      const double dj = (std::log(vp) - std::log(vm)) / (2.0 * h0);
      const double dp =
          (std::log(std::max(prior.value(i + 1), kDensityFloor)) -
           std::log(std::max(prior.value(i - 1), kDensityFloor))) /
          (2.0 * h0);
      const double d = dj - dp;
      inner += trapw(j, nt) * (vc / prior.value(i)) * d * d;
    }
    inner *= ht;
    phi += prior.value(i) * b.eval(joint.grid_x0().node(i), t) * inner;
  }
  phi *= h0;

  const double prior_fisher = fisher_b(prior, b, t);

  // J_b(X0|Y): posterior Fisher in x0, averaged over the observation.
  double posterior_fisher = 0.0;
  for (std::size_t j = 0; j < nt; ++j) {
    if (py[j] < 1e-10 * py_max) continue;
    double inner = 0.0;
    for (std::size_t i = 1; i + 1 < n0; ++i) {
      const double vm = joint.value(i - 1, j);
      const double vc = joint.value(i, j);
      const double vp = joint.value(i + 1, j);
      if (vm <= kDensityFloor || vc <= kDensityFloor || vp <= kDensityFloor) continue;
      const double d = (std::log(vp) - std::log(vm)) / (2.0 * h0);
      inner += trapw(i, n0) * b.eval(joint.grid_x0().node(i), t) * (vc / py[j]) * d * d;
    }
    inner *= h0;
    posterior_fisher += trapw(j, nt) * py[j] * inner;
  }
  posterior_fisher *= ht;

  const double bound = 1.0 / (phi + prior_fisher);
  const double tol = pick_tol(tolerance, kKernelCheckTol);

  IdentityReport bound_report("van_trees_bound", std::max(bound - risk, 0.0), 0.0, 1e-6,
                              "positive-part-of-bound-violation", "zero");
  bound_report.add_param("estimator_risk", risk);
  bound_report.add_param("bound", bound);
  bound_report.add_param("estimator",
                         estimator == VanTreesEstimator::conditional_mean ? "conditional-mean"
                                                                          : "zero");
  bound_report.add_param("t", t);

  IdentityReport decomposition("van_trees_decomposition", phi + prior_fisher, posterior_fisher,
                               tol, "kernel-fisher-plus-prior-fisher", "posterior-fisher");
  decomposition.add_param("phi_b", phi);
  decomposition.add_param("prior_fisher", prior_fisher);

  return {bound_report, decomposition};
}

DensityField kernel_marginal(const SdeModel& model, const DensityField& prior,
                             const Grid1D& grid_xt, double t) {
  require(model.has_kernel(), ErrorCode::unsupported,
          "kernel_marginal: model '" + model.name + "' has no transition kernel");
  const std::size_t n0 = prior.size(), nt = grid_xt.size();
  std::vector<double> m(nt, 0.0);
  for (std::size_t i = 0; i < n0; ++i) {
    const double pw = trapw(i, n0) * prior.value(i);
    if (pw <= 0.0) continue;
    const double x0 = prior.grid().node(i);
    for (std::size_t j = 0; j < nt; ++j)
      m[j] += pw * model.kernel->density(x0, grid_xt.node(j), t);
  }
  for (double& v : m) v *= prior.grid().spacing();
  return normalize(DensityField(grid_xt, std::move(m), model.support));
}

std::vector<IdentityReport> verify_ou_fisher_bound(double alpha, const DensityField& prior,
                                                   std::span<const double> t_values,
                                                   double tolerance) {
  require(alpha > 0.0, ErrorCode::domain, "verify_ou_fisher_bound: alpha must be positive");
  require(!t_values.empty(), ErrorCode::invalid_argument,
          "verify_ou_fisher_bound: empty time sweep");
  const ModelPtr model = builtin_ou(alpha);
  double worst_violation = 0.0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (double t : t_values) {
    require(t > 0.0, ErrorCode::domain, "verify_ou_fisher_bound: times must be positive");
    const DensityField pt = kernel_marginal(*model, prior, prior.grid(), t);
    const double j = fisher_b(pt, unit_weight(), t);
    const double bound = 2.0 * alpha / (1.0 - std::exp(-2.0 * alpha * t));
    worst_violation = std::max(worst_violation, j - bound);
    min_slack = std::min(min_slack, bound - j);
  }
  IdentityReport r("ou_fisher_bound", std::max(worst_violation, 0.0), 0.0,
                   pick_tol(tolerance, 1e-4), "positive-part-of-bound-violation", "zero");
  r.add_param("alpha", alpha);
  r.add_param("n_times", static_cast<double>(t_values.size()));
  r.add_param("min_slack", min_slack);
  return {r};
}

std::vector<CurvePoint> immse_curve(ModelPtr model, const DensityField& prior,
                                    const Grid1D& grid_xt, std::span<const double> t_values) {
  require(model != nullptr, ErrorCode::invalid_argument, "immse_curve: missing model");
  require(!t_values.empty(), ErrorCode::invalid_argument, "immse_curve: empty time list");

  std::function<double(double)> coefficient;
  std::function<double(double, double)> target;
  if (model->name == "brownian") {
    coefficient = [](double t) { return -0.5 / (t * t); };
    target = [](double x0, double) { return x0; };
  } else if (model->name == "ou") {
    const double alpha = model_param(*model, "alpha");
    coefficient = [alpha](double t) {
      const double e = std::exp(-2.0 * alpha * t);
      const double den = 1.0 - e;
      return -2.0 * alpha * alpha * e / (den * den);
    };
    target = [](double x0, double) { return x0; };
  } else if (model->name == "gbm") {
    const double sigma = model_param(*model, "sigma");
    coefficient = [sigma](double t) { return -0.5 / (sigma * sigma * t * t); };
    target = [](double x0, double) { return std::log(x0); };
  } else {
    fail(ErrorCode::unsupported,
         "immse_curve: no closed-form rate coefficient for model '" + model->name + "'");
  }

  std::vector<CurvePoint> points;
  points.reserve(t_values.size());
  for (double t : t_values) {
    require(t > 0.0, ErrorCode::domain, "immse_curve: times must be positive");
    const double h = 1e-3 * t;
    const auto mi_at = [&](double s) {
      return mutual_information(build_joint(prior, *model, grid_xt, s));
    };
    CurvePoint pt;
    pt.t = t;
    pt.mi = mi_at(t);
    pt.mi_rate = (mi_at(t + h) - mi_at(t - h)) / (2.0 * h);
    const JointDensity joint = build_joint(prior, *model, grid_xt, t);
    pt.mmse = mmse_b(joint, target, unit_weight());
    pt.predicted_rate = coefficient(t) * pt.mmse;
    require(std::isfinite(pt.mi) && std::isfinite(pt.mi_rate) && std::isfinite(pt.mmse),
            ErrorCode::numeric, "immse_curve: non-finite entry at t=" + format_double(t));
    points.push_back(pt);
  }
  return points;
}

std::string curve_to_csv(std::span<const CurvePoint> points) {
  std::string out = "t,mi,mi_rate,mmse,predicted_rate\n";
  for (const auto& p : points)
    out += format_double(p.t) + "," + format_double(p.mi) + "," + format_double(p.mi_rate) + "," +
           format_double(p.mmse) + "," + format_double(p.predicted_rate) + "\n";
  return out;
}

}  // namespace fokker
