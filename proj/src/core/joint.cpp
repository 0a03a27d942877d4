#include "core/joint.hpp"

#include <algorithm>
#include <cmath>

namespace fokker {

namespace {

// Trapezoid weight: 1/2 at the ends, 1 inside.
double trapw(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

// Fisher information of one raw slice (values need not be normalized):
// int b (s')^2 / s dx over nodes above the floor, divided by the slice mass.
double slice_fisher(std::span<const double> s, const Grid1D& grid, const WeightFunction& b,
                    double t, double mass) {
  const std::vector<double> ds = derivative(s, grid);
  std::vector<double> integrand(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > kDensityFloor) integrand[i] = b.eval(grid.node(i), t) * ds[i] * ds[i] / s[i];
  return integrate(integrand, grid) / mass;
}

double slice_entropy(std::span<const double> s, const Grid1D& grid, double mass) {
  std::vector<double> integrand(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = s[i] / mass;
    if (v > kDensityFloor) integrand[i] = -v * std::log(v);
  }
  return integrate(integrand, grid);
}

}  // namespace

JointDensity::JointDensity(DensityField prior, Grid1D grid_xt, std::vector<double> values,
                           double t, Support support_xt)
    : prior_(std::move(prior)),
      grid_xt_(std::move(grid_xt)),
      values_(std::move(values)),
      t_(t),
      support_xt_(support_xt) {
  const std::size_t n0 = prior_.size(), nt = grid_xt_.size();
  require(values_.size() == n0 * nt, ErrorCode::invalid_argument,
          "joint density: value array does not match the product grid");
  require(t_ > 0.0, ErrorCode::domain, "joint density requires t > 0");

  double total = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      const double v = values_[i * nt + j];
      require(std::isfinite(v) && v >= 0.0, ErrorCode::numeric,
              "joint density: invalid value on the product grid");
      row += trapw(j, nt) * v;
    }
    total += trapw(i, n0) * row;
  }
  total *= prior_.grid().spacing() * grid_xt_.spacing();
  require(total > 0.0, ErrorCode::degenerate, "joint density has zero mass");
  for (double& v : values_) v /= total;

  // The x_t-marginalized law must reproduce the prior, otherwise the grids
  // truncate the transition law.
  double l1 = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nt; ++j) row += trapw(j, nt) * values_[i * nt + j];
    row *= grid_xt_.spacing();
    l1 += trapw(i, n0) * std::abs(row - prior_.value(i));
  }
  l1 *= prior_.grid().spacing();
  require(l1 <= 1e-4, ErrorCode::support,
          "joint density: marginal over x_t misses the prior by L1 " + format_double(l1) +
              "; widen grid_xt or refine the grids");
}

std::vector<double> JointDensity::marginal_xt_values() const {
  const std::size_t n0 = prior_.size(), nt = grid_xt_.size();
  std::vector<double> m(nt, 0.0);
  for (std::size_t i = 0; i < n0; ++i) {
    const double w = trapw(i, n0);
    for (std::size_t j = 0; j < nt; ++j) m[j] += w * values_[i * nt + j];
  }
  for (double& v : m) v *= prior_.grid().spacing();
  return m;
}

DensityField JointDensity::marginal_xt() const {
  return normalize(DensityField(grid_xt_, marginal_xt_values(), support_xt_));
}

JointDensity build_joint(const DensityField& prior, const SdeModel& model, const Grid1D& grid_xt,
                         double t) {
  require(t > 0.0, ErrorCode::domain, "build_joint requires t > 0");
  require(model.has_kernel(), ErrorCode::unsupported,
          "build_joint: model '" + model.name +
              "' has no transition kernel; use build_joint_numeric");
  require(prior.is_normalized(), ErrorCode::invalid_argument,
          "build_joint: prior must be normalized");
  const std::size_t n0 = prior.size(), nt = grid_xt.size();
  std::vector<double> values(n0 * nt);
  const auto& density = model.kernel->density;
  for (std::size_t i = 0; i < n0; ++i) {
    const double pw = prior.value(i);
    const double x0 = prior.grid().node(i);
    for (std::size_t j = 0; j < nt; ++j)
      values[i * nt + j] = pw * density(x0, grid_xt.node(j), t);
  }
  return JointDensity(prior, grid_xt, std::move(values), t, model.support);
}

JointDensity build_joint_numeric(const DensityField& prior, const SdeModel& model,
                                 const Grid1D& grid_xt, double t, double dt, Scheme scheme) {
  require(t > 0.0, ErrorCode::domain, "build_joint_numeric requires t > 0");
  require(prior.is_normalized(), ErrorCode::invalid_argument,
          "build_joint_numeric: prior must be normalized");
  const std::size_t n0 = prior.size(), nt = grid_xt.size();
  const double h = grid_xt.spacing();
  const double delta_std = 2.0 * h;

  double prior_max = 0.0;
  for (double v : prior.values()) prior_max = std::max(prior_max, v);

  // One evolved column per prior node that carries mass.
  std::vector<std::size_t> active;
  std::vector<std::vector<double>> columns;
  for (std::size_t i = 0; i < n0; ++i) {
    if (prior.value(i) < 1e-14 * prior_max) continue;
    const double x0 = prior.grid().node(i);
    require(x0 > grid_xt.lo() && x0 < grid_xt.hi(), ErrorCode::support,
            "build_joint_numeric: prior node outside grid_xt");
    std::vector<double> col(nt);
    double mass = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      const double d = (grid_xt.node(j) - x0) / delta_std;
      col[j] = std::exp(-0.5 * d * d);
      mass += trapw(j, nt) * col[j];
    }
    mass *= h;
    for (double& v : col) v /= mass;
    active.push_back(i);
    columns.push_back(std::move(col));
  }
  require(!active.empty(), ErrorCode::degenerate, "build_joint_numeric: prior carries no mass");

  if (dt <= 0.0) dt = default_dt(model, grid_xt, 0.0);
  evolve_columns(model, grid_xt, columns, t, dt, scheme);

  std::vector<double> values(n0 * nt, 0.0);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const std::size_t i = active[k];
    const double pw = prior.value(i);
    for (std::size_t j = 0; j < nt; ++j) values[i * nt + j] = pw * columns[k][j];
  }
  return JointDensity(prior, grid_xt, std::move(values), t, model.support);
}

double conditional_fisher_b(const JointDensity& joint, const WeightFunction& b) {
  const std::size_t n0 = joint.grid_x0().size(), nt = joint.grid_xt().size();
  const double h0 = joint.grid_x0().spacing(), ht = joint.grid_xt().spacing();
  double acc = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    std::span<const double> row = joint.values().subspan(i * nt, nt);
    double mass = 0.0;
    for (std::size_t j = 0; j < nt; ++j) mass += trapw(j, nt) * row[j];
    mass *= ht;
    if (mass < 1e-10) continue;
    acc += trapw(i, n0) * mass * slice_fisher(row, joint.grid_xt(), b, joint.t(), mass);
  }
  return acc * h0;
}

double mutual_fisher_b(const JointDensity& joint, const WeightFunction& b) {
  const DensityField marginal = joint.marginal_xt();
  return conditional_fisher_b(joint, b) - fisher_b(marginal, b, joint.t());
}

double statistical_fisher_b(const JointDensity& joint, const WeightFunction& b) {
  const std::size_t n0 = joint.grid_x0().size(), nt = joint.grid_xt().size();
  const double h0 = joint.grid_x0().spacing(), ht = joint.grid_xt().spacing();
  const std::vector<double> py = joint.marginal_xt_values();
  double py_max = 0.0;
  for (double v : py) py_max = std::max(py_max, v);
  require(py_max > 0.0, ErrorCode::degenerate, "statistical_fisher_b: empty marginal");

  // d/dy log p_Y on interior columns.
  std::vector<double> dlog_py(nt, 0.0);
  for (std::size_t j = 1; j + 1 < nt; ++j)
    if (py[j - 1] > kDensityFloor && py[j + 1] > kDensityFloor)
      dlog_py[j] = (std::log(py[j + 1]) - std::log(py[j - 1])) / (2.0 * ht);

  double acc = 0.0;
  for (std::size_t j = 1; j + 1 < nt; ++j) {
    if (py[j] < 1e-10 * py_max) continue;  // negligible posterior slice
    double phi = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
      const double vm = joint.value(i, j - 1);
      const double vc = joint.value(i, j);
      const double vp = joint.value(i, j + 1);
      if (vm <= kDensityFloor || vc <= kDensityFloor || vp <= kDensityFloor) continue;
      const double d = (std::log(vp) - std::log(vm)) / (2.0 * ht) - dlog_py[j];
      phi += trapw(i, n0) * (vc / py[j]) * d * d;
    }
    phi *= h0;
    acc += trapw(j, nt) * py[j] * b.eval(joint.grid_xt().node(j), joint.t()) * phi;
  }
  return acc * ht;
}

double mmse_b(const JointDensity& joint, const std::function<double(double, double)>& g,
              const WeightFunction& b) {
  const std::size_t n0 = joint.grid_x0().size(), nt = joint.grid_xt().size();
  const double ht = joint.grid_xt().spacing();
  const std::vector<double> py = joint.marginal_xt_values();
  double py_max = 0.0;
  for (double v : py) py_max = std::max(py_max, v);

  std::vector<double> gcol(n0);
  double acc = 0.0;
  for (std::size_t j = 0; j < nt; ++j) {
    if (py[j] < 1e-10 * py_max) continue;
    const double y = joint.grid_xt().node(j);
    double mass = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
      const double w = trapw(i, n0) * joint.value(i, j);
      gcol[i] = g(joint.grid_x0().node(i), y);
      require(std::isfinite(gcol[i]), ErrorCode::numeric, "mmse_b: target not finite on the grid");
      mass += w;
      mean += w * gcol[i];
    }
    if (mass <= 0.0) continue;
    mean /= mass;
    double var = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
      const double d = gcol[i] - mean;
      var += trapw(i, n0) * joint.value(i, j) * d * d;
    }
    var /= mass;
    acc += trapw(j, nt) * py[j] * b.eval(y, joint.t()) * var;
  }
  return acc * ht;
}

double mutual_information(const JointDensity& joint) {
  const std::size_t n0 = joint.grid_x0().size(), nt = joint.grid_xt().size();
  const double h0 = joint.grid_x0().spacing(), ht = joint.grid_xt().spacing();
  const DensityField marginal = joint.marginal_xt();
  double cond_entropy = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    std::span<const double> row = joint.values().subspan(i * nt, nt);
    double mass = 0.0;
    for (std::size_t j = 0; j < nt; ++j) mass += trapw(j, nt) * row[j];
    mass *= ht;
    if (mass < 1e-12) continue;
    cond_entropy += trapw(i, n0) * mass * slice_entropy(row, joint.grid_xt(), mass);
  }
  cond_entropy *= h0;
  return entropy(marginal) - cond_entropy;
}

}  // namespace fokker
