#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fokker {

namespace {

void check_finite(std::span<const double> f, const char* who) {
  for (double v : f)
    require(std::isfinite(v), ErrorCode::numeric, std::string(who) + ": non-finite input value");
}

}  // namespace

Grid1D::Grid1D(double lo, double hi, std::size_t n) : lo_(lo), hi_(hi) {
  require(std::isfinite(lo) && std::isfinite(hi), ErrorCode::numeric, "grid endpoints must be finite");
  require(lo < hi, ErrorCode::domain, "grid requires lo < hi");
  require(n >= 8, ErrorCode::domain, "grid requires at least 8 nodes");
  h_ = (hi - lo) / static_cast<double>(n - 1);
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) nodes_[i] = lo + h_ * static_cast<double>(i);
  nodes_.back() = hi;  // avoid accumulated round-off at the right end
}

bool Grid1D::same_as(const Grid1D& other, double rel_tol) const noexcept {
  if (size() != other.size()) return false;
  const double scale = std::max(std::abs(hi_ - lo_), 1.0);
  return std::abs(lo_ - other.lo_) <= rel_tol * scale && std::abs(hi_ - other.hi_) <= rel_tol * scale;
}

DensityField::DensityField(Grid1D grid, std::vector<double> values, Support support)
    : grid_(std::move(grid)), values_(std::move(values)), support_(support) {
  require(values_.size() == grid_.size(), ErrorCode::invalid_argument,
          "density values must match the grid size");
  check_finite(values_, "density");
  for (double& v : values_) {
    require(v >= -1e-12, ErrorCode::positivity, "density has a negative value");
    if (v < 0.0) v = 0.0;
  }
  if (support_ == Support::positive_half_line)
    require(grid_.lo() > 0.0, ErrorCode::support, "positive-half-line density needs grid.lo > 0");
}

double DensityField::integral() const { return integrate(values_, grid_); }

bool DensityField::is_normalized(double tol) const { return std::abs(integral() - 1.0) <= tol; }

Grid1D make_uniform_grid(double lo, double hi, std::size_t n) { return Grid1D(lo, hi, n); }

double integrate(std::span<const double> f, const Grid1D& grid) {
  require(f.size() == grid.size(), ErrorCode::invalid_argument, "integrate: size mismatch");
  check_finite(f, "integrate");
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * grid.spacing();
}

std::vector<double> derivative(std::span<const double> f, const Grid1D& grid) {
  require(f.size() == grid.size(), ErrorCode::invalid_argument, "derivative: size mismatch");
  check_finite(f, "derivative");
  const std::size_t n = f.size();
  const double h = grid.spacing();
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

DensityField normalize(const DensityField& p) {
  const double mass = p.integral();
  require(std::isfinite(mass) && mass > 0.0, ErrorCode::degenerate,
          "normalize: density has zero or negative total mass");
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double& x : v) x /= mass;
  return DensityField(p.grid(), std::move(v), p.support());
}

DensityField gaussian_density(double mean, double var, const Grid1D& grid) {
  require(var > 0.0, ErrorCode::domain, "gaussian_density: variance must be positive");
  const double inv2v = 0.5 / var;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.node(i) - mean;
    v[i] = norm * std::exp(-d * d * inv2v);
  }
  return normalize(DensityField(grid, std::move(v), Support::full_line));
}

DensityField lognormal_density(double log_mean, double log_var, const Grid1D& grid) {
  require(grid.lo() > 0.0, ErrorCode::support, "lognormal_density: grid must stay on x > 0");
  require(log_var > 0.0, ErrorCode::domain, "lognormal_density: log-variance must be positive");
  const double inv2v = 0.5 / log_var;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * log_var);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double d = std::log(x) - log_mean;
    v[i] = norm / x * std::exp(-d * d * inv2v);
  }
  return normalize(DensityField(grid, std::move(v), Support::positive_half_line));
}

DensityField gaussian_mixture_density(std::span<const double> weights,
                                      std::span<const double> means,
                                      std::span<const double> vars, const Grid1D& grid) {
  require(!weights.empty() && weights.size() == means.size() && weights.size() == vars.size(),
          ErrorCode::invalid_argument, "gaussian_mixture_density: component arrays must match");
  double wsum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    require(weights[k] > 0.0, ErrorCode::domain, "mixture weights must be positive");
    require(vars[k] > 0.0, ErrorCode::domain, "mixture variances must be positive");
    wsum += weights[k];
  }
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double inv2v = 0.5 / vars[k];
    const double norm = weights[k] / wsum / std::sqrt(2.0 * std::numbers::pi * vars[k]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = grid.node(i) - means[k];
      v[i] += norm * std::exp(-d * d * inv2v);
    }
  }
  return normalize(DensityField(grid, std::move(v), Support::full_line));
}

DensityField density_from_values(const Grid1D& grid, std::span<const double> values,
                                 Support support, bool renormalize) {
  DensityField f(grid, std::vector<double>(values.begin(), values.end()), support);
  return renormalize ? normalize(f) : f;
}

}  // namespace fokker
