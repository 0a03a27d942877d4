#pragma once

#include <span>
#include <vector>

#include "core/errors.hpp"

namespace fokker {

// Densities below this floor are treated as zero inside logarithmic
// integrands (entropy, Fisher, KL): the node contributes nothing.
inline constexpr double kDensityFloor = 1e-300;

enum class Support { full_line, positive_half_line };

//! Uniform 1-D grid of n nodes on [lo, hi].
class Grid1D {
public:
  Grid1D(double lo, double hi, std::size_t n);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double node(std::size_t i) const noexcept { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  bool same_as(const Grid1D& other, double rel_tol = 1e-12) const noexcept;

private:
  double lo_, hi_, h_;
  std::vector<double> nodes_;
};

//! Probability density sampled on a grid; values are non-negative and the
//! trapezoidal integral is 1 after normalize().
class DensityField {
public:
  DensityField(Grid1D grid, std::vector<double> values, Support support);

  const Grid1D& grid() const noexcept { return grid_; }
  Support support() const noexcept { return support_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  double integral() const;
  bool is_normalized(double tol = 1e-6) const;

private:
  Grid1D grid_;
  std::vector<double> values_;
  Support support_;
};

Grid1D make_uniform_grid(double lo, double hi, std::size_t n);

// Composite trapezoidal rule; exact on piecewise-linear data.
double integrate(std::span<const double> f, const Grid1D& grid);

// Second-order first derivative: central differences in the interior,
// one-sided three-point stencils at the boundary nodes.
std::vector<double> derivative(std::span<const double> f, const Grid1D& grid);

DensityField normalize(const DensityField& p);

DensityField gaussian_density(double mean, double var, const Grid1D& grid);

// Density of exp(N(log_mean, log_var)) on a positive grid.
DensityField lognormal_density(double log_mean, double log_var, const Grid1D& grid);

// Convex combination of Gaussian components, normalized on the grid.
DensityField gaussian_mixture_density(std::span<const double> weights,
                                      std::span<const double> means,
                                      std::span<const double> vars, const Grid1D& grid);

DensityField density_from_values(const Grid1D& grid, std::span<const double> values,
                                 Support support, bool renormalize);

}  // namespace fokker
