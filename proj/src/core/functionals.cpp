#include "core/functionals.hpp"

#include <cmath>

namespace fokker {

WeightFunction unit_weight() {
  return WeightFunction{[](double, double) { return 1.0; }, "unit"};
}

WeightFunction model_weight(ModelPtr model) {
  require(model != nullptr, ErrorCode::invalid_argument, "model_weight: missing model");
  return WeightFunction{[model](double x, double t) { return model->weight(x, t); },
                        model->name + "-weight"};
}

namespace {

void require_same_grid(const DensityField& p, const DensityField& q, const char* who) {
  require(p.grid().same_as(q.grid()), ErrorCode::support,
          std::string(who) + ": densities live on different grids");
}

}  // namespace

double entropy(const DensityField& p) {
  require(p.is_normalized(), ErrorCode::invalid_argument, "entropy: density must be normalized");
  const auto& grid = p.grid();
  std::vector<double> integrand(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = p.value(i);
    if (v > kDensityFloor) integrand[i] = -v * std::log(v);
  }
  return integrate(integrand, grid);
}

double kl(const DensityField& p, const DensityField& q) {
  require_same_grid(p, q, "kl");
  std::vector<double> integrand(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pv = p.value(i);
    if (pv <= kDensityFloor) continue;
    const double qv = q.value(i);
    require(qv > kDensityFloor, ErrorCode::support,
            "kl: q vanishes inside the support of p (node " + std::to_string(i) + ")");
    integrand[i] = pv * std::log(pv / qv);
  }
  return integrate(integrand, p.grid());
}

double fisher_b(const DensityField& p, const WeightFunction& b, double t) {
  require(p.is_normalized(), ErrorCode::invalid_argument, "fisher_b: density must be normalized");
  const auto& grid = p.grid();
  const std::vector<double> dp = derivative(p.values(), grid);
  std::vector<double> integrand(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = p.value(i);
    if (v > kDensityFloor) integrand[i] = b.eval(grid.node(i), t) * dp[i] * dp[i] / v;
  }
  return integrate(integrand, grid);
}

double relative_fisher_b(const DensityField& p, const DensityField& q, const WeightFunction& b,
                         double t) {
  require_same_grid(p, q, "relative_fisher_b");
  const auto& grid = p.grid();
  std::vector<double> log_ratio(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pv = p.value(i);
    const double qv = q.value(i);
    if (pv > kDensityFloor)
      require(qv > kDensityFloor, ErrorCode::support,
              "relative_fisher_b: q vanishes inside the support of p");
    log_ratio[i] = std::log(std::max(pv, kDensityFloor) / std::max(qv, kDensityFloor));
  }
  const std::vector<double> d = derivative(log_ratio, grid);
  std::vector<double> integrand(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pv = p.value(i);
    if (pv > kDensityFloor) integrand[i] = pv * b.eval(grid.node(i), t) * d[i] * d[i];
  }
  return integrate(integrand, grid);
}

std::vector<double> fisher_gradient(const DensityField& p, const WeightFunction& b, double t) {
  require(p.is_normalized(), ErrorCode::invalid_argument,
          "fisher_gradient: density must be normalized");
  const auto& grid = p.grid();
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    require(p.value(i) > kDensityFloor, ErrorCode::degenerate,
            "fisher_gradient: density at the floor on an interior node");
  const std::vector<double> dp = derivative(p.values(), grid);
  std::vector<double> bdp(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) bdp[i] = b.eval(grid.node(i), t) * dp[i];
  const std::vector<double> dbdp = derivative(bdp, grid);
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = std::max(p.value(i), kDensityFloor);
    g[i] = b.eval(grid.node(i), t) * dp[i] * dp[i] / (v * v) - 2.0 * dbdp[i] / v;
  }
  return g;
}

double bregman_divergence(const DensityField& p, const DensityField& q, const WeightFunction& b,
                          double t) {
  require_same_grid(p, q, "bregman_divergence");
  const std::vector<double> grad_q = fisher_gradient(q, b, t);
  std::vector<double> pairing(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) pairing[i] = grad_q[i] * (p.value(i) - q.value(i));
  return fisher_b(p, b, t) - fisher_b(q, b, t) - integrate(pairing, p.grid());
}

}  // namespace fokker
