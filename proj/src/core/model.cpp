#include "core/model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "core/expr.hpp"

namespace fokker {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double gauss_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(kTwoPi * var);
}

}  // namespace

ModelPtr builtin_brownian() {
  auto m = std::make_shared<SdeModel>();
  m->name = "brownian";
  m->time_homogeneous = true;
  m->drift = [](double, double) { return 0.0; };
  m->diffusion = [](double, double) { return 1.0; };
  m->weight = [](double, double) { return 1.0; };
  m->drift_dx = [](double, double) { return 0.0; };
  m->weight_dxx = [](double, double) { return 0.0; };
  m->support = Support::full_line;
  TransitionKernel k;
  k.density = [](double x0, double xt, double t) { return gauss_pdf(xt, x0, t); };
  k.score = [](double x0, double xt, double t) { return -(xt - x0) / t; };
  k.conditional_fisher = [](double t) { return 1.0 / t; };
  m->kernel = std::move(k);
  return m;
}

ModelPtr builtin_ou(double alpha) {
  require(alpha > 0.0, ErrorCode::domain,
          "ou model requires alpha > 0 (use the brownian model for alpha = 0)");
  auto m = std::make_shared<SdeModel>();
  m->name = "ou";
  m->time_homogeneous = true;
  m->drift = [alpha](double x, double) { return -alpha * x; };
  m->diffusion = [](double, double) { return 1.0; };
  m->weight = [](double, double) { return 1.0; };
  m->drift_dx = [alpha](double, double) { return -alpha; };
  m->weight_dxx = [](double, double) { return 0.0; };
  m->support = Support::full_line;
  TransitionKernel k;
  const auto lag_var = [alpha](double t) { return (1.0 - std::exp(-2.0 * alpha * t)) / (2.0 * alpha); };
  k.density = [alpha, lag_var](double x0, double xt, double t) {
    return gauss_pdf(xt, std::exp(-alpha * t) * x0, lag_var(t));
  };
  k.score = [alpha, lag_var](double x0, double xt, double t) {
    return -(xt - std::exp(-alpha * t) * x0) / lag_var(t);
  };
  k.conditional_fisher = [lag_var](double t) { return 1.0 / lag_var(t); };
  m->kernel = std::move(k);
  m->params = {{"alpha", alpha}};
  return m;
}

ModelPtr builtin_gbm(double mu, double sigma) {
  require(sigma > 0.0, ErrorCode::domain, "gbm model requires sigma > 0");
  auto m = std::make_shared<SdeModel>();
  m->name = "gbm";
  m->time_homogeneous = true;
  m->drift = [mu](double x, double) { return mu * x; };
  m->diffusion = [sigma](double x, double) { return sigma * x; };
  m->weight = [sigma](double x, double) { return sigma * sigma * x * x; };
  m->drift_dx = [mu](double, double) { return mu; };
  m->weight_dxx = [sigma](double, double) { return 2.0 * sigma * sigma; };
  m->support = Support::positive_half_line;
  const double s2 = sigma * sigma;
  TransitionKernel k;
  k.density = [mu, s2](double x0, double xt, double t) {
    if (xt <= 0.0) return 0.0;
    const double d = std::log(xt) - std::log(x0) - (mu - 0.5 * s2) * t;
    return std::exp(-0.5 * d * d / (s2 * t)) / (xt * std::sqrt(kTwoPi * s2 * t));
  };
  k.score = [mu, s2](double x0, double xt, double t) {
    const double d = std::log(xt) - std::log(x0) - (mu - 0.5 * s2) * t;
    return -(d / (s2 * t) + 1.0) / xt;
  };
  // J_b(X_t | X_0) with the model's own weight b = sigma^2 x^2.
  k.conditional_fisher = [s2](double t) { return s2 + 1.0 / t; };
  m->kernel = std::move(k);
  m->exact_step = [mu, s2, sigma](double x, double, double dt, double z) {
    return x * std::exp((mu - 0.5 * s2) * dt + sigma * std::sqrt(dt) * z);
  };
  m->params = {{"mu", mu}, {"sigma", sigma}};
  return m;
}

ModelPtr make_custom_model(const std::string& drift_expr, const std::string& diffusion_expr,
                           Support support, const std::string& name) {
  const Expr a = Expr::parse(drift_expr);
  const Expr s = Expr::parse(diffusion_expr);
  auto m = std::make_shared<SdeModel>();
  m->name = name;
  m->drift = [a](double x, double t) { return a.eval(x, t); };
  m->diffusion = [s](double x, double t) { return s.eval(x, t); };
  m->weight = [s](double x, double t) {
    const double v = s.eval(x, t);
    return v * v;
  };
  // Finite-difference fallbacks; step sizes balance truncation and round-off.
  m->drift_dx = [a](double x, double t) {
    const double h = 6e-6 * (1.0 + std::abs(x));
    return (a.eval(x + h, t) - a.eval(x - h, t)) / (2.0 * h);
  };
  m->weight_dxx = [s](double x, double t) {
    const double h = 1.2e-4 * (1.0 + std::abs(x));
    const auto b = [&s](double y, double tt) {
      const double v = s.eval(y, tt);
      return v * v;
    };
    return (b(x + h, t) - 2.0 * b(x, t) + b(x - h, t)) / (h * h);
  };
  m->support = support;
  m->time_homogeneous = !(a.uses_time() || s.uses_time());
  return m;
}

double model_param(const SdeModel& model, const std::string& name) {
  for (const auto& [key, value] : model.params)
    if (key == name) return value;
  fail(ErrorCode::unsupported, "model '" + model.name + "' has no parameter '" + name + "'");
}

void validate_coefficients(const SdeModel& model, const Grid1D& grid,
                           std::span<const double> times) {
  for (double t : times) {
    for (double x : grid.nodes()) {
      const double sig = model.diffusion(x, t);
      require(std::isfinite(sig) && sig > 0.0, ErrorCode::domain,
              "model '" + model.name + "': diffusion must be positive on the support (x=" +
                  format_double(x) + ", t=" + format_double(t) + ")");
      const double w = model.weight(x, t);
      require(std::abs(w - sig * sig) <= 1e-12 * std::max(w, 1e-12), ErrorCode::domain,
              "model '" + model.name + "': weight must equal diffusion^2");
    }
  }
}

IdentityReport kernel_selfcheck(const SdeModel& model, double x0, double t) {
  require(t > 0.0, ErrorCode::domain, "kernel_selfcheck requires t > 0");
  require(model.has_kernel(), ErrorCode::unsupported,
          "kernel_selfcheck: model '" + model.name + "' has no transition kernel");
  const auto& k = *model.kernel;
  const bool half_line = model.support == Support::positive_half_line;

  // Locate the conditional law with a wide moment pass, in log space for
  // half-line kernels.
  const double width = 25.0 * (1.0 + std::sqrt(t + 1.0));
  const double center = half_line ? std::log(x0) : x0;
  const std::size_t nm = 8001;
  const double step = 2.0 * width / static_cast<double>(nm - 1);
  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < nm; ++i) {
    const double u = center - width + step * static_cast<double>(i);
    const double xt = half_line ? std::exp(u) : u;
    const double w = k.density(x0, xt, t) * (half_line ? xt : 1.0);  // d(xt) = xt du on log axis
    mass += w;
    m1 += w * u;
    m2 += w * u * u;
  }
  require(mass > 0.0, ErrorCode::degenerate, "kernel_selfcheck: kernel mass vanished on probe window");
  m1 /= mass;
  m2 = m2 / mass - m1 * m1;
  const double spread = std::sqrt(std::max(m2, 1e-30));

  double gap = 0.0;
  const std::size_t np = 81;
  for (std::size_t i = 0; i < np; ++i) {
    const double u = m1 + spread * (-4.0 + 8.0 * static_cast<double>(i) / (np - 1));
    const double xt = half_line ? std::exp(u) : u;
    const double delta = half_line ? 1e-6 * xt : 1e-5 * spread;
    const double fd =
        (std::log(k.density(x0, xt + delta, t)) - std::log(k.density(x0, xt - delta, t))) /
        (2.0 * delta);
    gap = std::max(gap, std::abs(fd - k.score(x0, xt, t)));
  }

  IdentityReport report("kernel_selfcheck", gap, 0.0, 1e-6, "fd-of-log-kernel-density-vs-score",
                        "zero");
  report.add_param("model", model.name);
  report.add_param("x0", x0);
  report.add_param("t", t);
  return report;
}

}  // namespace fokker
