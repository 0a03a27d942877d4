#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/expr.hpp"
#include "core/joint.hpp"
#include "core/model.hpp"
#include "oracles.hpp"

using namespace fokker;

TEST_CASE("brownian built-in") {
  const ModelPtr m = builtin_brownian();
  CHECK(m->drift(1.7, 0.3) == 0.0);
  CHECK(m->diffusion(1.7, 0.3) == 1.0);
  CHECK(m->weight(1.7, 0.3) == 1.0);
  const auto& k = *m->kernel;
  CHECK(k.score(0.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(k.conditional_fisher(0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(k.density(0.0, 0.0, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * oracles::kPi)).epsilon(1e-15));
}

TEST_CASE("ou built-in") {
  const ModelPtr m = builtin_ou(1.0);
  CHECK(m->drift(2.0, 0.0) == doctest::Approx(-2.0));
  CHECK(m->drift_dx(5.0, 0.0) == doctest::Approx(-1.0));
  const auto& k = *m->kernel;
  const double t_half = 0.5 * std::log(2.0);
  CHECK(k.conditional_fisher(t_half) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(k.conditional_fisher(40.0) == doctest::Approx(2.0).epsilon(1e-12));
  // The score vanishes at the conditional mean.
  const double x0 = 1.3, t = 0.7;
  CHECK(std::abs(k.score(x0, std::exp(-t) * x0, t)) <= 1e-14);
  // Long-time law approaches N(0, 1/(2 alpha)) pointwise.
  const double t_long = 20.0;
  for (double x : {-1.0, -0.3, 0.0, 0.6, 1.4})
    CHECK(std::abs(k.density(2.0, x, t_long) - oracles::normal_pdf(x, 0.0, 0.5)) <= 1e-8);

  CHECK_THROWS_AS(builtin_ou(0.0), Error);
  CHECK_THROWS_AS(builtin_ou(-1.0), Error);
}

TEST_CASE("gbm built-in") {
  const ModelPtr m = builtin_gbm(0.5, 1.0);
  CHECK(m->support == Support::positive_half_line);
  CHECK(m->weight(2.0, 0.0) == doctest::Approx(4.0));
  CHECK(m->weight_dxx(2.0, 0.0) == doctest::Approx(2.0));
  const auto& k = *m->kernel;
  // mu = sigma^2/2 makes the log-mean drift vanish: score(1, 1, 1) = -1.
  CHECK(k.score(1.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-14));
  // Density is the lognormal law of log x0 + (mu - sigma^2/2) t, sigma^2 t.
  const ModelPtr m2 = builtin_gbm(0.1, 0.6);
  const double x0 = 1.4, t = 0.8;
  const double lm = std::log(x0) + (0.1 - 0.5 * 0.36) * t;
  const double lv = 0.36 * t;
  for (double x : {0.6, 1.0, 1.7, 2.5}) {
    const double expected = oracles::normal_pdf(std::log(x), lm, lv) / x;
    CHECK(m2->kernel->density(x0, x, t) == doctest::Approx(expected).epsilon(1e-13));
  }
  // Root of the score in x_t, solved symbolically.
  const double mu = 0.1, sigma = 0.6;
  const double root = x0 * std::exp((mu - 0.5 * sigma * sigma) * t - sigma * sigma * t);
  CHECK(std::abs(m2->kernel->score(x0, root, t)) <= 1e-12);

  CHECK_THROWS_AS(builtin_gbm(0.0, 0.0), Error);
}

TEST_CASE("kernel mass and self-check") {
  const double checks[][2] = {{0.0, 1.0}, {2.0, 0.3}, {1.0, 1.0}};
  const ModelPtr models[] = {builtin_brownian(), builtin_ou(1.0), builtin_gbm(0.1, 0.5)};
  for (int mi = 0; mi < 3; ++mi) {
    const auto& model = models[mi];
    const double x0 = model->support == Support::positive_half_line ? 1.0 : checks[mi][0];
    const double t = checks[mi][1];
    // Unit mass of the transition law.
    double mass;
    if (model->support == Support::positive_half_line) {
      mass = oracles::quad([&](double y) { return model->kernel->density(x0, std::exp(y), t) * std::exp(y); },
                           -12.0, 12.0);
    } else {
      mass = oracles::quad([&](double x) { return model->kernel->density(x0, x, t); }, -40.0, 40.0);
    }
    CHECK(std::abs(mass - 1.0) <= 1e-6);

    const IdentityReport r = kernel_selfcheck(*model, x0, t);
    CHECK(r.passed);
    CHECK(r.lhs <= 1e-6);
  }
}

TEST_CASE("score is an unbiased estimator of the marginal score") {
  // Posterior average of the kernel score equals d/dy log p_Y.
  const ModelPtr m = builtin_brownian();
  const Grid1D g0 = make_uniform_grid(-9.0, 9.0, 1025);
  const Grid1D gt = make_uniform_grid(-10.0, 10.0, 2049);
  const double t = 1.0;
  const DensityField prior = gaussian_mixture_density(std::vector{0.4, 0.6}, std::vector{-1.0, 1.2},
                                                      std::vector{0.6, 0.9}, g0);
  const JointDensity joint = build_joint(prior, *m, gt, t);
  const std::vector<double> py = joint.marginal_xt_values();
  const double ht = gt.spacing();
  double sup = 0.0;
  for (std::size_t j = gt.size() / 4; j < 3 * gt.size() / 4; j += 16) {
    double mass = 0.0, avg = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
      const double w = (i == 0 || i + 1 == g0.size() ? 0.5 : 1.0) * joint.value(i, j);
      mass += w;
      avg += w * m->kernel->score(g0.node(i), gt.node(j), t);
    }
    avg /= mass;
    const double dlogpy = (std::log(py[j + 1]) - std::log(py[j - 1])) / (2.0 * ht);
    sup = std::max(sup, std::abs(avg - dlogpy));
  }
  CHECK(sup <= 1e-4);
}

TEST_CASE("custom expression models") {
  const ModelPtr m = make_custom_model("-0.5*x + 0.1*sin(x)", "sqrt(1 + 0.2*x^2)",
                                       Support::full_line, "damped");
  CHECK(m->drift(1.0, 0.0) == doctest::Approx(-0.5 + 0.1 * std::sin(1.0)).epsilon(1e-14));
  CHECK(m->weight(2.0, 0.0) == doctest::Approx(1.8).epsilon(1e-13));
  // Finite-difference coefficient derivatives against symbolic values.
  CHECK(m->drift_dx(0.7, 0.0) == doctest::Approx(-0.5 + 0.1 * std::cos(0.7)).epsilon(1e-8));
  CHECK(m->weight_dxx(0.7, 0.0) == doctest::Approx(0.4).epsilon(1e-6));
  CHECK_FALSE(m->has_kernel());

  const Grid1D g = make_uniform_grid(-5.0, 5.0, 65);
  validate_coefficients(*m, g, std::vector{0.0, 1.0});

  // A diffusion that vanishes somewhere must be rejected.
  const ModelPtr bad = make_custom_model("0", "x", Support::full_line);
  CHECK_THROWS_AS(validate_coefficients(*bad, g, std::vector{0.0}), Error);

  CHECK_THROWS_AS(make_custom_model("2*", "1", Support::full_line), Error);
  CHECK_THROWS_AS(make_custom_model("foo(x)", "1", Support::full_line), Error);
  CHECK_THROWS_AS(make_custom_model("x + (t", "1", Support::full_line), Error);
}

TEST_CASE("expression grammar") {
  const Expr e = Expr::parse("2^3^2 + -x*t");
  CHECK(e.eval(1.0, 1.0) == doctest::Approx(512.0 - 1.0));  // right-assoc power
  const Expr f = Expr::parse("exp(log(x)) / sqrt(x^2)");
  CHECK(f.eval(3.7, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}
