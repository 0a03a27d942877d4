#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/functionals.hpp"
#include "core/grid.hpp"
#include "oracles.hpp"

using namespace fokker;

TEST_CASE("uniform grid construction") {
  const Grid1D g = make_uniform_grid(0.0, 1.0, 11);
  CHECK(g.size() == 11);
  CHECK(g.spacing() == doctest::Approx(0.1).epsilon(1e-14));
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(g.node(i) == doctest::Approx(0.1 * static_cast<double>(i)).epsilon(1e-13));

  const Grid1D wide = make_uniform_grid(-8.0, 8.0, 1025);
  CHECK(wide.spacing() == doctest::Approx(0.015625).epsilon(1e-15));

  CHECK_THROWS_AS(make_uniform_grid(1.0, 0.0, 11), Error);
  CHECK_THROWS_AS(make_uniform_grid(0.0, 1.0, 7), Error);
}

TEST_CASE("trapezoid quadrature") {
  const Grid1D g = make_uniform_grid(0.0, 1.0, 11);
  std::vector<double> ones(g.size(), 1.0);
  CHECK(integrate(ones, g) == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<double> linear(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) linear[i] = g.node(i);
  CHECK(integrate(linear, g) == doctest::Approx(0.5).epsilon(1e-14));

  // Standard normal mass on [-8, 8] against the error-function value.
  const Grid1D gn = make_uniform_grid(-8.0, 8.0, 1025);
  std::vector<double> phi(gn.size());
  for (std::size_t i = 0; i < gn.size(); ++i) phi[i] = oracles::normal_pdf(gn.node(i), 0.0, 1.0);
  const double expected = oracles::normal_cdf(8.0) - oracles::normal_cdf(-8.0);
  CHECK(integrate(phi, gn) == doctest::Approx(expected).epsilon(1e-9));

  std::vector<double> bad(g.size(), 1.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(integrate(bad, g), Error);
}

TEST_CASE("derivative stencil") {
  const Grid1D g = make_uniform_grid(-8.0, 8.0, 1025);
  std::vector<double> linear(g.size()), quadratic(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    linear[i] = g.node(i);
    quadratic[i] = g.node(i) * g.node(i);
  }
  const auto dl = derivative(linear, g);
  for (double v : dl) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  const auto dq = derivative(quadratic, g);
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    CHECK(std::abs(dq[i] - 2.0 * g.node(i)) <= 1e-10);

  const Grid1D gs = make_uniform_grid(-oracles::kPi, oracles::kPi, 257);
  std::vector<double> s(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) s[i] = std::sin(gs.node(i));
  const auto ds = derivative(s, gs);
  double sup = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i)
    sup = std::max(sup, std::abs(ds[i] - std::cos(gs.node(i))));
  CHECK(sup <= 3e-4);
}

TEST_CASE("normalize") {
  const Grid1D g = make_uniform_grid(-8.0, 8.0, 257);
  const DensityField p = gaussian_density(0.0, 1.0, g);
  const DensityField again = normalize(p);
  for (std::size_t i = 0; i < p.size(); ++i)
    CHECK(again.value(i) == doctest::Approx(p.value(i)).epsilon(1e-14));

  std::vector<double> doubled(p.values().begin(), p.values().end());
  for (double& v : doubled) v *= 2.0;
  const DensityField halved = normalize(DensityField(g, doubled, Support::full_line));
  for (std::size_t i = 0; i < p.size(); ++i)
    CHECK(halved.value(i) == doctest::Approx(p.value(i)).epsilon(1e-13));
  CHECK(std::abs(halved.integral() - 1.0) <= 1e-12);

  std::vector<double> zeros(g.size(), 0.0);
  CHECK_THROWS_AS(normalize(DensityField(g, zeros, Support::full_line)), Error);
}

TEST_CASE("gaussian density") {
  const Grid1D g = make_uniform_grid(-8.0, 8.0, 1025);
  const DensityField p = gaussian_density(0.0, 1.0, g);
  CHECK(p.value(512) == doctest::Approx(1.0 / std::sqrt(2.0 * oracles::kPi)).epsilon(1e-10));
  CHECK(std::abs(p.integral() - 1.0) <= 1e-12);

  // Matches the heat-kernel law started at x0 = 2 after time t = 1 at
  // every node.
  const Grid1D g2 = make_uniform_grid(-8.0, 12.0, 1281);
  const DensityField k = gaussian_density(2.0, 1.0, g2);
  for (std::size_t i = 0; i < g2.size(); i += 40) {
    const double expected = oracles::normal_pdf(g2.node(i), 2.0, 1.0);
    if (expected > 1e-14) CHECK(k.value(i) == doctest::Approx(expected).epsilon(1e-12));
  }

  CHECK_THROWS_AS(gaussian_density(0.0, -1.0, g), Error);
}

TEST_CASE("lognormal density") {
  const Grid1D g = make_uniform_grid(std::exp(-8.0), std::exp(8.0), 262145);
  const DensityField p = lognormal_density(0.0, 1.0, g);
  // Mode at exp(m - s^2) = e^{-1}.
  const double mode = std::exp(-1.0);
  std::size_t imax = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p.value(i) > p.value(imax)) imax = i;
  CHECK(std::abs(g.node(imax) - mode) <= 2.0 * g.spacing());

  // x0 = 1, mu = sigma^2/2, sigma = 1, t = 1 gives log-mean 0, log-var 1.
  const double x0 = 1.0, mu = 0.5, sigma = 1.0, t = 1.0;
  const double log_mean = std::log(x0) + (mu - 0.5 * sigma * sigma) * t;
  const double log_var = sigma * sigma * t;
  CHECK(log_mean == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_var == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(lognormal_density(0.0, 1.0, make_uniform_grid(-1.0, 10.0, 101)), Error);
}

TEST_CASE("discrete integration by parts") {
  // The derivative of a boundary-vanishing field integrates to zero.
  const Grid1D g = make_uniform_grid(-8.0, 8.0, 1025);
  const DensityField p = gaussian_density(0.3, 1.4, g);
  const auto dp = derivative(p.values(), g);
  CHECK(std::abs(integrate(dp, g)) <= 1e-8);
}
