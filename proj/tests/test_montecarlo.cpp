#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/monte_carlo.hpp"
#include "core/solver.hpp"
#include "oracles.hpp"

using namespace fokker;

namespace {

std::vector<double> normal_draws(std::uint64_t seed, std::size_t n, double mean, double sd) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = mean + sd * Rng(seed, i).next_normal();
  return out;
}

double sample_mean(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double sample_var(std::span<const double> v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("brownian paths reproduce the unit variance") {
  const std::vector<double> x0(100000, 0.0);
  const ParticleEnsemble e = simulate(*builtin_brownian(), x0, 1.0, 0.01, 42);
  CHECK(std::abs(sample_var(e.xt) - 1.0) <= 0.02);
  CHECK(std::abs(sample_mean(e.xt)) <= 0.02);
}

TEST_CASE("ou paths contract toward the origin") {
  const std::vector<double> x0(100000, 2.0);
  const ParticleEnsemble e = simulate(*builtin_ou(1.0), x0, 1.0, 0.002, 7);
  CHECK(std::abs(sample_mean(e.xt) - 2.0 * std::exp(-1.0)) <= 0.01);
}

TEST_CASE("gbm paths use the exact lognormal update") {
  const std::vector<double> x0(100000, 1.0);
  const ParticleEnsemble e = simulate(*builtin_gbm(0.0, 1.0), x0, 1.0, 0.25, 11);
  std::vector<double> logs(e.xt.size());
  for (std::size_t i = 0; i < e.xt.size(); ++i) {
    CHECK(e.xt[i] > 0.0);
    logs[i] = std::log(e.xt[i]);
  }
  CHECK(std::abs(sample_mean(logs) + 0.5) <= 0.01);
}

TEST_CASE("identical inputs give bit-identical ensembles") {
  const std::vector<double> x0 = normal_draws(5, 2000, 0.0, 1.0);
  const ParticleEnsemble a = simulate(*builtin_ou(0.8), x0, 0.7, 0.01, 99);
  const ParticleEnsemble b = simulate(*builtin_ou(0.8), x0, 0.7, 0.01, 99);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.xt[i] == b.xt[i]);
  const ParticleEnsemble c = simulate(*builtin_ou(0.8), x0, 0.7, 0.01, 100);
  std::size_t differs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differs += a.xt[i] != c.xt[i];
  CHECK(differs > 1900);
}

TEST_CASE("diverging particles are reported by index") {
  const ModelPtr cubic = make_custom_model("x^3", "1", Support::full_line, "cubic");
  const std::vector<double> x0 = {5.0, 5.5};
  try {
    simulate(*cubic, x0, 1.0, 0.01, 3);
    FAIL("expected a blow-up error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::blowup);
    CHECK(std::string(e.what()).find("particle") != std::string::npos);
  }
}

TEST_CASE("kde recovers the brownian law") {
  const std::vector<double> x0(100000, 0.0);
  const ParticleEnsemble e = simulate(*builtin_brownian(), x0, 1.0, 0.05, 21);
  const Grid1D g = make_uniform_grid(-8.0, 8.0, 1025);
  const DensityField kde = kde_density(e, g);
  std::vector<double> diff(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    diff[i] = std::abs(kde.value(i) - oracles::normal_pdf(g.node(i), 0.0, 1.0));
  CHECK(integrate(diff, g) <= 0.02);
}

TEST_CASE("degenerate ensembles cannot pick a bandwidth") {
  const std::vector<double> x0 = {1.0, 1.0};
  const ParticleEnsemble e = simulate(*builtin_brownian(), x0, 0.0, 0.1, 1);
  const Grid1D g = make_uniform_grid(-4.0, 4.0, 65);
  CHECK_THROWS_AS(kde_density(e, g), Error);
}

TEST_CASE("gbm ensembles yield half-line densities") {
  const std::vector<double> x0(5000, 1.0);
  const ParticleEnsemble e = simulate(*builtin_gbm(0.0, 0.3), x0, 0.5, 0.125, 17);
  const Grid1D g = make_uniform_grid(0.05, 6.0, 257);
  CHECK(kde_density(e, g).support() == Support::positive_half_line);
}

TEST_CASE("mc mmse for the additive gaussian channel") {
  const std::size_t n = 100000;
  const std::vector<double> x0 = normal_draws(2024, n, 0.0, 1.0);
  const ParticleEnsemble e = simulate(*builtin_brownian(), x0, 1.0, 0.05, 8);
  const McMmse r = mc_mmse(e, MmseTarget::x0, 50);
  CHECK(std::abs(r.value - oracles::gaussian_mmse(1.0, 1.0)) <= 0.02);
  CHECK(r.std_error > 0.0);
  CHECK(r.std_error < 0.01);

  // Early times pin the output to the input.
  const ParticleEnsemble early = simulate(*builtin_brownian(), x0, 1e-3, 1e-4, 8);
  CHECK(mc_mmse(early, MmseTarget::x0, 50).value <= 0.01);

  // A deterministic input has nothing left to estimate.
  const std::vector<double> constant(20000, 1.5);
  const ParticleEnsemble fixed = simulate(*builtin_brownian(), constant, 1.0, 0.05, 9);
  CHECK(mc_mmse(fixed, MmseTarget::x0, 50).value <= 1e-3);

  CHECK_THROWS_AS(mc_mmse(e, MmseTarget::x0, 5), Error);
  const std::vector<double> few = normal_draws(1, 500, 0.0, 1.0);
  const ParticleEnsemble small = simulate(*builtin_brownian(), few, 0.5, 0.05, 10);
  CHECK_THROWS_AS(mc_mmse(small, MmseTarget::x0, 50), Error);
}

TEST_CASE("kde tracks the pde trajectory for every built-in") {
  const std::size_t n = 100000;
  const std::vector<double> times = {0.25, 1.0, 4.0};

  SUBCASE("brownian") {
    const Grid1D g = make_uniform_grid(-11.0, 11.0, 1025);
    SolveSpec spec(builtin_brownian(), gaussian_density(0.0, 1.0, g));
    spec.t_end = 4.0;
    spec.snapshot_times = times;
    const Trajectory traj = solve(spec);
    const std::vector<double> x0 = normal_draws(31, n, 0.0, 1.0);
    for (double t : times) {
      const ParticleEnsemble e = simulate(*builtin_brownian(), x0, t, 0.05, 32);
      const DensityField kde = kde_density(e, g);
      std::vector<double> diff(g.size());
      const DensityField& ref = traj.at_time(t);
      for (std::size_t i = 0; i < g.size(); ++i) diff[i] = std::abs(kde.value(i) - ref.value(i));
      CHECK(integrate(diff, g) <= 0.03);
    }
  }

  SUBCASE("ou") {
    const Grid1D g = make_uniform_grid(-9.0, 9.0, 1025);
    SolveSpec spec(builtin_ou(1.0), gaussian_density(0.0, 1.0, g));
    spec.t_end = 4.0;
    spec.snapshot_times = times;
    const Trajectory traj = solve(spec);
    const std::vector<double> x0 = normal_draws(33, n, 0.0, 1.0);
    for (double t : times) {
      const ParticleEnsemble e = simulate(*builtin_ou(1.0), x0, t, 0.01, 34);
      const DensityField kde = kde_density(e, g);
      std::vector<double> diff(g.size());
      const DensityField& ref = traj.at_time(t);
      for (std::size_t i = 0; i < g.size(); ++i) diff[i] = std::abs(kde.value(i) - ref.value(i));
      CHECK(integrate(diff, g) <= 0.03);
    }
  }

  SUBCASE("gbm") {
    const double mu = 0.05, sigma = 0.25, s0 = 0.2;
    const double m4 = (mu - 0.5 * sigma * sigma) * 4.0;
    const double s4 = std::sqrt(s0 * s0 + sigma * sigma * 4.0);
    const Grid1D g = make_uniform_grid(std::exp(m4 - 6.0 * s4), std::exp(m4 + 6.0 * s4), 8193);
    SolveSpec spec(builtin_gbm(mu, sigma), lognormal_density(0.0, s0 * s0, g));
    spec.t_end = 4.0;
    spec.dt = 5e-4;
    spec.scheme = Scheme::implicit_euler;
    spec.snapshot_times = times;
    const Trajectory traj = solve(spec);
    std::vector<double> x0 = normal_draws(35, n, 0.0, s0);
    for (double& v : x0) v = std::exp(v);
    for (double t : times) {
      const ParticleEnsemble e = simulate(*builtin_gbm(mu, sigma), x0, t, t / 4.0, 36);
      const DensityField kde = kde_density(e, g);
      std::vector<double> diff(g.size());
      const DensityField& ref = traj.at_time(t);
      for (std::size_t i = 0; i < g.size(); ++i) diff[i] = std::abs(kde.value(i) - ref.value(i));
      CHECK(integrate(diff, g) <= 0.03);
    }
  }
}

TEST_CASE("ensemble CSV layout") {
  const std::vector<double> x0 = {0.5, 1.5, 2.5};
  const ParticleEnsemble e = simulate(*builtin_brownian(), x0, 0.1, 0.05, 4);
  const std::string csv = e.to_csv();
  CHECK(csv.rfind("index,x0,xt\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
