#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/identities.hpp"
#include "core/lin_gauss.hpp"
#include "core/monte_carlo.hpp"
#include "oracles.hpp"

using namespace fokker;
using namespace fokker::lingauss;

namespace {

LinearSdeModel model_from(int d, std::initializer_list<double> A, std::initializer_list<double> b) {
  return make_linear_model(d, std::vector<double>(A), std::vector<double>(b));
}

GaussianState state_from(int d, std::initializer_list<double> mean,
                         std::initializer_list<double> cov, double t) {
  return make_state(d, std::vector<double>(mean), std::vector<double>(cov), t);
}

}  // namespace

TEST_CASE("small matrix algebra") {
  const Mat a = model_from(3, {2, 1, 0, 1, 3, 1, 0, 1, 4}, {1, 0, 0, 0, 1, 0, 0, 0, 1}).A;
  const Mat inv = inverse(a);
  const Mat prod = mat_mul(a, inv);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(prod.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  CHECK(det(a) == doctest::Approx(2.0 * 11.0 - 1.0 * 4.0).epsilon(1e-12));  // 18

  CHECK(is_spd(a));
  Mat notsym = a;
  notsym.at(0, 1) = 5.0;
  CHECK_FALSE(is_spd(notsym));
  CHECK_THROWS_AS(model_from(2, {0, 0, 0, 0}, {1, 2, 2, 1}), Error);  // indefinite weight
}

TEST_CASE("moment propagation") {
  // Pure diffusion adds t to each variance.
  const LinearSdeModel bm = model_from(1, {0}, {1});
  const GaussianState s0 = state_from(1, {0}, {1}, 0.0);
  CHECK(propagate(bm, s0, 1.0).cov.at(0, 0) == doctest::Approx(2.0).epsilon(1e-10));

  // d = 2 contraction: cov(t) = (1 + e^{-2t})/2 * I from the scalar ODE.
  const LinearSdeModel ou2 = model_from(2, {-1, 0, 0, -1}, {1, 0, 0, 1});
  const GaussianState s2 = state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0);
  const GaussianState out = propagate(ou2, s2, 0.7);
  const double expected = 0.5 * (1.0 + std::exp(-1.4));
  CHECK(out.cov.at(0, 0) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(out.cov.at(1, 1) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(out.cov.at(0, 1)) <= 1e-12);

  // Long-time law of the scalar mean-reverting channel.
  const double alpha = 1.3;
  const LinearSdeModel ou1 = model_from(1, {-alpha}, {1});
  CHECK(propagate(ou1, s0, 10.0).cov.at(0, 0) ==
        doctest::Approx(1.0 / (2.0 * alpha)).epsilon(1e-8));
}

TEST_CASE("gaussian entropy and fisher") {
  CHECK(gaussian_entropy(state_from(1, {0}, {1}, 0.0)) ==
        doctest::Approx(oracles::gaussian_entropy(1.0)).epsilon(1e-14));
  CHECK(gaussian_entropy(state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0)) ==
        doctest::Approx(2.0 * oracles::gaussian_entropy(1.0)).epsilon(1e-14));
  CHECK(gaussian_entropy(state_from(2, {0, 0}, {1, 0, 0, 4}, 0.0)) ==
        doctest::Approx(2.0 * oracles::gaussian_entropy(1.0) + 0.5 * std::log(4.0)).epsilon(1e-14));

  const Mat eye2 = Mat::identity(2);
  CHECK(gaussian_fisher_b(state_from(1, {0}, {1}, 0.0), Mat::identity(1)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gaussian_fisher_b(state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), eye2) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gaussian_fisher_b(state_from(2, {0, 0}, {2, 0, 0, 2}, 0.0), eye2) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("multivariate entropy rate") {
  const LinearSdeModel ou2 = model_from(2, {-1, 0, 0, -1}, {1, 0, 0, 1});
  const GaussianState at_half =
      propagate(ou2, state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), 0.5);
  const auto rs = verify_entropy_rate_mv(ou2, at_half, 1e-3);
  CHECK(rs.front().passed);
  // Symbolic oracle: each coordinate contributes v'/(2v).
  const double v = 0.5 * (1.0 + std::exp(-1.0));
  const double expected = -std::exp(-1.0) / v;
  CHECK(rs.front().lhs == doctest::Approx(expected).epsilon(1e-6));
  CHECK(rs.front().rhs == doctest::Approx(expected).epsilon(1e-6));

  // Pure diffusion keeps the rate positive.
  const LinearSdeModel bm2 = model_from(2, {0, 0, 0, 0}, {1, 0, 0, 1});
  const auto grow = verify_entropy_rate_mv(bm2, state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), 1e-3);
  CHECK(grow.front().lhs > 0.0);
}

TEST_CASE("scalar slice agrees with the grid pipeline") {
  const double alpha = 1.0, t = 0.5;
  const LinearSdeModel ou1 = model_from(1, {-alpha}, {1});
  const GaussianState at_t = propagate(ou1, state_from(1, {0}, {1}, 0.0), t);
  const auto mv = verify_entropy_rate_mv(ou1, at_t, 1e-3);

  const Grid1D g = make_uniform_grid(-9.0, 9.0, 1025);
  const auto grid = verify_entropy_rate(builtin_ou(alpha), gaussian_density(0.0, 1.0, g), t, 1e-3, {});
  CHECK(mv.front().lhs == doctest::Approx(grid.front().lhs).epsilon(1e-3));
  CHECK(mv.front().rhs == doctest::Approx(grid.front().rhs).epsilon(1e-3));
}

TEST_CASE("multivariate van trees") {
  // Scalar additive-noise case attains the bound.
  const LinearSdeModel bm1 = model_from(1, {0}, {1});
  const auto rs = verify_van_trees_mv(bm1, state_from(1, {0}, {1}, 0.0), 1.0);
  const auto& bound = rs.front();
  CHECK(bound.passed);
  CHECK(report_param(bound, "estimator_risk") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(report_param(bound, "bound") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rs[1].passed);

  // d = 2: risk doubles coordinate-wise, the scalar bound does not.
  const LinearSdeModel bm2 = model_from(2, {0, 0, 0, 0}, {1, 0, 0, 1});
  const auto rs2 = verify_van_trees_mv(bm2, state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), 1.0);
  CHECK(report_param(rs2.front(), "estimator_risk") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report_param(rs2.front(), "bound") == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(rs2.front().passed);
  CHECK(rs2[1].passed);

  // Doubling the weight matrix rescales both sides consistently.
  const LinearSdeModel heavy = model_from(2, {0, 0, 0, 0}, {2, 0, 0, 2});
  const auto rs3 = verify_van_trees_mv(heavy, state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), 1.0);
  CHECK(rs3.front().passed);
  CHECK(rs3[1].passed);
}

TEST_CASE("multivariate mutual information") {
  const LinearSdeModel bm1 = model_from(1, {0}, {1});
  const GaussianState prior = state_from(1, {0}, {1}, 0.0);
  CHECK(gaussian_mutual_information(bm1, prior, 1.0) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-9));
  CHECK_THROWS_AS(gaussian_mutual_information(bm1, prior, 1e-9), Error);

  const LinearSdeModel bm2 = model_from(2, {0, 0, 0, 0}, {1, 0, 0, 1});
  CHECK(gaussian_mutual_information(bm2, state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), 1.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // Non-increasing in t for a stable model.
  const LinearSdeModel ou2 = model_from(2, {-0.8, 0.2, -0.2, -1.1}, {1, 0.3, 0.3, 1});
  double last = gaussian_mutual_information(ou2, state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), 0.2);
  for (double t = 0.4; t <= 2.0; t += 0.2) {
    const double mi = gaussian_mutual_information(ou2, state_from(2, {0, 0}, {1, 0, 0, 1}, 0.0), t);
    CHECK(mi <= last + 1e-9);
    last = mi;
  }
}

TEST_CASE("randomized stable models satisfy both identities") {
  Rng rng(314159, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + static_cast<int>(rng.next_u64() % 2);
    const auto rand_mat = [&](double scale) {
      std::vector<double> m(static_cast<std::size_t>(d * d));
      for (double& v : m) v = scale * (2.0 * rng.next_unit() - 1.0);
      return m;
    };
    // A = -(R R^T + 0.3 I) + skew has spectral abscissa < 0.
    const auto r = rand_mat(0.8);
    const auto k = rand_mat(0.6);
    std::vector<double> A(static_cast<std::size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double sym = 0.0;
        for (int l = 0; l < d; ++l)
          sym += r[static_cast<std::size_t>(i * d + l)] * r[static_cast<std::size_t>(j * d + l)];
        const double skew = k[static_cast<std::size_t>(i * d + j)] - k[static_cast<std::size_t>(j * d + i)];
        A[static_cast<std::size_t>(i * d + j)] = -(sym + (i == j ? 0.3 : 0.0)) + skew;
      }
    const auto s = rand_mat(0.7);
    std::vector<double> b(static_cast<std::size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l)
          b[static_cast<std::size_t>(i * d + j)] +=
              s[static_cast<std::size_t>(i * d + l)] * s[static_cast<std::size_t>(j * d + l)];
        if (i == j) b[static_cast<std::size_t>(i * d + j)] += 0.2;
      }
    const LinearSdeModel model = make_linear_model(d, A, b);

    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (double& v : mean) v = 2.0 * rng.next_unit() - 1.0;
    const auto c = rand_mat(0.5);
    std::vector<double> cov(static_cast<std::size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l)
          cov[static_cast<std::size_t>(i * d + j)] +=
              c[static_cast<std::size_t>(i * d + l)] * c[static_cast<std::size_t>(j * d + l)];
        if (i == j) cov[static_cast<std::size_t>(i * d + j)] += 0.5;
      }
    const GaussianState prior = make_state(d, mean, cov, 0.0);

    const GaussianState mid = propagate(model, prior, 0.4);
    CHECK(verify_entropy_rate_mv(model, mid, 1e-4).front().passed);
    for (const auto& rep : verify_van_trees_mv(model, prior, 0.4)) CHECK(rep.passed);
  }
}
