// Exercises the public C surface against the shared library only; no core
// headers are included here.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <fokkerlab/fokkerlab.h>

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("capi_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(fl_version()) == "0.1.0");
  CHECK(std::string(fl_status_str(FL_OK)) == "ok");
  CHECK(std::string(fl_status_str(FL_ERR_DOMAIN)) == "domain error");
}

TEST_CASE("grid and density round trip") {
  fl_grid* grid = nullptr;
  REQUIRE(fl_grid_create(-8.0, 8.0, 1025, &grid) == FL_OK);
  int64_t n = 0;
  CHECK(fl_grid_size(grid, &n) == FL_OK);
  CHECK(n == 1025);
  double h = 0.0;
  CHECK(fl_grid_spacing(grid, &h) == FL_OK);
  CHECK(h == doctest::Approx(0.015625));

  CHECK(fl_grid_create(1.0, 0.0, 11, &grid) == FL_ERR_DOMAIN);
  CHECK(std::string(fl_last_error()).find("lo < hi") != std::string::npos);

  fl_density* p = nullptr;
  REQUIRE(fl_density_gaussian(grid, 0.0, 1.0, &p) == FL_OK);
  double mass = 0.0;
  CHECK(fl_density_integral(p, &mass) == FL_OK);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> values(static_cast<std::size_t>(n));
  CHECK(fl_density_values(p, values.data()) == FL_OK);
  CHECK(values[512] == doctest::Approx(0.3989422804).epsilon(1e-8));

  double entropy = 0.0;
  CHECK(fl_entropy(p, &entropy) == FL_OK);
  CHECK(entropy == doctest::Approx(1.4189385332).epsilon(1e-8));

  fl_density* q = nullptr;
  REQUIRE(fl_density_gaussian(grid, 1.0, 1.0, &q) == FL_OK);
  double div = 0.0;
  CHECK(fl_kl(p, q, &div) == FL_OK);
  CHECK(div == doctest::Approx(0.5).epsilon(1e-8));
  double fisher = 0.0;
  CHECK(fl_fisher(p, nullptr, 0.0, &fisher) == FL_OK);
  CHECK(fisher == doctest::Approx(1.0).epsilon(1e-6));

  CHECK(fl_density_gaussian(grid, 0.0, -1.0, &p) == FL_ERR_DOMAIN);
  CHECK(fl_entropy(nullptr, &entropy) == FL_ERR_INVALID_ARGUMENT);

  fl_density_free(p);
  fl_density_free(q);
  fl_grid_free(grid);
}

TEST_CASE("models and kernels") {
  fl_model* ou = nullptr;
  REQUIRE(fl_model_ou(1.0, &ou) == FL_OK);
  CHECK(std::string(fl_model_name(ou)) == "ou");
  double v = 0.0;
  CHECK(fl_model_conditional_fisher(ou, 0.5 * std::log(2.0), &v) == FL_OK);
  CHECK(v == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(fl_model_ou(-1.0, &ou) == FL_ERR_DOMAIN);

  fl_reports* rs = nullptr;
  REQUIRE(fl_kernel_selfcheck(ou, 2.0, 0.3, &rs) == FL_OK);
  int passed = 0;
  CHECK(fl_reports_all_passed(rs, &passed) == FL_OK);
  CHECK(passed == 1);
  fl_reports_free(rs);

  fl_model* custom = nullptr;
  REQUIRE(fl_model_custom("-x", "sqrt(2)", FL_SUPPORT_FULL_LINE, &custom) == FL_OK);
  double a = 0.0;
  CHECK(fl_model_drift(custom, 2.0, 0.0, &a) == FL_OK);
  CHECK(a == doctest::Approx(-2.0));
  int has_kernel = 1;
  CHECK(fl_model_has_kernel(custom, &has_kernel) == FL_OK);
  CHECK(has_kernel == 0);
  CHECK(fl_model_kernel_score(custom, 0.0, 1.0, 1.0, &v) == FL_ERR_UNSUPPORTED);
  CHECK(fl_model_custom("2*", "1", FL_SUPPORT_FULL_LINE, &custom) == FL_ERR_DOMAIN);
  fl_model_free(custom);
  fl_model_free(ou);
}

TEST_CASE("solver and trajectory through the C surface") {
  fl_grid* grid = nullptr;
  REQUIRE(fl_grid_create(-8.0, 8.0, 513, &grid) == FL_OK);
  fl_model* bm = nullptr;
  REQUIRE(fl_model_brownian(&bm) == FL_OK);
  fl_density* p0 = nullptr;
  REQUIRE(fl_density_gaussian(grid, 0.0, 1.0, &p0) == FL_OK);

  const double snapshots[] = {0.5};
  fl_trajectory* traj = nullptr;
  REQUIRE(fl_solve(bm, p0, 1.0, 0.0, FL_SCHEME_CRANK_NICOLSON, snapshots, 1, &traj) == FL_OK);
  int64_t count = 0;
  CHECK(fl_trajectory_count(traj, &count) == FL_OK);
  CHECK(count == 3);
  double drift = 1.0;
  CHECK(fl_trajectory_mass_drift(traj, &drift) == FL_OK);
  CHECK(drift <= 1e-8);
  fl_density* mid = nullptr;
  REQUIRE(fl_trajectory_field(traj, 1, &mid) == FL_OK);
  double ent = 0.0;
  CHECK(fl_entropy(mid, &ent) == FL_OK);
  CHECK(ent == doctest::Approx(0.5 * std::log(2.0 * 3.14159265358979 * 2.71828182845905 * 1.5))
                   .epsilon(1e-3));

  TempFile csv("traj.csv");
  CHECK(fl_trajectory_write_csv(traj, csv.path.c_str()) == FL_OK);
  std::FILE* f = std::fopen(csv.path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char header[8] = {};
  REQUIRE(std::fread(header, 1, 6, f) == 6);
  CHECK(std::string(header, 6) == "t,x,p\n");
  std::fclose(f);

  fl_density_free(mid);
  fl_trajectory_free(traj);

  double dt = 0.0;
  CHECK(fl_default_dt(bm, grid, 0.0, &dt) == FL_OK);
  CHECK(dt == doctest::Approx(0.03125 * 0.03125));
  double lim = 0.0;
  CHECK(fl_stable_dt(bm, grid, 0.0, FL_SCHEME_CRANK_NICOLSON, &lim) == FL_OK);
  CHECK(fl_solve(bm, p0, 1.0, 2.0 * lim, FL_SCHEME_CRANK_NICOLSON, nullptr, 0, &traj) ==
        FL_ERR_DOMAIN);

  fl_density_free(p0);
  fl_model_free(bm);
  fl_grid_free(grid);
}

TEST_CASE("sampling through the C surface") {
  fl_model* bm = nullptr;
  REQUIRE(fl_model_brownian(&bm) == FL_OK);
  std::vector<double> x0(20000, 0.0);
  fl_ensemble* ens = nullptr;
  REQUIRE(fl_simulate(bm, x0.data(), static_cast<int64_t>(x0.size()), 1.0, 0.05, 77, &ens) ==
          FL_OK);
  int64_t n = 0;
  CHECK(fl_ensemble_size(ens, &n) == FL_OK);
  CHECK(n == 20000);

  fl_grid* grid = nullptr;
  REQUIRE(fl_grid_create(-8.0, 8.0, 513, &grid) == FL_OK);
  fl_density* kde = nullptr;
  REQUIRE(fl_kde_density(ens, grid, 0.0, &kde) == FL_OK);
  double mass = 0.0;
  CHECK(fl_density_integral(kde, &mass) == FL_OK);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  double value = 0.0, se = 0.0;
  CHECK(fl_mc_mmse(ens, FL_TARGET_X0, 50, nullptr, &value, &se) == FL_OK);
  CHECK(value <= 1e-3);  // constant input

  TempFile csv("ens.csv");
  CHECK(fl_ensemble_write_csv(ens, csv.path.c_str()) == FL_OK);

  fl_density_free(kde);
  fl_grid_free(grid);
  fl_ensemble_free(ens);
  fl_model_free(bm);
}

TEST_CASE("joints and identity checks through the C surface") {
  fl_grid* g0 = nullptr;
  fl_grid* gt = nullptr;
  REQUIRE(fl_grid_create(-9.0, 9.0, 513, &g0) == FL_OK);
  REQUIRE(fl_grid_create(-10.0, 10.0, 1025, &gt) == FL_OK);
  fl_model* bm = nullptr;
  REQUIRE(fl_model_brownian(&bm) == FL_OK);
  fl_density* prior = nullptr;
  REQUIRE(fl_density_gaussian(g0, 0.0, 1.0, &prior) == FL_OK);

  fl_joint* joint = nullptr;
  REQUIRE(fl_joint_build(prior, bm, gt, 1.0, &joint) == FL_OK);
  double mutual = 0.0;
  CHECK(fl_joint_mutual_fisher(joint, nullptr, &mutual) == FL_OK);
  CHECK(mutual == doctest::Approx(0.5).epsilon(0.01));
  double mi = 0.0;
  CHECK(fl_joint_mutual_information(joint, &mi) == FL_OK);
  CHECK(mi == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-3));
  double mmse = 0.0;
  CHECK(fl_joint_mmse(joint, FL_TARGET_X0, nullptr, nullptr, &mmse) == FL_OK);
  CHECK(mmse == doctest::Approx(0.5).epsilon(0.01));

  fl_reports* all = nullptr;
  REQUIRE(fl_reports_create(&all) == FL_OK);
  fl_reports* rs = nullptr;
  REQUIRE(fl_check_fisher_bridge(joint, nullptr, 0.0, &rs) == FL_OK);
  CHECK(fl_reports_extend(all, rs) == FL_OK);
  fl_reports_free(rs);
  REQUIRE(fl_check_mmse_bridge(joint, bm, nullptr, 0.0, &rs) == FL_OK);
  CHECK(fl_reports_extend(all, rs) == FL_OK);
  fl_reports_free(rs);
  REQUIRE(fl_check_van_trees(joint, nullptr, FL_ESTIMATOR_CONDITIONAL_MEAN, 0.0, &rs) == FL_OK);
  CHECK(fl_reports_extend(all, rs) == FL_OK);
  fl_reports_free(rs);

  int64_t count = 0;
  CHECK(fl_reports_count(all, &count) == FL_OK);
  CHECK(count == 4);  // two bridges + bound + decomposition
  int passed = 0;
  CHECK(fl_reports_all_passed(all, &passed) == FL_OK);
  CHECK(passed == 1);
  CHECK(std::string(fl_reports_name(all, 0)) == "fisher_bridge");
  double lhs = 0.0;
  CHECK(fl_reports_lhs(all, 0, &lhs) == FL_OK);
  CHECK(lhs == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::string(fl_reports_params_json(all, 0)).find("\"t\":\"1\"") != std::string::npos);

  TempFile csv("reports.csv");
  TempFile txt("summary.txt");
  CHECK(fl_reports_write_csv(all, csv.path.c_str()) == FL_OK);
  CHECK(fl_reports_write_summary(all, txt.path.c_str()) == FL_OK);
  fl_reports_free(all);

  fl_curve* curve = nullptr;
  const double ts[] = {0.5, 1.0};
  REQUIRE(fl_immse_curve(bm, prior, gt, ts, 2, &curve) == FL_OK);
  double t = 0.0, rate = 0.0, predicted = 0.0;
  CHECK(fl_curve_point(curve, 1, &t, nullptr, &rate, nullptr, &predicted) == FL_OK);
  CHECK(t == 1.0);
  CHECK(rate == doctest::Approx(predicted).epsilon(0.02));
  fl_curve_free(curve);

  fl_joint_free(joint);
  fl_density_free(prior);
  fl_model_free(bm);
  fl_grid_free(g0);
  fl_grid_free(gt);
}

TEST_CASE("linear multivariate channel through the C surface") {
  const double A[] = {-1.0, 0.0, 0.0, -1.0};
  const double b[] = {1.0, 0.0, 0.0, 1.0};
  const double mean0[] = {0.0, 0.0};
  const double cov0[] = {1.0, 0.0, 0.0, 1.0};

  double mean1[2] = {};
  double cov1[4] = {};
  REQUIRE(fl_lg_propagate(2, A, b, mean0, cov0, 0.0, 0.7, mean1, cov1) == FL_OK);
  CHECK(cov1[0] == doctest::Approx(0.5 * (1.0 + std::exp(-1.4))).epsilon(1e-9));

  double ent = 0.0;
  CHECK(fl_lg_entropy(2, cov0, &ent) == FL_OK);
  CHECK(ent == doctest::Approx(2.0 * 1.4189385332).epsilon(1e-9));
  double fisher = 0.0;
  CHECK(fl_lg_fisher(2, cov0, b, &fisher) == FL_OK);
  CHECK(fisher == doctest::Approx(2.0));

  double mi = 0.0;
  const double A0[] = {0.0, 0.0, 0.0, 0.0};
  CHECK(fl_lg_mutual_information(2, A0, b, mean0, cov0, 1.0, &mi) == FL_OK);
  CHECK(mi == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  fl_reports* rs = nullptr;
  REQUIRE(fl_lg_check_entropy_rate(2, A, b, mean1, cov1, 0.7, 1e-3, 0.0, &rs) == FL_OK);
  int passed = 0;
  CHECK(fl_reports_all_passed(rs, &passed) == FL_OK);
  CHECK(passed == 1);
  fl_reports_free(rs);
  REQUIRE(fl_lg_check_van_trees(2, A, b, mean0, cov0, 0.5, 0.0, &rs) == FL_OK);
  CHECK(fl_reports_all_passed(rs, &passed) == FL_OK);
  CHECK(passed == 1);
  fl_reports_free(rs);

  const double bad[] = {1.0, 2.0, 2.0, 1.0};
  CHECK(fl_lg_check_van_trees(2, A, bad, mean0, cov0, 0.5, 0.0, &rs) == FL_ERR_DOMAIN);
}
