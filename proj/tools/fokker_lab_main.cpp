// fokker-lab: config-driven front end over the fokkerlab C API.
//
// Subcommands: solve | verify | curve | selfcheck. Exit codes: 0 success,
// 1 at least one identity check failed, 2 usage/config error, 3 runtime
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <fokkerlab/fokkerlab.h>

#include "kvconfig.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { Free(ptr); }
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    if (this != &other) {
      Free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  T** out() { return &ptr; }
  T* get() const { return ptr; }
  explicit operator bool() const { return ptr != nullptr; }
};

using GridHandle = Handle<fl_grid, fl_grid_free>;
using DensityHandle = Handle<fl_density, fl_density_free>;
using ModelHandle = Handle<fl_model, fl_model_free>;
using TrajectoryHandle = Handle<fl_trajectory, fl_trajectory_free>;
using JointHandle = Handle<fl_joint, fl_joint_free>;
using ReportsHandle = Handle<fl_reports, fl_reports_free>;
using CurveHandle = Handle<fl_curve, fl_curve_free>;

// Setup-phase failures point at the configuration; run-phase failures are
// genuine runtime errors.
void require_setup(fl_status status, const std::string& what) {
  if (status != FL_OK)
    throw UsageError(what + ": " + fl_status_str(status) + " (" + fl_last_error() + ")");
}

void require_run(fl_status status, const std::string& what) {
  if (status != FL_OK)
    throw RuntimeFailure(what + ": " + fl_status_str(status) + " (" + fl_last_error() + ")");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw UsageError("cannot read config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string normalized;
  normalized.reserve(text.size());
  for (char c : text)
    if (c != '\r') normalized.push_back(c);
  return normalized;
}

const std::set<std::string> kKnownChecks = {
    "entropy_rate",    "kl_rate",   "mi_rate",          "fisher_bridge",
    "mmse_bridge",     "van_trees", "ou_fisher_bound",  "kernel_selfcheck",
    "entropy_rate_mv", "van_trees_mv"};

struct RunContext {
  kvconfig::Document doc;
  std::string command;
  std::string config_hash;
  fs::path output_dir;
  std::uint64_t seed = 42;
  long threads = 1;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;
  json check_summary = json::object();

  double tolerance_for(const std::string& check) const {
    if (doc.has("tolerances", check)) return doc.get_number("tolerances", check);
    return 0.0;  // library default
  }
};

ModelHandle build_model(const kvconfig::Document& doc) {
  if (!doc.has_section("model")) throw UsageError("missing section [model]");
  const std::string name = doc.get_string("model", "name");
  ModelHandle model;
  if (name == "brownian") {
    require_setup(fl_model_brownian(model.out()), "[model]");
  } else if (name == "ou") {
    require_setup(fl_model_ou(doc.get_number("model", "alpha"), model.out()), "[model] alpha");
  } else if (name == "gbm") {
    require_setup(fl_model_gbm(doc.get_number("model", "mu"), doc.get_number("model", "sigma"),
                               model.out()),
                  "[model] mu/sigma");
  } else if (name == "custom") {
    const std::string support = doc.get_string("model", "support", std::string("full-line"));
    if (support != "full-line" && support != "positive-half-line")
      throw UsageError("[model].support must be full-line or positive-half-line");
    require_setup(fl_model_custom(doc.get_string("model", "drift").c_str(),
                                  doc.get_string("model", "diffusion").c_str(),
                                  support == "full-line" ? FL_SUPPORT_FULL_LINE
                                                         : FL_SUPPORT_POSITIVE_HALF_LINE,
                                  model.out()),
                  "[model] drift/diffusion");
  } else {
    throw UsageError("[model].name must be brownian, ou, gbm, or custom (got '" + name + "')");
  }
  return model;
}

GridHandle build_grid(const kvconfig::Document& doc, const std::string& prefix) {
  if (!doc.has_section("grid")) throw UsageError("missing section [grid]");
  const std::string lo_key = prefix.empty() ? "lo" : prefix + "_lo";
  if (!prefix.empty() && !doc.has("grid", lo_key)) return build_grid(doc, "");
  GridHandle grid;
  require_setup(fl_grid_create(doc.get_number("grid", lo_key),
                               doc.get_number("grid", prefix.empty() ? "hi" : prefix + "_hi"),
                               doc.get_integer("grid", prefix.empty() ? "n" : prefix + "_n"),
                               grid.out()),
                "[grid]");
  return grid;
}

DensityHandle build_prior(const kvconfig::Document& doc, const fl_grid* grid,
                          const std::string& section) {
  if (!doc.has_section(section)) throw UsageError("missing section [" + section + "]");
  const std::string family = doc.get_string(section, "family", std::string("gaussian"));
  DensityHandle density;
  if (family == "gaussian") {
    require_setup(fl_density_gaussian(grid, doc.get_number(section, "mean", 0.0),
                                      doc.get_number(section, "var", 1.0), density.out()),
                  "[" + section + "]");
  } else if (family == "lognormal") {
    require_setup(fl_density_lognormal(grid, doc.get_number(section, "log_mean", 0.0),
                                       doc.get_number(section, "log_var", 1.0), density.out()),
                  "[" + section + "]");
  } else if (family == "gaussian-mixture") {
    const auto weights = doc.get_numbers(section, "weights");
    const auto means = doc.get_numbers(section, "means");
    const auto vars = doc.get_numbers(section, "vars");
    if (weights.size() != means.size() || weights.size() != vars.size())
      throw UsageError("[" + section + "] mixture arrays must have matching lengths");
    require_setup(fl_density_mixture(grid, static_cast<int64_t>(weights.size()), weights.data(),
                                     means.data(), vars.data(), density.out()),
                  "[" + section + "]");
  } else {
    throw UsageError("[" + section + "].family must be gaussian, lognormal, or gaussian-mixture");
  }
  return density;
}

fl_scheme scheme_from(const kvconfig::Document& doc) {
  const std::string scheme =
      doc.get_string("solver", "scheme", std::string("crank-nicolson"));
  if (scheme == "crank-nicolson") return FL_SCHEME_CRANK_NICOLSON;
  if (scheme == "implicit-euler") return FL_SCHEME_IMPLICIT_EULER;
  throw UsageError("[solver].scheme must be crank-nicolson or implicit-euler");
}

void write_manifest(RunContext& ctx) {
  json manifest;
  manifest["config_hash"] = ctx.config_hash;
  manifest["tool_version"] = fl_version();
  manifest["command"] = ctx.command;
  manifest["seed"] = ctx.seed;
  manifest["threads"] = ctx.threads;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started).count();
  manifest["outputs"] = ctx.outputs;
  if (!ctx.check_summary.empty()) manifest["checks"] = ctx.check_summary;

  const fs::path path = ctx.output_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw RuntimeFailure("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

std::string output_file(RunContext& ctx, const std::string& name) {
  const fs::path path = ctx.output_dir / name;
  ctx.outputs.push_back(name);
  return path.string();
}

int cmd_solve(RunContext& ctx) {
  const ModelHandle model = build_model(ctx.doc);
  const GridHandle grid = build_grid(ctx.doc, "");
  const DensityHandle prior = build_prior(ctx.doc, grid.get(), "prior");
  if (!ctx.doc.has_section("time")) throw UsageError("missing section [time]");
  double t_end = ctx.doc.get_number("time", "t");
  const double dt = ctx.doc.get_number("time", "dt", 0.0);
  const auto snapshots = ctx.doc.get_numbers("time", "t_values", std::vector<double>{});
  for (double s : snapshots) t_end = std::max(t_end, s);  // snapshots extend the march

  TrajectoryHandle traj;
  require_run(fl_solve(model.get(), prior.get(), t_end, dt, scheme_from(ctx.doc),
                       snapshots.empty() ? nullptr : snapshots.data(),
                       static_cast<int64_t>(snapshots.size()), traj.out()),
              "solve");
  require_run(fl_trajectory_write_csv(traj.get(), output_file(ctx, "trajectory.csv").c_str()),
              "trajectory.csv");
  double drift = 0.0;
  require_run(fl_trajectory_mass_drift(traj.get(), &drift), "mass drift");
  ctx.check_summary["mass_drift"] = drift;
  write_manifest(ctx);
  std::cout << "wrote " << (ctx.output_dir / "trajectory.csv").string() << " (mass drift " << drift
            << ")\n";
  return kExitOk;
}

int cmd_verify(RunContext& ctx) {
  const ModelHandle model = build_model(ctx.doc);
  const GridHandle grid = build_grid(ctx.doc, "");
  const GridHandle grid_xt = build_grid(ctx.doc, "xt");
  const DensityHandle prior = build_prior(ctx.doc, grid.get(), "prior");

  std::vector<std::string> checks =
      ctx.doc.get_strings("run", "checks", std::vector<std::string>{});
  if (checks.empty()) throw UsageError("[run].checks must list at least one check");
  for (const auto& name : checks)
    if (!kKnownChecks.count(name)) throw UsageError("unknown check '" + name + "'");
  std::sort(checks.begin(), checks.end());
  checks.erase(std::unique(checks.begin(), checks.end()), checks.end());

  const double t = ctx.doc.get_number("time", "t", 1.0);
  const double h = ctx.doc.get_number("time", "h", 1e-3 * t);
  const double dt = ctx.doc.get_number("time", "dt", 0.0);
  const fl_scheme scheme = scheme_from(ctx.doc);
  const std::string model_name = fl_model_name(model.get());

  ReportsHandle all;
  require_run(fl_reports_create(all.out()), "reports");

  JointHandle joint;
  const auto ensure_joint = [&]() {
    if (!joint)
      require_run(fl_joint_build(prior.get(), model.get(), grid_xt.get(), t, joint.out()),
                  "joint law");
  };

  for (const auto& name : checks) {
    ReportsHandle rs;
    if (name == "entropy_rate") {
      require_run(fl_check_entropy_rate(model.get(), prior.get(), t, h, dt, scheme,
                                        ctx.tolerance_for(name), rs.out()),
                  name);
    } else if (name == "kl_rate") {
      DensityHandle q0;
      if (ctx.doc.has_section("prior_q")) {
        q0 = build_prior(ctx.doc, grid.get(), "prior_q");
      } else if (ctx.doc.get_string("prior", "family", std::string("gaussian")) == "gaussian") {
        // Mean-shifted companion law when no [prior_q] is given.
        require_setup(fl_density_gaussian(grid.get(),
                                          ctx.doc.get_number("prior", "mean", 0.0) + 1.0,
                                          ctx.doc.get_number("prior", "var", 1.0), q0.out()),
                      "[prior_q]");
      } else {
        throw UsageError("kl_rate needs a [prior_q] section for non-gaussian priors");
      }
      require_run(fl_check_kl_rate(model.get(), prior.get(), q0.get(), t, h, dt, scheme,
                                   ctx.tolerance_for(name), rs.out()),
                  name);
    } else if (name == "mi_rate") {
      require_run(fl_check_mi_rate(model.get(), prior.get(), grid_xt.get(), t, h,
                                   ctx.tolerance_for(name), rs.out()),
                  name);
    } else if (name == "fisher_bridge") {
      ensure_joint();
      require_run(fl_check_fisher_bridge(joint.get(), model.get(), ctx.tolerance_for(name),
                                         rs.out()),
                  name);
    } else if (name == "mmse_bridge") {
      ensure_joint();
      require_run(fl_check_mmse_bridge(joint.get(), model.get(), model.get(),
                                       ctx.tolerance_for(name), rs.out()),
                  name);
    } else if (name == "van_trees") {
      ensure_joint();
      const std::string est =
          ctx.doc.get_string("run", "estimator", std::string("conditional-mean"));
      if (est != "conditional-mean" && est != "zero")
        throw UsageError("[run].estimator must be conditional-mean or zero");
      require_run(fl_check_van_trees(joint.get(), model.get(),
                                     est == "zero" ? FL_ESTIMATOR_ZERO
                                                   : FL_ESTIMATOR_CONDITIONAL_MEAN,
                                     ctx.tolerance_for(name), rs.out()),
                  name);
    } else if (name == "ou_fisher_bound") {
      if (model_name != "ou")
        throw UsageError("ou_fisher_bound requires [model].name = ou");
      const auto ts = ctx.doc.get_numbers("time", "t_values", std::vector<double>{});
      if (ts.empty()) throw UsageError("ou_fisher_bound needs [time].t_values");
      require_run(fl_check_ou_fisher_bound(ctx.doc.get_number("model", "alpha"), prior.get(),
                                           ts.data(), static_cast<int64_t>(ts.size()),
                                           ctx.tolerance_for(name), rs.out()),
                  name);
    } else if (name == "kernel_selfcheck") {
      fl_support support = FL_SUPPORT_FULL_LINE;
      require_run(fl_density_support(prior.get(), &support), name);
      const double x0 = ctx.doc.get_number(
          "run", "selfcheck_x0", support == FL_SUPPORT_POSITIVE_HALF_LINE ? 1.0 : 0.0);
      require_run(fl_kernel_selfcheck(model.get(), x0, t, rs.out()), name);
    } else if (name == "entropy_rate_mv" || name == "van_trees_mv") {
      if (!ctx.doc.has_section("lingauss"))
        throw UsageError(name + " needs a [lingauss] section");
      const int dim = static_cast<int>(ctx.doc.get_integer("lingauss", "dim"));
      const auto A = ctx.doc.get_numbers("lingauss", "A");
      const auto b = ctx.doc.get_numbers("lingauss", "b");
      const auto mean = ctx.doc.get_numbers("lingauss", "mean");
      const auto cov = ctx.doc.get_numbers("lingauss", "cov");
      const std::size_t nn = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
      if (A.size() != nn || b.size() != nn || cov.size() != nn ||
          mean.size() != static_cast<std::size_t>(dim))
        throw UsageError("[lingauss] arrays must match dim (row-major matrices)");
      if (name == "van_trees_mv") {
        require_run(fl_lg_check_van_trees(dim, A.data(), b.data(), mean.data(), cov.data(), t,
                                          ctx.tolerance_for(name), rs.out()),
                    name);
      } else {
        std::vector<double> mean_t(static_cast<std::size_t>(dim));
        std::vector<double> cov_t(nn);
        require_run(fl_lg_propagate(dim, A.data(), b.data(), mean.data(), cov.data(), 0.0, t,
                                    mean_t.data(), cov_t.data()),
                    name);
        require_run(fl_lg_check_entropy_rate(dim, A.data(), b.data(), mean_t.data(), cov_t.data(),
                                             t, std::min(h, 1e-4), ctx.tolerance_for(name),
                                             rs.out()),
                    name);
      }
    }
    require_run(fl_reports_extend(all.get(), rs.get()), name);
  }

  require_run(fl_reports_write_csv(all.get(), output_file(ctx, "reports.csv").c_str()),
              "reports.csv");
  require_run(fl_reports_write_summary(all.get(), output_file(ctx, "summary.txt").c_str()),
              "summary.txt");

  int64_t count = 0;
  require_run(fl_reports_count(all.get(), &count), "reports");
  for (int64_t i = 0; i < count; ++i) {
    int passed = 0;
    require_run(fl_reports_passed(all.get(), i, &passed), "reports");
    ctx.check_summary[fl_reports_name(all.get(), i)] = passed ? "pass" : "fail";
  }
  write_manifest(ctx);

  std::ifstream summary(ctx.output_dir / "summary.txt");
  std::cout << summary.rdbuf();
  int all_passed = 0;
  require_run(fl_reports_all_passed(all.get(), &all_passed), "reports");
  return all_passed ? kExitOk : kExitCheckFailed;
}

int cmd_curve(RunContext& ctx) {
  const ModelHandle model = build_model(ctx.doc);
  const GridHandle grid = build_grid(ctx.doc, "");
  const GridHandle grid_xt = build_grid(ctx.doc, "xt");
  const DensityHandle prior = build_prior(ctx.doc, grid.get(), "prior");
  const auto ts = ctx.doc.get_numbers("time", "t_values", std::vector<double>{});
  if (ts.empty()) throw UsageError("curve needs non-empty [time].t_values");
  for (double t : ts)
    if (t <= 0.0) throw UsageError("[time].t_values must be strictly positive");

  CurveHandle curve;
  require_run(fl_immse_curve(model.get(), prior.get(), grid_xt.get(), ts.data(),
                             static_cast<int64_t>(ts.size()), curve.out()),
              "curve");
  require_run(fl_curve_write_csv(curve.get(), output_file(ctx, "curve.csv").c_str()),
              "curve.csv");
  write_manifest(ctx);
  std::cout << "wrote " << (ctx.output_dir / "curve.csv").string() << "\n";
  return kExitOk;
}

int cmd_selfcheck() {
  ReportsHandle all;
  require_run(fl_reports_create(all.out()), "reports");

  const auto add_selfcheck = [&](fl_model* model, double x0, double t) {
    ReportsHandle rs;
    require_run(fl_kernel_selfcheck(model, x0, t, rs.out()), "kernel selfcheck");
    require_run(fl_reports_extend(all.get(), rs.get()), "kernel selfcheck");
  };
  ModelHandle bm, ou, gbm;
  require_run(fl_model_brownian(bm.out()), "model");
  require_run(fl_model_ou(1.0, ou.out()), "model");
  require_run(fl_model_gbm(0.1, 0.5, gbm.out()), "model");
  add_selfcheck(bm.get(), 0.0, 1.0);
  add_selfcheck(ou.get(), 2.0, 0.3);
  add_selfcheck(gbm.get(), 1.0, 1.0);

  // Quick heat-channel identity on stock settings.
  GridHandle grid;
  require_run(fl_grid_create(-9.0, 9.0, 1025, grid.out()), "grid");
  DensityHandle prior;
  require_run(fl_density_gaussian(grid.get(), 0.0, 1.0, prior.out()), "prior");
  ReportsHandle rate;
  require_run(fl_check_entropy_rate(bm.get(), prior.get(), 1.0, 1e-3, 0.0,
                                    FL_SCHEME_CRANK_NICOLSON, 1e-3, rate.out()),
              "entropy rate");
  require_run(fl_reports_extend(all.get(), rate.get()), "entropy rate");

  int64_t count = 0;
  require_run(fl_reports_count(all.get(), &count), "reports");
  for (int64_t i = 0; i < count; ++i) {
    int passed = 0;
    require_run(fl_reports_passed(all.get(), i, &passed), "reports");
    double lhs = 0.0;
    require_run(fl_reports_lhs(all.get(), i, &lhs), "reports");
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << fl_reports_name(all.get(), i) << "\n";
  }
  int all_passed = 0;
  require_run(fl_reports_all_passed(all.get(), &all_passed), "reports");
  std::cout << (all_passed ? "selfcheck ok\n" : "selfcheck FAILED\n");
  return all_passed ? kExitOk : kExitCheckFailed;
}

long resolve_threads(const kvconfig::Document& doc) {
  long threads = static_cast<long>(doc.get_number("run", "threads", 1.0));
  if (const char* env = std::getenv("FOKKER_LAB_THREADS")) {
    char* end = nullptr;
    threads = std::strtol(env, &end, 10);
    if (end == env || *end != '\0')
      throw UsageError("FOKKER_LAB_THREADS must be an integer");
  }
  if (threads < 1) throw UsageError("thread count must be at least 1");
  return threads;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fokker-lab: drift-diffusion channel laboratory"};
  app.set_version_flag("--version", std::string(fl_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir_flag;
  std::vector<std::string> overrides;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", config_path, "run configuration file");
    if (needs_config) opt->required();
    sub->add_option("-o,--output-dir", output_dir_flag, "output directory override");
    sub->add_option("--set", overrides, "override a config key (section.key=value)");
  };

  CLI::App* solve = app.add_subcommand("solve", "integrate the density forward in time");
  CLI::App* verify = app.add_subcommand("verify", "run the configured identity checks");
  CLI::App* curve = app.add_subcommand("curve", "information-rate vs estimation-error table");
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "built-in kernel and identity smoke test");
  add_common(solve, true);
  add_common(verify, true);
  add_common(curve, true);
  add_common(selfcheck, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (selfcheck->parsed()) return cmd_selfcheck();

    RunContext ctx;
    const std::string text = read_file(config_path);
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(text)));
    ctx.config_hash = hash_hex;
    try {
      ctx.doc = kvconfig::Document::parse(text);
      for (const auto& o : overrides) ctx.doc.set_override(o);
    } catch (const kvconfig::ConfigError& e) {
      throw UsageError(std::string("config: ") + e.what());
    }

    ctx.seed = static_cast<std::uint64_t>(ctx.doc.get_number("run", "seed", 42.0));
    ctx.threads = resolve_threads(ctx.doc);
    std::string out_dir = output_dir_flag.empty()
                              ? ctx.doc.get_string("run", "output_dir", std::string("out"))
                              : output_dir_flag;
    ctx.output_dir = out_dir;
    std::error_code ec;
    fs::create_directories(ctx.output_dir, ec);
    if (ec) throw UsageError("cannot create output directory '" + out_dir + "'");

    if (solve->parsed()) {
      ctx.command = "solve";
      return cmd_solve(ctx);
    }
    if (verify->parsed()) {
      ctx.command = "verify";
      return cmd_verify(ctx);
    }
    ctx.command = "curve";
    return cmd_curve(ctx);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kvconfig::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RuntimeFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
