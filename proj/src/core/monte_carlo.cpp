#include "core/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace fokker {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  // Decorrelate streams by running the mixer over both keys.
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= 0xd1b54a32d192ed03ULL * (stream + 1);
  (void)splitmix64(s);
  state_ = s;
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::next_unit() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
}

double Rng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::string ParticleEnsemble::to_csv() const {
  std::string out = "index,x0,xt\n";
  for (std::size_t i = 0; i < size(); ++i)
    out += std::to_string(i) + "," + format_double(x0[i]) + "," + format_double(xt[i]) + "\n";
  return out;
}

ParticleEnsemble simulate(const SdeModel& model, std::span<const double> x0_samples, double t,
                          double dt, std::uint64_t seed) {
  require(dt > 0.0, ErrorCode::domain, "simulate: dt must be positive");
  require(t >= 0.0, ErrorCode::domain, "simulate: t must be non-negative");
  require(x0_samples.size() >= 2, ErrorCode::sample, "simulate: need at least 2 particles");

  const std::size_t nsteps = t > 0.0 ? static_cast<std::size_t>(std::ceil(t / dt - 1e-9)) : 0;
  const double dt_eff = nsteps > 0 ? t / static_cast<double>(nsteps) : 0.0;
  const double sqrt_dt = std::sqrt(dt_eff);

  ParticleEnsemble out;
  out.x0.assign(x0_samples.begin(), x0_samples.end());
  out.xt.resize(x0_samples.size());
  out.t = t;
  out.seed = seed;
  out.model_name = model.name;
  out.support = model.support;

  for (std::size_t i = 0; i < x0_samples.size(); ++i) {
    Rng rng(seed, i);
    double x = x0_samples[i];
    double s = 0.0;
    for (std::size_t k = 0; k < nsteps; ++k) {
      const double z = rng.next_normal();
      if (model.exact_step)
        x = model.exact_step(x, s, dt_eff, z);
      else
        x += model.drift(x, s) * dt_eff + model.diffusion(x, s) * sqrt_dt * z;
      s += dt_eff;
      if (!std::isfinite(x) || std::abs(x) > 1e12)
        fail(ErrorCode::blowup, "simulate: particle " + std::to_string(i) +
                                    " diverged at step " + std::to_string(k) + " (x=" +
                                    format_double(x) + ")");
    }
    out.xt[i] = x;
  }
  return out;
}

DensityField kde_density(const ParticleEnsemble& ensemble, const Grid1D& grid, double bandwidth) {
  const std::size_t n = ensemble.size();
  require(n >= 2, ErrorCode::sample, "kde_density: need at least 2 particles");

  double mean = 0.0;
  for (double v : ensemble.xt) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : ensemble.xt) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  const double sd = std::sqrt(var);

  double bw = bandwidth;
  if (bw <= 0.0) {
    require(sd > 0.0, ErrorCode::degenerate,
            "kde_density: degenerate ensemble (zero spread), cannot pick a bandwidth");
    bw = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
  }

  std::vector<double> xs(ensemble.xt.begin(), ensemble.xt.end());
  std::sort(xs.begin(), xs.end());

  const double cut = 8.0 * bw;
  const double norm = 1.0 / (static_cast<double>(n) * bw * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const auto first = std::lower_bound(xs.begin(), xs.end(), x - cut);
    const auto last = std::upper_bound(first, xs.end(), x + cut);
    double acc = 0.0;
    for (auto it = first; it != last; ++it) {
      const double u = (x - *it) / bw;
      acc += std::exp(-0.5 * u * u);
    }
    values[i] = acc * norm;
  }
  return normalize(DensityField(grid, std::move(values), ensemble.support));
}

McMmse mc_mmse(const ParticleEnsemble& ensemble, MmseTarget target, std::size_t bins,
               const SdeModel* model_for_score) {
  require(bins >= 10, ErrorCode::invalid_argument, "mc_mmse: need at least 10 bins");
  const std::size_t n = ensemble.size();
  require(n >= 100 * bins, ErrorCode::sample,
          "mc_mmse: need at least 100 particles per bin (" + std::to_string(n) + " given for " +
              std::to_string(bins) + " bins)");

  std::vector<double> g(n);
  switch (target) {
    case MmseTarget::x0:
      for (std::size_t i = 0; i < n; ++i) g[i] = ensemble.x0[i];
      break;
    case MmseTarget::log_x0:
      for (std::size_t i = 0; i < n; ++i) {
        require(ensemble.x0[i] > 0.0, ErrorCode::domain, "mc_mmse: log target needs positive x0");
        g[i] = std::log(ensemble.x0[i]);
      }
      break;
    case MmseTarget::score: {
      require(model_for_score != nullptr && model_for_score->has_kernel(), ErrorCode::unsupported,
              "mc_mmse: score target needs a model with a transition kernel");
      const auto& score = model_for_score->kernel->score;
      for (std::size_t i = 0; i < n; ++i) g[i] = score(ensemble.x0[i], ensemble.xt[i], ensemble.t);
      break;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ensemble.xt[a] < ensemble.xt[b]; });

  std::vector<double> sq(n);
  std::size_t pos = 0;
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t count = n / bins + (b < n % bins ? 1 : 0);
    double m = 0.0;
    for (std::size_t k = 0; k < count; ++k) m += g[order[pos + k]];
    m /= static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double d = g[order[pos + k]] - m;
      sq[pos + k] = d * d;
      total += d * d;
    }
    pos += count;
  }

  McMmse result;
  result.value = total / static_cast<double>(n);
  double var = 0.0;
  for (double v : sq) var += (v - result.value) * (v - result.value);
  var /= static_cast<double>(n - 1);
  result.std_error = std::sqrt(var / static_cast<double>(n));
  return result;
}

}  // namespace fokker
