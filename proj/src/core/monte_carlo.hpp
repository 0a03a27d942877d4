#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/model.hpp"

namespace fokker {

//! Deterministic per-stream generator: SplitMix64 driving a Box-Muller
//! normal pair. Each particle owns one stream keyed by (seed, index), so
//! results do not depend on scheduling.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double next_unit();    // (0, 1]
  double next_normal();  // standard normal

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct ParticleEnsemble {
  std::vector<double> x0;
  std::vector<double> xt;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::string model_name;
  Support support = Support::full_line;

  std::size_t size() const { return x0.size(); }
  std::string to_csv() const;  // columns index,x0,xt
};

enum class MmseTarget { x0, log_x0, score };

struct McMmse {
  double value = 0.0;
  double std_error = 0.0;
};

// Euler-Maruyama paths from the given start points; models with an exact
// sampler (gbm) use it instead so positivity is preserved.
ParticleEnsemble simulate(const SdeModel& model, std::span<const double> x0_samples, double t,
                          double dt, std::uint64_t seed);

// Gaussian-kernel estimate on the grid; bandwidth <= 0 selects Silverman's
// rule 1.06 * std * n^(-1/5).
DensityField kde_density(const ParticleEnsemble& ensemble, const Grid1D& grid,
                         double bandwidth = 0.0);

// Nonparametric estimate of E[ Var(g(X0) | X_t) ] by equal-count binning
// of x_t with a piecewise-constant conditional mean. The score target
// needs the model's transition kernel.
McMmse mc_mmse(const ParticleEnsemble& ensemble, MmseTarget target, std::size_t bins,
               const SdeModel* model_for_score = nullptr);

}  // namespace fokker
