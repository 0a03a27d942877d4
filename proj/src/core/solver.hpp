#pragma once

#include <vector>

#include "core/grid.hpp"
#include "core/model.hpp"

namespace fokker {

enum class Scheme { crank_nicolson, implicit_euler };

struct SolveSpec {
  ModelPtr model;
  DensityField initial;
  double t_end = 0.0;
  double dt = 0.0;  // <= 0 selects the default h^2 / max b
  Scheme scheme = Scheme::crank_nicolson;
  std::vector<double> snapshot_times;

  SolveSpec(ModelPtr model_, DensityField initial_)
      : model(std::move(model_)), initial(std::move(initial_)) {}
};

//! Density trajectory with the conserved discrete mass recorded per step.
//! Fields are trapezoid-normalized snapshots; mass_log holds the scheme's
//! cell mass h * sum(p) before renormalization.
struct Trajectory {
  std::vector<double> times;
  std::vector<DensityField> fields;
  std::vector<double> mass_log;

  const DensityField& at_time(double t, double tol = 1e-9) const;
  double max_mass_drift() const;
  std::string to_csv() const;  // columns t,x,p in time-major order
};

// Largest admissible step for the scheme's positivity guarantee at time t
// (unbounded for implicit Euler).
double stable_dt(const SdeModel& model, const Grid1D& grid, double t, Scheme scheme);

// Default step h^2 / max b, sampled over the grid at time t.
double default_dt(const SdeModel& model, const Grid1D& grid, double t);

// One conservative step of the drift-diffusion flux form with
// Chang-Cooper face weighting and zero-flux boundaries.
DensityField step(const SdeModel& model, const DensityField& p, double t, double dt,
                  Scheme scheme = Scheme::crank_nicolson);

Trajectory solve(const SolveSpec& spec);

// Evolves many node-value columns under one model from time 0 to t_end,
// sharing the factorized stepping matrix across columns. Columns are
// arbitrary non-negative profiles; no renormalization is applied.
void evolve_columns(const SdeModel& model, const Grid1D& grid,
                    std::vector<std::vector<double>>& columns, double t_end, double dt,
                    Scheme scheme = Scheme::crank_nicolson);

}  // namespace fokker
