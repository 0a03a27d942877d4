#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fokker {

namespace {

// Bernstein weight w / (e^w - 1), the building block of the Chang-Cooper
// face coefficients; stable for small and large |w|.
double bernstein(double w) {
  if (std::abs(w) < 1e-10) return 1.0 - 0.5 * w + w * w / 12.0;
  if (w > 700.0) return 0.0;
  return w / std::expm1(w);
}

// Tridiagonal flux operator L with zero-flux boundaries: dp/dt = L p.
// Column sums vanish, so h * sum(p) is conserved exactly by any
// consistent theta scheme built on L.
struct FluxOperator {
  std::vector<double> lower, diag, upper;

  void build(const SdeModel& model, const Grid1D& grid, double t) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    lower.assign(n, 0.0);
    diag.assign(n, 0.0);
    upper.assign(n, 0.0);
    // Face flux F = cl * p_left + cr * p_right on each interior face.
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double xl = grid.node(j), xr = grid.node(j + 1);
      const double xf = 0.5 * (xl + xr);
      const double diffusion = 0.5 * model.weight(xf, t);
      require(diffusion > 0.0, ErrorCode::domain, "flux operator: weight must stay positive");
      const double bx = (model.weight(xr, t) - model.weight(xl, t)) / h;
      const double adv = model.drift(xf, t) - 0.5 * bx;
      const double w = adv * h / diffusion;
      const double cl = (diffusion / h) * (bernstein(w) + w);  // w e^w / (e^w - 1)
      const double cr = -(diffusion / h) * bernstein(w);
      require(std::isfinite(cl) && std::isfinite(cr), ErrorCode::solver,
              "flux operator: non-finite coefficient (x=" + format_double(xf) + ")");
      // Row j loses F through its right face; row j+1 gains it.
      diag[j] -= cl / h;
      upper[j] -= cr / h;
      lower[j + 1] += cl / h;
      diag[j + 1] += cr / h;
    }
  }

  double max_abs_diag() const {
    double m = 0.0;
    for (double d : diag) m = std::max(m, std::abs(d));
    return m;
  }
};

// Thomas factorization of M = I - c * L; M is columnwise diagonally
// dominant, so elimination without pivoting is stable.
struct TridiagFactor {
  std::vector<double> cp, inv;

  void factor(const FluxOperator& L, double c) {
    const std::size_t n = L.diag.size();
    cp.resize(n);
    inv.resize(n);
    double denom = 1.0 - c * L.diag[0];
    require(std::abs(denom) > 1e-300, ErrorCode::solver, "tridiagonal solve: zero pivot");
    inv[0] = 1.0 / denom;
    cp[0] = -c * L.upper[0] * inv[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double li = -c * L.lower[i];
      denom = 1.0 - c * L.diag[i] - li * cp[i - 1];
      require(std::abs(denom) > 1e-300, ErrorCode::solver, "tridiagonal solve: zero pivot");
      inv[i] = 1.0 / denom;
      if (i + 1 < n) cp[i] = -c * L.upper[i] * inv[i];
    }
  }

  void solve(const FluxOperator& L, double c, std::vector<double>& rhs) const {
    const std::size_t n = rhs.size();
    rhs[0] *= inv[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] + c * L.lower[i] * rhs[i - 1]) * inv[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
  }
};

void apply_explicit(const FluxOperator& L, double c, const std::vector<double>& p,
                    std::vector<double>& out) {
  const std::size_t n = p.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = p[i] + c * L.diag[i] * p[i];
    if (i > 0) v += c * L.lower[i] * p[i - 1];
    if (i + 1 < n) v += c * L.upper[i] * p[i + 1];
    out[i] = v;
  }
}

class Stepper {
public:
  Stepper(const SdeModel& model, const Grid1D& grid, Scheme scheme)
      : model_(model), grid_(grid), scheme_(scheme) {}

  double theta() const { return scheme_ == Scheme::implicit_euler ? 1.0 : 0.5; }

  double stable_dt(double t) {
    if (scheme_ == Scheme::implicit_euler) return std::numeric_limits<double>::infinity();
    Lold_.build(model_, grid_, t);
    const double m = Lold_.max_abs_diag();
    return m > 0.0 ? 1.0 / ((1.0 - theta()) * m) : std::numeric_limits<double>::infinity();
  }

  void check_dt(double t, double dt) {
    require(dt > 0.0, ErrorCode::domain, "step size must be positive");
    const double lim = stable_dt(t);
    require(dt <= lim * (1.0 + 1e-12), ErrorCode::domain,
            "step size " + format_double(dt) + " exceeds the scheme's positivity bound " +
                format_double(lim));
  }

  // Advances all columns from t to t + dt in place. Time-homogeneous
  // models reuse the operator and its factorization while dt is constant.
  void advance(std::vector<std::vector<double>>& columns, double t, double dt,
               std::size_t step_index) {
    const double th = theta();
    if (!(model_.time_homogeneous && prepared_ && dt == prepared_dt_)) {
      try {
        Lold_.build(model_, grid_, t);
        if (model_.time_homogeneous)
          Lnew_ = Lold_;
        else
          Lnew_.build(model_, grid_, t + dt);
      } catch (const Error& e) {
        fail(ErrorCode::solver,
             std::string(e.what()) + " at step " + std::to_string(step_index));
      }
      factor_.factor(Lnew_, dt * th);
      prepared_ = true;
      prepared_dt_ = dt;
    }
    for (auto& p : columns) {
      if (th < 1.0)
        apply_explicit(Lold_, dt * (1.0 - th), p, rhs_);
      else
        rhs_ = p;
      factor_.solve(Lnew_, dt * th, rhs_);
      for (std::size_t i = 0; i < rhs_.size(); ++i) {
        double v = rhs_[i];
        if (!std::isfinite(v))
          fail(ErrorCode::solver, "solver produced a non-finite value at step " +
                                      std::to_string(step_index) + " (t=" + format_double(t) + ")");
        if (v < -1e-12)
          fail(ErrorCode::positivity, "solver produced a negative density " + format_double(v) +
                                          " at step " + std::to_string(step_index));
        rhs_[i] = v < 0.0 ? 0.0 : v;
      }
      p.swap(rhs_);
    }
  }

private:
  const SdeModel& model_;
  const Grid1D& grid_;
  Scheme scheme_;
  FluxOperator Lold_, Lnew_;
  TridiagFactor factor_;
  std::vector<double> rhs_;
  bool prepared_ = false;
  double prepared_dt_ = -1.0;
};

double cell_mass(const std::vector<double>& p, const Grid1D& grid) {
  double s = 0.0;
  for (double v : p) s += v;
  return s * grid.spacing();
}

}  // namespace

const DensityField& Trajectory::at_time(double t, double tol) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= tol) return fields[i];
  fail(ErrorCode::invalid_argument, "trajectory has no snapshot at t=" + format_double(t));
}

double Trajectory::max_mass_drift() const {
  if (mass_log.empty()) return 0.0;
  double drift = 0.0;
  for (double m : mass_log) drift = std::max(drift, std::abs(m - mass_log.front()));
  return drift;
}

std::string Trajectory::to_csv() const {
  std::string out = "t,x,p\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& f = fields[k];
    for (std::size_t i = 0; i < f.size(); ++i)
      out += format_double(times[k]) + "," + format_double(f.grid().node(i)) + "," +
             format_double(f.value(i)) + "\n";
  }
  return out;
}

double stable_dt(const SdeModel& model, const Grid1D& grid, double t, Scheme scheme) {
  return Stepper(model, grid, scheme).stable_dt(t);
}

double default_dt(const SdeModel& model, const Grid1D& grid, double t) {
  double bmax = 0.0;
  for (double x : grid.nodes()) bmax = std::max(bmax, model.weight(x, t));
  require(bmax > 0.0, ErrorCode::domain, "default_dt: weight vanished on the whole grid");
  return grid.spacing() * grid.spacing() / bmax;
}

DensityField step(const SdeModel& model, const DensityField& p, double t, double dt,
                  Scheme scheme) {
  require(p.is_normalized(), ErrorCode::invalid_argument, "step: density must be normalized");
  Stepper stepper(model, p.grid(), scheme);
  stepper.check_dt(t, dt);
  std::vector<std::vector<double>> cols{std::vector<double>(p.values().begin(), p.values().end())};
  stepper.advance(cols, t, dt, 0);
  return DensityField(p.grid(), std::move(cols[0]), p.support());
}

Trajectory solve(const SolveSpec& spec) {
  require(spec.model != nullptr, ErrorCode::invalid_argument, "solve: missing model");
  require(spec.t_end >= 0.0, ErrorCode::domain, "solve: t_end must be non-negative");
  require(spec.initial.is_normalized(), ErrorCode::invalid_argument,
          "solve: initial density must be normalized");
  const Grid1D& grid = spec.initial.grid();
  validate_coefficients(*spec.model, grid, std::array{0.0});

  // Stops: snapshot times plus start and end, deduplicated.
  std::vector<double> stops = spec.snapshot_times;
  for (double s : stops)
    require(s >= 0.0 && s <= spec.t_end + 1e-12, ErrorCode::invalid_argument,
            "solve: snapshot time " + format_double(s) + " outside [0, t_end]");
  stops.push_back(0.0);
  stops.push_back(spec.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              stops.end());

  double dt = spec.dt;
  if (dt <= 0.0) dt = default_dt(*spec.model, grid, 0.0);

  Stepper stepper(*spec.model, grid, spec.scheme);
  stepper.check_dt(0.0, std::min(dt, spec.t_end > 0.0 ? spec.t_end : dt));

  Trajectory traj;
  std::vector<std::vector<double>> cols{
      std::vector<double>(spec.initial.values().begin(), spec.initial.values().end())};
  traj.mass_log.push_back(cell_mass(cols[0], grid));

  double t = 0.0;
  std::size_t step_index = 0;
  for (double stop : stops) {
    while (t < stop - 1e-13) {
      const double dt_step = std::min(dt, stop - t);
      stepper.advance(cols, t, dt_step, step_index++);
      t += dt_step;
      traj.mass_log.push_back(cell_mass(cols[0], grid));
    }
    t = stop;
    traj.times.push_back(stop);
    traj.fields.push_back(
        normalize(DensityField(grid, cols[0], spec.initial.support())));
  }
  return traj;
}

void evolve_columns(const SdeModel& model, const Grid1D& grid,
                    std::vector<std::vector<double>>& columns, double t_end, double dt,
                    Scheme scheme) {
  require(t_end > 0.0, ErrorCode::domain, "evolve_columns: t_end must be positive");
  require(dt > 0.0, ErrorCode::domain, "evolve_columns: dt must be positive");
  for (const auto& c : columns)
    require(c.size() == grid.size(), ErrorCode::invalid_argument,
            "evolve_columns: column size mismatch");
  Stepper stepper(model, grid, scheme);
  stepper.check_dt(0.0, std::min(dt, t_end));
  double t = 0.0;
  std::size_t step_index = 0;
  while (t < t_end - 1e-13) {
    const double dt_step = std::min(dt, t_end - t);
    stepper.advance(columns, t, dt_step, step_index++);
    t += dt_step;
  }
}

}  // namespace fokker
