#ifndef TAXIS_INTEGRATOR_HPP
#define TAXIS_INTEGRATOR_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "taxis/grid.hpp"
#include "taxis/linear_solvers.hpp"
#include "taxis/models.hpp"
#include "taxis/operators.hpp"

namespace taxis {

inline constexpr double kBlowupThreshold = 1e6;

struct TimeSpec {
  double t_end = 1.0;
  double dt_max = 1e-2;
  double cfl_adv = 0.5;
  int snapshot_stride = 10;
  // When set, every step uses this dt (the last one is shortened to land on
  // t_end). Used to give several runs an identical step sequence.
  std::optional<double> fixed_dt;
  // Keep the full state after every step (needed for sup-in-time errors
  // between two trajectories).
  bool record_history = false;

  void validate() const {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
    if (!(dt_max > 0.0)) throw ConfigError("dt_max must be > 0");
    if (!(cfl_adv > 0.0 && cfl_adv <= 1.0)) throw ConfigError("cfl_adv must lie in (0,1]");
    if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
    if (fixed_dt && !(*fixed_dt > 0.0)) throw ConfigError("fixed dt must be > 0");
  }

  bool operator==(const TimeSpec&) const = default;
};

// Extra source terms added to the explicit part of each equation, evaluated
// at the old time level. Used for manufactured solutions.
template <typename Scalar>
using Forcing = std::function<Rhs<Scalar>(const GridSpec&, double t)>;

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double max_velocity = 0.0;
  // Per field u, v, w (w entries are zero for two-field states).
  std::array<double, 3> min{};
  std::array<double, 3> max{};
  std::array<double, 3> mass{};     // integral of the field
  std::array<double, 3> l1{};       // integral of |field|
  std::array<double, 3> l2_sq{};    // integral of field^2
  double grad_v_sq = 0.0;           // ||grad v||_2^2
  double grad_gap = 0.0;            // ||grad w - grad v||_2 (0 for two-field states)
  bool cfl_exceeded = false;        // fixed dt larger than the adaptive bound
};

template <typename Scalar = double>
struct Trajectory {
  Variant variant = Variant::Indirect;
  std::vector<State<Scalar>> snapshots;
  std::vector<StepDiagnostics> diagnostics;  // one per time level, including t = 0
  std::vector<State<Scalar>> history;        // filled when record_history is set

  const State<Scalar>& final_state() const { return snapshots.back(); }
};

template <typename Scalar>
StepDiagnostics diagnose(const State<Scalar>& s, int step, double dt, double chi) {
  StepDiagnostics d;
  d.step = step;
  d.t = s.time;
  d.dt = dt;
  const Field<Scalar>& signal = s.w ? *s.w : s.v;
  d.max_velocity = static_cast<double>(max_face_velocity(signal, chi));
  auto fill = [&](int k, const Field<Scalar>& f) {
    d.min[k] = static_cast<double>(f.min());
    d.max[k] = static_cast<double>(f.max());
    d.mass[k] = static_cast<double>(integrate(f));
    d.l1[k] = static_cast<double>(norm_lp(f, Norm::L1));
    const double l2 = static_cast<double>(norm_lp(f, Norm::L2));
    d.l2_sq[k] = l2 * l2;
  };
  fill(0, s.u);
  fill(1, s.v);
  if (s.w) fill(2, *s.w);
  d.grad_v_sq = static_cast<double>(grad_sq_norm(s.v));
  if (s.w) d.grad_gap = std::sqrt(static_cast<double>(grad_sq_norm(*s.w - s.v)));
  return d;
}

// Step bound from explicit advection and explicit kinetics:
//   min(dt_max, cfl h / (dim max|chi grad w|), cfl / max|d(kinetics)/d(state)|)
// `signal` is w for the relaxation model and v for the limit model.
template <typename Scalar>
double cfl_dt(const Field<Scalar>& first, const Field<Scalar>& v, const Field<Scalar>& signal,
              const ModelParams& params, const TimeSpec& ts) {
  const GridSpec& g = first.grid();
  double dt = ts.dt_max;
  const double vmax = static_cast<double>(max_face_velocity(signal, chi_of(params)));
  if (vmax > 0.0) dt = std::min(dt, ts.cfl_adv * g.min_spacing() / (g.dim() * vmax));
  const double rate = std::visit(
      [&](const auto& p) {
        Scalar r(0);
        for (std::size_t k = 0; k < first.size(); ++k)
          r = std::max(r, kinetics_rate(p, first[k], v[k]));
        return static_cast<double>(r);
      },
      params);
  if (rate > 0.0) dt = std::min(dt, ts.cfl_adv / rate);
  return dt;
}

template <typename Scalar>
double cfl_dt(const State<Scalar>& s, const ModelParams& params, const TimeSpec& ts) {
  return cfl_dt(s.u, s.v, s.w ? *s.w : s.v, params, ts);
}

// Linearly implicit Euler step.
//   (I - dt d_u L) u+ = u + dt (taxis(u, w) + f_u(u, v))
//   (I - dt d_v L) v+ = v + dt f_v(u, v)
//   ((1/dt + 1/eps) I - L) w+ = w/dt + v+/eps
// Diffusion and relaxation are implicit so the step is stable uniformly in
// eps. The w update reads the new v, which makes the eps -> 0 limit of this
// scheme coincide with the same scheme applied to the limit model.
template <typename Scalar = double>
class ImexStepper {
 public:
  // `reactions = false` drops the kinetics (pure diffusion/taxis/relaxation).
  ImexStepper(GridSpec grid, ModelParams params, Forcing<Scalar> forcing = {}, bool reactions = true)
      : grid_(std::move(grid)), params_(std::move(params)), forcing_(std::move(forcing)),
        reactions_(reactions) {
    validate(params_);
  }

  const ModelParams& params() const { return params_; }

  State<Scalar> step(const State<Scalar>& s, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw SolverError("step size must be positive");
    if (!(s.grid() == grid_)) throw DomainError("state grid differs from stepper grid");
    const Scalar sdt = static_cast<Scalar>(dt);
    const Field<Scalar>& signal = s.w ? *s.w : s.v;

    Vector rhs_u = s.u.values();
    Vector rhs_v = s.v.values();
    if (reactions_) {
      auto [ru, rv] = std::visit([&](const auto& p) { return reaction(s.u, s.v, p); }, params_);
      rhs_u += sdt * ru.values();
      rhs_v += sdt * rv.values();
    }
    const double chi = chi_of(params_);
    if (chi != 0.0)
      rhs_u += sdt * taxis_divergence(s.u, signal, chi, taxis_sign_of(params_)).values();
    std::optional<Rhs<Scalar>> force;
    if (forcing_) {
      force = forcing_(grid_, s.time);
      rhs_u += sdt * force->u.values();
      rhs_v += sdt * force->v.values();
    }

    const double d_first = std::visit([](const auto& p) { return p.d_first(); }, params_);
    const double d_v = std::visit([](const auto& p) { return p.d_v; }, params_);
    Vector u_new = solver(1.0, dt * d_first).solve(rhs_u);
    Vector v_new = solver(1.0, dt * d_v).solve(rhs_v);
    check_blowup(u_new, "u");
    check_blowup(v_new, "v");

    std::optional<Field<Scalar>> w_next;
    if (s.w) {
      const double eps = epsilon_of(params_);
      const Scalar inv_dt = Scalar(1) / sdt;
      const Scalar inv_eps = Scalar(1) / static_cast<Scalar>(eps);
      Vector rhs_w = inv_dt * s.w->values() + inv_eps * v_new;
      if (force && force->w) rhs_w += force->w->values();
      Vector w_new = solver(1.0 / dt + 1.0 / eps, 1.0).solve(rhs_w);
      check_blowup(w_new, "w");
      w_next = Field<Scalar>(grid_, std::move(w_new));
    }
    return State<Scalar>(Field<Scalar>(grid_, std::move(u_new)), Field<Scalar>(grid_, std::move(v_new)),
                         std::move(w_next), s.time + dt);
  }

 private:
  using Vector = typename Field<Scalar>::Vector;

  const ShiftedLaplacianSolver<Scalar>& solver(double a, double b) {
    for (const auto& s : cache_)
      if (s.shift() == static_cast<Scalar>(a) && s.diffusion() == static_cast<Scalar>(b)) return s;
    // dt changes every step under adaptive control; keep the cache small.
    if (cache_.size() >= 6) cache_.erase(cache_.begin());
    cache_.emplace_back(grid_, static_cast<Scalar>(a), static_cast<Scalar>(b));
    return cache_.back();
  }

  static void check_blowup(const Vector& x, const char* name) {
    if (!x.allFinite()) throw BlowupError(std::string("non-finite values in ") + name);
    if (x.size() > 0 && x.cwiseAbs().maxCoeff() > Scalar(kBlowupThreshold))
      throw BlowupError(std::string("field ") + name + " exceeded blow-up threshold");
  }

  GridSpec grid_;
  ModelParams params_;
  Forcing<Scalar> forcing_;
  bool reactions_ = true;
  std::vector<ShiftedLaplacianSolver<Scalar>> cache_;
};

template <typename Scalar>
State<Scalar> step_imex(const State<Scalar>& s, double dt, const ModelParams& params) {
  ImexStepper<Scalar> stepper(s.grid(), params);
  return stepper.step(s, dt);
}

namespace detail {

// Re-raises library errors with `label` appended, keeping the error type.
template <typename Fn>
auto with_context(const std::string& label, Fn&& fn) {
  auto ctx = [&label](const Error& e) { return std::string(e.what()) + " (" + label + ")"; };
  try {
    return fn();
  } catch (const SolverError& e) {
    throw SolverError(ctx(e));
  } catch (const BlowupError& e) {
    throw BlowupError(ctx(e));
  } catch (const DomainError& e) {
    throw DomainError(ctx(e));
  } catch (const ConfigError& e) {
    throw ConfigError(ctx(e));
  }
}

inline std::string format_label(const char* key, double value) {
  std::ostringstream os;
  os.precision(17);
  os << key << "=" << value;
  return os.str();
}

}  // namespace detail

// Called after every accepted time level (including t = 0).
template <typename Scalar>
using StepObserver = std::function<void(const State<Scalar>&, const StepDiagnostics&)>;

// Integrates from the initial data to ts.t_end. Snapshots are taken every
// snapshot_stride steps and always at the final time.
template <typename Scalar = double>
Trajectory<Scalar> solve(const InitialData<Scalar>& ic, const ModelParams& params,
                         const TimeSpec& ts, Variant variant, Forcing<Scalar> forcing = {},
                         StepObserver<Scalar> observer = {}) {
  ts.validate();
  validate(params);
  Trajectory<Scalar> traj;
  traj.variant = variant;
  const double chi = chi_of(params);

  State<Scalar> state = initial_state(ic, variant);
  auto record = [&](const State<Scalar>& s, int step, double dt, bool snapshot, bool cfl_exceeded) {
    StepDiagnostics d = diagnose(s, step, dt, chi);
    d.cfl_exceeded = cfl_exceeded;
    traj.diagnostics.push_back(d);
    if (snapshot) traj.snapshots.push_back(s);
    if (ts.record_history) traj.history.push_back(s);
    if (observer) observer(s, d);
  };
  record(state, 0, 0.0, true, false);
  if (ts.t_end == 0.0) return traj;

  ImexStepper<Scalar> stepper(state.grid(), params, std::move(forcing));
  int step = 0;
  // Remaining intervals shorter than this are merged into the current step.
  const double merge_tol = 1e-10 * ts.t_end;
  while (state.time < ts.t_end) {
    const double adaptive = cfl_dt(state, params, ts);
    double dt = ts.fixed_dt ? *ts.fixed_dt : adaptive;
    const bool cfl_exceeded = ts.fixed_dt && *ts.fixed_dt > adaptive * (1.0 + 1e-12);
    bool last = false;
    if (state.time + dt >= ts.t_end - merge_tol) {
      dt = ts.t_end - state.time;
      last = true;
    }
    ++step;
    State<Scalar> next = detail::with_context(detail::format_label("t", state.time),
                                                   [&] { return stepper.step(state, dt); });
    if (last) next.time = ts.t_end;
    state = std::move(next);
    record(state, step, dt, last || step % ts.snapshot_stride == 0, cfl_exceeded);
  }
  return traj;
}

// Number of equal steps of size at most dt_bound covering [0, t_end] and
// the resulting uniform step.
inline double uniform_step(double t_end, double dt_bound) {
  if (t_end <= 0.0) return dt_bound;
  const double steps = std::ceil(t_end / dt_bound - 1e-9);
  return t_end / std::max(1.0, steps);
}

}  // namespace taxis

#endif  // TAXIS_INTEGRATOR_HPP
