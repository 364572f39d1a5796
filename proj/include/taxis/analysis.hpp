#ifndef TAXIS_ANALYSIS_HPP
#define TAXIS_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "taxis/grid.hpp"
#include "taxis/integrator.hpp"
#include "taxis/models.hpp"

namespace taxis {

// ---------------------------------------------------------------------------
// Error norms between a relaxation trajectory and a limit trajectory

// U = u - u_eps, V = v - v_eps, G = grad v - grad w_eps.
struct NormReport {
  double sup_t_L2_u = 0.0;                     // sup_t ||U||_2
  double L2T_H1_u = 0.0;                       // (int_0^T ||U||_2^2 + ||grad U||_2^2 dt)^(1/2)
  double sup_t_H1_v = 0.0;                     // sup_t ||V||_{1,2}
  double sup_t_L2_grad_v_minus_grad_w = 0.0;   // sup_t ||G||_2
  double T = 0.0;
  double eps = 0.0;
};

inline constexpr double kTimeAlignTol = 1e-12;

// Streams pairs of time levels into a NormReport. The space-time channel
// uses the right-endpoint rule with the step that produced each level.
template <typename Scalar = double>
class NormAccumulator {
 public:
  explicit NormAccumulator(double eps = 0.0) { report_.eps = eps; }

  void add(const State<Scalar>& a, const State<Scalar>& b, double dt) {
    using std::sqrt;
    if (!(a.grid() == b.grid())) throw AlignmentError("trajectories live on different grids");
    if (std::abs(a.time - b.time) > kTimeAlignTol * std::max(1.0, std::abs(a.time)))
      throw AlignmentError("trajectory time levels differ");
    const Field<Scalar> du = b.u - a.u;
    const Field<Scalar> dv = b.v - a.v;
    const double l2u = static_cast<double>(norm_lp(du, Norm::L2));
    const double gu = static_cast<double>(grad_sq_norm(du));
    const double h1v = static_cast<double>(h1_norm(dv));
    // grad of the limit v against grad of the relaxed signal w (or v).
    const Field<Scalar>& sig_a = a.w ? *a.w : a.v;
    const Field<Scalar>& sig_b = b.w ? *b.w : b.v;
    const double g = std::sqrt(static_cast<double>(grad_sq_norm(b.w ? sig_b - a.v : b.v - sig_a)));
    report_.sup_t_L2_u = std::max(report_.sup_t_L2_u, l2u);
    report_.sup_t_H1_v = std::max(report_.sup_t_H1_v, h1v);
    report_.sup_t_L2_grad_v_minus_grad_w = std::max(report_.sup_t_L2_grad_v_minus_grad_w, g);
    space_time_sq_ += dt * (l2u * l2u + gu);
    report_.T = a.time;
  }

  NormReport report() const {
    NormReport r = report_;
    r.L2T_H1_u = std::sqrt(space_time_sq_);
    return r;
  }

 private:
  NormReport report_;
  double space_time_sq_ = 0.0;
};

// Compares two trajectories level by level. Uses the per-step history when
// both carry one, else the snapshots. The first argument is the relaxation
// run; its w (if present) is compared against the limit v.
template <typename Scalar>
NormReport error_norms(const Trajectory<Scalar>& traj_eps, const Trajectory<Scalar>& traj_lim,
                       double eps = 0.0) {
  const bool full = !traj_eps.history.empty() && !traj_lim.history.empty();
  const auto& a = full ? traj_eps.history : traj_eps.snapshots;
  const auto& b = full ? traj_lim.history : traj_lim.snapshots;
  if (a.size() != b.size()) throw AlignmentError("trajectories have different step counts");
  NormAccumulator<Scalar> acc(eps);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double dt = k == 0 ? 0.0 : a[k].time - a[k - 1].time;
    acc.add(a[k], b[k], dt);
  }
  return acc.report();
}

// ---------------------------------------------------------------------------
// Invariant monitors

struct Violation {
  double t = 0.0;
  std::string check;
  double bound = 0.0;
  double observed = 0.0;
};

struct BoundCheck {
  std::string name;
  double bound = 0.0;
  double observed = 0.0;  // worst observed value (sup over steps or windows)
  bool checked = false;
};

struct InvariantReport {
  std::array<double, 3> min_values{};
  std::vector<BoundCheck> checks;
  // (t, ||grad w - grad v||_2) at every step; empty for two-field runs.
  std::vector<std::pair<double, double>> grad_gap_curve;
  std::vector<Violation> violations;
  // Computable stand-ins used in place of the existence constants.
  std::vector<std::string> stand_ins;
  int cfl_exceeded_steps = 0;
  int fields = 2;

  bool passed() const { return violations.empty(); }
  const BoundCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline constexpr double kMonitorTol = 1e-8;
inline constexpr double kMonitorPositivityTol = 1e-10;

// Evaluates the a priori bounds on a discrete trajectory from its per-step
// diagnostics:
//  - nonnegativity of every field,
//  - L1 bounds from integrating the equations (logistic comparison on the
//    total mass; for predator-prey on int z + b int v),
//  - sup ||v||_inf <= max(1, ||v0||_inf),
//  - ||w(t)||_inf <= v_inf + (||w0||_inf - v_inf) * decay(t),
//  - space-time L2 of u and v on unit-length windows.
template <typename Scalar>
InvariantReport monitor_invariants(const Trajectory<Scalar>& traj, const ModelParams& params,
                                   double tol = kMonitorTol,
                                   double positivity_tol = kMonitorPositivityTol) {
  InvariantReport rep;
  const auto& diag = traj.diagnostics;
  if (diag.empty()) return rep;
  const bool triple = traj.snapshots.front().is_triple();
  const double omega = traj.snapshots.front().grid().measure();
  const StepDiagnostics& d0 = diag.front();
  const double eps = epsilon_of(params);

  rep.min_values = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    triple ? std::numeric_limits<double>::infinity() : 0.0};
  const int nfields = triple ? 3 : 2;
  rep.fields = nfields;
  const char* names[3] = {"u", "v", "w"};

  auto check_at = [&](BoundCheck& c, double t, double observed) {
    c.checked = true;
    c.observed = std::max(c.observed, observed);
    if (observed > c.bound + tol) rep.violations.push_back({t, c.name, c.bound, observed});
  };

  // L1 and window bounds.
  const double v_l1 = std::max(omega, d0.l1[1]);
  const double v_inf = std::max(1.0, std::max(std::abs(d0.min[1]), d0.max[1]));
  double first_l1 = 0.0;
  double first_window = 0.0;
  double v_window = 0.0;
  std::optional<BoundCheck> combined;
  if (const auto* p = std::get_if<CompetitionParams>(&params)) {
    first_l1 = std::max(omega, d0.l1[0]);
    first_window = first_l1 * (1.0 + 1.0 / p->mu1);
    v_window = v_l1 * (1.0 + 1.0 / p->mu2);
    rep.stand_ins.push_back("u1_bar := max(|Omega|, ||u0||_1)");
  } else {
    const auto& q = std::get<PredPreyParams>(params);
    const double k = omega / 4.0 *
                     (std::pow(std::max(q.mu1 + 1.0, 0.0), 2) / q.mu1_prime +
                      q.b * std::pow(q.mu2 + 1.0, 2) / q.mu2);
    const double y0 = d0.l1[0] + q.b * d0.l1[1];
    first_l1 = std::max(y0, k);
    combined = BoundCheck{"L1(z)+b*L1(v)", first_l1, 0.0, false};
    const double growth = std::max(q.mu1 + q.b * q.response.growth_bound() * v_inf, 0.0);
    first_window = first_l1 * (1.0 + growth) / q.mu1_prime;
    v_window = v_l1 * (1.0 + 1.0 / q.mu2);
    rep.stand_ins.push_back("z1_bar := max(||z0||_1 + b||v0||_1, |Omega|/4((mu1+1)_+^2/mu1' + b(mu2+1)^2/mu2))");
  }
  rep.stand_ins.push_back("v1_bar := max(|Omega|, ||v0||_1)");
  rep.stand_ins.push_back("v_inf_bar := max(1, ||v0||_inf)");

  BoundCheck l1_checks[3] = {{std::string("L1(") + names[0] + ")", first_l1, 0.0, false},
                             {"L1(v)", v_l1, 0.0, false},
                             {"L1(w)", std::max(d0.l1[2], v_l1), 0.0, false}};
  BoundCheck vinf{"Linf(v)", v_inf, 0.0, false};
  BoundCheck winf{"Linf(w)-relaxation", 0.0, 0.0, false};
  double worst_w_excess = -std::numeric_limits<double>::infinity();
  const double w0_inf = triple ? std::max(std::abs(d0.min[2]), d0.max[2]) : 0.0;
  double discrete_decay = 1.0;

  for (const auto& d : diag) {
    for (int f = 0; f < nfields; ++f) {
      rep.min_values[f] = std::min(rep.min_values[f], d.min[f]);
      if (d.min[f] < -positivity_tol)
        rep.violations.push_back({d.t, std::string("positivity(") + names[f] + ")", -positivity_tol, d.min[f]});
    }
    if (d.cfl_exceeded) ++rep.cfl_exceeded_steps;
    check_at(l1_checks[0], d.t, d.l1[0]);
    check_at(l1_checks[1], d.t, d.l1[1]);
    if (combined) {
      const auto& q = std::get<PredPreyParams>(params);
      check_at(*combined, d.t, d.l1[0] + q.b * d.l1[1]);
    }
    check_at(vinf, d.t, std::max(std::abs(d.min[1]), d.max[1]));
    if (triple) {
      check_at(l1_checks[2], d.t, d.l1[2]);
      if (d.dt > 0.0) discrete_decay /= 1.0 + d.dt / eps;
      const double amp = w0_inf - v_inf;
      const double bound = v_inf + amp * std::max(std::exp(-d.t / eps), discrete_decay);
      const double observed = std::max(std::abs(d.min[2]), d.max[2]);
      winf.checked = true;
      if (observed - bound > worst_w_excess) {
        worst_w_excess = observed - bound;
        winf.bound = bound;
        winf.observed = observed;
      }
      if (observed > bound + tol) rep.violations.push_back({d.t, winf.name, bound, observed});
      rep.grad_gap_curve.emplace_back(d.t, d.grad_gap);
    }
  }

  // Space-time L2 over windows of unit length (or the whole run if shorter).
  std::vector<double> q_first(diag.size(), 0.0), q_v(diag.size(), 0.0);
  for (std::size_t k = 1; k < diag.size(); ++k) {
    q_first[k] = q_first[k - 1] + diag[k].dt * diag[k].l2_sq[0];
    q_v[k] = q_v[k - 1] + diag[k].dt * diag[k].l2_sq[1];
  }
  BoundCheck win_first{std::string("window L2(") + names[0] + ")", first_window, 0.0, false};
  BoundCheck win_v{"window L2(v)", v_window, 0.0, false};
  const double t_final = diag.back().t;
  std::size_t e = 0;
  for (std::size_t s = 0; s < diag.size(); ++s) {
    if (s > 0 && diag[s].t + 1.0 > t_final + 1e-12) break;
    while (e + 1 < diag.size() && diag[e + 1].t <= diag[s].t + 1.0 + 1e-12) ++e;
    check_at(win_first, diag[s].t, q_first[e] - q_first[s]);
    check_at(win_v, diag[s].t, q_v[e] - q_v[s]);
  }

  rep.checks.push_back(l1_checks[0]);
  rep.checks.push_back(l1_checks[1]);
  if (triple) rep.checks.push_back(l1_checks[2]);
  if (combined) rep.checks.push_back(*combined);
  rep.checks.push_back(vinf);
  if (triple) rep.checks.push_back(winf);
  rep.checks.push_back(win_first);
  rep.checks.push_back(win_v);
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence order fitting

// Least-squares slope of log(error) against log(eps).
inline double fit_order(const std::vector<std::pair<double, double>>& rows) {
  if (rows.size() < 3) throw FitError("order fit needs at least 3 points");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!(rows[k].first > 0.0)) throw FitError("order fit needs positive eps");
    if (!(rows[k].second > 0.0)) throw FitError("order fit hit a zero error (below floor)");
    if (k > 0 && !(rows[k].first < rows[k - 1].first))
      throw FitError("order fit needs strictly decreasing eps");
  }
  const double n = static_cast<double>(rows.size());
  double sx = 0, sy = 0;
  for (const auto& [e, err] : rows) {
    sx += std::log(e);
    sy += std::log(err);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [e, err] : rows) {
    const double dx = std::log(e) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  return sxy / sxx;
}

inline constexpr double kErrorFloor = 1e-8;
inline constexpr double kSuperconvergentOrder = 1.4;

struct FitResult {
  std::string channel;
  std::optional<double> order;
  std::string status;  // ok | below_floor | superconvergent-inspect
};

inline FitResult fit_channel(std::string channel, const std::vector<std::pair<double, double>>& rows,
                             double floor = kErrorFloor) {
  FitResult r{std::move(channel), std::nullopt, "ok"};
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, row.second);
  if (worst <= floor) {
    r.status = "below_floor";
    return r;
  }
  r.order = fit_order(rows);
  if (*r.order > kSuperconvergentOrder) r.status = "superconvergent-inspect";
  return r;
}

// ---------------------------------------------------------------------------
// Epsilon sweep

struct SweepSpec {
  ModelParams params;  // eps is overwritten per run
  TimeSpec time;
  std::vector<double> eps_list;
  int threads = 1;
};

struct SweepRow {
  double eps = 0.0;
  NormReport norms;
  double final_grad_gap_sq = 0.0;  // ||grad w_eps - grad v_eps||_2^2 at t = T
  InvariantReport invariants;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // decreasing eps
  std::vector<FitResult> fits;
  InvariantReport limit_invariants;
  double dt = 0.0;
  int steps = 0;

  const FitResult* fit(const std::string& channel) const {
    for (const auto& f : fits)
      if (f.channel == channel) return &f;
    return nullptr;
  }
  bool invariants_passed() const {
    if (!limit_invariants.passed()) return false;
    for (const auto& r : rows)
      if (!r.invariants.passed()) return false;
    return true;
  }
};

inline const char* const kSweepChannels[] = {"sup_t_L2_u", "L2T_H1_u", "sup_t_H1_v",
                                             "sup_t_L2_grad_v_minus_grad_w", "final_grad_gap_sq"};

inline void validate_eps_list(const std::vector<double>& eps) {
  if (eps.size() < 3) throw FitError("eps sweep needs at least 3 values");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0 && eps[k] <= 1.0)) throw ConfigError("eps values must lie in (0,1]");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw FitError("eps sweep values must be strictly decreasing");
  }
}

// Runs the limit model once and the relaxation model for each eps on one
// shared uniform step sequence, then compares them level by level. The
// shared step is the CFL bound at t = 0 of the most restrictive run.
template <typename Scalar = double>
SweepReport epsilon_sweep(const InitialData<Scalar>& ic, const SweepSpec& spec) {
  validate_eps_list(spec.eps_list);
  spec.time.validate();

  TimeSpec ts = spec.time;
  double bound = cfl_dt(initial_state(ic, Variant::Limit), spec.params, ts);
  bound = std::min(bound, cfl_dt(initial_state(ic, Variant::Indirect), spec.params, ts));
  ts.fixed_dt = uniform_step(ts.t_end, bound);

  SweepReport rep;
  rep.dt = *ts.fixed_dt;

  TimeSpec lim_ts = ts;
  lim_ts.record_history = true;
  const ModelParams lim_params = with_epsilon(spec.params, spec.eps_list.front());
  const Trajectory<Scalar> lim = detail::with_context(
      "limit run", [&] { return solve(ic, lim_params, lim_ts, Variant::Limit); });
  rep.steps = static_cast<int>(lim.history.size()) - 1;
  rep.limit_invariants = monitor_invariants(lim, lim_params);

  auto run_one = [&](double eps) {
    const ModelParams p = with_epsilon(spec.params, eps);
    NormAccumulator<Scalar> acc(eps);
    std::size_t k = 0;
    double prev_t = 0.0;
    StepObserver<Scalar> observer = [&](const State<Scalar>& s, const StepDiagnostics&) {
      if (k >= lim.history.size()) throw AlignmentError("relaxation run has more steps than limit run");
      acc.add(s, lim.history[k], k == 0 ? 0.0 : s.time - prev_t);
      prev_t = s.time;
      ++k;
    };
    TimeSpec run_ts = ts;
    run_ts.snapshot_stride = std::numeric_limits<int>::max();
    const Trajectory<Scalar> traj = detail::with_context(
        detail::format_label("eps", eps),
        [&] { return solve(ic, p, run_ts, Variant::Indirect, Forcing<Scalar>{}, observer); });
    if (k != lim.history.size()) throw AlignmentError("relaxation run has fewer steps than limit run");
    SweepRow row;
    row.eps = eps;
    row.norms = acc.report();
    const State<Scalar>& fin = traj.final_state();
    row.final_grad_gap_sq = static_cast<double>(grad_sq_norm(*fin.w - fin.v));
    row.invariants = monitor_invariants(traj, p);
    return row;
  };

  const std::size_t n = spec.eps_list.size();
  rep.rows.resize(n);
  const std::size_t workers = static_cast<std::size_t>(std::max(1, spec.threads));
  for (std::size_t start = 0; start < n; start += workers) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t k = start; k < std::min(n, start + workers); ++k)
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run_one,
                                 spec.eps_list[k]));
    for (std::size_t k = 0; k < batch.size(); ++k) rep.rows[start + k] = batch[k].get();
  }

  auto channel_rows = [&](auto getter) {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rep.rows) out.emplace_back(r.eps, getter(r));
    return out;
  };
  rep.fits.push_back(fit_channel("sup_t_L2_u", channel_rows([](const SweepRow& r) { return r.norms.sup_t_L2_u; })));
  rep.fits.push_back(fit_channel("L2T_H1_u", channel_rows([](const SweepRow& r) { return r.norms.L2T_H1_u; })));
  rep.fits.push_back(fit_channel("sup_t_H1_v", channel_rows([](const SweepRow& r) { return r.norms.sup_t_H1_v; })));
  rep.fits.push_back(fit_channel("sup_t_L2_grad_v_minus_grad_w",
                                 channel_rows([](const SweepRow& r) { return r.norms.sup_t_L2_grad_v_minus_grad_w; })));
  // Squared quantity, so the floor is squared as well.
  rep.fits.push_back(fit_channel("final_grad_gap_sq", channel_rows([](const SweepRow& r) { return r.final_grad_gap_sq; }),
                                 kErrorFloor * kErrorFloor));
  return rep;
}

}  // namespace taxis

#endif  // TAXIS_ANALYSIS_HPP
