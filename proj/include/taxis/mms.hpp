#ifndef TAXIS_MMS_HPP
#define TAXIS_MMS_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "taxis/analysis.hpp"
#include "taxis/integrator.hpp"
#include "taxis/models.hpp"

namespace taxis {

// Manufactured solution u = v = w = base + phi with
//   phi = exp(-t) cos(pi x / Lx) [cos(pi y / Ly) in 2D].
// The forcing is the PDE residual of this solution, computed analytically.
struct ManufacturedSolution {
  double base = 2.0;

  struct Point {
    double phi, phi_t, lap_phi, grad_phi_sq;
  };

  Point at(const GridSpec& g, double x, double y, double t) const {
    const double kx = std::numbers::pi / g.length(0);
    const double ky = g.dim() == 2 ? std::numbers::pi / g.length(1) : 0.0;
    const double decay = std::exp(-t);
    const double cx = std::cos(kx * x), sx = std::sin(kx * x);
    const double cy = g.dim() == 2 ? std::cos(ky * y) : 1.0;
    const double sy = g.dim() == 2 ? std::sin(ky * y) : 0.0;
    const double phi = decay * cx * cy;
    const double gx = -decay * kx * sx * cy;
    const double gy = -decay * ky * cx * sy;
    return {phi, -phi, -(kx * kx + ky * ky) * phi, gx * gx + gy * gy};
  }

  template <typename Scalar>
  Field<Scalar> exact(const GridSpec& g, double t) const {
    if (g.dim() == 1) return Field<Scalar>::sample(g, [&](double x) { return base + at(g, x, 0.0, t).phi; });
    return Field<Scalar>::sample(g, [&](double x, double y) { return base + at(g, x, y, t).phi; });
  }

  template <typename Scalar>
  InitialData<Scalar> initial_data(const GridSpec& g) const {
    Field<Scalar> f = exact<Scalar>(g, 0.0);
    return {f, f, f, true};
  }

  // Residual forcing for the given model; the w component is present for
  // the relaxation variant and is expressed in its divided-by-eps form.
  template <typename Scalar>
  Forcing<Scalar> forcing(const ModelParams& params, Variant variant) const {
    return [params, variant, *this](const GridSpec& g, double t) {
      const int sign = taxis_sign_of(params);
      const double chi = chi_of(params);
      typename Field<Scalar>::Vector fu(static_cast<Eigen::Index>(g.size())),
          fv(static_cast<Eigen::Index>(g.size())), fw(static_cast<Eigen::Index>(g.size()));
      for (int j = 0; j < g.n(1); ++j)
        for (int i = 0; i < g.n(0); ++i) {
          const double x = g.center(0, i);
          const double y = g.dim() == 2 ? g.center(1, j) : 0.0;
          const Point p = at(g, x, y, t);
          const double val = base + p.phi;
          const double taxis = sign * chi * (p.grad_phi_sq + val * p.lap_phi);
          const auto [ru, rv, d1, dv] = std::visit(
              [&](const auto& q) {
                const auto [a, b] = kinetics(q, val, val);
                return std::tuple{a, b, q.d_first(), q.d_v};
              },
              params);
          const auto k = static_cast<Eigen::Index>(g.index(i, j));
          fu[k] = static_cast<Scalar>(p.phi_t - d1 * p.lap_phi - taxis - ru);
          fv[k] = static_cast<Scalar>(p.phi_t - dv * p.lap_phi - rv);
          fw[k] = static_cast<Scalar>(p.phi_t - p.lap_phi);
        }
      Rhs<Scalar> out{Field<Scalar>(g, std::move(fu)), Field<Scalar>(g, std::move(fv)), std::nullopt};
      if (variant == Variant::Indirect) out.w = Field<Scalar>(g, std::move(fw));
      return out;
    };
  }
};

struct MmsLevel {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  double linf_error = 0.0;  // max over fields at t = T
  int cfl_exceeded_steps = 0;
};

struct MmsReport {
  std::vector<MmsLevel> levels;
  double order = 0.0;  // least-squares slope of log error against log h
};

// Runs the manufactured problem on grids n0 * 2^k with dt0 / 2^k and fits
// the combined refinement order.
template <typename Scalar = double>
MmsReport mms_study(const GridSpec& coarse, double dt0, int levels, double t_end,
                    const ModelParams& params, Variant variant) {
  if (levels < 3) throw ConfigError("mms study needs at least 3 levels");
  const ManufacturedSolution ms;
  MmsReport rep;
  std::vector<std::pair<double, double>> rows;
  for (int k = 0; k < levels; ++k) {
    const int scale = 1 << k;
    const GridSpec g(coarse.dim(), {coarse.n(0) * scale, coarse.dim() == 2 ? coarse.n(1) * scale : 1},
                     {coarse.length(0), coarse.length(1)});
    TimeSpec ts;
    ts.t_end = t_end;
    ts.dt_max = dt0 / scale;
    ts.fixed_dt = uniform_step(t_end, dt0 / scale);
    ts.snapshot_stride = std::numeric_limits<int>::max();
    const auto traj = solve(ms.initial_data<Scalar>(g), params, ts, variant, ms.forcing<Scalar>(params, variant));
    const State<Scalar>& fin = traj.final_state();
    const Field<Scalar> ex = ms.exact<Scalar>(g, fin.time);
    double err = std::max(static_cast<double>(norm_lp(fin.u - ex, Norm::Linf)),
                          static_cast<double>(norm_lp(fin.v - ex, Norm::Linf)));
    if (fin.w) err = std::max(err, static_cast<double>(norm_lp(*fin.w - ex, Norm::Linf)));
    int exceeded = 0;
    for (const auto& d : traj.diagnostics) exceeded += d.cfl_exceeded ? 1 : 0;
    rep.levels.push_back({g.n(0), g.h(0), *ts.fixed_dt, err, exceeded});
    rows.emplace_back(g.h(0), err);
  }
  rep.order = fit_order(rows);
  return rep;
}

}  // namespace taxis

#endif  // TAXIS_MMS_HPP
