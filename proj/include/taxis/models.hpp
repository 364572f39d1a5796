#ifndef TAXIS_MODELS_HPP
#define TAXIS_MODELS_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "taxis/grid.hpp"
#include "taxis/operators.hpp"
#include "taxis/params.hpp"

namespace taxis {

enum class Variant { Indirect, Limit };

// Dimensional competition system with an explicit chemical W.
struct DimensionalParams {
  double D_u = 1.0, D_v = 1.0, D_w = 1.0;
  double alpha1 = 1.0, alpha2 = 1.0, alpha3 = 1.0;
  double beta1 = 1.0, beta2 = 1.0, beta3 = 1.0;
  double chi0 = 1.0;
  double alpha = 1.0;   // decay of W
  double lambda = 1.0;  // secretion of W by V
  double L = 1.0;
  double tau = 1.0;
  double W_star = 1.0;

  void validate() const {
    for (double x : {D_u, D_v, D_w, alpha1, alpha2, alpha3, beta1, beta2, beta3, chi0, alpha,
                     lambda, L, tau, W_star})
      if (!(x > 0.0) || !std::isfinite(x))
        throw ConfigError("dimensional parameters must be positive and finite");
  }
};

struct Nondimensionalized {
  CompetitionParams params;
  double alpha_tilde = 0.0;
  double lambda_tilde = 0.0;
  double eps = 0.0;
};

// Scaling x -> x/L, t -> t/tau, u = (alpha2/alpha1) U, v = (beta2/beta1) V,
// w = W / W_star. The relaxation form needs alpha == lambda and yields
// eps = D_w / (alpha L^2) once the chemical diffusivity is normalized to 1.
inline Nondimensionalized nondimensionalize(const DimensionalParams& d) {
  d.validate();
  if (std::abs(d.alpha - d.lambda) > 1e-12 * std::max(d.alpha, d.lambda))
    throw ConfigError("relaxation form requires alpha == lambda");
  Nondimensionalized out;
  const double L2 = d.L * d.L;
  out.params.d_u = d.D_u * d.tau / L2;
  out.params.d_v = d.D_v * d.tau / L2;
  out.params.chi = d.tau * d.chi0 * d.W_star / L2;
  out.params.mu1 = d.alpha1 * d.tau;
  out.params.mu2 = d.beta1 * d.tau;
  out.params.a1 = d.alpha3 * d.beta1 / (d.beta2 * d.alpha1);
  out.params.a2 = d.beta3 * d.alpha1 / (d.alpha2 * d.beta1);
  out.alpha_tilde = d.alpha * d.tau;
  out.lambda_tilde = d.lambda * d.tau;
  out.eps = d.D_w / (d.alpha * L2);
  if (!(out.eps > 0.0 && out.eps <= 1.0))
    throw ConfigError("nondimensional eps must lie in (0,1]");
  out.params.eps = out.eps;
  return out;
}

// ---------------------------------------------------------------------------
// Constant equilibria

struct Equilibrium {
  double first = 0.0;
  double v = 0.0;
};

// u* = (1 - a1)/(1 - a1 a2), v* = (1 - a2)/(1 - a1 a2); requires a1, a2 < 1.
inline Equilibrium coexistence_equilibrium(const CompetitionParams& p) {
  if (!(p.a1 < 1.0 && p.a2 < 1.0))
    throw ConfigError("competition coexistence equilibrium needs a1 < 1 and a2 < 1");
  const double det = 1.0 - p.a1 * p.a2;
  return {(1.0 - p.a1) / det, (1.0 - p.a2) / det};
}

// Positive root of mu2 (1 - v) = (F(v)/v) (mu1 + b F(v)) / mu1' with
// z = (mu1 + b F(v)) / mu1' > 0. Scans (0, 1) for the first sign change and
// bisects.
inline Equilibrium coexistence_equilibrium(const PredPreyParams& p) {
  const auto& F = p.response;
  auto z_of = [&](double v) { return (p.mu1 + p.b * F.eval_unchecked(v)) / p.mu1_prime; };
  auto g = [&](double v) { return p.mu2 * (1.0 - v) - F.eval_unchecked(v) / v * z_of(v); };
  constexpr int kScan = 20000;
  double lo = 0.0;
  double glo = 0.0;
  bool have = false;
  for (int k = 1; k < kScan; ++k) {
    const double v = static_cast<double>(k) / kScan;
    const double gv = g(v);
    if (have && (glo > 0.0) != (gv > 0.0) && z_of(v) > 0.0 && z_of(lo) > 0.0) {
      double a = lo, b = v, ga = glo;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if ((gm > 0.0) == (ga > 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      const double vs = 0.5 * (a + b);
      return {z_of(vs), vs};
    }
    lo = v;
    glo = gv;
    have = true;
  }
  throw ConfigError("predator-prey model has no coexistence equilibrium with 0 < v < 1");
}

inline Equilibrium coexistence_equilibrium(const ModelParams& p) {
  return std::visit([](const auto& q) { return coexistence_equilibrium(q); }, p);
}

// All constant equilibria of the competition kinetics that are nonnegative.
inline std::vector<Equilibrium> competition_equilibria(const CompetitionParams& p) {
  std::vector<Equilibrium> out{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (p.a1 < 1.0 && p.a2 < 1.0) out.push_back(coexistence_equilibrium(p));
  return out;
}

// ---------------------------------------------------------------------------
// Initial data

struct IcFamily {
  enum class Kind { Constant, GaussianBump, CosinePerturbedEquilibrium };
  Kind kind = Kind::CosinePerturbedEquilibrium;
  double value = 0.5;      // constant
  double center_x = 0.5;   // gaussian
  double center_y = 0.5;
  double width = 0.1;
  double amplitude = 0.1;  // gaussian and cosine
  double floor = 0.0;      // gaussian
  int mode = 1;            // cosine

  bool operator==(const IcFamily&) const = default;
};

inline const char* to_string(IcFamily::Kind k) {
  switch (k) {
    case IcFamily::Kind::Constant: return "constant";
    case IcFamily::Kind::GaussianBump: return "gaussian_bump";
    case IcFamily::Kind::CosinePerturbedEquilibrium: return "cosine_perturbed_equilibrium";
  }
  return "?";
}

template <typename Scalar = double>
struct InitialData {
  Field<Scalar> u0;  // z0 for predator-prey
  Field<Scalar> v0;
  Field<Scalar> w0;
  bool compatibility = true;
};

// Builds nonnegative initial fields. The chosen family shapes u0 and v0; w0
// is v0 under the compatibility condition and the constant w0_value
// otherwise. The cosine family perturbs the coexistence equilibrium by
// amplitude*cos(mode pi x / Lx) [* cos(mode pi y / Ly)] and clamps at zero.
template <typename Scalar = double>
InitialData<Scalar> build_initial_data(const IcFamily& fam, const GridSpec& grid,
                                       const ModelParams& params, bool compatibility = true,
                                       double w0_value = 0.0) {
  using std::cos;
  using std::exp;
  if (!compatibility && !(w0_value >= 0.0)) throw ConfigError("w0 must be nonnegative");
  Field<Scalar> u0, v0;
  switch (fam.kind) {
    case IcFamily::Kind::Constant:
      if (!(fam.value >= 0.0)) throw ConfigError("constant initial value must be >= 0");
      u0 = Field<Scalar>::constant(grid, static_cast<Scalar>(fam.value));
      v0 = u0;
      break;
    case IcFamily::Kind::GaussianBump: {
      if (!(fam.width > 0.0)) throw ConfigError("gaussian width must be > 0");
      if (fam.floor + std::min(0.0, fam.amplitude) < 0.0)
        throw ConfigError("gaussian floor/amplitude yield negative initial data");
      const double w2 = 2.0 * fam.width * fam.width;
      if (grid.dim() == 1) {
        u0 = Field<Scalar>::sample(grid, [&](double x) {
          const double dx = x - fam.center_x;
          return fam.floor + fam.amplitude * exp(-dx * dx / w2);
        });
      } else {
        u0 = Field<Scalar>::sample(grid, [&](double x, double y) {
          const double dx = x - fam.center_x, dy = y - fam.center_y;
          return fam.floor + fam.amplitude * exp(-(dx * dx + dy * dy) / w2);
        });
      }
      v0 = u0;
      break;
    }
    case IcFamily::Kind::CosinePerturbedEquilibrium: {
      if (fam.mode < 0) throw ConfigError("cosine mode must be >= 0");
      const Equilibrium eq = coexistence_equilibrium(params);
      const double k = fam.mode * std::numbers::pi;
      auto shape = [&](double x, double y) {
        double s = cos(k * x / grid.length(0));
        if (grid.dim() == 2) s *= cos(k * y / grid.length(1));
        return fam.amplitude * s;
      };
      auto around = [&](double base) {
        if (grid.dim() == 1)
          return Field<Scalar>::sample(grid,
                                       [&](double x) { return std::max(0.0, base + shape(x, 0.0)); });
        return Field<Scalar>::sample(
            grid, [&](double x, double y) { return std::max(0.0, base + shape(x, y)); });
      };
      u0 = around(eq.first);
      v0 = around(eq.v);
      break;
    }
  }
  Field<Scalar> w0 = compatibility ? v0 : Field<Scalar>::constant(grid, static_cast<Scalar>(w0_value));
  return {std::move(u0), std::move(v0), std::move(w0), compatibility};
}

template <typename Scalar>
State<Scalar> initial_state(const InitialData<Scalar>& ic, Variant variant) {
  if (variant == Variant::Indirect) return State<Scalar>(ic.u0, ic.v0, ic.w0, 0.0);
  return State<Scalar>(ic.u0, ic.v0, std::nullopt, 0.0);
}

// ---------------------------------------------------------------------------
// Right-hand sides

template <typename Scalar>
struct Rhs {
  Field<Scalar> u;
  Field<Scalar> v;
  std::optional<Field<Scalar>> w;
};

namespace detail {

template <typename Scalar, typename Params>
std::pair<Field<Scalar>, Field<Scalar>> population_rhs(const Field<Scalar>& u,
                                                       const Field<Scalar>& v,
                                                       const Field<Scalar>& signal,
                                                       const Params& p) {
  auto [ru, rv] = reaction(u, v, p);
  Field<Scalar> du = static_cast<Scalar>(p.d_first()) * laplacian_neumann(u) + ru;
  if (p.chi != 0.0) du = du + taxis_divergence(u, signal, p.chi, Params::taxis_sign);
  Field<Scalar> dv = static_cast<Scalar>(p.d_v) * laplacian_neumann(v) + rv;
  return {std::move(du), std::move(dv)};
}

}  // namespace detail

// Time derivatives of (u, v, w) for the relaxation model. The w component
// is reported divided by eps: Lap w + (v - w)/eps.
template <typename Scalar>
Rhs<Scalar> rhs_indirect(const State<Scalar>& s, const ModelParams& params) {
  if (!s.is_triple()) throw DomainError("rhs_indirect needs a (u, v, w) state");
  return std::visit(
      [&](const auto& p) {
        auto [du, dv] = detail::population_rhs(s.u, s.v, *s.w, p);
        const Scalar inv_eps = Scalar(1) / static_cast<Scalar>(p.eps);
        Field<Scalar> dw = laplacian_neumann(*s.w) + inv_eps * (s.v - *s.w);
        return Rhs<Scalar>{std::move(du), std::move(dv), std::move(dw)};
      },
      params);
}

// Time derivatives of (u, v) for the direct-taxis limit model.
template <typename Scalar>
Rhs<Scalar> rhs_limit(const State<Scalar>& s, const ModelParams& params) {
  return std::visit(
      [&](const auto& p) {
        auto [du, dv] = detail::population_rhs(s.u, s.v, s.v, p);
        return Rhs<Scalar>{std::move(du), std::move(dv), std::nullopt};
      },
      params);
}

}  // namespace taxis

#endif  // TAXIS_MODELS_HPP
