#ifndef TAXIS_PARAMS_HPP
#define TAXIS_PARAMS_HPP

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "taxis/errors.hpp"

namespace taxis {

enum class ResponseKind { Holling1, Holling2, Holling3 };

inline const char* to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::Holling1: return "holling1";
    case ResponseKind::Holling2: return "holling2";
    case ResponseKind::Holling3: return "holling3";
  }
  return "?";
}

// Prey-dependent consumption rate F(v).
//   holling1: c v
//   holling2: c v / (1 + m v)
//   holling3: c v^2 / (1 + m v^2)
struct FunctionalResponse {
  ResponseKind kind = ResponseKind::Holling2;
  double c = 1.0;
  double m = 1.0;

  void validate() const {
    if (!(c > 0.0)) throw ConfigError("functional response: c must be > 0");
    if (!(m >= 0.0)) throw ConfigError("functional response: m must be >= 0");
    // c v^2 is neither linearly bounded nor globally Lipschitz.
    if (kind == ResponseKind::Holling3 && !(m > 0.0))
      throw ConfigError("functional response: holling3 requires m > 0");
  }

  template <typename Scalar>
  Scalar operator()(Scalar v) const {
    if (v < Scalar(0)) throw DomainError("functional response evaluated at negative density");
    return eval_unchecked(v);
  }

  template <typename Scalar>
  Scalar eval_unchecked(Scalar v) const {
    const Scalar cc(c), mm(m);
    switch (kind) {
      case ResponseKind::Holling1: return cc * v;
      case ResponseKind::Holling2: return cc * v / (Scalar(1) + mm * v);
      case ResponseKind::Holling3: return cc * v * v / (Scalar(1) + mm * v * v);
    }
    return Scalar(0);
  }

  template <typename Scalar>
  Scalar derivative(Scalar v) const {
    const Scalar cc(c), mm(m);
    switch (kind) {
      case ResponseKind::Holling1: return cc;
      case ResponseKind::Holling2: {
        const Scalar d = Scalar(1) + mm * v;
        return cc / (d * d);
      }
      case ResponseKind::Holling3: {
        const Scalar d = Scalar(1) + mm * v * v;
        return Scalar(2) * cc * v / (d * d);
      }
    }
    return Scalar(0);
  }

  // C_F with F(v) <= C_F v on [0, inf).
  double growth_bound() const {
    if (kind == ResponseKind::Holling3) return c / (2.0 * std::sqrt(m));
    return c;
  }

  // Global Lipschitz constant on [0, inf). For holling3 the maximum of F'
  // sits at v = 1/sqrt(3m).
  double lipschitz() const {
    if (kind == ResponseKind::Holling3) return c * (3.0 * std::sqrt(3.0) / 8.0) / std::sqrt(m);
    return c;
  }

  bool operator==(const FunctionalResponse&) const = default;
};

// Nondimensional Lotka-Volterra competition with repulsive taxis.
struct CompetitionParams {
  static constexpr int taxis_sign = +1;

  double d_u = 1.0;
  double d_v = 1.0;
  double chi = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double a1 = 0.5;
  double a2 = 0.5;
  double eps = 0.01;

  double d_first() const { return d_u; }

  void validate() const {
    if (!(d_u > 0.0) || !(d_v > 0.0)) throw ConfigError("diffusivities must be > 0");
    if (!(chi >= 0.0)) throw ConfigError("chi must be >= 0");
    if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw ConfigError("growth rates must be > 0");
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw ConfigError("competition coefficients must be > 0");
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in (0,1]");
  }

  bool operator==(const CompetitionParams&) const = default;
};

// Nondimensional predator-prey model with attractive prey taxis.
struct PredPreyParams {
  static constexpr int taxis_sign = -1;

  double d_z = 1.0;
  double d_v = 1.0;
  double chi = 1.0;
  double mu1 = -0.2;  // any sign
  double mu1_prime = 0.5;
  double mu2 = 1.0;
  double b = 1.0;
  FunctionalResponse response{};
  double eps = 0.01;

  double d_first() const { return d_z; }

  void validate() const {
    if (!(d_z > 0.0) || !(d_v > 0.0)) throw ConfigError("diffusivities must be > 0");
    if (!(chi >= 0.0)) throw ConfigError("chi must be >= 0");
    if (!std::isfinite(mu1)) throw ConfigError("mu1 must be finite");
    if (!(mu1_prime > 0.0)) throw ConfigError("mu1_prime must be > 0");
    if (!(mu2 > 0.0)) throw ConfigError("mu2 must be > 0");
    if (!(b > 0.0)) throw ConfigError("b must be > 0");
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in (0,1]");
    response.validate();
  }

  bool operator==(const PredPreyParams&) const = default;
};

using ModelParams = std::variant<CompetitionParams, PredPreyParams>;

inline void validate(const ModelParams& p) {
  std::visit([](const auto& q) { q.validate(); }, p);
}
inline double epsilon_of(const ModelParams& p) {
  return std::visit([](const auto& q) { return q.eps; }, p);
}
inline ModelParams with_epsilon(ModelParams p, double eps) {
  std::visit([eps](auto& q) { q.eps = eps; }, p);
  return p;
}
inline double chi_of(const ModelParams& p) {
  return std::visit([](const auto& q) { return q.chi; }, p);
}
inline int taxis_sign_of(const ModelParams& p) {
  return std::visit([](const auto& q) { return std::decay_t<decltype(q)>::taxis_sign; }, p);
}
inline bool is_competition(const ModelParams& p) {
  return std::holds_alternative<CompetitionParams>(p);
}

}  // namespace taxis

#endif  // TAXIS_PARAMS_HPP
