#ifndef TAXIS_OPERATORS_HPP
#define TAXIS_OPERATORS_HPP

#include <algorithm>
#include <cmath>
#include <utility>

#include "taxis/grid.hpp"
#include "taxis/params.hpp"

namespace taxis {

// Neumann Laplacian: 3-point (1D) / 5-point (2D) stencil with mirrored
// ghost cells, so every boundary face carries zero flux.
template <typename Scalar>
Field<Scalar> laplacian_neumann(const Field<Scalar>& f) {
  const GridSpec& g = f.grid();
  const int nx = g.n(0);
  const int ny = g.n(1);
  typename Field<Scalar>::Vector out(static_cast<Eigen::Index>(g.size()));
  const Scalar ihx2 = Scalar(1) / static_cast<Scalar>(g.h(0) * g.h(0));
  const Scalar ihy2 = g.dim() == 2 ? Scalar(1) / static_cast<Scalar>(g.h(1) * g.h(1)) : Scalar(0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Scalar c = f(i, j);
      const Scalar west = i > 0 ? f(i - 1, j) : c;
      const Scalar east = i + 1 < nx ? f(i + 1, j) : c;
      Scalar lap = (west - c + east - c) * ihx2;
      if (g.dim() == 2) {
        const Scalar south = j > 0 ? f(i, j - 1) : c;
        const Scalar north = j + 1 < ny ? f(i, j + 1) : c;
        lap += (south - c + north - c) * ihy2;
      }
      out[static_cast<Eigen::Index>(g.index(i, j))] = lap;
    }
  }
  return Field<Scalar>(g, std::move(out));
}

namespace detail {

// Flux through the face between cells `lo` and `hi` (hi on the positive
// side) for the term sign*chi*div(u grad w). The face coefficient is
// V = sign*chi*(w_hi - w_lo)/h; material moves with velocity -V, so the
// density is taken from the cell that velocity leaves.
template <typename Scalar>
Scalar taxis_face_flux(Scalar u_lo, Scalar u_hi, Scalar w_lo, Scalar w_hi, Scalar coef,
                       Scalar inv_h) {
  const Scalar velocity = coef * (w_hi - w_lo) * inv_h;
  if (velocity == Scalar(0)) return Scalar(0);
  return velocity * (velocity < Scalar(0) ? u_lo : u_hi);
}

}  // namespace detail

inline constexpr double kPositivityTol = 1e-12;

// Conservative first-order upwind discretization of sign*chi*div(u grad w).
// Boundary faces carry zero flux.
template <typename Scalar>
Field<Scalar> taxis_divergence(const Field<Scalar>& u, const Field<Scalar>& w, double chi,
                               int sign, double positivity_tol = kPositivityTol) {
  u.require_same_grid(w);
  if (sign != 1 && sign != -1) throw DomainError("taxis sign must be +1 or -1");
  if (u.min() < Scalar(-positivity_tol))
    throw DomainError("taxis density has negative entries below tolerance");
  const GridSpec& g = u.grid();
  const int nx = g.n(0);
  const int ny = g.n(1);
  const Scalar coef = static_cast<Scalar>(sign * chi);
  typename Field<Scalar>::Vector out = Field<Scalar>::Vector::Zero(static_cast<Eigen::Index>(g.size()));
  if (coef == Scalar(0)) return Field<Scalar>(g, std::move(out));

  const Scalar ihx = Scalar(1) / static_cast<Scalar>(g.h(0));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const Scalar flux =
          detail::taxis_face_flux(u(i, j), u(i + 1, j), w(i, j), w(i + 1, j), coef, ihx);
      out[static_cast<Eigen::Index>(g.index(i, j))] += flux * ihx;
      out[static_cast<Eigen::Index>(g.index(i + 1, j))] -= flux * ihx;
    }
  if (g.dim() == 2) {
    const Scalar ihy = Scalar(1) / static_cast<Scalar>(g.h(1));
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Scalar flux =
            detail::taxis_face_flux(u(i, j), u(i, j + 1), w(i, j), w(i, j + 1), coef, ihy);
        out[static_cast<Eigen::Index>(g.index(i, j))] += flux * ihy;
        out[static_cast<Eigen::Index>(g.index(i, j + 1))] -= flux * ihy;
      }
  }
  return Field<Scalar>(g, std::move(out));
}

// Largest |sign*chi*grad w| over all interior faces.
template <typename Scalar>
Scalar max_face_velocity(const Field<Scalar>& w, double chi) {
  using std::abs;
  const GridSpec& g = w.grid();
  Scalar vmax(0);
  const Scalar c = static_cast<Scalar>(std::abs(chi));
  for (int j = 0; j < g.n(1); ++j)
    for (int i = 0; i + 1 < g.n(0); ++i)
      vmax = std::max(vmax, c * abs(w(i + 1, j) - w(i, j)) / static_cast<Scalar>(g.h(0)));
  if (g.dim() == 2)
    for (int j = 0; j + 1 < g.n(1); ++j)
      for (int i = 0; i < g.n(0); ++i)
        vmax = std::max(vmax, c * abs(w(i, j + 1) - w(i, j)) / static_cast<Scalar>(g.h(1)));
  return vmax;
}

// Pointwise kinetics of a single cell.
template <typename Scalar>
std::pair<Scalar, Scalar> kinetics(const CompetitionParams& p, Scalar u, Scalar v) {
  return {Scalar(p.mu1) * u * (Scalar(1) - u - Scalar(p.a1) * v),
          Scalar(p.mu2) * v * (Scalar(1) - v - Scalar(p.a2) * u)};
}

template <typename Scalar>
std::pair<Scalar, Scalar> kinetics(const PredPreyParams& p, Scalar z, Scalar v,
                                   double positivity_tol = kPositivityTol) {
  if (v < Scalar(-positivity_tol)) throw DomainError("prey density negative below tolerance");
  const Scalar fv = p.response.eval_unchecked(std::max(v, Scalar(0)));
  return {Scalar(p.mu1) * z - Scalar(p.mu1_prime) * z * z + Scalar(p.b) * fv * z,
          Scalar(p.mu2) * v * (Scalar(1) - v) - fv * z};
}

// Row-sum bound of the 2x2 kinetics Jacobian at one cell.
template <typename Scalar>
Scalar kinetics_rate(const CompetitionParams& p, Scalar u, Scalar v) {
  using std::abs;
  const Scalar r1 = abs(Scalar(p.mu1) * (Scalar(1) - Scalar(2) * u - Scalar(p.a1) * v)) +
                    abs(Scalar(p.mu1 * p.a1) * u);
  const Scalar r2 = abs(Scalar(p.mu2 * p.a2) * v) +
                    abs(Scalar(p.mu2) * (Scalar(1) - Scalar(2) * v - Scalar(p.a2) * u));
  return std::max(r1, r2);
}

template <typename Scalar>
Scalar kinetics_rate(const PredPreyParams& p, Scalar z, Scalar v) {
  using std::abs;
  const Scalar vp = std::max(v, Scalar(0));
  const Scalar fv = p.response.eval_unchecked(vp);
  const Scalar dfv = p.response.derivative(vp);
  const Scalar r1 = abs(Scalar(p.mu1) - Scalar(2 * p.mu1_prime) * z + Scalar(p.b) * fv) +
                    abs(Scalar(p.b) * dfv * z);
  const Scalar r2 = abs(fv) + abs(Scalar(p.mu2) * (Scalar(1) - Scalar(2) * v) - dfv * z);
  return std::max(r1, r2);
}

template <typename Scalar, typename Params>
std::pair<Field<Scalar>, Field<Scalar>> reaction(const Field<Scalar>& first,
                                                 const Field<Scalar>& v, const Params& p) {
  first.require_same_grid(v);
  typename Field<Scalar>::Vector a(static_cast<Eigen::Index>(first.size()));
  typename Field<Scalar>::Vector b(static_cast<Eigen::Index>(first.size()));
  for (std::size_t k = 0; k < first.size(); ++k) {
    const auto [ra, rb] = kinetics(p, first[k], v[k]);
    a[static_cast<Eigen::Index>(k)] = ra;
    b[static_cast<Eigen::Index>(k)] = rb;
  }
  return {Field<Scalar>(first.grid(), std::move(a)), Field<Scalar>(first.grid(), std::move(b))};
}

// (mu1 u (1 - u - a1 v), mu2 v (1 - v - a2 u))
template <typename Scalar>
std::pair<Field<Scalar>, Field<Scalar>> reaction_competition(const Field<Scalar>& u,
                                                             const Field<Scalar>& v,
                                                             const CompetitionParams& p) {
  return reaction(u, v, p);
}

// (mu1 z - mu1' z^2 + b F(v) z, mu2 v (1 - v) - F(v) z)
template <typename Scalar>
std::pair<Field<Scalar>, Field<Scalar>> reaction_predprey(const Field<Scalar>& z,
                                                          const Field<Scalar>& v,
                                                          const PredPreyParams& p) {
  return reaction(z, v, p);
}

template <typename Scalar>
Scalar eval_functional_response(const FunctionalResponse& f, Scalar v) {
  return f(v);
}

}  // namespace taxis

#endif  // TAXIS_OPERATORS_HPP
