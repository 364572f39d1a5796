#ifndef TAXIS_GRID_HPP
#define TAXIS_GRID_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>

#include "taxis/errors.hpp"

namespace taxis {

// Cell-centered rectangular grid on [0, length_x] (x [0, length_y]).
// Cell (i, j) has flat index i + n_x * j.
class GridSpec {
 public:
  GridSpec() = default;

  static GridSpec line(int n, double length = 1.0) {
    return GridSpec(1, {n, 1}, {length, 1.0});
  }
  static GridSpec rect(int nx, int ny, double length_x = 1.0, double length_y = 1.0) {
    return GridSpec(2, {nx, ny}, {length_x, length_y});
  }

  GridSpec(int dim, std::array<int, 2> n, std::array<double, 2> length)
      : dim_(dim), n_(n), length_(length) {
    if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
    if (dim == 1) {
      n_[1] = 1;
      length_[1] = 1.0;
    }
    for (std::size_t a = 0; a < static_cast<std::size_t>(dim) && a < n_.size(); ++a) {
      if (n_[a] < 3) throw DomainError("grid needs at least 3 cells per axis");
      if (!(length_[a] > 0.0) || !std::isfinite(length_[a]))
        throw DomainError("grid length must be positive");
      h_[a] = length_[a] / n_[a];
    }
  }

  int dim() const { return dim_; }
  int n(int axis) const { return n_[axis]; }
  double length(int axis) const { return length_[axis]; }
  double h(int axis) const { return h_[axis]; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1]; }

  // Volume of one cell (product of spacings over active axes).
  double cell_volume() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }
  double measure() const { return dim_ == 1 ? length_[0] : length_[0] * length_[1]; }
  double min_spacing() const { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * j;
  }
  double center(int axis, int i) const { return (i + 0.5) * h_[axis]; }

  bool operator==(const GridSpec& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "dim=" << dim_ << " n=" << n_[0];
    if (dim_ == 2) os << "x" << n_[1];
    os << " length=" << length_[0];
    if (dim_ == 2) os << "x" << length_[1];
    return os.str();
  }

 private:
  int dim_ = 1;
  std::array<int, 2> n_{3, 1};
  std::array<double, 2> length_{1.0, 1.0};
  std::array<double, 2> h_{1.0 / 3.0, 1.0};
};

// Sum of a sequence by recursive halving. The result depends only on the
// values and their order, never on vectorization or thread count.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> xs) {
  constexpr std::size_t kBlock = 16;
  if (xs.size() <= kBlock) {
    Scalar s(0);
    for (const Scalar& x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// One scalar unknown sampled at cell centers.
template <typename Scalar = double>
class Field {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Field() = default;

  Field(GridSpec grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size())
      throw DomainError("field size does not match grid");
    if (!values_.allFinite()) throw DomainError("field contains non-finite values");
  }

  static Field constant(const GridSpec& grid, Scalar value) {
    return Field(grid, Vector::Constant(static_cast<Eigen::Index>(grid.size()), value));
  }

  // Samples fn(x) in 1D or fn(x, y) in 2D at cell centers.
  template <typename Fn>
  static Field sample(const GridSpec& grid, Fn&& fn) {
    Vector v(static_cast<Eigen::Index>(grid.size()));
    if constexpr (std::is_invocable_v<Fn&, double>) {
      if (grid.dim() != 1) throw DomainError("1D sampler used on a 2D grid");
      for (int i = 0; i < grid.n(0); ++i) v[i] = static_cast<Scalar>(fn(grid.center(0, i)));
    } else {
      if (grid.dim() != 2) throw DomainError("2D sampler used on a 1D grid");
      for (int j = 0; j < grid.n(1); ++j)
        for (int i = 0; i < grid.n(0); ++i)
          v[grid.index(i, j)] = static_cast<Scalar>(fn(grid.center(0, i), grid.center(1, j)));
    }
    return Field(grid, std::move(v));
  }

  const GridSpec& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  Scalar operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }
  Scalar operator()(int i, int j = 0) const {
    return values_[static_cast<Eigen::Index>(grid_.index(i, j))];
  }

  Scalar min() const { return values_.minCoeff(); }
  Scalar max() const { return values_.maxCoeff(); }

  std::span<const Scalar> span() const { return {values_.data(), size()}; }

  friend Field operator+(const Field& a, const Field& b) {
    a.require_same_grid(b);
    return Field(a.grid_, a.values_ + b.values_);
  }
  friend Field operator-(const Field& a, const Field& b) {
    a.require_same_grid(b);
    return Field(a.grid_, a.values_ - b.values_);
  }
  friend Field operator*(Scalar s, const Field& a) { return Field(a.grid_, s * a.values_); }
  friend Field operator*(const Field& a, Scalar s) { return s * a; }

  void require_same_grid(const Field& other) const {
    if (!(grid_ == other.grid_)) throw DomainError("fields live on different grids");
  }

 private:
  GridSpec grid_;
  Vector values_;
};

// Discrete integral over the domain (midpoint rule).
template <typename Scalar>
Scalar integrate(const Field<Scalar>& f) {
  return pairwise_sum(f.span()) * static_cast<Scalar>(f.grid().cell_volume());
}

enum class Norm { L1, L2, Linf };

template <typename Scalar>
Scalar norm_lp(const Field<Scalar>& f, Norm p) {
  using std::abs;
  using std::sqrt;
  const auto& v = f.values();
  switch (p) {
    case Norm::Linf:
      return v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
    case Norm::L1: {
      typename Field<Scalar>::Vector a = v.cwiseAbs();
      return pairwise_sum<Scalar>({a.data(), static_cast<std::size_t>(a.size())}) *
             static_cast<Scalar>(f.grid().cell_volume());
    }
    case Norm::L2: {
      typename Field<Scalar>::Vector a = v.cwiseAbs2();
      return sqrt(pairwise_sum<Scalar>({a.data(), static_cast<std::size_t>(a.size())}) *
                  static_cast<Scalar>(f.grid().cell_volume()));
    }
  }
  return Scalar(0);
}

// Squared discrete H1 seminorm: face differences over interior faces, each
// weighted by one cell volume. Boundary faces carry zero gradient (mirrored
// ghosts).
template <typename Scalar>
Scalar grad_sq_norm(const Field<Scalar>& f) {
  const GridSpec& g = f.grid();
  const int nx = g.n(0);
  const int ny = g.n(1);
  typename Field<Scalar>::Vector terms(static_cast<Eigen::Index>(g.size()) * g.dim());
  terms.setZero();
  Eigen::Index k = 0;
  const Scalar hx = static_cast<Scalar>(g.h(0));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const Scalar d = (f(i + 1, j) - f(i, j)) / hx;
      terms[k++] = d * d;
    }
  if (g.dim() == 2) {
    const Scalar hy = static_cast<Scalar>(g.h(1));
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Scalar d = (f(i, j + 1) - f(i, j)) / hy;
        terms[k++] = d * d;
      }
  }
  return pairwise_sum<Scalar>({terms.data(), static_cast<std::size_t>(k)}) *
         static_cast<Scalar>(g.cell_volume());
}

// Discrete W^{1,2} norm: sqrt(||f||_2^2 + ||grad f||_2^2).
template <typename Scalar>
Scalar h1_norm(const Field<Scalar>& f) {
  using std::sqrt;
  const Scalar l2 = norm_lp(f, Norm::L2);
  return sqrt(l2 * l2 + grad_sq_norm(f));
}

// Solution tuple: (u, v, w) for the relaxation model, (u, v) for the limit.
// For the predator-prey model the first component holds the predator z.
template <typename Scalar = double>
struct State {
  Field<Scalar> u;
  Field<Scalar> v;
  std::optional<Field<Scalar>> w;
  double time = 0.0;

  State() = default;
  State(Field<Scalar> u_, Field<Scalar> v_, std::optional<Field<Scalar>> w_, double t)
      : u(std::move(u_)), v(std::move(v_)), w(std::move(w_)), time(t) {
    u.require_same_grid(v);
    if (w) u.require_same_grid(*w);
    if (!(time >= 0.0)) throw DomainError("state time must be nonnegative");
  }

  bool is_triple() const { return w.has_value(); }
  const GridSpec& grid() const { return u.grid(); }
};

}  // namespace taxis

#endif  // TAXIS_GRID_HPP
