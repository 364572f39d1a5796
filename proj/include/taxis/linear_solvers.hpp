#ifndef TAXIS_LINEAR_SOLVERS_HPP
#define TAXIS_LINEAR_SOLVERS_HPP

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <memory>
#include <vector>

#include "taxis/errors.hpp"
#include "taxis/grid.hpp"

namespace taxis {

inline constexpr double kLinearSolveTol = 1e-10;

// Thomas elimination for a tridiagonal system. lower[0] and upper[n-1] are
// ignored. Stable without pivoting for the diagonally dominant systems used
// here.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_tridiagonal(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs) {
  const Eigen::Index n = diag.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(n), d(n), x(n);
  Scalar beta = diag[0];
  if (beta == Scalar(0)) throw SolverError("tridiagonal solve: zero pivot");
  c[0] = upper[0] / beta;
  d[0] = rhs[0] / beta;
  for (Eigen::Index i = 1; i < n; ++i) {
    beta = diag[i] - lower[i] * c[i - 1];
    if (beta == Scalar(0)) throw SolverError("tridiagonal solve: zero pivot");
    c[i] = i + 1 < n ? upper[i] / beta : Scalar(0);
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
  }
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Solves (a I - b L) x = rhs with L the Neumann Laplacian of the grid and
// a > 0, b >= 0. Tridiagonal elimination in 1D; conjugate gradients with a
// Jacobi preconditioner in 2D (the operator is symmetric positive definite).
template <typename Scalar = double>
class ShiftedLaplacianSolver {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ShiftedLaplacianSolver(const GridSpec& grid, Scalar a, Scalar b) : grid_(grid), a_(a), b_(b) {
    if (!(a > Scalar(0)) || b < Scalar(0)) throw SolverError("shifted Laplacian must be SPD");
    if (grid.dim() == 1) {
      const Eigen::Index n = grid.n(0);
      const Scalar s = b / static_cast<Scalar>(grid.h(0) * grid.h(0));
      lower_ = Vector::Constant(n, -s);
      upper_ = Vector::Constant(n, -s);
      diag_ = Vector::Constant(n, a + Scalar(2) * s);
      diag_[0] = a + s;
      diag_[n - 1] = a + s;
    } else {
      build_sparse();
    }
  }

  Scalar shift() const { return a_; }
  Scalar diffusion() const { return b_; }

  Vector solve(const Vector& rhs) const {
    using std::sqrt;
    const Scalar rnorm = rhs.norm();
    if (rnorm == Scalar(0)) return Vector::Zero(rhs.size());
    Vector x;
    if (grid_.dim() == 1) {
      x = solve_tridiagonal(lower_, diag_, upper_, rhs);
    } else {
      x = sparse_->cg.solve(rhs);
      if (sparse_->cg.info() != Eigen::Success)
        throw SolverError("conjugate gradient did not converge");
    }
    const Scalar res = (apply(x) - rhs).norm() / rnorm;
    if (!(res <= Scalar(kLinearSolveTol)))
      throw SolverError("linear solve residual above tolerance");
    return x;
  }

  // y = (a I - b L) x
  Vector apply(const Vector& x) const {
    if (grid_.dim() == 2) return sparse_->matrix * x;
    const Eigen::Index n = x.size();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar s = diag_[i] * x[i];
      if (i > 0) s += lower_[i] * x[i - 1];
      if (i + 1 < n) s += upper_[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

 private:
  void build_sparse() {
    const int nx = grid_.n(0), ny = grid_.n(1);
    const Scalar sx = b_ / static_cast<Scalar>(grid_.h(0) * grid_.h(0));
    const Scalar sy = b_ / static_cast<Scalar>(grid_.h(1) * grid_.h(1));
    std::vector<Eigen::Triplet<Scalar>> trip;
    trip.reserve(grid_.size() * 5);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto k = static_cast<int>(grid_.index(i, j));
        Scalar d = a_;
        auto link = [&](int ii, int jj, Scalar s) {
          trip.emplace_back(k, static_cast<int>(grid_.index(ii, jj)), -s);
          d += s;
        };
        if (i > 0) link(i - 1, j, sx);
        if (i + 1 < nx) link(i + 1, j, sx);
        if (j > 0) link(i, j - 1, sy);
        if (j + 1 < ny) link(i, j + 1, sy);
        trip.emplace_back(k, k, d);
      }
    // The CG object keeps a reference to the matrix, so both share one
    // heap allocation that copies of this solver point at.
    auto sys = std::make_shared<SparseSystem>();
    const auto n = static_cast<Eigen::Index>(grid_.size());
    sys->matrix.resize(n, n);
    sys->matrix.setFromTriplets(trip.begin(), trip.end());
    sys->cg.setTolerance(Scalar(kLinearSolveTol) * Scalar(0.1));
    sys->cg.setMaxIterations(10 * n);
    sys->cg.compute(sys->matrix);
    sparse_ = std::move(sys);
  }

  struct SparseSystem {
    Eigen::SparseMatrix<Scalar> matrix;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<Scalar>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<Scalar>>
        cg;
  };

  GridSpec grid_;
  Scalar a_;
  Scalar b_;
  Vector lower_, diag_, upper_;
  std::shared_ptr<const SparseSystem> sparse_;
};

}  // namespace taxis

#endif  // TAXIS_LINEAR_SOLVERS_HPP
