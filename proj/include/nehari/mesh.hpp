#pragma once

// Uniform finite-difference grids on an interval or a square with homogeneous
// Dirichlet data. Boundary nodes are never stored: a ScalarField holds values
// on interior nodes only, and every stencil treats the missing neighbours as 0.

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "nehari/error.hpp"

namespace nehari {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal values on the interior nodes of a Grid.
using ScalarField = Vector;

using Point = std::array<double, 2>;

class Grid {
 public:
  Grid(int dim, int n, double extent = 1.0) : dim_(dim), n_(n), extent_(extent) {
    if (dim != 1 && dim != 2) {
      throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "grid needs n >= 1 interior nodes per axis");
    if (!(extent > 0.0) || !std::isfinite(extent)) {
      throw Error(ErrorCode::InvalidArgument, "grid extent must be positive");
    }
    h_ = extent_ / (n_ + 1);
  }

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double extent() const noexcept { return extent_; }
  double h() const noexcept { return h_; }

  /// Total interior node count: n in 1-D, n^2 in 2-D.
  Eigen::Index size() const noexcept {
    return dim_ == 1 ? Eigen::Index{n_} : Eigen::Index{n_} * n_;
  }

  /// h^d, the weight of one node in the quadrature rule.
  double cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }

  /// Lexicographic, x fastest.
  Eigen::Index index(int i, int j = 0) const noexcept { return Eigen::Index{j} * n_ + i; }

  Point coordinate(Eigen::Index node) const noexcept {
    const auto i = static_cast<int>(node % n_);
    const auto j = static_cast<int>(node / n_);
    Point x{(i + 1) * h_, 0.0};
    if (dim_ == 2) x[1] = (j + 1) * h_;
    return x;
  }

  std::vector<Point> coordinates() const {
    std::vector<Point> xs;
    xs.reserve(static_cast<std::size_t>(size()));
    for (Eigen::Index k = 0; k < size(); ++k) xs.push_back(coordinate(k));
    return xs;
  }

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  int n_;
  double extent_;
  double h_ = 0.0;
};

inline Grid build_grid(int dim, int n, double extent = 1.0) { return Grid(dim, n, extent); }

inline void check_conforms(const Grid& g, const Vector& a, const char* what = "field") {
  if (a.size() != g.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(a.size()) +
                                                  " entries, grid has " + std::to_string(g.size()) + " nodes");
  }
}

namespace detail {

// Visits every axis-aligned edge (including edges to the boundary) with the
// two endpoint values; boundary endpoints read as 0.
template <class Fn>
void for_each_edge(const Grid& g, const Vector& a, const Vector& b, Fn&& fn) {
  const int n = g.n();
  const int rows = g.dim() == 1 ? 1 : n;
  auto at = [&](const Vector& f, int i, int j) { return (i < 0 || i >= n || j < 0 || j >= n) ? 0.0 : f[g.index(i, j)]; };
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i <= n; ++i) fn(at(a, i, j) - at(a, i - 1, j), at(b, i, j) - at(b, i - 1, j));
  }
  if (g.dim() == 2) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= n; ++j) fn(at(a, i, j) - at(a, i, j - 1), at(b, i, j) - at(b, i, j - 1));
    }
  }
}

}  // namespace detail

/// Discrete H^1_0 inner product: h^(d-2) * sum over edges of (da)(db).
inline double inner_product_x(const Grid& g, const ScalarField& a, const ScalarField& b) {
  check_conforms(g, a, "left field");
  check_conforms(g, b, "right field");
  double sum = 0.0;
  detail::for_each_edge(g, a, b, [&](double da, double db) { sum += da * db; });
  return g.dim() == 1 ? sum / g.h() : sum;
}

inline double norm_x(const Grid& g, const ScalarField& a) { return std::sqrt(inner_product_x(g, a, a)); }

/// Midpoint-type rule over interior nodes: h^d * sum(nodal).
inline double quadrature(const Grid& g, const Vector& nodal) {
  check_conforms(g, nodal, "nodal vector");
  return g.cell_volume() * nodal.sum();
}

/// Matrix K of inner_product_x, i.e. a^T K b == inner_product_x(a, b).
inline SparseMatrix stiffness_matrix(const Grid& g) {
  const int n = g.n();
  const double scale = g.dim() == 1 ? 1.0 / g.h() : 1.0;
  const double diag = g.dim() == 1 ? 2.0 : 4.0;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(g.size()) * (g.dim() == 1 ? 3 : 5));
  const int rows = g.dim() == 1 ? 1 : n;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto k = g.index(i, j);
      entries.emplace_back(k, k, diag * scale);
      if (i > 0) entries.emplace_back(k, g.index(i - 1, j), -scale);
      if (i + 1 < n) entries.emplace_back(k, g.index(i + 1, j), -scale);
      if (g.dim() == 2) {
        if (j > 0) entries.emplace_back(k, g.index(i, j - 1), -scale);
        if (j + 1 < n) entries.emplace_back(k, g.index(i, j + 1), -scale);
      }
    }
  }
  SparseMatrix k(g.size(), g.size());
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

/// Stencil Laplacian applied to a field with zero boundary values, (Δ_h a)_i.
inline ScalarField laplacian(const Grid& g, const ScalarField& a) {
  check_conforms(g, a);
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const int n = g.n();
  ScalarField out(g.size());
  auto at = [&](int i, int j) { return (i < 0 || i >= n || j < 0 || j >= n) ? 0.0 : a[g.index(i, j)]; };
  const int rows = g.dim() == 1 ? 1 : n;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < n; ++i) {
      double s = at(i - 1, j) + at(i + 1, j) - 2.0 * at(i, j);
      if (g.dim() == 2) s += at(i, j - 1) + at(i, j + 1) - 2.0 * at(i, j);
      out[g.index(i, j)] = s * inv_h2;
    }
  }
  return out;
}

/// Solves K x = r. Tridiagonal elimination in 1-D, conjugate gradients
/// (relative tolerance 1e-12) in 2-D.
class StiffnessSolver {
 public:
  explicit StiffnessSolver(const Grid& g) : grid_(g) {
    if (g.dim() == 2) cg_ = std::make_shared<const Cg>(g);
  }

  const Grid& grid() const noexcept { return grid_; }

  ScalarField solve(const Vector& r) const {
    check_conforms(grid_, r, "right-hand side");
    if (grid_.dim() == 1) return solve_tridiagonal(r);
    ScalarField x = cg_->solver.solve(r);
    return x;
  }

 private:
  ScalarField solve_tridiagonal(const Vector& r) const {
    // K = (1/h) tridiag(-1, 2, -1)
    const auto n = r.size();
    const double off = -1.0 / grid_.h();
    const double diag = 2.0 / grid_.h();
    Vector c(n), d(n);
    double denom = diag;
    c[0] = off / denom;
    d[0] = r[0] / denom;
    for (Eigen::Index i = 1; i < n; ++i) {
      denom = diag - off * c[i - 1];
      c[i] = off / denom;
      d[i] = (r[i] - off * d[i - 1]) / denom;
    }
    ScalarField x(n);
    x[n - 1] = d[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }

  // The Eigen solver references its matrix, so both live together and are shared.
  struct Cg {
    explicit Cg(const Grid& g) : matrix(stiffness_matrix(g)) {
      solver.setTolerance(1e-12);
      solver.setMaxIterations(10 * matrix.rows() + 100);
      solver.compute(matrix);
    }
    SparseMatrix matrix;
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> solver;
  };

  Grid grid_;
  std::shared_ptr<const Cg> cg_;
};

/// Riesz representative of the functional w -> r.w in the X inner product.
inline ScalarField sobolev_riesz(const Grid& g, const Vector& r) { return StiffnessSolver(g).solve(r); }

}  // namespace nehari
