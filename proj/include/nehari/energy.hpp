#pragma once

// The strongly indefinite functional
//
//   Φ(z) = ½‖z⁺‖² − ½‖z⁻‖² − I(z),   z = (u, v) ∈ X = X⁺ ⊕ X⁻,
//
// its derivative action, and its X-gradient. Everything downstream is written
// against the SplitFunctional concept, which a discretized PDE (GridProblem)
// and the finite-dimensional ToyModel both satisfy. The stiffness matrices
// represent the X inner product on each factor; I and its derivatives are
// reported as Euclidean (dual) vectors.

#include <cmath>
#include <concepts>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nehari/error.hpp"
#include "nehari/mesh.hpp"
#include "nehari/nonlinearity.hpp"

namespace nehari {

struct StatePair {
  Vector u;
  Vector v;

  static StatePair zero(Eigen::Index n_plus, Eigen::Index n_minus) {
    return {Vector::Zero(n_plus), Vector::Zero(n_minus)};
  }

  StatePair& operator+=(const StatePair& o) {
    u += o.u;
    v += o.v;
    return *this;
  }
  StatePair& operator-=(const StatePair& o) {
    u -= o.u;
    v -= o.v;
    return *this;
  }
  StatePair& operator*=(double a) {
    u *= a;
    v *= a;
    return *this;
  }
  friend StatePair operator+(StatePair a, const StatePair& b) { return a += b; }
  friend StatePair operator-(StatePair a, const StatePair& b) { return a -= b; }
  friend StatePair operator*(double s, StatePair a) { return a *= s; }
};

/// Second derivatives of I, split into the X⁺/X⁻ blocks.
struct HessianBlocks {
  SparseMatrix uu;
  SparseMatrix uv;  // rows: X⁺, cols: X⁻
  SparseMatrix vv;
};

template <class P>
concept SplitFunctional = requires(const P& p, const Vector& a, const Vector& b) {
  { p.plus_size() } -> std::convertible_to<Eigen::Index>;
  { p.minus_size() } -> std::convertible_to<Eigen::Index>;
  { p.stiffness_plus() } -> std::convertible_to<const SparseMatrix&>;
  { p.stiffness_minus() } -> std::convertible_to<const SparseMatrix&>;
  { p.riesz_plus(a) } -> std::convertible_to<Vector>;
  { p.riesz_minus(b) } -> std::convertible_to<Vector>;
  { p.nonlinear_value(a, b) } -> std::convertible_to<double>;
  { p.nonlinear_gradient(a, b) } -> std::convertible_to<StatePair>;
  { p.nonlinear_hessian(a, b) } -> std::convertible_to<HessianBlocks>;
  // Weight that turns a Euclidean gradient entry into a nodal (PDE) residual.
  { p.cell_volume() } -> std::convertible_to<double>;
};

/// Discretization of the noncooperative system on a Grid: X⁺ = X⁻ = nodal
/// fields with the discrete H¹₀ inner product, I(z) = quadrature of F.
template <Nonlinearity F>
class GridProblem {
 public:
  GridProblem(Grid grid, F nonlinearity)
      : grid_(std::move(grid)),
        f_(std::move(nonlinearity)),
        stiffness_(stiffness_matrix(grid_)),
        solver_(grid_),
        points_(grid_.coordinates()) {}

  const Grid& grid() const noexcept { return grid_; }
  const F& nonlinearity() const noexcept { return f_; }

  Eigen::Index plus_size() const noexcept { return grid_.size(); }
  Eigen::Index minus_size() const noexcept { return grid_.size(); }
  const SparseMatrix& stiffness_plus() const noexcept { return stiffness_; }
  const SparseMatrix& stiffness_minus() const noexcept { return stiffness_; }
  Vector riesz_plus(const Vector& r) const { return solver_.solve(r); }
  Vector riesz_minus(const Vector& r) const { return solver_.solve(r); }
  double cell_volume() const noexcept { return grid_.cell_volume(); }

  double nonlinear_value(const Vector& u, const Vector& v) const {
    check(u, v);
    Vector nodal(grid_.size());
    for (Eigen::Index i = 0; i < grid_.size(); ++i) nodal[i] = f_.value(point(i), Pair(u[i], v[i]));
    return quadrature(grid_, nodal);
  }

  StatePair nonlinear_gradient(const Vector& u, const Vector& v) const {
    check(u, v);
    const double w = grid_.cell_volume();
    StatePair g = StatePair::zero(grid_.size(), grid_.size());
    for (Eigen::Index i = 0; i < grid_.size(); ++i) {
      const Pair d = f_.gradient(point(i), Pair(u[i], v[i]));
      g.u[i] = w * d[0];
      g.v[i] = w * d[1];
    }
    return g;
  }

  HessianBlocks nonlinear_hessian(const Vector& u, const Vector& v) const {
    check(u, v);
    const double w = grid_.cell_volume();
    const auto n = grid_.size();
    std::vector<Eigen::Triplet<double>> uu, uv, vv;
    uu.reserve(static_cast<std::size_t>(n));
    uv.reserve(static_cast<std::size_t>(n));
    vv.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Pair2x2 hess = f_.hessian(point(i), Pair(u[i], v[i]));
      uu.emplace_back(i, i, w * hess(0, 0));
      uv.emplace_back(i, i, w * hess(0, 1));
      vv.emplace_back(i, i, w * hess(1, 1));
    }
    HessianBlocks h{SparseMatrix(n, n), SparseMatrix(n, n), SparseMatrix(n, n)};
    h.uu.setFromTriplets(uu.begin(), uu.end());
    h.uv.setFromTriplets(uv.begin(), uv.end());
    h.vv.setFromTriplets(vv.begin(), vv.end());
    return h;
  }

  /// Nodal ∇F(x_i, z_i) (not quadrature-weighted).
  StatePair nodal_gradient(const StatePair& z) const {
    StatePair g = nonlinear_gradient(z.u, z.v);
    g *= 1.0 / grid_.cell_volume();
    return g;
  }

 private:
  const Point& point(Eigen::Index i) const { return points_[static_cast<std::size_t>(i)]; }

  void check(const Vector& u, const Vector& v) const {
    check_conforms(grid_, u, "u");
    check_conforms(grid_, v, "v");
  }

  Grid grid_;
  F f_;
  SparseMatrix stiffness_;
  StiffnessSolver solver_;
  std::vector<Point> points_;
};

static_assert(SplitFunctional<GridProblem<PowerNonlinearity>>);

// ---------------------------------------------------------------------------
// Generic operations on a SplitFunctional

template <SplitFunctional P>
double inner_plus(const P& p, const Vector& a, const Vector& b) {
  return a.dot(p.stiffness_plus() * b);
}

template <SplitFunctional P>
double inner_minus(const P& p, const Vector& a, const Vector& b) {
  return a.dot(p.stiffness_minus() * b);
}

template <SplitFunctional P>
double norm_plus(const P& p, const Vector& a) {
  return std::sqrt(std::max(0.0, inner_plus(p, a, a)));
}

template <SplitFunctional P>
double norm_minus(const P& p, const Vector& a) {
  return std::sqrt(std::max(0.0, inner_minus(p, a, a)));
}

/// ⟨a, b⟩_X = ⟨a⁺, b⁺⟩ + ⟨a⁻, b⁻⟩.
template <SplitFunctional P>
double inner_x(const P& p, const StatePair& a, const StatePair& b) {
  return inner_plus(p, a.u, b.u) + inner_minus(p, a.v, b.v);
}

template <SplitFunctional P>
double norm_x(const P& p, const StatePair& a) {
  return std::sqrt(std::max(0.0, inner_x(p, a, a)));
}

template <SplitFunctional P>
void check_state(const P& p, const StatePair& z) {
  if (z.u.size() != p.plus_size() || z.v.size() != p.minus_size()) {
    throw Error(ErrorCode::DimensionMismatch, "state pair does not conform to the problem");
  }
}

/// Φ(z) = ½‖u‖² − ½‖v‖² − I(u, v).
template <SplitFunctional P>
double phi(const P& p, const StatePair& z) {
  check_state(p, z);
  return 0.5 * inner_plus(p, z.u, z.u) - 0.5 * inner_minus(p, z.v, z.v) - p.nonlinear_value(z.u, z.v);
}

/// ⟨Φ'(z), w⟩ = ⟨u, w.u⟩ − ⟨v, w.v⟩ − ∫ w · ∇F(x, z).
template <SplitFunctional P>
double phi_prime_apply(const P& p, const StatePair& z, const StatePair& w) {
  check_state(p, z);
  check_state(p, w);
  const StatePair g = p.nonlinear_gradient(z.u, z.v);
  return inner_plus(p, z.u, w.u) - inner_minus(p, z.v, w.v) - g.u.dot(w.u) - g.v.dot(w.v);
}

/// Euclidean representation of Φ'(z): ⟨Φ'(z), w⟩ = e.u·w.u + e.v·w.v.
template <SplitFunctional P>
StatePair euclidean_gradient(const P& p, const StatePair& z) {
  check_state(p, z);
  const StatePair g = p.nonlinear_gradient(z.u, z.v);
  return {p.stiffness_plus() * z.u - g.u, -(p.stiffness_minus() * z.v) - g.v};
}

/// X-gradient: ⟨G, w⟩_X = ⟨Φ'(z), w⟩ for every w.
template <SplitFunctional P>
StatePair phi_gradient(const P& p, const StatePair& z) {
  check_state(p, z);
  const StatePair g = p.nonlinear_gradient(z.u, z.v);
  return {z.u - p.riesz_plus(g.u), -z.v - p.riesz_minus(g.v)};
}

// Grid-level conveniences matching the mesh-based signatures.

template <Nonlinearity F>
double phi(const Grid& g, const F& spec, const StatePair& z) {
  return phi(GridProblem<F>(g, spec), z);
}

template <Nonlinearity F>
double phi_prime_apply(const Grid& g, const F& spec, const StatePair& z, const StatePair& w) {
  return phi_prime_apply(GridProblem<F>(g, spec), z, w);
}

template <Nonlinearity F>
StatePair phi_gradient(const Grid& g, const F& spec, const StatePair& z) {
  return phi_gradient(GridProblem<F>(g, spec), z);
}

}  // namespace nehari
