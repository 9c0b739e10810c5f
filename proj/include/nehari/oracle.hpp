#pragma once

// Independent ground truth for the reduction:
//  * ToyModel, a finite-dimensional instance of the abstract split setting
//    with closed-form m̂ and critical set;
//  * newton_multistart, which looks for critical points of Φ directly by
//    damped Newton on the full first-order system, never touching S⁺ or m̂.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "nehari/energy.hpp"
#include "nehari/error.hpp"

namespace nehari {

/// Φ(a, b) = ½|a|² − ½|b|² − (c/4)(|a|² + |b|²)² on R^n⁺ × R^n⁻.
class ToyModel {
 public:
  ToyModel(int n_plus, int n_minus, double c) : n_plus_(n_plus), n_minus_(n_minus), c_(c) {
    if (n_plus < 1 || n_minus < 1) throw Error(ErrorCode::InvalidArgument, "toy model needs n+ >= 1 and n- >= 1");
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "toy model needs c > 0");
    kp_ = identity(n_plus);
    km_ = identity(n_minus);
  }

  int n_plus() const noexcept { return n_plus_; }
  int n_minus() const noexcept { return n_minus_; }
  double c() const noexcept { return c_; }

  Eigen::Index plus_size() const noexcept { return n_plus_; }
  Eigen::Index minus_size() const noexcept { return n_minus_; }
  const SparseMatrix& stiffness_plus() const noexcept { return kp_; }
  const SparseMatrix& stiffness_minus() const noexcept { return km_; }
  Vector riesz_plus(const Vector& r) const { return r; }
  Vector riesz_minus(const Vector& r) const { return r; }
  double cell_volume() const noexcept { return 1.0; }

  double nonlinear_value(const Vector& a, const Vector& b) const {
    const double r2 = a.squaredNorm() + b.squaredNorm();
    return 0.25 * c_ * r2 * r2;
  }

  StatePair nonlinear_gradient(const Vector& a, const Vector& b) const {
    const double r2 = a.squaredNorm() + b.squaredNorm();
    return {c_ * r2 * a, c_ * r2 * b};
  }

  HessianBlocks nonlinear_hessian(const Vector& a, const Vector& b) const {
    // c (r² I + 2 z zᵀ)
    const double r2 = a.squaredNorm() + b.squaredNorm();
    Eigen::MatrixXd uu = c_ * (r2 * Eigen::MatrixXd::Identity(n_plus_, n_plus_) + 2.0 * a * a.transpose());
    Eigen::MatrixXd uv = 2.0 * c_ * a * b.transpose();
    Eigen::MatrixXd vv = c_ * (r2 * Eigen::MatrixXd::Identity(n_minus_, n_minus_) + 2.0 * b * b.transpose());
    return {uu.sparseView(), uv.sparseView(), vv.sparseView()};
  }

  Vector default_direction() const { return Vector::Unit(n_plus_, 0); }

 private:
  static SparseMatrix identity(int n) {
    SparseMatrix m(n, n);
    m.setIdentity();
    return m;
  }

  int n_plus_;
  int n_minus_;
  double c_;
  SparseMatrix kp_;
  SparseMatrix km_;
};

static_assert(SplitFunctional<ToyModel>);

struct ToyMhat {
  double s = 0.0;
  Vector v;
  double value = 0.0;
};

/// Closed form of m̂ for the toy model: v = 0, s = c^(-1/2), Φ = 1/(4c).
inline ToyMhat toy_mhat(const ToyModel& model, const Vector& w_plus) {
  if (w_plus.size() != model.n_plus()) throw Error(ErrorCode::DimensionMismatch, "direction does not conform");
  if (!(w_plus.norm() > 0.0)) throw Error(ErrorCode::WInXMinus, "toy m-hat needs a nonzero direction");
  return {1.0 / std::sqrt(model.c()), Vector::Zero(model.n_minus()), 0.25 / model.c()};
}

// ---------------------------------------------------------------------------

struct CriticalPoint {
  StatePair z;
  double energy = 0.0;
  double residual = 0.0;  // max-norm nodal residual of the first-order system
};

struct CriticalPointSet {
  std::vector<CriticalPoint> points;  // nontrivial, deduplicated, sorted by energy
  std::optional<double> min_energy;
  int starts = 0;
  int diverged = 0;
  int trivial = 0;
};

struct NewtonOptions {
  int count = 64;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int max_iter = 100;
  int max_halvings = 30;
  double radius_min = 0.3;
  double radius_max = 30.0;
  double dedup_distance = 1e-6;
  double trivial_norm = 1e-8;
};

namespace detail {

template <SplitFunctional P>
Vector stacked_residual(const P& p, const StatePair& z) {
  const StatePair e = euclidean_gradient(p, z);
  Vector r(e.u.size() + e.v.size());
  r << e.u, e.v;
  return r;
}

template <SplitFunctional P>
SparseMatrix jacobian(const P& p, const StatePair& z) {
  // Hessian of Φ: [[K⁺ − I_uu, −I_uv], [−I_vu, −K⁻ − I_vv]]
  const HessianBlocks h = p.nonlinear_hessian(z.u, z.v);
  const SparseMatrix a = p.stiffness_plus() - h.uu;
  const SparseMatrix b = -h.uv;
  const SparseMatrix c = SparseMatrix(-h.uv.transpose());
  const SparseMatrix d = -(p.stiffness_minus() + h.vv);
  const auto np = a.rows();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * b.nonZeros() + d.nonZeros()));
  auto add = [&](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) t.emplace_back(it.row() + r0, it.col() + c0, it.value());
    }
  };
  add(a, 0, 0);
  add(b, 0, np);
  add(c, np, 0);
  add(d, np, np);
  SparseMatrix j(np + d.rows(), np + d.rows());
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

template <SplitFunctional P>
std::optional<StatePair> damped_newton(const P& p, StatePair z, const NewtonOptions& opts) {
  const double vol = p.cell_volume();
  const auto np = p.plus_size();
  const auto nm = p.minus_size();
  Vector r = stacked_residual(p, z);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (r.lpNorm<Eigen::Infinity>() / vol <= opts.tol) return z;
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(jacobian(p, z));
    if (lu.info() != Eigen::Success) return std::nullopt;
    const Vector step = lu.solve(-r);
    if (!step.allFinite()) return std::nullopt;
    const double r0 = r.norm();
    double t = 1.0;
    bool decreased = false;
    for (int k = 0; k <= opts.max_halvings; ++k, t *= 0.5) {
      StatePair trial{z.u + t * step.head(np), z.v + t * step.tail(nm)};
      Vector rt = stacked_residual(p, trial);
      if (rt.allFinite() && rt.norm() < r0) {
        z = std::move(trial);
        r = std::move(rt);
        decreased = true;
        break;
      }
    }
    if (!decreased) return std::nullopt;
    if (!z.u.allFinite() || !z.v.allFinite() || norm_x(p, z) > 1e12) return std::nullopt;
  }
  if (r.lpNorm<Eigen::Infinity>() / vol <= opts.tol) return z;
  return std::nullopt;
}

}  // namespace detail

/// Damped Newton on Φ'(z) = 0 from `count` seeded random starts. Starts are
/// smoothed Gaussian vectors (one Riesz solve) scaled to a log-uniform
/// X-norm radius, so they resemble H¹₀ functions rather than nodal noise.
template <SplitFunctional P>
CriticalPointSet newton_multistart(const P& p, const NewtonOptions& opts = {}) {
  if (opts.count < 1) throw Error(ErrorCode::InvalidArgument, "newton_multistart needs count >= 1");
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto smooth_random = [&](Eigen::Index n, bool plus) {
    Vector g(n);
    for (auto& x : g) x = gauss(rng);
    Vector s = plus ? p.riesz_plus(g) : p.riesz_minus(g);
    const double nrm = plus ? norm_plus(p, s) : norm_minus(p, s);
    return Vector(s / nrm);
  };

  CriticalPointSet set;
  set.starts = opts.count;
  for (int k = 0; k < opts.count; ++k) {
    const double radius = opts.radius_min * std::pow(opts.radius_max / opts.radius_min, unit(rng));
    const double v_share = unit(rng);
    StatePair z0{radius * smooth_random(p.plus_size(), true), v_share * radius * smooth_random(p.minus_size(), false)};
    auto found = detail::damped_newton(p, std::move(z0), opts);
    if (!found) {
      ++set.diverged;
      continue;
    }
    if (norm_x(p, *found) < opts.trivial_norm) {
      ++set.trivial;
      continue;
    }
    const bool duplicate = std::any_of(set.points.begin(), set.points.end(), [&](const CriticalPoint& c) {
      return norm_x(p, c.z - *found) <= opts.dedup_distance;
    });
    if (duplicate) continue;
    const double residual = detail::stacked_residual(p, *found).template lpNorm<Eigen::Infinity>() / p.cell_volume();
    set.points.push_back({*found, phi(p, *found), residual});
  }
  if (set.diverged == set.starts) throw Error(ErrorCode::NoSolutions, "every Newton start diverged");
  std::sort(set.points.begin(), set.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.energy < b.energy; });
  if (!set.points.empty()) set.min_energy = set.points.front().energy;
  return set;
}

}  // namespace nehari
