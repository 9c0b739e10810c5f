#pragma once

// Generalized Nehari manifold machinery.
//
// For w with w⁺ != 0, m̂(w) is the maximizer of Φ on the half-space
// X̂(w) = R⁺ŵ ⊕ X⁻, ŵ = w⁺/‖w⁺‖. Points of the form m̂(w) make up the manifold
// ℳ, m = m̂ restricted to the unit sphere S⁺ is a homeomorphism onto ℳ with
// inverse z -> z⁺/‖z⁺‖, and the reduced functional Ψ = Φ ∘ m has X-gradient
// ‖m(w)⁺‖ · (Φ'(m(w)) restricted to the tangent space T_w S⁺).
//
// The maximization over X̂(w) alternates two blocks:
//   v-block: Φ(sŵ + v) is strictly concave in v for convex F, so damped Newton
//            on -(K⁻ + I''_vv) converges; Sobolev-gradient ascent is the fallback
//            when the Newton matrix is not positive definite.
//   s-block: a scalar problem d/ds Φ(sŵ + v) = 0 solved by safeguarded Newton
//            inside a bracket found by doubling from s = 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "nehari/energy.hpp"
#include "nehari/error.hpp"

namespace nehari {

struct InnerStart {
  double s = 1.0;
  Vector v;
};

struct InnerOptions {
  double tol = 1e-10;
  int max_iter = 200;
  std::optional<InnerStart> warm_start;
};

struct InnerMaxResult {
  double s = 0.0;
  Vector v;
  StatePair z;         // s·ŵ + (0, v)
  Vector direction;    // ŵ, the normalized X⁺ direction
  double phi_value = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;  // X-norm of Φ' restricted to X(ŵ)
  bool converged = false;
};

namespace detail {

inline constexpr double kXMinusThreshold = 1e-14;
inline constexpr double kDegenerateS = 1e-10;
inline constexpr double kArmijoC1 = 1e-4;

// Relative slack that absorbs rounding in Φ when comparing function values.
inline double value_slack(double f) { return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f)); }

template <SplitFunctional P>
class InnerSolver {
 public:
  InnerSolver(const P& p, Vector direction, double tol)
      : p_(p), w_(std::move(direction)), tol_(tol), kww_(inner_plus(p, w_, w_)) {}

  StatePair state(double s, const Vector& v) const { return {s * w_, v}; }

  double value(double s, const Vector& v) const { return phi(p_, state(s, v)); }

  // d/ds Φ(sŵ + v)
  double ds(double s, const Vector& v) const {
    const StatePair g = p_.nonlinear_gradient(s * w_, v);
    return s * kww_ - w_.dot(g.u);
  }

  double dss(double s, const Vector& v) const {
    const HessianBlocks h = p_.nonlinear_hessian(s * w_, v);
    return kww_ - w_.dot(h.uu * w_);
  }

  // Euclidean v-gradient -K⁻v - I_v and its X-norm.
  std::pair<Vector, double> v_gradient(double s, const Vector& v) const {
    const StatePair g = p_.nonlinear_gradient(s * w_, v);
    Vector grad = -(p_.stiffness_minus() * v) - g.v;
    const Vector riesz = p_.riesz_minus(grad);
    return {std::move(grad), std::sqrt(std::max(0.0, grad.dot(riesz)))};
  }

  double restricted_grad_norm(double s, const Vector& v) const {
    const double d = ds(s, v);
    return std::sqrt(d * d + std::pow(v_gradient(s, v).second, 2));
  }

  // Maximizes Φ(sŵ + v) over v at fixed s.
  void maximize_v(double s, Vector& v) const {
    for (int it = 0; it < 50; ++it) {
      const double f0 = value(s, v);
      auto [grad, gnorm] = v_gradient(s, v);
      if (gnorm <= 0.1 * tol_ * (1.0 + std::abs(f0))) return;

      Vector step;
      const HessianBlocks h = p_.nonlinear_hessian(s * w_, v);
      const SparseMatrix newton = p_.stiffness_minus() + h.vv;
      Eigen::SimplicialLLT<SparseMatrix> llt(newton);
      if (llt.info() == Eigen::Success) step = llt.solve(grad);
      double slope = step.size() ? grad.dot(step) : 0.0;
      if (!(slope > 0.0) || !step.allFinite()) {
        step = p_.riesz_minus(grad);
        slope = grad.dot(step);
      }

      double t = 1.0;
      bool accepted = false;
      for (int b = 0; b < 60; ++b, t *= 0.5) {
        const Vector trial = v + t * step;
        if (value(s, trial) >= f0 + kArmijoC1 * t * slope - value_slack(f0)) {
          v = trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) return;
    }
  }

  // Maximizes Φ(sŵ + v) over s >= 0 at fixed v.
  double maximize_s(const Vector& v, double s_hint) const {
    double hi = 1.0;
    int doublings = 0;
    while (ds(hi, v) >= 0.0) {
      hi *= 2.0;
      if (++doublings > 200) {
        throw Error(ErrorCode::NoConvergence, "no sign change of dPhi/ds while bracketing s (superquadratic growth fails)");
      }
    }
    double lo = hi;
    do {
      lo *= 0.5;
      if (lo < 1e-14 * hi) return 0.0;  // Φ decreasing in s: boundary maximum
    } while (ds(lo, v) <= 0.0);

    // Safeguarded Newton on ds(s) = 0 with ds(lo) > 0 > ds(hi).
    double s = (s_hint > lo && s_hint < hi) ? s_hint : 0.5 * (lo + hi);
    const double scale = 1.0 + std::abs(value(s, v));
    for (int it = 0; it < 200; ++it) {
      const double d = ds(s, v);
      if (std::abs(d) <= 1e-3 * tol_ * scale) break;
      if (d > 0.0) lo = s; else hi = s;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
      const double curvature = dss(s, v);
      double next = curvature < 0.0 ? s - d / curvature : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      s = next;
    }
    return s;
  }

 private:
  const P& p_;
  Vector w_;
  double tol_;
  double kww_;
};

}  // namespace detail

/// m̂(w): the global maximizer of Φ on R⁺ŵ ⊕ X⁻. Only w.u is used; w need not
/// be normalized.
template <SplitFunctional P>
InnerMaxResult inner_maximize(const P& p, const Vector& w_plus, const InnerOptions& opts = {}) {
  if (w_plus.size() != p.plus_size()) throw Error(ErrorCode::DimensionMismatch, "direction does not conform");
  const double wn = norm_plus(p, w_plus);
  if (!(wn > detail::kXMinusThreshold)) {
    throw Error(ErrorCode::WInXMinus, "direction has no X+ component (w lies in X-)");
  }
  Vector dir = w_plus / wn;
  detail::InnerSolver<P> solver(p, dir, opts.tol);

  double s = 1.0;
  Vector v = Vector::Zero(p.minus_size());
  if (opts.warm_start) {
    s = std::max(0.0, opts.warm_start->s);
    if (opts.warm_start->v.size() == p.minus_size()) v = opts.warm_start->v;
  }

  InnerMaxResult r;
  for (int it = 1; it <= opts.max_iter; ++it) {
    solver.maximize_v(s, v);
    s = solver.maximize_s(v, s);
    const double value = solver.value(s, v);
    const double gnorm = solver.restricted_grad_norm(s, v);
    r.iterations = it;
    r.grad_norm = gnorm;
    r.phi_value = value;
    if (gnorm <= opts.tol * (1.0 + std::abs(value))) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) {
    throw Error(ErrorCode::NoConvergence, "inner maximization did not reach tolerance in " +
                                              std::to_string(opts.max_iter) + " iterations (gradient " +
                                              std::to_string(r.grad_norm) + ")");
  }
  if (s <= detail::kDegenerateS) {
    throw Error(ErrorCode::DegenerateS, "maximizer has vanishing X+ part (s = " + std::to_string(s) + ")");
  }
  r.s = s;
  r.z = solver.state(s, v);
  r.v = std::move(v);
  r.direction = std::move(dir);
  return r;
}

template <SplitFunctional P>
InnerMaxResult inner_maximize(const P& p, const StatePair& w, const InnerOptions& opts = {}) {
  return inner_maximize(p, w.u, opts);
}

struct InnerUniqueness {
  bool unique = true;
  std::string diagnostic;            // "NON_UNIQUE" when restarts disagree
  double spread = 0.0;               // max X-distance to the first result
  std::vector<InnerMaxResult> runs;  // one per restart, in start order
  std::size_t first = 0, second = 0; // the most distant pair when not unique
};

/// Runs inner_maximize from `restarts` seeded random (s, v) starts and
/// compares the maximizers. Disagreement beyond `agree` is reported, not
/// resolved.
template <SplitFunctional P>
InnerUniqueness inner_uniqueness(const P& p, const Vector& w_plus, int restarts = 10, std::uint64_t seed = 3,
                                 const InnerOptions& opts = {}, double agree = 1e-6) {
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "inner_uniqueness needs restarts >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  InnerUniqueness out;
  for (int k = 0; k < restarts; ++k) {
    Vector g(p.minus_size());
    for (auto& x : g) x = gauss(rng);
    Vector v = p.riesz_minus(g);
    v *= 3.0 * unit(rng) / norm_minus(p, v);
    InnerOptions o = opts;
    o.warm_start = InnerStart{0.1 * std::pow(100.0, unit(rng)), std::move(v)};
    out.runs.push_back(inner_maximize(p, w_plus, o));
  }
  for (std::size_t k = 1; k < out.runs.size(); ++k) {
    const double d = norm_x(p, out.runs[k].z - out.runs[0].z);
    if (d > out.spread) {
      out.spread = d;
      out.second = k;
    }
  }
  if (out.spread > agree) {
    out.unique = false;
    out.diagnostic = "NON_UNIQUE";
  }
  return out;
}

/// m⁻¹(z) = z⁺/‖z⁺‖ as an element of S⁺ (v-component zero).
template <SplitFunctional P>
StatePair m_inverse(const P& p, const StatePair& z) {
  check_state(p, z);
  const double n = norm_plus(p, z.u);
  if (!(n > detail::kXMinusThreshold)) throw Error(ErrorCode::ZInXMinus, "state has no X+ component");
  return {z.u / n, Vector::Zero(p.minus_size())};
}

/// Ψ on S⁺ with a one-entry cache: the gradient at the most recently
/// evaluated point reuses its inner solve. Successive inner solves are warm
/// started from the previous (s, v) unless disabled.
template <SplitFunctional P>
class ReducedFunctional {
 public:
  ReducedFunctional(const P& p, InnerOptions opts = {}, bool warm_start = true)
      : p_(p), opts_(std::move(opts)), warm_(warm_start) {}

  const P& problem() const noexcept { return p_; }

  /// m(w) for w on S⁺.
  const InnerMaxResult& evaluate(const Vector& w) {
    check_on_sphere(w);
    if (cached_w_ && cached_w_->size() == w.size() && *cached_w_ == w) return cached_;
    InnerOptions o = opts_;
    if (warm_ && cached_w_) o.warm_start = InnerStart{cached_.s, cached_.v};
    try {
      cached_ = inner_maximize(p_, w, o);
    } catch (const Error& e) {
      cached_w_.reset();
      if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::DegenerateS) {
        throw Error(ErrorCode::InnerFailure, e.what());
      }
      throw;
    }
    cached_w_ = w;
    ++evaluations_;
    return cached_;
  }

  /// Ψ(w) = Φ(m(w)).
  double value(const Vector& w) { return evaluate(w).phi_value; }

  /// Ψ̂(w) for any w with w⁺ != 0, via normalization.
  double value_unnormalized(const Vector& w) {
    const double n = norm_plus(p_, w);
    if (!(n > detail::kXMinusThreshold)) throw Error(ErrorCode::WInXMinus, "direction lies in X-");
    return value(w / n);
  }

  /// Tangent X-gradient of Ψ at w: s · G⁺ projected onto T_w S⁺, where G⁺ is
  /// the X⁺ part of the X-gradient of Φ at m(w).
  Vector gradient(const Vector& w) {
    const InnerMaxResult& r = evaluate(w);
    const StatePair g = phi_gradient(p_, r.z);
    Vector gt = r.s * g.u;
    gt -= inner_plus(p_, gt, w) * w;
    return gt;
  }

  int evaluations() const noexcept { return evaluations_; }

 private:
  void check_on_sphere(const Vector& w) const {
    if (w.size() != p_.plus_size()) throw Error(ErrorCode::DimensionMismatch, "direction does not conform");
    const double n = norm_plus(p_, w);
    if (std::abs(n - 1.0) > 1e-10) {
      throw Error(ErrorCode::InvalidArgument, "direction is not on the unit sphere (norm " + std::to_string(n) + ")");
    }
  }

  const P& p_;
  InnerOptions opts_;
  bool warm_;
  std::optional<Vector> cached_w_;
  InnerMaxResult cached_;
  int evaluations_ = 0;
};

template <SplitFunctional P>
double psi(const P& p, const Vector& w_on_sphere, const InnerOptions& opts = {}) {
  return ReducedFunctional<P>(p, opts, false).value(w_on_sphere);
}

template <SplitFunctional P>
Vector psi_gradient(const P& p, const Vector& w_on_sphere, const InnerOptions& opts = {}) {
  return ReducedFunctional<P>(p, opts, false).gradient(w_on_sphere);
}

/// Normalization retraction onto S⁺.
template <SplitFunctional P>
Vector retract(const P& p, const Vector& w) {
  const double n = norm_plus(p, w);
  if (!(n > detail::kXMinusThreshold)) throw Error(ErrorCode::WInXMinus, "cannot retract a vanishing direction");
  return w / n;
}

}  // namespace nehari
