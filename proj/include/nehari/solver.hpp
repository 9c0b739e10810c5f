#pragma once

// Ground states by minimizing Ψ over S⁺: Armijo-backtracking Riemannian
// gradient descent in the X metric with the normalization retraction, warm
// started inner solves, and seeded multistart.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nehari/energy.hpp"
#include "nehari/error.hpp"
#include "nehari/manifold.hpp"
#include "nehari/mesh.hpp"

namespace nehari {

struct ArmijoOptions {
  double c1 = 1e-4;
  double backtrack = 0.5;
  double alpha0 = 1.0;
  int max_backtracks = 50;
  // Start each search from the Barzilai-Borwein step ⟨s,s⟩/⟨s,y⟩ of the last
  // two iterates (alpha0 on the first iteration or when ⟨s,y⟩ <= 0).
  bool barzilai_borwein = true;
};

enum class StartMode { Eigen, Random };

struct SolveOptions {
  double tol_outer = 1e-8;
  int max_outer = 1000;
  ArmijoOptions armijo;
  int restarts = 5;
  std::uint64_t seed = 0;
  StartMode start = StartMode::Eigen;
  std::optional<Vector> initial;  // overrides `start` for the first run
  InnerOptions inner;
};

struct SolveReport {
  StatePair ground_state;
  Vector direction;  // w* on S⁺
  double energy = 0.0;
  double s_final = 0.0;
  double v_norm = 0.0;
  int outer_iterations = 0;
  std::vector<double> psi_history;
  std::vector<double> grad_norm_history;
  std::vector<double> state_norm_history;  // ‖m(w_k)‖_X
  std::vector<double> step_history;        // accepted α_k
  double residual_pde_inf = 0.0;
  double residual_manifold = 0.0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<double> multistart_energies;
  std::size_t best_restart = 0;
};

struct Residuals {
  double residual_pde_inf = 0.0;
  double residual_manifold = 0.0;
  bool is_trivial = false;
};

/// Nodal PDE residual and generalized-Nehari residual of a state.
template <SplitFunctional P>
Residuals residuals(const P& p, const StatePair& z) {
  check_state(p, z);
  Residuals r;
  const StatePair e = euclidean_gradient(p, z);
  if constexpr (requires { p.grid(); p.nodal_gradient(z); }) {
    // −Δ_h u − F_u and Δ_h v − F_v straight from the stencil
    const StatePair g = p.nodal_gradient(z);
    const Vector ru = -laplacian(p.grid(), z.u) - g.u;
    const Vector rv = laplacian(p.grid(), z.v) - g.v;
    r.residual_pde_inf = std::max(ru.template lpNorm<Eigen::Infinity>(), rv.template lpNorm<Eigen::Infinity>());
  } else {
    r.residual_pde_inf =
        std::max(e.u.template lpNorm<Eigen::Infinity>(), e.v.template lpNorm<Eigen::Infinity>()) / p.cell_volume();
  }
  const double zz = inner_x(p, z, z);
  const double along_z = std::abs(e.u.dot(z.u) + e.v.dot(z.v));
  const double along_minus = e.v.size() ? e.v.template lpNorm<Eigen::Infinity>() : 0.0;
  r.residual_manifold = std::max(along_z, along_minus) / (1.0 + zz);
  r.is_trivial = std::sqrt(std::max(0.0, zz)) < 1e-12;
  return r;
}

template <Nonlinearity F>
Residuals residuals(const Grid& g, const F& spec, const StatePair& z) {
  return residuals(GridProblem<F>(g, spec), z);
}

/// Normalized product of first Dirichlet eigenfunctions, sin(πx/L)[sin(πy/L)].
template <Nonlinearity F>
Vector default_direction(const GridProblem<F>& p) {
  const Grid& g = p.grid();
  Vector w(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const Point x = g.coordinate(k);
    double val = std::sin(std::numbers::pi * x[0] / g.extent());
    if (g.dim() == 2) val *= std::sin(std::numbers::pi * x[1] / g.extent());
    w[k] = val;
  }
  return w / norm_plus(p, w);
}

template <SplitFunctional P>
  requires requires(const P& p) { p.default_direction(); }
Vector default_direction(const P& p) {
  return retract(p, p.default_direction());
}

/// Smooth random direction: one X⁺ Riesz solve applied to Gaussian noise.
template <SplitFunctional P>
Vector random_direction(const P& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector g(p.plus_size());
  for (auto& x : g) x = gauss(rng);
  return retract(p, p.riesz_plus(g));
}

namespace detail {

inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t k) {
  return seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL * (k + 1);
}

template <SplitFunctional P>
SolveReport descend(const P& p, Vector w, const SolveOptions& opts) {
  ReducedFunctional<P> psi_fn(p, opts.inner, true);
  const auto& armijo = opts.armijo;
  SolveReport rep;
  w = retract(p, w);

  double psi = psi_fn.value(w);
  Vector g = psi_fn.gradient(w);
  double g2 = inner_plus(p, g, g);
  auto record = [&] {
    rep.psi_history.push_back(psi);
    rep.grad_norm_history.push_back(std::sqrt(g2));
    rep.state_norm_history.push_back(norm_x(p, psi_fn.evaluate(w).z));
  };
  record();

  double next_alpha = armijo.alpha0;
  for (int k = 0; k < opts.max_outer; ++k) {
    if (std::sqrt(g2) <= opts.tol_outer) {
      rep.converged = true;
      break;
    }
    double alpha = next_alpha;
    bool accepted = false;
    Vector trial;
    Vector g_trial;
    double psi_trial = 0.0;
    for (int b = 0; b <= armijo.max_backtracks; ++b, alpha *= armijo.backtrack) {
      trial = w - alpha * g;
      const double tn = norm_plus(p, trial);
      if (!(tn > kXMinusThreshold)) continue;
      trial /= tn;
      try {
        psi_trial = psi_fn.value(trial);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InnerFailure) throw;
        continue;
      }
      if (psi_trial <= psi - armijo.c1 * alpha * g2) {
        accepted = true;
      } else if (psi_trial <= psi + value_slack(psi)) {
        // The change in Ψ is at rounding level, so test sufficient decrease on
        // the slope instead: with φ(α) = Ψ(R(w − αG)), φ'(0) = −‖G‖² and
        // φ'(α) = −⟨G(α), G⟩/‖w − αG‖, require φ'(α) <= (2 c1 − 1) φ'(0).
        g_trial = psi_fn.gradient(trial);
        const double slope = -inner_plus(p, g_trial, g) / tn;
        accepted = slope <= (1.0 - 2.0 * armijo.c1) * g2;
      }
      if (accepted) break;
    }
    if (!accepted) {
      rep.line_search_failed = true;
      break;
    }
    Vector g_new = psi_fn.gradient(trial);
    if (armijo.barzilai_borwein) {
      const Vector ds = trial - w;
      const Vector dg = g_new - g;
      const double sy = inner_plus(p, ds, dg);
      const double bb = sy > 0.0 ? inner_plus(p, ds, ds) / sy : 0.0;
      next_alpha = (std::isfinite(bb) && bb > 1e-12 && bb < 1e12) ? bb : armijo.alpha0;
    }
    w = std::move(trial);
    psi = psi_trial;
    g = std::move(g_new);
    g2 = inner_plus(p, g, g);
    rep.step_history.push_back(alpha);
    rep.outer_iterations = k + 1;
    record();
  }
  if (!rep.converged && std::sqrt(g2) <= opts.tol_outer) rep.converged = true;

  const InnerMaxResult& m = psi_fn.evaluate(w);
  rep.direction = w;
  rep.ground_state = m.z;
  rep.energy = phi(p, m.z);
  rep.s_final = m.s;
  rep.v_norm = norm_minus(p, m.v);
  const Residuals res = residuals(p, m.z);
  rep.residual_pde_inf = res.residual_pde_inf;
  rep.residual_manifold = res.residual_manifold;
  return rep;
}

}  // namespace detail

template <SplitFunctional P>
void validate(const P& p, const SolveOptions& opts) {
  if (!(opts.tol_outer > 0.0) || !(opts.inner.tol > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "tolerances must be positive");
  }
  if (opts.max_outer < 1 || opts.inner.max_iter < 1) throw Error(ErrorCode::ConfigInvalid, "iteration limits must be >= 1");
  if (opts.restarts < 1) throw Error(ErrorCode::ConfigInvalid, "restarts must be >= 1");
  const auto& a = opts.armijo;
  if (!(a.c1 > 0.0 && a.c1 < 1.0) || !(a.backtrack > 0.0 && a.backtrack < 1.0) || !(a.alpha0 > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "Armijo parameters need 0 < c1 < 1, 0 < backtrack < 1, alpha0 > 0");
  }
  if (opts.initial && opts.initial->size() != p.plus_size()) {
    throw Error(ErrorCode::ConfigInvalid, "initial direction does not conform");
  }
}

/// Minimizes Ψ over S⁺ from `restarts` seeded starts and returns the lowest
/// energy run; `multistart_energies` lists every run in start order. A run
/// that hits max_outer is returned with converged == false.
template <SplitFunctional P>
SolveReport minimize_psi(const P& p, const SolveOptions& opts = {}) {
  validate(p, opts);
  std::vector<SolveReport> runs;
  runs.reserve(static_cast<std::size_t>(opts.restarts));
  for (std::size_t k = 0; k < static_cast<std::size_t>(opts.restarts); ++k) {
    Vector w0;
    if (k == 0 && opts.initial) {
      w0 = *opts.initial;
    } else if (k == 0 && opts.start == StartMode::Eigen) {
      w0 = default_direction(p);
    } else {
      w0 = random_direction(p, detail::restart_seed(opts.seed, k));
    }
    runs.push_back(detail::descend(p, std::move(w0), opts));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const auto& a = runs[k];
    const auto& b = runs[best];
    if ((a.converged && !b.converged) || (a.converged == b.converged && a.energy < b.energy)) best = k;
  }
  SolveReport out = std::move(runs[best]);
  out.best_restart = best;
  out.multistart_energies.clear();
  for (std::size_t k = 0; k < runs.size(); ++k) out.multistart_energies.push_back(k == best ? out.energy : runs[k].energy);
  return out;
}

// ---------------------------------------------------------------------------

struct PalaisSmaleTrace {
  bool pass = true;
  std::vector<std::string> warnings;  // MONOTONICITY, UNBOUNDED, NOT_CONVERGED, NON_FINITE
  double level = 0.0;                 // final Ψ
  double final_grad_norm = 0.0;
  double max_norm_growth = 1.0;       // largest ‖m(w_j)‖/‖m(w_i)‖ over windows of 20 iterations
};

/// Reads a report as a Palais-Smale sequence: bounded levels, vanishing
/// gradients, bounded iterates.
inline PalaisSmaleTrace palais_smale_trace(const SolveReport& report, double tol_outer = 1e-8) {
  PalaisSmaleTrace t;
  auto warn = [&](const char* w) {
    t.pass = false;
    t.warnings.emplace_back(w);
  };
  const auto& psi = report.psi_history;
  const auto& grad = report.grad_norm_history;
  const auto& norms = report.state_norm_history;
  if (psi.empty() || grad.empty()) {
    warn("NOT_CONVERGED");
    return t;
  }
  t.level = psi.back();
  t.final_grad_norm = grad.back();
  const bool finite = std::all_of(psi.begin(), psi.end(), [](double x) { return std::isfinite(x); }) &&
                      std::all_of(norms.begin(), norms.end(), [](double x) { return std::isfinite(x); });
  if (!finite) warn("NON_FINITE");
  for (std::size_t k = 1; k < psi.size(); ++k) {
    if (psi[k] > psi[k - 1] + detail::value_slack(psi[k - 1])) {
      warn("MONOTONICITY");
      break;
    }
  }
  if (!(t.final_grad_norm <= tol_outer)) warn("NOT_CONVERGED");
  constexpr std::size_t kWindow = 20;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    for (std::size_t j = i + 1; j < norms.size() && j <= i + kWindow; ++j) {
      if (norms[i] > 0.0) t.max_norm_growth = std::max(t.max_norm_growth, norms[j] / norms[i]);
    }
  }
  if (t.max_norm_growth >= 10.0) warn("UNBOUNDED");
  return t;
}

}  // namespace nehari
