#pragma once

// Central-difference checks of the analytic derivatives of Φ and Ψ.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "nehari/energy.hpp"
#include "nehari/manifold.hpp"
#include "nehari/solver.hpp"

namespace nehari {

struct GradcheckResult {
  int samples = 0;
  double max_rel_error = 0.0;
};

/// |⟨Φ'(z), w⟩ − FD| / (1 + |FD|) over random smooth (z, w), central step h.
template <SplitFunctional P>
GradcheckResult check_phi_derivative(const P& p, int samples = 20, std::uint64_t seed = 7, double h = 1e-6,
                                     double amplitude = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto smooth = [&](bool plus) {
    Vector g(plus ? p.plus_size() : p.minus_size());
    for (auto& x : g) x = gauss(rng);
    Vector s = plus ? p.riesz_plus(g) : p.riesz_minus(g);
    const double n = plus ? norm_plus(p, s) : norm_minus(p, s);
    return Vector(s / n);
  };
  GradcheckResult r;
  for (int k = 0; k < samples; ++k) {
    const StatePair z{amplitude * smooth(true), amplitude * smooth(false)};
    const StatePair w{smooth(true), smooth(false)};
    const double fd = (phi(p, z + h * w) - phi(p, z - h * w)) / (2.0 * h);
    const double an = phi_prime_apply(p, z, w);
    r.max_rel_error = std::max(r.max_rel_error, std::abs(an - fd) / (1.0 + std::abs(fd)));
    ++r.samples;
  }
  return r;
}

/// Tangent gradient of Ψ at a random w ∈ S⁺ against
/// (Ψ(R(w + εz)) − Ψ(R(w − εz)))/(2ε) for random unit tangent z. The error is
/// measured relative to max(|FD|, ‖G_t‖), the natural scale of a directional
/// derivative along a unit direction.
template <SplitFunctional P>
GradcheckResult check_psi_gradient(const P& p, int samples = 20, std::uint64_t seed = 11, double eps = 1e-5,
                                   const InnerOptions& inner = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const Vector w = random_direction(p, seed);
  ReducedFunctional<P> psi_fn(p, inner, false);
  const Vector g = psi_fn.gradient(w);
  const double gnorm = norm_plus(p, g);
  GradcheckResult r;
  for (int k = 0; k < samples; ++k) {
    Vector z(p.plus_size());
    for (auto& x : z) x = gauss(rng);
    z = p.riesz_plus(z);
    z -= inner_plus(p, z, w) * w;
    z /= norm_plus(p, z);
    const double fd = (psi_fn.value(retract(p, Vector(w + eps * z))) - psi_fn.value(retract(p, Vector(w - eps * z)))) /
                      (2.0 * eps);
    const double an = inner_plus(p, g, z);
    const double scale = std::max({std::abs(fd), gnorm, 1e-300});
    r.max_rel_error = std::max(r.max_rel_error, std::abs(an - fd) / scale);
    ++r.samples;
  }
  return r;
}

}  // namespace nehari
