#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nehari/energy.hpp"
#include "nehari/gradcheck.hpp"
#include "nehari/oracle.hpp"
#include "support.hpp"

using namespace nehari;

namespace {

const Grid kG = build_grid(1, 3);
const PowerNonlinearity kQuartic = PowerNonlinearity::make(4, ConstantWeight{1}, kG);

StatePair random_state(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  return {scale * test::gaussian(g.size(), rng), scale * test::gaussian(g.size(), rng)};
}

}  // namespace

TEST(Phi, HandValues) {
  const Vector ones = Vector::Ones(3), zero = Vector::Zero(3);
  EXPECT_EQ(phi(kG, kQuartic, {zero, zero}), 0.0);
  EXPECT_NEAR(phi(kG, kQuartic, {ones, zero}), 3.25, 1e-14);
  EXPECT_NEAR(phi(kG, kQuartic, {zero, ones}), -4.75, 1e-14);
}

TEST(PhiPrime, HandValues) {
  const Vector ones = Vector::Ones(3), zero = Vector::Zero(3);
  const StatePair z{ones, zero};
  EXPECT_NEAR(phi_prime_apply(kG, kQuartic, z, z), 5.0, 1e-14);
  EXPECT_EQ(phi_prime_apply(kG, kQuartic, {zero, zero}, {ones, ones}), 0.0);
  const StatePair g = phi_gradient(kG, kQuartic, {zero, zero});
  EXPECT_EQ(g.u.norm() + g.v.norm(), 0.0);
}

TEST(PhiPrime, RejectsNonConforming) {
  try {
    phi(kG, kQuartic, {Vector::Ones(4), Vector::Ones(3)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(PhiPrime, MatchesFiniteDifferences) {
  for (int dim : {1, 2}) {
    for (double p : {3.0, 4.0}) {
      const auto prob = test::power_problem(dim, dim == 1 ? 15 : 7, p);
      const GradcheckResult r = check_phi_derivative(prob, 20);
      EXPECT_EQ(r.samples, 20);
      EXPECT_LE(r.max_rel_error, 1e-6) << "dim " << dim << " p " << p;
    }
  }
}

TEST(PhiGradient, RepresentsDerivative) {
  std::mt19937_64 rng(31);
  const auto prob = test::power_problem(2, 6, 3.0);
  for (int k = 0; k < 10; ++k) {
    const StatePair z = random_state(prob.grid(), rng);
    const StatePair w = random_state(prob.grid(), rng);
    const double d = phi_prime_apply(prob, z, w);
    EXPECT_NEAR(inner_x(prob, phi_gradient(prob, z), w), d, 1e-10 * (1 + std::abs(d)));
  }
}

TEST(Splitting, NormsAdd) {
  std::mt19937_64 rng(32);
  const auto prob = test::power_problem(1, 15, 4.0);
  for (int k = 0; k < 20; ++k) {
    const StatePair z = random_state(prob.grid(), rng);
    const double whole = norm_x(prob, z) * norm_x(prob, z);
    const double parts = std::pow(norm_plus(prob, z.u), 2) + std::pow(norm_minus(prob, z.v), 2);
    EXPECT_NEAR(whole, parts, 1e-12 * whole);
    EXPECT_NEAR(inner_x(prob, {z.u, Vector::Zero(z.v.size())}, {Vector::Zero(z.u.size()), z.v}), 0.0, 1e-14);
  }
}

TEST(SignStructure, NegativeOnXMinus) {
  std::mt19937_64 rng(33);
  const auto prob = test::power_problem(1, 15, 3.0);
  for (int k = 0; k < 50; ++k) {
    const Vector v = 5.0 * test::gaussian(15, rng);
    EXPECT_LE(phi(prob, {Vector::Zero(15), v}), 0.0);
  }
}

TEST(SignStructure, SuperquadraticIntegral) {
  std::mt19937_64 rng(34);
  for (double p : {2.5, 4.0}) {
    const auto prob = test::power_problem(1, 11, p);
    for (int k = 0; k < 20; ++k) {
      const StatePair z = random_state(prob.grid(), rng);
      const double i = prob.nonlinear_value(z.u, z.v);
      const StatePair g = prob.nonlinear_gradient(z.u, z.v);
      const double half_prime = 0.5 * (g.u.dot(z.u) + g.v.dot(z.v));
      EXPECT_GT(half_prime, i);
      EXPECT_GT(i, 0.0);
      EXPECT_NEAR(half_prime / i, p / 2.0, 1e-12);
    }
  }
}

TEST(Toy, PhiAndDerivative) {
  const ToyModel toy(2, 2, 1.5);
  std::mt19937_64 rng(35);
  const StatePair z{test::gaussian(2, rng), test::gaussian(2, rng)};
  const double r2 = z.u.squaredNorm() + z.v.squaredNorm();
  EXPECT_NEAR(phi(toy, z), 0.5 * z.u.squaredNorm() - 0.5 * z.v.squaredNorm() - 1.5 / 4 * r2 * r2, 1e-12);
  EXPECT_LE(check_phi_derivative(toy, 20).max_rel_error, 1e-6);
}

TEST(Hessian, MatchesGradientDifferences) {
  std::mt19937_64 rng(36);
  const auto prob = test::power_problem(1, 9, 3.5);
  const StatePair z = random_state(prob.grid(), rng);
  const StatePair w = random_state(prob.grid(), rng);
  const double h = 1e-6;
  const StatePair gp = prob.nonlinear_gradient(z.u + h * w.u, z.v + h * w.v);
  const StatePair gm = prob.nonlinear_gradient(z.u - h * w.u, z.v - h * w.v);
  const HessianBlocks hb = prob.nonlinear_hessian(z.u, z.v);
  const Vector hu = hb.uu * w.u + hb.uv * w.v;
  const Vector hv = SparseMatrix(hb.uv.transpose()) * w.u + hb.vv * w.v;
  EXPECT_LE(((gp.u - gm.u) / (2 * h) - hu).norm(), 1e-6 * (1 + hu.norm()));
  EXPECT_LE(((gp.v - gm.v) / (2 * h) - hv).norm(), 1e-6 * (1 + hv.norm()));
}
