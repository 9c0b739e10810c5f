#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nehari/mesh.hpp"
#include "support.hpp"

using namespace nehari;

TEST(Grid, OneDimensional) {
  const Grid g = build_grid(1, 3, 1.0);
  EXPECT_DOUBLE_EQ(g.h(), 0.25);
  ASSERT_EQ(g.size(), 3);
  EXPECT_DOUBLE_EQ(g.coordinate(0)[0], 0.25);
  EXPECT_DOUBLE_EQ(g.coordinate(1)[0], 0.5);
  EXPECT_DOUBLE_EQ(g.coordinate(2)[0], 0.75);
}

TEST(Grid, TwoDimensional) {
  const Grid g = build_grid(2, 3, 1.0);
  EXPECT_EQ(g.size(), 9);
  EXPECT_DOUBLE_EQ(g.h(), 0.25);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.0625);
  const Point x = g.coordinate(g.index(2, 1));
  EXPECT_DOUBLE_EQ(x[0], 0.75);
  EXPECT_DOUBLE_EQ(x[1], 0.5);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(build_grid(3, 3, 1.0), Error);
  EXPECT_THROW(build_grid(1, 0, 1.0), Error);
  EXPECT_THROW(build_grid(1, 3, 0.0), Error);
  try {
    build_grid(3, 3);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(InnerProduct, HandSums) {
  const Grid g = build_grid(1, 3);
  const Vector ones = Vector::Ones(3);
  EXPECT_DOUBLE_EQ(inner_product_x(g, ones, ones), 8.0);
  EXPECT_DOUBLE_EQ(inner_product_x(g, Vector::Zero(3), ones), 0.0);
  EXPECT_DOUBLE_EQ(inner_product_x(g, Vector::Unit(3, 0), Vector::Unit(3, 2)), 0.0);
}

TEST(InnerProduct, RejectsNonConforming) {
  const Grid g = build_grid(1, 3);
  try {
    inner_product_x(g, Vector::Ones(4), Vector::Ones(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(InnerProduct, SymmetricAndPositive) {
  std::mt19937_64 rng(5);
  for (int dim : {1, 2}) {
    const Grid g(dim, 9);
    for (int k = 0; k < 20; ++k) {
      const Vector a = test::gaussian(g.size(), rng);
      const Vector b = test::gaussian(g.size(), rng);
      EXPECT_NEAR(inner_product_x(g, a, b), inner_product_x(g, b, a), 1e-12 * (1 + std::abs(inner_product_x(g, a, b))));
      EXPECT_GT(inner_product_x(g, a, a), 0.0);
    }
  }
}

TEST(InnerProduct, MatchesStiffnessMatrix) {
  std::mt19937_64 rng(6);
  for (int dim : {1, 2}) {
    const Grid g(dim, 7);
    const SparseMatrix k = stiffness_matrix(g);
    const Vector a = test::gaussian(g.size(), rng);
    const Vector b = test::gaussian(g.size(), rng);
    const double ref = a.dot(k * b);
    EXPECT_NEAR(inner_product_x(g, a, b), ref, 1e-12 * (1 + std::abs(ref)));
  }
}

TEST(Quadrature, HandSums) {
  const Grid g1 = build_grid(1, 3);
  EXPECT_DOUBLE_EQ(quadrature(g1, Vector::LinSpaced(3, 1, 3)), 1.5);
  EXPECT_DOUBLE_EQ(quadrature(g1, Vector::Zero(3)), 0.0);
  const Grid g2 = build_grid(2, 3);
  EXPECT_DOUBLE_EQ(quadrature(g2, Vector::Ones(9)), 0.5625);
}

TEST(Riesz, HandSolve) {
  const Grid g = build_grid(1, 3);
  const Vector w = sobolev_riesz(g, Vector::Unit(3, 0));
  EXPECT_NEAR(w[0], 0.1875, 1e-14);
  EXPECT_NEAR(w[1], 0.125, 1e-14);
  EXPECT_NEAR(w[2], 0.0625, 1e-14);
  EXPECT_EQ(sobolev_riesz(g, Vector::Zero(3)).norm(), 0.0);
}

TEST(Riesz, InvertsStiffness) {
  std::mt19937_64 rng(7);
  for (int dim : {1, 2}) {
    const Grid g(dim, 11);
    const Vector w = test::gaussian(g.size(), rng);
    const Vector back = sobolev_riesz(g, stiffness_matrix(g) * w);
    EXPECT_LE((back - w).norm(), 1e-9 * w.norm()) << "dim " << dim;
  }
}

TEST(Riesz, Consistency) {
  std::mt19937_64 rng(8);
  for (int dim : {1, 2}) {
    const Grid g(dim, 13);
    for (int k = 0; k < 20; ++k) {
      const Vector r = test::gaussian(g.size(), rng);
      const Vector w = test::gaussian(g.size(), rng);
      const double rw = r.dot(w);
      EXPECT_LE(std::abs(inner_product_x(g, sobolev_riesz(g, r), w) - rw), 1e-10 * (1 + std::abs(rw)));
    }
  }
}

TEST(Riesz, SolverSurvivesCopy) {
  const Grid g(2, 5);
  StiffnessSolver original(g);
  const StiffnessSolver copy = original;
  original = StiffnessSolver(Grid(2, 5));
  const Vector r = Vector::Ones(g.size());
  EXPECT_LE((stiffness_matrix(g) * copy.solve(r) - r).norm(), 1e-10);
}

TEST(Laplacian, AgreesWithStiffness) {
  std::mt19937_64 rng(9);
  for (int dim : {1, 2}) {
    const Grid g(dim, 6);
    const Vector a = test::gaussian(g.size(), rng);
    const Vector ref = -(stiffness_matrix(g) * a) / g.cell_volume();
    EXPECT_LE((laplacian(g, a) - ref).lpNorm<Eigen::Infinity>(), 1e-10 * ref.lpNorm<Eigen::Infinity>());
  }
}

// ∫|f'|² for f = sin(πx) is π²/2.
TEST(Refinement, SecondOrder) {
  auto error = [](int n) {
    const Grid g(1, n);
    Vector f(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) f[k] = std::sin(std::numbers::pi * g.coordinate(k)[0]);
    return std::abs(inner_product_x(g, f, f) - std::numbers::pi * std::numbers::pi / 2.0);
  };
  const double e1 = error(15), e2 = error(31), e3 = error(63);
  EXPECT_NEAR(e1 / e2, 4.0, 0.1);
  EXPECT_NEAR(e2 / e3, 4.0, 0.1);
}
