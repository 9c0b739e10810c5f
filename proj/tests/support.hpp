#pragma once

#include <cstdint>
#include <random>

#include "nehari/energy.hpp"
#include "nehari/mesh.hpp"
#include "nehari/nonlinearity.hpp"

namespace nehari::test {

inline GridProblem<PowerNonlinearity> power_problem(int dim, int n, double p, double c = 1.0) {
  Grid g(dim, n);
  return GridProblem<PowerNonlinearity>(g, PowerNonlinearity::make(p, ConstantWeight{c}, g));
}

inline Vector gaussian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace nehari::test
