#pragma once

// Seeded sample generators shared by the constant estimators and the harness.

#include <cmath>
#include <random>

#include "rectify/group_kernel.hpp"

namespace rectify::detail {

inline Coords unit_direction(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Coords d(dim);
  do {
    for (int j = 0; j < dim; ++j) d[j] = normal(rng);
  } while (d.norm() < 1e-12);
  return d / d.norm();
}

/// Uniform sample in the closed ball of normalized radius `radius`.
inline Coords uniform_ball(std::mt19937_64& rng, const NormedAlgebra& alg, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Coords dir = unit_direction(rng, alg.dim());
  const double r = radius * std::pow(unit(rng), 1.0 / alg.dim());
  return dir * (r / alg.norm(dir));
}

/// Sample on the sphere of normalized radius `radius`.
inline Coords on_sphere(std::mt19937_64& rng, const NormedAlgebra& alg, double radius) {
  const Coords dir = unit_direction(rng, alg.dim());
  return dir * (radius / alg.norm(dir));
}

}  // namespace rectify::detail
