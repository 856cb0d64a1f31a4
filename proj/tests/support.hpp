#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "stokes_fv/fields.hpp"
#include "stokes_fv/grid.hpp"

namespace test_support {

inline stokes_fv::ScalarField random_scalar(const stokes_fv::Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  stokes_fv::ScalarField f = stokes_fv::ScalarField::zeros(g);
  for (int c = 0; c < g.cell_count(); ++c) f[c] = d(rng);
  return f;
}

inline stokes_fv::VectorField random_vector(const stokes_fv::Grid& g, std::mt19937_64& rng) {
  return {random_scalar(g, rng), random_scalar(g, rng)};
}

// Two non-uniform tensor grids used across the suites.
inline stokes_fv::Grid tensor_a() {
  return stokes_fv::build_tensor({0.0, 0.1, 0.35, 0.5, 0.8, 1.0}, {0.0, 0.2, 0.3, 0.7, 1.0});
}
inline stokes_fv::Grid tensor_b() {
  std::vector<double> xs{0.0};
  for (int i = 0; i < 8; ++i) xs.push_back(xs.back() + 0.05 * std::pow(1.3, i));
  return stokes_fv::build_tensor(xs, {0.0, 0.15, 0.4, 0.45, 0.6, 0.9, 1.0});
}

}  // namespace test_support
