#pragma once

#include <functional>

#include <Eigen/Core>

#include "stokes_fv/grid.hpp"

namespace stokes_fv {

/// Piecewise-constant scalar: one value per cell, indexed like the grid.
struct ScalarField {
  Eigen::VectorXd values;

  ScalarField() = default;
  explicit ScalarField(Eigen::VectorXd v) : values(std::move(v)) {}

  static ScalarField zeros(const Grid& grid) {
    return ScalarField(Eigen::VectorXd::Zero(grid.cell_count()));
  }
  static ScalarField constant(const Grid& grid, double c) {
    return ScalarField(Eigen::VectorXd::Constant(grid.cell_count(), c));
  }

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index k) const { return values[k]; }
  double& operator[](Eigen::Index k) { return values[k]; }
};

/// Piecewise-constant 2-vector field, stored as its two components.
struct VectorField {
  ScalarField x;
  ScalarField y;

  static VectorField zeros(const Grid& grid) {
    return {ScalarField::zeros(grid), ScalarField::zeros(grid)};
  }
  Vec2 at(Eigen::Index k) const { return {x[k], y[k]}; }
  Eigen::Index size() const { return x.size(); }
};

using ScalarFunction = std::function<double(Vec2)>;
using VectorFunction = std::function<Vec2(Vec2)>;

/// Pointwise interpolation at cell centers, (r u)_K = u(x_K).
ScalarField sample(const Grid& grid, const ScalarFunction& f);
VectorField sample(const Grid& grid, const VectorFunction& f);

/// Throws GridMismatch unless the field has one value per cell.
void check_field(const Grid& grid, const ScalarField& f);
void check_field(const Grid& grid, const VectorField& f);

/// Edge weight |sigma| / d_sigma of the discrete H1 product.
inline double transmissivity(const Edge& e) { return e.length / e.distance; }

/// Discrete H1 inner product: transmissivity-weighted jumps across interior
/// edges plus the boundary terms against a zero exterior value.
double h1_inner(const Grid& grid, const ScalarField& v, const ScalarField& w);
double h1_inner(const Grid& grid, const VectorField& v, const VectorField& w);
double h1_norm(const Grid& grid, const ScalarField& v);
double h1_norm(const Grid& grid, const VectorField& v);

double l2_inner(const Grid& grid, const ScalarField& v, const ScalarField& w);
double l2_inner(const Grid& grid, const VectorField& v, const VectorField& w);
double l2_norm(const Grid& grid, const ScalarField& v);
double l2_norm(const Grid& grid, const VectorField& v);

/// Unweighted sum of jump products over interior edges.
double jump_inner(const Grid& grid, const ScalarField& p, const ScalarField& q);
double jump_seminorm(const Grid& grid, const ScalarField& q);

struct SplitSeminorms {
  double cross = 0.0;  ///< jumps across edges between clusters
  double intra = 0.0;  ///< jumps across edges inside a cluster
};
SplitSeminorms split_seminorms(const Grid& grid, const ClusterPartition& partition,
                               const ScalarField& q);

/// Area-weighted mean value.
double mean_value(const Grid& grid, const ScalarField& q);
ScalarField zero_mean_project(const Grid& grid, const ScalarField& q);

}  // namespace stokes_fv
