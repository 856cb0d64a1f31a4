#include "stokes_fv/fields.hpp"

#include <cmath>
#include <string>

#include "stokes_fv/errors.hpp"

namespace stokes_fv {

ScalarField sample(const Grid& grid, const ScalarFunction& f) {
  ScalarField out = ScalarField::zeros(grid);
  for (int c = 0; c < grid.cell_count(); ++c) out[c] = f(grid.cell_center(c));
  return out;
}

VectorField sample(const Grid& grid, const VectorFunction& f) {
  VectorField out = VectorField::zeros(grid);
  for (int c = 0; c < grid.cell_count(); ++c) {
    const Vec2 v = f(grid.cell_center(c));
    out.x[c] = v.x;
    out.y[c] = v.y;
  }
  return out;
}

void check_field(const Grid& grid, const ScalarField& f) {
  if (f.size() != grid.cell_count()) {
    throw GridMismatch("field has " + std::to_string(f.size()) + " values, grid has " +
                       std::to_string(grid.cell_count()) + " cells");
  }
}

void check_field(const Grid& grid, const VectorField& f) {
  check_field(grid, f.x);
  check_field(grid, f.y);
}

double h1_inner(const Grid& grid, const ScalarField& v, const ScalarField& w) {
  check_field(grid, v);
  check_field(grid, w);
  double sum = 0.0;
  for (const Edge& e : grid.interior_edges()) {
    sum += transmissivity(e) * (v[e.k] - v[e.l]) * (w[e.k] - w[e.l]);
  }
  for (const Edge& e : grid.boundary_edges()) {
    sum += transmissivity(e) * v[e.k] * w[e.k];
  }
  return sum;
}

double h1_inner(const Grid& grid, const VectorField& v, const VectorField& w) {
  return h1_inner(grid, v.x, w.x) + h1_inner(grid, v.y, w.y);
}

double h1_norm(const Grid& grid, const ScalarField& v) {
  return std::sqrt(std::max(0.0, h1_inner(grid, v, v)));
}

double h1_norm(const Grid& grid, const VectorField& v) {
  return std::sqrt(std::max(0.0, h1_inner(grid, v, v)));
}

double l2_inner(const Grid& grid, const ScalarField& v, const ScalarField& w) {
  check_field(grid, v);
  check_field(grid, w);
  double sum = 0.0;
  for (int c = 0; c < grid.cell_count(); ++c) sum += grid.cell_area(c) * v[c] * w[c];
  return sum;
}

double l2_inner(const Grid& grid, const VectorField& v, const VectorField& w) {
  return l2_inner(grid, v.x, w.x) + l2_inner(grid, v.y, w.y);
}

double l2_norm(const Grid& grid, const ScalarField& v) {
  return std::sqrt(l2_inner(grid, v, v));
}

double l2_norm(const Grid& grid, const VectorField& v) {
  return std::sqrt(l2_inner(grid, v, v));
}

double jump_inner(const Grid& grid, const ScalarField& p, const ScalarField& q) {
  check_field(grid, p);
  check_field(grid, q);
  double sum = 0.0;
  for (const Edge& e : grid.interior_edges()) sum += (p[e.k] - p[e.l]) * (q[e.k] - q[e.l]);
  return sum;
}

double jump_seminorm(const Grid& grid, const ScalarField& q) {
  return std::sqrt(jump_inner(grid, q, q));
}

SplitSeminorms split_seminorms(const Grid& grid, const ClusterPartition& partition,
                               const ScalarField& q) {
  if (!partition.matches(grid)) throw GridMismatch("partition built for another grid");
  check_field(grid, q);
  auto sum_over = [&](std::span<const int> ids) {
    double s = 0.0;
    for (int id : ids) {
      const Edge& e = grid.edge(id);
      const double jump = q[e.k] - q[e.l];
      s += jump * jump;
    }
    return std::sqrt(s);
  };
  return {sum_over(partition.cross_cluster_edges()), sum_over(partition.intra_cluster_edges())};
}

double mean_value(const Grid& grid, const ScalarField& q) {
  check_field(grid, q);
  double sum = 0.0;
  for (int c = 0; c < grid.cell_count(); ++c) sum += grid.cell_area(c) * q[c];
  return sum / grid.total_area();
}

ScalarField zero_mean_project(const Grid& grid, const ScalarField& q) {
  const double m = mean_value(grid, q);
  ScalarField out = q;
  out.values.array() -= m;
  return out;
}

}  // namespace stokes_fv
