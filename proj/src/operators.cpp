#include "stokes_fv/operators.hpp"

#include <vector>

#include "stokes_fv/errors.hpp"

namespace stokes_fv {

namespace {

using Triplet = Eigen::Triplet<double>;

bool selected(const Edge& e, int id, StabilizationEdges edges, const ClusterPartition* partition) {
  if (e.is_boundary()) return false;
  return edges == StabilizationEdges::all || partition->is_intra_cluster(id);
}

void check_partition(const Grid& grid, StabilizationEdges edges,
                     const ClusterPartition* partition) {
  if (edges == StabilizationEdges::intra_cluster) {
    if (partition == nullptr) throw ConfigError("intra-cluster stabilization needs a partition");
    if (!partition->matches(grid)) throw GridMismatch("partition built for another grid");
  }
}

// Interpolation weights (w_K, w_L) of the pressure flux; the mass flux uses
// them swapped.
std::pair<double, double> flux_weights(const Edge& e) {
  const double total = e.perp_k + e.perp_l;
  return {e.perp_k / total, e.perp_l / total};
}

}  // namespace

double diffusive_flux(const Edge& e, double u_k, double u_l) {
  if (e.is_boundary()) return transmissivity(e) * u_k;
  return transmissivity(e) * (u_k - u_l);
}

double mass_flux(const Edge& e, Vec2 u_k, Vec2 u_l) {
  if (e.is_boundary()) return 0.0;
  auto [w_k, w_l] = flux_weights(e);
  return e.length * dot(w_l * u_k + w_k * u_l, e.normal);
}

Vec2 pressure_flux(const Edge& e, double p_k, double p_l) {
  if (e.is_boundary()) return (e.length * p_k) * e.normal;
  auto [w_k, w_l] = flux_weights(e);
  return (e.length * (w_k * p_k + w_l * p_l)) * e.normal;
}

ScalarField laplacian_apply(const Grid& grid, const ScalarField& u) {
  check_field(grid, u);
  ScalarField out = ScalarField::zeros(grid);
  for (const Edge& e : grid.interior_edges()) {
    const double f = diffusive_flux(e, u[e.k], u[e.l]);
    out[e.k] += f;
    out[e.l] -= f;
  }
  for (const Edge& e : grid.boundary_edges()) out[e.k] += diffusive_flux(e, u[e.k], 0.0);
  for (int c = 0; c < grid.cell_count(); ++c) out[c] /= grid.cell_area(c);
  return out;
}

VectorField laplacian_apply(const Grid& grid, const VectorField& u) {
  return {laplacian_apply(grid, u.x), laplacian_apply(grid, u.y)};
}

VectorField gradient_apply(const Grid& grid, const ScalarField& p) {
  check_field(grid, p);
  VectorField out = VectorField::zeros(grid);
  auto accumulate = [&](int cell, Vec2 v) {
    out.x[cell] += v.x;
    out.y[cell] += v.y;
  };
  for (const Edge& e : grid.interior_edges()) {
    const Vec2 h = pressure_flux(e, p[e.k], p[e.l]);
    accumulate(e.k, h);
    accumulate(e.l, -h);
  }
  for (const Edge& e : grid.boundary_edges()) accumulate(e.k, pressure_flux(e, p[e.k], 0.0));
  for (int c = 0; c < grid.cell_count(); ++c) {
    out.x[c] /= grid.cell_area(c);
    out.y[c] /= grid.cell_area(c);
  }
  return out;
}

ScalarField divergence_apply(const Grid& grid, const VectorField& u) {
  check_field(grid, u);
  ScalarField out = ScalarField::zeros(grid);
  for (const Edge& e : grid.interior_edges()) {
    const double g = mass_flux(e, u.at(e.k), u.at(e.l));
    out[e.k] += g;
    out[e.l] -= g;
  }
  for (int c = 0; c < grid.cell_count(); ++c) out[c] /= grid.cell_area(c);
  return out;
}

ScalarField stab_laplacian_apply(const Grid& grid, const ScalarField& p, StabilizationEdges edges,
                                 const ClusterPartition* partition) {
  check_field(grid, p);
  check_partition(grid, edges, partition);
  ScalarField out = ScalarField::zeros(grid);
  for (int id = 0; id < grid.interior_edge_count(); ++id) {
    const Edge& e = grid.edge(id);
    if (!selected(e, id, edges, partition)) continue;
    const double f = transmissivity(e) * (p[e.k] - p[e.l]);
    out[e.k] += f;
    out[e.l] -= f;
  }
  for (int c = 0; c < grid.cell_count(); ++c) out[c] /= grid.cell_area(c);
  return out;
}

double duality_defect(const Grid& grid, const ScalarField& p, const VectorField& v) {
  check_field(grid, v);
  const VectorField grad = gradient_apply(grid, p);
  const ScalarField div = divergence_apply(grid, v);
  return l2_inner(grid, grad, v) + l2_inner(grid, p, div);
}

SparseMatrix laplacian_matrix(const Grid& grid) {
  const int n = grid.cell_count();
  std::vector<Triplet> t;
  t.reserve(5 * static_cast<std::size_t>(n));
  for (const Edge& e : grid.interior_edges()) {
    const double w = transmissivity(e);
    t.emplace_back(e.k, e.k, w / grid.cell_area(e.k));
    t.emplace_back(e.k, e.l, -w / grid.cell_area(e.k));
    t.emplace_back(e.l, e.l, w / grid.cell_area(e.l));
    t.emplace_back(e.l, e.k, -w / grid.cell_area(e.l));
  }
  for (const Edge& e : grid.boundary_edges()) {
    t.emplace_back(e.k, e.k, transmissivity(e) / grid.cell_area(e.k));
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix gradient_matrix(const Grid& grid) {
  const int n = grid.cell_count();
  std::vector<Triplet> t;
  t.reserve(8 * static_cast<std::size_t>(n));
  auto add = [&](int row_cell, int col_cell, Vec2 v) {
    const double inv = 1.0 / grid.cell_area(row_cell);
    if (v.x != 0.0) t.emplace_back(row_cell, col_cell, inv * v.x);
    if (v.y != 0.0) t.emplace_back(n + row_cell, col_cell, inv * v.y);
  };
  for (const Edge& e : grid.interior_edges()) {
    const Vec2 from_k = pressure_flux(e, 1.0, 0.0);
    const Vec2 from_l = pressure_flux(e, 0.0, 1.0);
    add(e.k, e.k, from_k);
    add(e.k, e.l, from_l);
    add(e.l, e.k, -from_k);
    add(e.l, e.l, -from_l);
  }
  for (const Edge& e : grid.boundary_edges()) add(e.k, e.k, pressure_flux(e, 1.0, 0.0));
  SparseMatrix m(2 * n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix divergence_matrix(const Grid& grid) {
  const int n = grid.cell_count();
  std::vector<Triplet> t;
  t.reserve(8 * static_cast<std::size_t>(n));
  auto add = [&](int row_cell, int col_cell, double sign, Vec2 coeff) {
    const double inv = sign / grid.cell_area(row_cell);
    if (coeff.x != 0.0) t.emplace_back(row_cell, col_cell, inv * coeff.x);
    if (coeff.y != 0.0) t.emplace_back(row_cell, n + col_cell, inv * coeff.y);
  };
  for (const Edge& e : grid.interior_edges()) {
    // d G / d u_K and d G / d u_L as 2-vectors.
    const Vec2 ck{mass_flux(e, {1.0, 0.0}, {}), mass_flux(e, {0.0, 1.0}, {})};
    const Vec2 cl{mass_flux(e, {}, {1.0, 0.0}), mass_flux(e, {}, {0.0, 1.0})};
    add(e.k, e.k, 1.0, ck);
    add(e.k, e.l, 1.0, cl);
    add(e.l, e.k, -1.0, ck);
    add(e.l, e.l, -1.0, cl);
  }
  SparseMatrix m(n, 2 * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix stab_laplacian_matrix(const Grid& grid, StabilizationEdges edges,
                                   const ClusterPartition* partition) {
  check_partition(grid, edges, partition);
  const int n = grid.cell_count();
  std::vector<Triplet> t;
  for (int id = 0; id < grid.interior_edge_count(); ++id) {
    const Edge& e = grid.edge(id);
    if (!selected(e, id, edges, partition)) continue;
    const double w = transmissivity(e);
    t.emplace_back(e.k, e.k, w / grid.cell_area(e.k));
    t.emplace_back(e.k, e.l, -w / grid.cell_area(e.k));
    t.emplace_back(e.l, e.l, w / grid.cell_area(e.l));
    t.emplace_back(e.l, e.k, -w / grid.cell_area(e.l));
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix jump_stabilization_form(const Grid& grid, StabilizationEdges edges,
                                     const ClusterPartition* partition) {
  check_partition(grid, edges, partition);
  const int n = grid.cell_count();
  std::vector<Triplet> t;
  for (int id = 0; id < grid.interior_edge_count(); ++id) {
    const Edge& e = grid.edge(id);
    if (!selected(e, id, edges, partition)) continue;
    const double w = e.length * e.distance;
    t.emplace_back(e.k, e.k, w);
    t.emplace_back(e.k, e.l, -w);
    t.emplace_back(e.l, e.l, w);
    t.emplace_back(e.l, e.k, -w);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix area_matrix(const Grid& grid) {
  const int n = grid.cell_count();
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int c = 0; c < n; ++c) m.insert(c, c) = grid.cell_area(c);
  m.makeCompressed();
  return m;
}

}  // namespace stokes_fv
