#pragma once

#include <Eigen/SparseCore>

#include "stokes_fv/fields.hpp"
#include "stokes_fv/grid.hpp"

namespace stokes_fv {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Numerical fluxes through one edge, oriented by the edge's stored normal
// (from `k` to `l`, outward on the boundary).

/// Two-point diffusive flux F = (|sigma|/d)(u_K - u_L); on boundary edges the
/// exterior value is zero.
double diffusive_flux(const Edge& e, double u_k, double u_l);

/// Mass flux G = |sigma| [w_L u_K + w_K u_L] . n, with w_K = h_K / (h_K + h_L)
/// the perpendicular extents. Zero on boundary edges.
double mass_flux(const Edge& e, Vec2 u_k, Vec2 u_l);

/// Pressure flux H = |sigma| [w_K p_K + w_L p_L] n, the L2 transpose of
/// `mass_flux`. On boundary edges H = |sigma| p_K n.
Vec2 pressure_flux(const Edge& e, double p_k, double p_l);

// Cell-update form: (op u)_K = (1/|K|) * sum of fluxes out of K.

ScalarField laplacian_apply(const Grid& grid, const ScalarField& u);
VectorField laplacian_apply(const Grid& grid, const VectorField& u);
VectorField gradient_apply(const Grid& grid, const ScalarField& p);
ScalarField divergence_apply(const Grid& grid, const VectorField& u);

enum class StabilizationEdges { all, intra_cluster };

/// Pressure jump Laplacian (1/|K|) sum (|sigma|/d)(p_K - p_L) over the selected
/// interior edges. On uniform grids this is (1/h^2) sum (p_K - p_L).
ScalarField stab_laplacian_apply(const Grid& grid, const ScalarField& p,
                                 StabilizationEdges edges,
                                 const ClusterPartition* partition = nullptr);

/// int grad p . v dx + int p div v dx, which vanishes up to rounding.
double duality_defect(const Grid& grid, const ScalarField& p, const VectorField& v);

// Assembled matrices of the cell-update forms. Rows are cells; vector fields
// are stacked as [x components; y components].

SparseMatrix laplacian_matrix(const Grid& grid);
SparseMatrix gradient_matrix(const Grid& grid);
SparseMatrix divergence_matrix(const Grid& grid);
SparseMatrix stab_laplacian_matrix(const Grid& grid, StabilizationEdges edges,
                                   const ClusterPartition* partition = nullptr);

/// Symmetric jump form C with p^T C q = sum |sigma| d_sigma (p_K - p_L)(q_K - q_L)
/// over the selected edges; on uniform grids p^T C q = h^2 [p, q].
SparseMatrix jump_stabilization_form(const Grid& grid, StabilizationEdges edges,
                                     const ClusterPartition* partition = nullptr);

/// Diagonal matrix of cell areas.
SparseMatrix area_matrix(const Grid& grid);

}  // namespace stokes_fv
