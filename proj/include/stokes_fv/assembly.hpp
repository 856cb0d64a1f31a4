#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "stokes_fv/fields.hpp"
#include "stokes_fv/grid.hpp"
#include "stokes_fv/operators.hpp"

namespace stokes_fv {

enum class SchemeKind {
  natural,                    ///< no stabilization
  brezzi_pitkaranta,          ///< lambda-weighted jumps across all interior edges
  cluster_jump,               ///< lambda-weighted jumps inside 2x2 clusters only
  cluster_constant_pressure,  ///< no stabilization, pressure constant per cluster
};

std::string_view to_string(SchemeKind kind);
/// Accepts the CLI names `natural`, `bp`, `cluster`, `cluster-constant`.
SchemeKind parse_scheme_kind(std::string_view name);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::brezzi_pitkaranta;
  double lambda = 0.0;
  std::optional<ClusterPartition> partition;

  bool uses_lambda() const {
    return kind == SchemeKind::brezzi_pitkaranta || kind == SchemeKind::cluster_jump;
  }
  bool needs_partition() const {
    return kind == SchemeKind::cluster_jump || kind == SchemeKind::cluster_constant_pressure;
  }
};

/// Builds a spec for `grid`, constructing the cluster partition when the kind
/// needs one. Throws ConfigError / PartitionError on invalid combinations.
SchemeSpec make_scheme(SchemeKind kind, double lambda, const Grid& grid);

/// Throws unless `spec` is usable on `grid`.
void validate(const SchemeSpec& spec, const Grid& grid);

/// Per-cell means of `f` by tensor Gauss-Legendre quadrature with `order`
/// points per direction (1, 2 or 3).
VectorField cell_means(const VectorFunction& f, const Grid& grid, int order = 3);

/// Assembled saddle-point system. Every equation is multiplied by the cell
/// area, so with unknowns x = [u_x; u_y; p; mu] the matrix is
///
///     [ A  0  G_x P   0 ]
///     [ 0  A  G_y P   0 ]
///     [ (G P)^T  -lambda C  m ]
///     [ 0  0     m^T    0 ]
///
/// where A is the discrete H1 form, G = |K| grad (= -B^T, B = |K| div), C the
/// jump stabilization form, P the prolongation from pressure unknowns to cell
/// pressures and m the area weights of the zero-mean constraint.
struct SaddleSystem {
  Grid grid;
  SchemeSpec spec;
  SparseMatrix velocity;       ///< A, cells x cells
  SparseMatrix gradient;       ///< G, 2 cells x cells
  SparseMatrix divergence;     ///< B, cells x 2 cells
  SparseMatrix stabilization;  ///< C on pressure unknowns (zero when unused)
  SparseMatrix prolongation;   ///< P, cells x pressure unknowns
  VectorField forcing;         ///< f_K
  Eigen::VectorXd load;        ///< |K| f_K stacked as [x; y]
  Eigen::VectorXd mean_weights;

  int cell_count() const { return grid.cell_count(); }
  int pressure_count() const { return static_cast<int>(prolongation.cols()); }
  int velocity_count() const { return 2 * cell_count(); }
  int size() const { return velocity_count() + pressure_count() + 1; }
  double lambda() const { return spec.uses_lambda() ? spec.lambda : 0.0; }

  /// Gradient acting on pressure unknowns, G P.
  SparseMatrix coupling() const;
  SparseMatrix matrix() const;
  Eigen::VectorXd rhs() const;
};

SaddleSystem assemble(const SchemeSpec& spec, const Grid& grid, const VectorField& forcing);
SaddleSystem assemble(const SchemeSpec& spec, const Grid& grid, const VectorFunction& f,
                      int quad_order = 3);

struct EnergyTerms {
  double velocity = 0.0;       ///< ||u||_T^2
  double stabilization = 0.0;  ///< lambda p^T C p (lambda h^2 |p|^2 on uniform grids)
};

EnergyTerms energy_functional(const SaddleSystem& system, const VectorField& u,
                              const ScalarField& p);

/// int f . u dx with the piecewise-constant forcing of the system.
double forcing_work(const SaddleSystem& system, const VectorField& u);

}  // namespace stokes_fv
