#pragma once

#include <string>
#include <string_view>

#include "stokes_fv/assembly.hpp"
#include "stokes_fv/fields.hpp"

namespace stokes_fv {

enum class Backend {
  sparse_lu,  ///< Eigen::SparseLU with COLAMD ordering
  dense_lu,   ///< Eigen::PartialPivLU, small systems only
};

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend backend);

struct SolverOptions {
  /// Bound on the relative residual ||K x - b|| / ||b||.
  double tol = 1e-10;
  Backend backend = Backend::sparse_lu;
  /// Reciprocal condition estimates below this flag the system as singular.
  double rcond_threshold = 1e-12;
  /// Look for pressure modes invisible to every interior momentum equation and
  /// to the stabilization (checkerboard-type modes).
  bool detect_pressure_modes = true;
  int max_refinement_steps = 3;
};

enum class SolveStatus { ok, singular, unconverged };
std::string_view to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::ok;
  VectorField u;
  ScalarField p;  ///< cell pressures, zero mean
  double residual_norm = 0.0;
  double multiplier = 0.0;
  double rcond_estimate = 0.0;
  int spurious_pressure_modes = 0;
  int refinement_steps = 0;
  Eigen::Index matrix_nonzeros = 0;
  std::string diagnostic;

  bool ok() const { return status == SolveStatus::ok; }
};

/// Factorizes and solves the saddle system. Singular or unstable systems are
/// reported through `status` and `diagnostic`, never by throwing; a solution is
/// still returned whenever the factorization itself succeeded.
SolveReport solve(const SaddleSystem& system, const SolverOptions& options = {});

/// Dimension of the zero-mean pressure modes q with (G P q)_K = 0 on every cell
/// without a boundary edge and C q = 0. Nonzero for the unstabilized full
/// pressure space: the checkerboard is one such mode.
int count_spurious_pressure_modes(const SaddleSystem& system);

enum class PressureSpace { full, cluster_constant };
PressureSpace parse_pressure_space(std::string_view name);
std::string_view to_string(PressureSpace space);

/// Columns span the pressure space as cell fields.
SparseMatrix pressure_basis(const Grid& grid, PressureSpace space);

struct InfSupResult {
  double beta_squared = 0.0;
  double beta = 0.0;
  int dimension = 0;  ///< dimension of the zero-mean pressure space
  bool empty() const { return dimension == 0; }
};

/// Smallest eigenvalue of M^-1 (G^T A^-1 G) on the zero-mean subspace of the
/// span of `basis`, M the pressure mass matrix. Dense; throws NumericalError
/// when the basis has more than `max_dimension` columns.
InfSupResult schur_smallest_eigen(const SaddleSystem& system, const SparseMatrix& basis,
                                  int max_dimension = 4096);
InfSupResult schur_smallest_eigen(const SaddleSystem& system, PressureSpace space,
                                  int max_dimension = 4096);

}  // namespace stokes_fv
