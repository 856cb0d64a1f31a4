#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stokes_fv/assembly.hpp"
#include "stokes_fv/fields.hpp"
#include "stokes_fv/grid.hpp"
#include "stokes_fv/solver.hpp"

namespace stokes_fv {

/// (p_cb)_K = (-1)^(i+j). Requires a uniform grid with an even cell count per
/// direction so that the field has zero mean.
ScalarField checkerboard_field(const Grid& grid);

/// sup over v != 0 of int grad q . v dx / ||v||_T, evaluated exactly as the
/// A^-1 norm of the gradient load vector. Factorizes A once, so evaluating many
/// fields on one grid is cheap.
class GradientDualNorm {
 public:
  explicit GradientDualNorm(const Grid& grid);
  ~GradientDualNorm();
  GradientDualNorm(GradientDualNorm&&) noexcept;
  GradientDualNorm& operator=(GradientDualNorm&&) noexcept;

  double operator()(const ScalarField& q) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double gradient_dual_norm(const Grid& grid, const ScalarField& q);

/// Test velocity v_K = (sx (q_Lx - q_K), sy (q_My - q_K)), where Lx and My are
/// the neighbours of K across the boundary of its cluster in x and y and
/// sx, sy = +-1 the directions towards them. A component is zero when that
/// neighbour lies outside the domain.
VectorField lemma3_test_velocity(const Grid& grid, const ClusterPartition& partition,
                                 const ScalarField& q);

struct ClusterVelocityCheck {
  double pairing = 0.0;  ///< int grad q . v dx
  double bound = 0.0;    ///< (h/2)(|q|_cross^2 - |q|_intra^2)
  SplitSeminorms split;
  double margin() const { return pairing - bound; }
};
ClusterVelocityCheck cluster_velocity_check(const Grid& grid, const ClusterPartition& partition,
                         const ScalarField& q);

struct DualBoundSample {
  double dual = 0.0;         ///< gradient dual norm
  double l2 = 0.0;           ///< ||q||_L2
  double scaled_jump = 0.0;  ///< h |q|_T
};

/// Constants of dual >= c1 ||q|| - c2 h |q|_T fitted over a sample: c1 is the
/// best observed ratio dual / ||q|| and c2 the smallest value making every
/// sample satisfy the inequality with that c1.
struct DualBoundFit {
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<DualBoundSample> samples;
  int skipped = 0;  ///< zero fields
  bool degenerate() const { return samples.empty(); }
};
DualBoundFit lemma2_inequality_probe(const Grid& grid, std::span<const ScalarField> samples);

/// Smooth cosine modes, the checkerboard (when defined) and seeded random
/// fields, all projected to zero mean.
std::vector<ScalarField> dual_bound_samples(const Grid& grid, int random_count,
                                                std::uint64_t seed);

/// Largest flux defects over the affine basis (1, x, y per component) at mass
/// centers. The diffusive defect compares F to the flux of -grad phi; the
/// boundary defect uses, per boundary edge, an affine field vanishing on it.
struct ConsistencyDefects {
  double diffusive = 0.0;
  double mass = 0.0;
  double boundary_diffusive = 0.0;
  double max_interior() const { return std::max(diffusive, mass); }
};
ConsistencyDefects consistency_check(const Grid& grid);

/// Analytic Stokes solution on the unit square with u = 0 on the boundary and
/// zero-mean pressure; `forcing` is -lap u + grad p.
struct ManufacturedCase {
  std::string id;
  VectorFunction velocity;
  ScalarFunction pressure;
  VectorFunction forcing;
};

/// `ms0`: u = 0, p = cos(pi x) cos(pi y).
/// `ms1`: u = curl of x^2(1-x)^2 y^2(1-y)^2, same pressure.
ManufacturedCase manufactured_case(std::string_view id);

struct SolutionErrors {
  double velocity_h1 = 0.0;  ///< ||r u - u_h||_T
  double pressure_l2 = 0.0;  ///< L2 distance of the zero-mean-aligned pressures
};
SolutionErrors solution_errors(const Grid& grid, const ManufacturedCase& c, const VectorField& u,
                               const ScalarField& p);

using GridFamily = std::function<Grid(int)>;

struct ConvergenceOptions {
  SolverOptions solver;
  int quad_order = 3;
  /// Grid for each refinement level; uniform unit-square grids when empty.
  GridFamily grid_family;
};

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double err_u_h1 = 0.0;
  double err_p_l2 = 0.0;
  double order_u = 0.0;  ///< NaN on the first row
  double order_p = 0.0;
};

struct ConvergenceTable {
  SchemeKind kind = SchemeKind::brezzi_pitkaranta;
  double lambda = 0.0;
  std::string case_id;
  std::vector<ConvergenceRow> rows;
};

/// Assembles, solves and measures the error for each `n`. Throws NumericalError
/// when a level does not solve cleanly.
ConvergenceTable run_convergence(SchemeKind kind, double lambda, const ManufacturedCase& c,
                                 std::span<const int> n_list,
                                 const ConvergenceOptions& options = {});

/// (||u_h||_T + ||p_h||_L2) / ||f||_L2 for a solved system.
double stability_ratio(const SaddleSystem& system, const SolveReport& report);

/// Least-squares slope of log(values) against log(h).
double fitted_decay_exponent(std::span<const double> h, std::span<const double> values);

struct CheckerboardRow {
  int n = 0;
  double h = 0.0;
  double dual_norm = 0.0;
  double l2_norm = 0.0;
  double ratio = 0.0;         ///< dual_norm / l2_norm for the checkerboard
  double smooth_ratio = 0.0;  ///< same for cos(pi x) cos(pi y)
};
struct CheckerboardSweep {
  std::vector<CheckerboardRow> rows;
  double decay_exponent = 0.0;  ///< fitted over the checkerboard ratios
};
CheckerboardSweep checkerboard_sweep(std::span<const int> n_list);

struct InfSupRow {
  int n = 0;
  double h = 0.0;
  double beta_squared = 0.0;
  double beta = 0.0;
  int dimension = 0;
};
std::vector<InfSupRow> infsup_sweep(PressureSpace space, std::span<const int> n_list);

}  // namespace stokes_fv
