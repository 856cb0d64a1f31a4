#include "stokes_fv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>

#include "stokes_fv/errors.hpp"

namespace stokes_fv {

namespace {

using Triplet = Eigen::Triplet<double>;

// Hager's estimate of ||K^-1||_1 from a handful of solves with K and K^T,
// hardened with Higham's alternating test vector.
template <typename SolveFn, typename SolveTransposedFn>
double inverse_one_norm_estimate(Eigen::Index n, SolveFn&& solve_k, SolveTransposedFn&& solve_kt) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  Eigen::Index last_index = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = solve_k(x);
    estimate = std::max(estimate, y.lpNorm<1>());
    const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = solve_kt(xi);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) || j == last_index) break;
    x.setZero();
    x[j] = 1.0;
    last_index = j;
  }
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    b[i] = sign * (1.0 + static_cast<double>(i) / static_cast<double>(std::max<Eigen::Index>(n - 1, 1)));
  }
  const double alt = 2.0 * solve_k(b).template lpNorm<1>() / (3.0 * static_cast<double>(n));
  return std::max(estimate, alt);
}

double matrix_one_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

void fill_solution(const SaddleSystem& system, const Eigen::VectorXd& x, SolveReport& report) {
  const int n = system.cell_count();
  const int np = system.pressure_count();
  report.u.x = ScalarField(x.head(n));
  report.u.y = ScalarField(x.segment(n, n));
  report.p = zero_mean_project(system.grid,
                               ScalarField(system.prolongation * x.segment(2 * n, np)));
  report.multiplier = x[system.size() - 1];
}

double relative_residual(const SparseMatrix& k, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bnorm = b.norm();
  const double rnorm = (b - k * x).norm();
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

}  // namespace

Backend parse_backend(std::string_view name) {
  if (name == "sparse-lu" || name == "sparse_lu") return Backend::sparse_lu;
  if (name == "dense-lu" || name == "dense_lu") return Backend::dense_lu;
  throw ConfigError("unknown solver backend '" + std::string(name) +
                    "' (expected sparse-lu|dense-lu)");
}

std::string_view to_string(Backend backend) {
  return backend == Backend::sparse_lu ? "sparse-lu" : "dense-lu";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::ok:
      return "ok";
    case SolveStatus::singular:
      return "singular";
    case SolveStatus::unconverged:
      return "unconverged";
  }
  return "?";
}

int count_spurious_pressure_modes(const SaddleSystem& system) {
  const Grid& grid = system.grid;
  const int n = grid.cell_count();
  const int np = system.pressure_count();

  // C is a graph Laplacian with positive weights, so its kernel is spanned by
  // the indicators of the connected components of its edge graph. Restricting
  // to that kernel leaves a much smaller rank problem.
  std::vector<int> parent(np);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  if (system.lambda() != 0.0) {
    for (int k = 0; k < system.stabilization.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(system.stabilization, k); it; ++it) {
        if (it.row() != it.col() && it.value() != 0.0) {
          parent[find(static_cast<int>(it.row()))] = find(static_cast<int>(it.col()));
        }
      }
    }
  }
  std::vector<int> component(np, -1);
  int components = 0;
  std::vector<Triplet> zt;
  for (int q = 0; q < np; ++q) {
    const int root = find(q);
    if (component[root] < 0) component[root] = components++;
    zt.emplace_back(q, component[root], 1.0);
  }
  SparseMatrix z(np, components);
  z.setFromTriplets(zt.begin(), zt.end());

  const Eigen::SparseMatrix<double, Eigen::RowMajor> rows(system.coupling() * z);
  const Eigen::RowVectorXd mean_row = system.mean_weights.transpose() * z;

  std::vector<Triplet> t;
  int r = 0;
  auto push_row = [&](const Eigen::SparseMatrix<double, Eigen::RowMajor>& m, int row) {
    double peak = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, row); it; ++it) {
      peak = std::max(peak, std::abs(it.value()));
    }
    if (peak == 0.0) return;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, row); it; ++it) {
      t.emplace_back(r, it.col(), it.value() / peak);
    }
    ++r;
  };

  for (int c = 0; c < n; ++c) {
    if (grid.has_boundary_edge(c)) continue;
    push_row(rows, c);
    push_row(rows, n + c);
  }
  {
    const double peak = mean_row.cwiseAbs().maxCoeff();
    for (int q = 0; q < components; ++q) t.emplace_back(r, q, mean_row[q] / peak);
    ++r;
  }

  // Zero rows keep the QR well-posed when there are fewer equations than unknowns.
  SparseMatrix w(std::max(r, components), components);
  w.setFromTriplets(t.begin(), t.end());
  w.prune(0.0);
  w.makeCompressed();

  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(1e-9);
  qr.compute(w);
  if (qr.info() != Eigen::Success) {
    throw NumericalError("QR factorization failed during pressure mode detection");
  }
  return components - static_cast<int>(qr.rank());
}

SolveReport solve(const SaddleSystem& system, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("solver tolerance must be positive");

  SolveReport report;
  report.u = VectorField::zeros(system.grid);
  report.p = ScalarField::zeros(system.grid);

  SparseMatrix k = system.matrix();
  k.makeCompressed();
  const Eigen::VectorXd b = system.rhs();
  const Eigen::Index dim = k.rows();
  report.matrix_nonzeros = k.nonZeros();

  Eigen::VectorXd x;
  std::ostringstream diag;

  auto refine = [&](auto&& solve_k) {
    report.residual_norm = relative_residual(k, x, b);
    while (report.residual_norm > options.tol &&
           report.refinement_steps < options.max_refinement_steps) {
      x += solve_k(Eigen::VectorXd(b - k * x));
      report.residual_norm = relative_residual(k, x, b);
      ++report.refinement_steps;
    }
  };

  if (options.backend == Backend::sparse_lu) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(k);
    lu.factorize(k);
    if (lu.info() != Eigen::Success) {
      report.status = SolveStatus::singular;
      report.diagnostic = "sparse LU factorization failed: " + lu.lastErrorMessage();
      return report;
    }
    auto solve_k = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd { return lu.solve(rhs); };
    auto solve_kt = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      return lu.transpose().solve(rhs);
    };
    x = solve_k(b);
    refine(solve_k);
    report.rcond_estimate =
        1.0 / (matrix_one_norm(k) * inverse_one_norm_estimate(dim, solve_k, solve_kt));
  } else {
    const Eigen::MatrixXd dense(k);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
    auto solve_k = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd { return lu.solve(rhs); };
    x = solve_k(b);
    refine(solve_k);
    report.rcond_estimate = lu.rcond();
  }

  if (!x.allFinite()) {
    report.status = SolveStatus::singular;
    report.diagnostic = "factorization produced non-finite values";
    return report;
  }
  fill_solution(system, x, report);

  if (report.rcond_estimate < options.rcond_threshold) {
    report.status = SolveStatus::singular;
    diag << "reciprocal condition estimate " << report.rcond_estimate << " below "
         << options.rcond_threshold << "; ";
  }
  if (options.detect_pressure_modes) {
    report.spurious_pressure_modes = count_spurious_pressure_modes(system);
    if (report.spurious_pressure_modes > 0) {
      report.status = SolveStatus::singular;
      diag << report.spurious_pressure_modes
           << " zero-mean pressure mode(s) invisible to the interior momentum equations and "
              "the stabilization (checkerboard); ";
    }
  }
  if (report.status == SolveStatus::ok && report.residual_norm > options.tol) {
    report.status = SolveStatus::unconverged;
    diag << "relative residual " << report.residual_norm << " above tolerance " << options.tol
         << "; ";
  }
  report.diagnostic = diag.str();
  if (!report.diagnostic.empty()) report.diagnostic.resize(report.diagnostic.size() - 2);
  return report;
}

PressureSpace parse_pressure_space(std::string_view name) {
  if (name == "full" || name == "cell") return PressureSpace::full;
  if (name == "cluster" || name == "cluster-constant") return PressureSpace::cluster_constant;
  throw ConfigError("unknown pressure space '" + std::string(name) + "' (expected full|cluster)");
}

std::string_view to_string(PressureSpace space) {
  return space == PressureSpace::full ? "full" : "cluster";
}

SparseMatrix pressure_basis(const Grid& grid, PressureSpace space) {
  const int n = grid.cell_count();
  if (space == PressureSpace::full) {
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
  }
  const ClusterPartition partition(grid);
  std::vector<Triplet> t;
  for (int c = 0; c < n; ++c) t.emplace_back(c, partition.cluster_of(c), 1.0);
  SparseMatrix p(n, partition.cluster_count());
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

InfSupResult schur_smallest_eigen(const SaddleSystem& system, const SparseMatrix& basis,
                                  int max_dimension) {
  const Grid& grid = system.grid;
  const int n = grid.cell_count();
  if (basis.rows() != n) throw GridMismatch("pressure basis rows must equal the cell count");
  const int np = static_cast<int>(basis.cols());
  if (np > max_dimension) {
    throw NumericalError("pressure space dimension " + std::to_string(np) +
                         " exceeds the dense eigensolve cap " + std::to_string(max_dimension));
  }
  InfSupResult result;
  result.dimension = std::max(0, np - 1);
  if (result.dimension == 0) return result;

  Eigen::SimplicialLDLT<SparseMatrix> a_solver(system.velocity);
  if (a_solver.info() != Eigen::Success) throw NumericalError("velocity block is not SPD");

  const Eigen::MatrixXd gb = Eigen::MatrixXd(system.gradient * basis);
  Eigen::MatrixXd y(2 * n, np);
  y.topRows(n) = a_solver.solve(gb.topRows(n));
  y.bottomRows(n) = a_solver.solve(gb.bottomRows(n));
  const Eigen::MatrixXd schur = gb.transpose() * y;

  Eigen::VectorXd areas(n);
  for (int c = 0; c < n; ++c) areas[c] = grid.cell_area(c);
  const Eigen::MatrixXd basis_dense(basis);
  const Eigen::MatrixXd mass = basis_dense.transpose() * areas.asDiagonal() * basis_dense;
  const Eigen::VectorXd mean = basis_dense.transpose() * areas;

  // Orthonormal basis of {q : mean . q = 0}.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mean);
  const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).rightCols(np - 1);

  const Eigen::MatrixXd s_r = q.transpose() * (0.5 * (schur + schur.transpose())) * q;
  const Eigen::MatrixXd m_r = q.transpose() * mass * q;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(s_r, m_r, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("generalized eigensolve failed");
  result.beta_squared = std::max(0.0, eig.eigenvalues()[0]);
  result.beta = std::sqrt(result.beta_squared);
  return result;
}

InfSupResult schur_smallest_eigen(const SaddleSystem& system, PressureSpace space,
                                  int max_dimension) {
  return schur_smallest_eigen(system, pressure_basis(system.grid, space), max_dimension);
}

}  // namespace stokes_fv
