#include "stokes_fv/assembly.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "stokes_fv/errors.hpp"

namespace stokes_fv {

namespace {

using Triplet = Eigen::Triplet<double>;

struct GaussRule {
  std::array<double, 3> nodes{};
  std::array<double, 3> weights{};
  int size = 0;
};

// Gauss-Legendre rules on [-1, 1]; weights sum to 2.
GaussRule gauss_rule(int order) {
  switch (order) {
    case 1:
      return {{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, 1};
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      return {{-a, a, 0.0}, {1.0, 1.0, 0.0}, 2};
    }
    case 3: {
      const double a = std::sqrt(0.6);
      return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}, 3};
    }
    default:
      throw ConfigError("quadrature order must be 1, 2 or 3, got " + std::to_string(order));
  }
}

SparseMatrix cluster_prolongation(const Grid& grid, const ClusterPartition& partition) {
  std::vector<Triplet> t;
  t.reserve(grid.cell_count());
  for (int c = 0; c < grid.cell_count(); ++c) t.emplace_back(c, partition.cluster_of(c), 1.0);
  SparseMatrix p(grid.cell_count(), partition.cluster_count());
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

SparseMatrix identity(int n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

}  // namespace

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::natural:
      return "natural";
    case SchemeKind::brezzi_pitkaranta:
      return "bp";
    case SchemeKind::cluster_jump:
      return "cluster";
    case SchemeKind::cluster_constant_pressure:
      return "cluster-constant";
  }
  return "?";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  if (name == "natural") return SchemeKind::natural;
  if (name == "bp" || name == "brezzi-pitkaranta") return SchemeKind::brezzi_pitkaranta;
  if (name == "cluster" || name == "cluster-jump") return SchemeKind::cluster_jump;
  if (name == "cluster-constant") return SchemeKind::cluster_constant_pressure;
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected natural|bp|cluster|cluster-constant)");
}

SchemeSpec make_scheme(SchemeKind kind, double lambda, const Grid& grid) {
  SchemeSpec spec;
  spec.kind = kind;
  spec.lambda = lambda;
  if (spec.needs_partition()) spec.partition.emplace(grid);
  validate(spec, grid);
  return spec;
}

void validate(const SchemeSpec& spec, const Grid& grid) {
  if (spec.uses_lambda() && !(spec.lambda > 0.0 && std::isfinite(spec.lambda))) {
    throw ConfigError("scheme '" + std::string(to_string(spec.kind)) +
                      "' needs lambda > 0, got " + std::to_string(spec.lambda));
  }
  if (spec.needs_partition()) {
    if (!spec.partition) {
      throw ConfigError("scheme '" + std::string(to_string(spec.kind)) +
                        "' needs a cluster partition");
    }
    if (!spec.partition->matches(grid)) throw GridMismatch("partition built for another grid");
  }
}

VectorField cell_means(const VectorFunction& f, const Grid& grid, int order) {
  const GaussRule rule = gauss_rule(order);
  VectorField out = VectorField::zeros(grid);
  for (int c = 0; c < grid.cell_count(); ++c) {
    const Vec2 center = grid.cell_center(c);
    const double hw = 0.5 * grid.cell_width(c);
    const double hh = 0.5 * grid.cell_height(c);
    Vec2 sum;
    for (int a = 0; a < rule.size; ++a) {
      for (int b = 0; b < rule.size; ++b) {
        const Vec2 point{center.x + hw * rule.nodes[a], center.y + hh * rule.nodes[b]};
        sum += (0.25 * rule.weights[a] * rule.weights[b]) * f(point);
      }
    }
    out.x[c] = sum.x;
    out.y[c] = sum.y;
  }
  return out;
}

SparseMatrix SaddleSystem::coupling() const { return gradient * prolongation; }

SparseMatrix SaddleSystem::matrix() const {
  const int n = cell_count();
  const int nv = velocity_count();
  const int np = pressure_count();
  const int dim = size();
  const SparseMatrix gp = coupling();
  // Mass rows tested against the pressure basis: -P^T B.
  const SparseMatrix mass = -(SparseMatrix(prolongation.transpose()) * divergence);
  const double lam = lambda();

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * velocity.nonZeros() + 2 * gp.nonZeros() +
                                     stabilization.nonZeros() + 2 * np));
  for (int k = 0; k < velocity.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(velocity, k); it; ++it) {
      t.emplace_back(it.row(), it.col(), it.value());
      t.emplace_back(n + it.row(), n + it.col(), it.value());
    }
  }
  for (int k = 0; k < gp.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(gp, k); it; ++it) {
      t.emplace_back(it.row(), nv + it.col(), it.value());
    }
  }
  for (int k = 0; k < mass.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mass, k); it; ++it) {
      t.emplace_back(nv + it.row(), it.col(), it.value());
    }
  }
  if (lam != 0.0) {
    for (int k = 0; k < stabilization.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(stabilization, k); it; ++it) {
        t.emplace_back(nv + it.row(), nv + it.col(), -lam * it.value());
      }
    }
  }
  for (int q = 0; q < np; ++q) {
    t.emplace_back(nv + q, dim - 1, mean_weights[q]);
    t.emplace_back(dim - 1, nv + q, mean_weights[q]);
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd SaddleSystem::rhs() const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size());
  b.head(velocity_count()) = load;
  return b;
}

SaddleSystem assemble(const SchemeSpec& spec, const Grid& grid, const VectorField& forcing) {
  validate(spec, grid);
  check_field(grid, forcing);

  const int n = grid.cell_count();
  const SparseMatrix areas = area_matrix(grid);
  SparseMatrix areas2(2 * n, 2 * n);
  {
    std::vector<Triplet> t;
    for (int c = 0; c < n; ++c) {
      t.emplace_back(c, c, grid.cell_area(c));
      t.emplace_back(n + c, n + c, grid.cell_area(c));
    }
    areas2.setFromTriplets(t.begin(), t.end());
  }

  SaddleSystem s{grid, spec, {}, {}, {}, {}, {}, forcing, {}, {}};
  s.velocity = areas * laplacian_matrix(grid);
  s.gradient = areas2 * gradient_matrix(grid);
  s.divergence = areas * divergence_matrix(grid);
  s.velocity.prune(0.0);
  s.gradient.prune(0.0);
  s.divergence.prune(0.0);

  switch (spec.kind) {
    case SchemeKind::natural:
      s.prolongation = identity(n);
      s.stabilization = SparseMatrix(n, n);
      break;
    case SchemeKind::brezzi_pitkaranta:
      s.prolongation = identity(n);
      s.stabilization = jump_stabilization_form(grid, StabilizationEdges::all);
      break;
    case SchemeKind::cluster_jump:
      s.prolongation = identity(n);
      s.stabilization =
          jump_stabilization_form(grid, StabilizationEdges::intra_cluster, &*spec.partition);
      break;
    case SchemeKind::cluster_constant_pressure:
      s.prolongation = cluster_prolongation(grid, *spec.partition);
      s.stabilization = SparseMatrix(s.prolongation.cols(), s.prolongation.cols());
      break;
  }

  Eigen::VectorXd cell_areas(n);
  for (int c = 0; c < n; ++c) cell_areas[c] = grid.cell_area(c);
  s.mean_weights = s.prolongation.transpose() * cell_areas;

  s.load.resize(2 * n);
  s.load.head(n) = cell_areas.cwiseProduct(forcing.x.values);
  s.load.tail(n) = cell_areas.cwiseProduct(forcing.y.values);
  return s;
}

SaddleSystem assemble(const SchemeSpec& spec, const Grid& grid, const VectorFunction& f,
                      int quad_order) {
  return assemble(spec, grid, cell_means(f, grid, quad_order));
}

EnergyTerms energy_functional(const SaddleSystem& system, const VectorField& u,
                              const ScalarField& p) {
  check_field(system.grid, u);
  check_field(system.grid, p);
  EnergyTerms e;
  e.velocity = u.x.values.dot(system.velocity * u.x.values) +
               u.y.values.dot(system.velocity * u.y.values);
  if (system.lambda() != 0.0) {
    e.stabilization = system.lambda() * p.values.dot(system.stabilization * p.values);
  }
  return e;
}

double forcing_work(const SaddleSystem& system, const VectorField& u) {
  check_field(system.grid, u);
  const int n = system.cell_count();
  return system.load.head(n).dot(u.x.values) + system.load.tail(n).dot(u.y.values);
}

}  // namespace stokes_fv
