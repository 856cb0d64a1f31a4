#include "stokes_fv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/SparseCholesky>

#include "stokes_fv/errors.hpp"
#include "stokes_fv/operators.hpp"

namespace stokes_fv {

using std::numbers::pi;

ScalarField checkerboard_field(const Grid& grid) {
  if (!grid.is_uniform()) throw InvalidGrid("checkerboard field needs a uniform grid");
  if (grid.nx() % 2 != 0 || grid.ny() % 2 != 0) {
    throw InvalidGrid("checkerboard field has zero mean only for an even cell count");
  }
  ScalarField q = ScalarField::zeros(grid);
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto [i, j] = grid.cell_ij(c);
    q[c] = ((i + j) % 2 == 0) ? 1.0 : -1.0;
  }
  return q;
}

struct GradientDualNorm::Impl {
  explicit Impl(const Grid& g) : grid(g) {}
  Grid grid;
  SparseMatrix weighted_gradient;  // |K| grad
  Eigen::SimplicialLDLT<SparseMatrix> velocity;
};

GradientDualNorm::GradientDualNorm(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {
  const SparseMatrix areas = area_matrix(grid);
  const SparseMatrix a = areas * laplacian_matrix(grid);
  impl_->velocity.compute(a);
  if (impl_->velocity.info() != Eigen::Success) {
    throw NumericalError("discrete H1 matrix factorization failed");
  }
  const int n = grid.cell_count();
  SparseMatrix g = gradient_matrix(grid);
  for (int k = 0; k < g.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(g, k); it; ++it) {
      it.valueRef() *= grid.cell_area(static_cast<int>(it.row()) % n);
    }
  }
  impl_->weighted_gradient = std::move(g);
}

GradientDualNorm::~GradientDualNorm() = default;
GradientDualNorm::GradientDualNorm(GradientDualNorm&&) noexcept = default;
GradientDualNorm& GradientDualNorm::operator=(GradientDualNorm&&) noexcept = default;

double GradientDualNorm::operator()(const ScalarField& q) const {
  check_field(impl_->grid, q);
  const int n = impl_->grid.cell_count();
  const Eigen::VectorXd load = impl_->weighted_gradient * q.values;
  const Eigen::VectorXd gx = load.head(n);
  const Eigen::VectorXd gy = load.tail(n);
  const double value = gx.dot(impl_->velocity.solve(gx)) + gy.dot(impl_->velocity.solve(gy));
  return std::sqrt(std::max(0.0, value));
}

double gradient_dual_norm(const Grid& grid, const ScalarField& q) {
  return GradientDualNorm(grid)(q);
}

VectorField lemma3_test_velocity(const Grid& grid, const ClusterPartition& partition,
                                 const ScalarField& q) {
  if (!partition.matches(grid)) throw GridMismatch("partition built for another grid");
  check_field(grid, q);
  VectorField v = VectorField::zeros(grid);
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto [i, j] = grid.cell_ij(c);
    // Cells in the left column / bottom row of their cluster look left / down.
    // The component carries the sign of that direction: the reference
    // picture is the top-right cell, and mirroring it flips the axis.
    const int di = (i % 2 == 0) ? -1 : 1;
    const int dj = (j % 2 == 0) ? -1 : 1;
    if (auto lx = grid.neighbour(c, di, 0)) v.x[c] = di * (q[*lx] - q[c]);
    if (auto my = grid.neighbour(c, 0, dj)) v.y[c] = dj * (q[*my] - q[c]);
  }
  return v;
}

ClusterVelocityCheck cluster_velocity_check(const Grid& grid, const ClusterPartition& partition,
                         const ScalarField& q) {
  const VectorField v = lemma3_test_velocity(grid, partition, q);
  ClusterVelocityCheck out;
  out.pairing = l2_inner(grid, gradient_apply(grid, q), v);
  out.split = split_seminorms(grid, partition, q);
  const double h = grid.mesh_size();
  out.bound = 0.5 * h * (out.split.cross * out.split.cross - out.split.intra * out.split.intra);
  return out;
}

DualBoundFit lemma2_inequality_probe(const Grid& grid, std::span<const ScalarField> samples) {
  DualBoundFit fit;
  const GradientDualNorm dual(grid);
  const double h = grid.mesh_size();
  for (const ScalarField& raw : samples) {
    const ScalarField q = zero_mean_project(grid, raw);
    DualBoundSample s;
    s.l2 = l2_norm(grid, q);
    if (!(s.l2 > 0.0)) {
      ++fit.skipped;
      continue;
    }
    s.dual = dual(q);
    s.scaled_jump = h * jump_seminorm(grid, q);
    fit.samples.push_back(s);
  }
  if (fit.samples.empty()) return fit;
  for (const auto& s : fit.samples) fit.c1 = std::max(fit.c1, s.dual / s.l2);
  for (const auto& s : fit.samples) {
    const double deficit = fit.c1 * s.l2 - s.dual;
    if (deficit <= 0.0) continue;
    fit.c2 = s.scaled_jump > 0.0 ? std::max(fit.c2, deficit / s.scaled_jump)
                                 : std::numeric_limits<double>::infinity();
  }
  return fit;
}

std::vector<ScalarField> dual_bound_samples(const Grid& grid, int random_count,
                                                std::uint64_t seed) {
  std::vector<ScalarField> out;
  const double x0 = grid.xs().front();
  const double y0 = grid.ys().front();
  const double lx = grid.xs().back() - x0;
  const double ly = grid.ys().back() - y0;
  for (auto [k, l] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 1}}) {
    out.push_back(zero_mean_project(grid, sample(grid, [=](Vec2 p) {
      return std::cos(k * pi * (p.x - x0) / lx) * std::cos(l * pi * (p.y - y0) / ly);
    })));
  }
  if (grid.is_uniform() && grid.nx() % 2 == 0 && grid.ny() % 2 == 0) {
    out.push_back(checkerboard_field(grid));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int r = 0; r < random_count; ++r) {
    ScalarField q = ScalarField::zeros(grid);
    for (int c = 0; c < grid.cell_count(); ++c) q[c] = dist(rng);
    out.push_back(zero_mean_project(grid, q));
  }
  return out;
}

ConsistencyDefects consistency_check(const Grid& grid) {
  ConsistencyDefects d;
  struct Affine {
    double a, b, c;  // a + b x + c y
    double operator()(Vec2 p) const { return a + b * p.x + c * p.y; }
    Vec2 gradient() const { return {b, c}; }
  };
  const Affine basis[3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  const Affine zero{0.0, 0.0, 0.0};

  for (const Affine& phi : basis) {
    for (int component = 0; component < 2; ++component) {
      const Affine& px = component == 0 ? phi : zero;
      const Affine& py = component == 0 ? zero : phi;
      for (const Edge& e : grid.interior_edges()) {
        const Vec2 xk = grid.cell_center(e.k);
        const Vec2 xl = grid.cell_center(e.l);
        const double exact_diff = -e.length * dot(phi.gradient(), e.normal);
        d.diffusive = std::max(d.diffusive, std::abs(diffusive_flux(e, phi(xk), phi(xl)) - exact_diff));
        const Vec2 mid{px(e.midpoint), py(e.midpoint)};
        const double exact_mass = e.length * dot(mid, e.normal);
        const double g = mass_flux(e, {px(xk), py(xk)}, {px(xl), py(xl)});
        d.mass = std::max(d.mass, std::abs(g - exact_mass));
      }
    }
  }
  for (const Edge& e : grid.boundary_edges()) {
    // phi = n . (x - x_sigma) vanishes on the edge's supporting line.
    const Affine phi{-dot(e.normal, e.midpoint), e.normal.x, e.normal.y};
    const double exact = -e.length * dot(phi.gradient(), e.normal);
    const double f = diffusive_flux(e, phi(grid.cell_center(e.k)), 0.0);
    d.boundary_diffusive = std::max(d.boundary_diffusive, std::abs(f - exact));
  }
  return d;
}

namespace {

// a(s) = s^2 (1-s)^2 and its derivatives.
double a0(double s) { return s * s * (1 - s) * (1 - s); }
double a1(double s) { return 2 * s * (1 - s) * (1 - 2 * s); }
double a2(double s) { return 2 * (1 - 6 * s + 6 * s * s); }
double a3(double s) { return 12 * (2 * s - 1); }

double cos_pressure(Vec2 p) { return std::cos(pi * p.x) * std::cos(pi * p.y); }
Vec2 cos_pressure_gradient(Vec2 p) {
  return {-pi * std::sin(pi * p.x) * std::cos(pi * p.y),
          -pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
}

}  // namespace

ManufacturedCase manufactured_case(std::string_view id) {
  if (id == "ms0") {
    return {"ms0", [](Vec2) { return Vec2{}; }, cos_pressure, cos_pressure_gradient};
  }
  if (id == "ms1") {
    auto velocity = [](Vec2 p) { return Vec2{a0(p.x) * a1(p.y), -a1(p.x) * a0(p.y)}; };
    auto forcing = [](Vec2 p) {
      const Vec2 minus_lap{-(a2(p.x) * a1(p.y) + a0(p.x) * a3(p.y)),
                           a3(p.x) * a0(p.y) + a1(p.x) * a2(p.y)};
      return minus_lap + cos_pressure_gradient(p);
    };
    return {"ms1", velocity, cos_pressure, forcing};
  }
  throw ConfigError("unknown manufactured case '" + std::string(id) + "' (expected ms0|ms1)");
}

SolutionErrors solution_errors(const Grid& grid, const ManufacturedCase& c, const VectorField& u,
                               const ScalarField& p) {
  VectorField du = sample(grid, c.velocity);
  du.x.values -= u.x.values;
  du.y.values -= u.y.values;
  ScalarField dp = zero_mean_project(grid, sample(grid, c.pressure));
  dp.values -= zero_mean_project(grid, p).values;
  return {h1_norm(grid, du), l2_norm(grid, dp)};
}

ConvergenceTable run_convergence(SchemeKind kind, double lambda, const ManufacturedCase& c,
                                 std::span<const int> n_list, const ConvergenceOptions& options) {
  if (n_list.empty()) throw ConfigError("convergence study needs at least one grid size");
  if (kind == SchemeKind::natural) {
    throw ConfigError("convergence studies need a stabilized or cluster-constant scheme");
  }
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw ConfigError("grid sizes must be strictly increasing");
  }
  ConvergenceTable table;
  table.kind = kind;
  table.lambda = lambda;
  table.case_id = c.id;
  for (int n : n_list) {
    const Grid grid = options.grid_family ? options.grid_family(n) : build_uniform(n);
    const SchemeSpec spec = make_scheme(kind, lambda, grid);
    const SaddleSystem system = assemble(spec, grid, c.forcing, options.quad_order);
    const SolveReport report = solve(system, options.solver);
    if (!report.ok()) {
      throw NumericalError("n=" + std::to_string(n) + ": " + std::string(to_string(report.status)) +
                           ": " + report.diagnostic);
    }
    const SolutionErrors err = solution_errors(grid, c, report.u, report.p);
    ConvergenceRow row;
    row.n = n;
    row.h = grid.mesh_size();
    row.err_u_h1 = err.velocity_h1;
    row.err_p_l2 = err.pressure_l2;
    if (table.rows.empty()) {
      row.order_u = row.order_p = std::numeric_limits<double>::quiet_NaN();
    } else {
      const ConvergenceRow& prev = table.rows.back();
      const double refine = std::log(prev.h / row.h);
      row.order_u = std::log(prev.err_u_h1 / row.err_u_h1) / refine;
      row.order_p = std::log(prev.err_p_l2 / row.err_p_l2) / refine;
    }
    table.rows.push_back(row);
  }
  return table;
}

double stability_ratio(const SaddleSystem& system, const SolveReport& report) {
  const double f = l2_norm(system.grid, system.forcing);
  return (h1_norm(system.grid, report.u) + l2_norm(system.grid, report.p)) / f;
}

double fitted_decay_exponent(std::span<const double> h, std::span<const double> values) {
  if (h.size() != values.size() || h.size() < 2) {
    throw ConfigError("decay fit needs at least two (h, value) pairs");
  }
  const double m = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sx += std::log(h[i]);
    sy += std::log(values[i]);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(values[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

CheckerboardSweep checkerboard_sweep(std::span<const int> n_list) {
  if (n_list.empty()) throw ConfigError("checkerboard sweep needs at least one grid size");
  CheckerboardSweep sweep;
  std::vector<double> hs;
  std::vector<double> ratios;
  for (int n : n_list) {
    const Grid grid = build_uniform(n);
    const GradientDualNorm dual(grid);
    const ScalarField cb = checkerboard_field(grid);
    const ScalarField smooth = zero_mean_project(grid, sample(grid, cos_pressure));
    CheckerboardRow row;
    row.n = n;
    row.h = grid.mesh_size();
    row.dual_norm = dual(cb);
    row.l2_norm = l2_norm(grid, cb);
    row.ratio = row.dual_norm / row.l2_norm;
    row.smooth_ratio = dual(smooth) / l2_norm(grid, smooth);
    sweep.rows.push_back(row);
    hs.push_back(row.h);
    ratios.push_back(row.ratio);
  }
  sweep.decay_exponent =
      hs.size() >= 2 ? fitted_decay_exponent(hs, ratios) : std::numeric_limits<double>::quiet_NaN();
  return sweep;
}

std::vector<InfSupRow> infsup_sweep(PressureSpace space, std::span<const int> n_list) {
  std::vector<InfSupRow> rows;
  for (int n : n_list) {
    const Grid grid = build_uniform(n);
    const SaddleSystem system =
        assemble(make_scheme(SchemeKind::natural, 0.0, grid), grid, VectorField::zeros(grid));
    const InfSupResult r = schur_smallest_eigen(system, space);
    rows.push_back({n, grid.mesh_size(), r.beta_squared, r.beta, r.dimension});
  }
  return rows;
}

}  // namespace stokes_fv
