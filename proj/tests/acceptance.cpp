// Acceptance checks, one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stokes_fv/assembly.hpp"
#include "stokes_fv/operators.hpp"
#include "stokes_fv/solver.hpp"
#include "stokes_fv/verify.hpp"

using namespace stokes_fv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0.0 || secs < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d (%s): %s; %.2f s", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  if (budget_s > 0.0) std::printf(" (budget %.0f s%s)", budget_s, in_time ? "" : ", exceeded");
  std::printf("\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ScalarField random_scalar(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f = ScalarField::zeros(g);
  for (int c = 0; c < g.cell_count(); ++c) f[c] = d(rng);
  return f;
}

std::vector<Grid> identity_grids() {
  std::vector<double> graded{0.0};
  for (int i = 0; i < 8; ++i) graded.push_back(graded.back() + 0.05 * std::pow(1.3, i));
  return {build_uniform(4), build_uniform(8), build_uniform(16),
          build_tensor({0.0, 0.1, 0.35, 0.5, 0.8, 1.0}, {0.0, 0.2, 0.3, 0.7, 1.0}),
          build_tensor(graded, {0.0, 0.15, 0.4, 0.45, 0.6, 0.9, 1.0})};
}

// ---------------------------------------------------------------------------
// Dense reference assembly on the uniform unit-square grid, written directly
// from the cell equations with (i,j) neighbour loops. Shares no code with the
// library's edge-based assembly.

struct DenseReference {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

DenseReference dense_reference(SchemeKind kind, double lambda, int n, const VectorFunction& f) {
  const double h = 1.0 / n;
  const int cells = n * n;
  const bool cluster_pressure = kind == SchemeKind::cluster_constant_pressure;
  const int np = cluster_pressure ? cells / 4 : cells;
  const int dim = 2 * cells + np + 1;
  const int pbase = 2 * cells;
  auto cell = [n](int i, int j) { return j * n + i; };
  auto pressure_of = [&](int i, int j) {
    return cluster_pressure ? (j / 2) * (n / 2) + i / 2 : cell(i, j);
  };
  const double stab = kind == SchemeKind::brezzi_pitkaranta || kind == SchemeKind::cluster_jump ? lambda : 0.0;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int k = cell(i, j);
      const int pk = pressure_of(i, j);
      for (int s = 0; s < 4; ++s) {
        const double nrm[2] = {static_cast<double>(di[s]), static_cast<double>(dj[s])};
        const int ii = i + di[s], jj = j + dj[s];
        const bool inside = ii >= 0 && ii < n && jj >= 0 && jj < n;
        if (inside) {
          const int l = cell(ii, jj);
          const int pl = pressure_of(ii, jj);
          // h^2 (-lap u)_K: unit transmissivity per interior face.
          for (int c = 0; c < 2; ++c) {
            m(c * cells + k, c * cells + k) += 1.0;
            m(c * cells + k, c * cells + l) -= 1.0;
          }
          // h^2 (grad p)_K: face value (p_K + p_L) / 2 times h n.
          for (int c = 0; c < 2; ++c) {
            m(c * cells + k, pbase + pk) += 0.5 * h * nrm[c];
            m(c * cells + k, pbase + pl) += 0.5 * h * nrm[c];
          }
          // -(h^2 div u)_K, tested against the pressure unknown of K.
          for (int c = 0; c < 2; ++c) {
            m(pbase + pk, c * cells + k) -= 0.5 * h * nrm[c];
            m(pbase + pk, c * cells + l) -= 0.5 * h * nrm[c];
          }
          // -lambda h^2 * h^2 (-lap_S p)_K over the selected faces.
          const bool same_cluster = i / 2 == ii / 2 && j / 2 == jj / 2;
          const bool selected = kind == SchemeKind::brezzi_pitkaranta ||
                                (kind == SchemeKind::cluster_jump && same_cluster);
          if (selected && stab != 0.0) {
            m(pbase + pk, pbase + pk) -= stab * h * h;
            m(pbase + pk, pbase + pl) += stab * h * h;
          }
        } else {
          // Boundary face: transmissivity h / (h/2) = 2, pressure p_K on the face.
          for (int c = 0; c < 2; ++c) {
            m(c * cells + k, c * cells + k) += 2.0;
            m(c * cells + k, pbase + pk) += h * nrm[c];
          }
        }
      }
      // Zero-mean constraint with area weights.
      m(pbase + pk, dim - 1) += h * h;
      m(dim - 1, pbase + pk) += h * h;
    }
  }

  // |K| times the cell mean of f by 3x3 Gauss-Legendre.
  const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Vec2 sum;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const Vec2 pt{(i + 0.5 + 0.5 * gx[a]) * h, (j + 0.5 + 0.5 * gx[b]) * h};
          sum += (gw[a] * gw[b] / 4.0) * f(pt);
        }
      }
      rhs[cell(i, j)] = h * h * sum.x;
      rhs[cells + cell(i, j)] = h * h * sum.y;
    }
  }
  return {m, rhs};
}

}  // namespace

int main() {
  std::printf("stokes_fv acceptance checks\n");

  report(1, "duality and coercivity identities", 5.0, [] {
    std::mt19937_64 rng(1001);
    double worst_dual = 0.0, worst_coer = 0.0;
    for (const Grid& g : identity_grids()) {
      for (int trial = 0; trial < 100; ++trial) {
        const ScalarField q = random_scalar(g, rng);
        const VectorField v{random_scalar(g, rng), random_scalar(g, rng)};
        const double a = l2_inner(g, gradient_apply(g, q), v);
        const double b = -l2_inner(g, q, divergence_apply(g, v));
        worst_dual = std::max(worst_dual, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
        const VectorField lu = laplacian_apply(g, v);
        double lhs = 0.0;
        for (int c = 0; c < g.cell_count(); ++c) lhs += g.cell_area(c) * dot(lu.at(c), v.at(c));
        const double rhs = h1_inner(g, v, v);
        worst_coer = std::max(worst_coer, std::abs(lhs - rhs) / rhs);
      }
    }
    return Outcome{worst_dual <= 1e-12 && worst_coer <= 1e-12,
                   fmt("max relative duality defect %.3e", worst_dual) +
                       fmt(", coercivity defect %.3e (limit 1e-12)", worst_coer)};
  });

  report(2, "flux consistency", 1.0, [] {
    double worst = 0.0, boundary = 0.0;
    std::vector<Grid> grids = identity_grids();
    grids.push_back(build_tensor({0.0, 0.25, 1.0}, {0.0, 0.5, 1.0}));
    for (const Grid& g : grids) {
      const ConsistencyDefects d = consistency_check(g);
      worst = std::max(worst, d.max_interior());
      boundary = std::max(boundary, d.boundary_diffusive);
    }
    return Outcome{worst <= 1e-13, fmt("max interior defect %.3e (limit 1e-13)", worst) +
                                       fmt(", boundary defect %.3e", boundary)};
  });

  report(3, "checkerboard instability", 30.0, [] {
    const CheckerboardSweep s = checkerboard_sweep(std::vector<int>{4, 8, 16, 32});
    bool monotone = true;
    double smin = s.rows[0].smooth_ratio, smax = smin;
    std::string ratios;
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
      if (k > 0 && !(s.rows[k].ratio < s.rows[k - 1].ratio)) monotone = false;
      smin = std::min(smin, s.rows[k].smooth_ratio);
      smax = std::max(smax, s.rows[k].smooth_ratio);
      ratios += (k ? "," : "") + fmt("%.5f", s.rows[k].ratio);
    }
    const bool pass = monotone && s.decay_exponent >= 0.5 && smax <= 2.0 * smin;
    return Outcome{pass, "ratios " + ratios + (monotone ? " (decreasing)" : " (not monotone)") +
                             fmt(", fitted exponent %.4f (need >= 0.5)", s.decay_exponent) +
                             fmt(", smooth max/min %.3f (need <= 2)", smax / smin)};
  });

  report(4, "cluster test-velocity inequality", 10.0, [] {
    const Grid g = build_uniform(8);
    const ClusterPartition p = make_clusters(g);
    std::mt19937_64 rng(4004);
    double worst = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const ScalarField q = zero_mean_project(g, random_scalar(g, rng));
      const double margin = cluster_velocity_check(g, p, q).margin();
      worst = std::min(worst, margin);
      if (margin < -1e-12) ++violations;
    }
    return Outcome{violations == 0, std::to_string(violations) + " of 1000 violate" +
                                        fmt(", smallest margin %.4e (tolerance -1e-12)", worst)};
  });

  report(5, "unique solvability and stability", 0.0, [] {
    const ManufacturedCase ms1 = manufactured_case("ms1");
    const std::vector<double> lambdas{0.01, 0.1, 1.0, 10.0};
    const std::vector<int> ns{4, 8, 16, 32};
    bool all_ok = true;
    bool bounded = true;
    std::string info;
    for (SchemeKind kind : {SchemeKind::brezzi_pitkaranta, SchemeKind::cluster_jump}) {
      std::map<double, std::vector<double>> ratio;
      for (double lambda : lambdas) {
        for (int n : ns) {
          const Grid g = build_uniform(n);
          const SaddleSystem s = assemble(make_scheme(kind, lambda, g), g, ms1.forcing);
          const SolveReport r = solve(s);
          if (!r.ok()) {
            all_ok = false;
            info += " " + std::string(to_string(kind)) + fmt(" lambda=%g", lambda) + " n=" +
                    std::to_string(n) + ": " + r.diagnostic + ";";
          }
          ratio[lambda].push_back(stability_ratio(s, r));
        }
      }
      // One constant per scheme: the largest coarsest-level ratio over the sweep.
      double c0 = 0.0, worst = 0.0;
      for (const auto& [lambda, rs] : ratio) {
        c0 = std::max(c0, rs.front());
        worst = std::max(worst, *std::max_element(rs.begin(), rs.end()));
      }
      bounded = bounded && worst <= 1.1 * c0;
      info += " " + std::string(to_string(kind)) + fmt(": C0=%.4f", c0) + fmt(", max ratio %.4f", worst) +
              fmt(" (%.3f x C0);", worst / c0);
      for (const auto& [lambda, rs] : ratio) {
        std::printf("  info %s lambda=%g: ratio n=4..32 = %.4f %.4f %.4f %.4f, growth vs own n=4 %.3f\n",
                    std::string(to_string(kind)).c_str(), lambda, rs[0], rs[1], rs[2], rs[3],
                    *std::max_element(rs.begin(), rs.end()) / rs.front());
      }
    }
    int natural_flagged = 0;
    for (int n : ns) {
      const Grid g = build_uniform(n);
      const SolveReport r = solve(assemble(make_scheme(SchemeKind::natural, 0.0, g), g, ms1.forcing));
      if (r.status == SolveStatus::singular) ++natural_flagged;
    }
    info += " natural flagged singular on " + std::to_string(natural_flagged) + "/4 grids";
    return Outcome{all_ok && bounded && natural_flagged == 4,
                   std::string(all_ok ? "all stabilized systems solved cleanly;" : "solve failures:") + info};
  });

  report(6, "inf-sup constants", 120.0, [] {
    const std::vector<int> ns{4, 8, 16, 32};
    const auto cl = infsup_sweep(PressureSpace::cluster_constant, ns);
    const auto full = infsup_sweep(PressureSpace::full, ns);
    double bmin = cl[0].beta, bmax = bmin;
    std::string cs, fs;
    for (std::size_t k = 0; k < ns.size(); ++k) {
      bmin = std::min(bmin, cl[k].beta);
      bmax = std::max(bmax, cl[k].beta);
      cs += (k ? "," : "") + fmt("%.4f", cl[k].beta);
      fs += (k ? "," : "") + fmt("%.4f", full[k].beta);
    }
    const double variation = (bmax - bmin) / bmax;
    const double decay = full.back().beta / full.front().beta;
    return Outcome{variation < 0.2 && decay < 0.5,
                   "cluster beta " + cs + fmt(" variation %.3f (need < 0.2)", variation) + "; full beta " + fs +
                       fmt(" beta32/beta4 %.3f (need < 0.5)", decay)};
  });

  report(7, "first-order convergence", 300.0, [] {
    const ManufacturedCase ms1 = manufactured_case("ms1");
    const std::vector<int> ns{8, 16, 32, 64};
    bool pass = true;
    std::string detail;
    for (auto [kind, lambda] : {std::pair{SchemeKind::brezzi_pitkaranta, 0.05}, std::pair{SchemeKind::cluster_jump, 1.0}}) {
      const ConvergenceTable t = run_convergence(kind, lambda, ms1, ns);
      const ConvergenceRow& last = t.rows.back();
      pass = pass && last.order_u >= 0.8 && last.order_p >= 0.8;
      detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(kind)) +
                fmt(" lambda=%g", lambda) + fmt(": order_u %.3f", last.order_u) +
                fmt(", order_p %.3f", last.order_p);
    }
    return Outcome{pass, detail + " (need >= 0.8)"};
  });

  report(8, "lambda robustness of the cluster scheme", 0.0, [] {
    const ManufacturedCase ms1 = manufactured_case("ms1");
    const Grid g = build_uniform(32);
    std::vector<double> eu, ep;
    for (double lambda : {0.05, 1.0, 20.0}) {
      const SolveReport r = solve(assemble(make_scheme(SchemeKind::cluster_jump, lambda, g), g, ms1.forcing));
      const SolutionErrors e = solution_errors(g, ms1, r.u, r.p);
      eu.push_back(e.velocity_h1);
      ep.push_back(e.pressure_l2);
    }
    const double su = *std::max_element(eu.begin(), eu.end()) / *std::min_element(eu.begin(), eu.end());
    const double sp = *std::max_element(ep.begin(), ep.end()) / *std::min_element(ep.begin(), ep.end());
    return Outcome{su < 3.0 && sp < 3.0, fmt("velocity error spread %.3f", su) +
                                             fmt(", pressure error spread %.3f (need < 3)", sp)};
  });

  report(9, "sparse assembly equals dense reference", 0.0, [] {
    const int n = 4;
    const Grid g = build_uniform(n);
    const VectorFunction f = manufactured_case("ms1").forcing;
    double worst = 0.0, worst_rhs = 0.0;
    for (auto [kind, lambda] : {std::pair{SchemeKind::natural, 0.0}, std::pair{SchemeKind::brezzi_pitkaranta, 0.1},
                                std::pair{SchemeKind::cluster_jump, 0.7},
                                std::pair{SchemeKind::cluster_constant_pressure, 0.0}}) {
      const SaddleSystem s = assemble(make_scheme(kind, lambda, g), g, f);
      const DenseReference ref = dense_reference(kind, lambda, n, f);
      const Eigen::MatrixXd sparse(s.matrix());
      if (sparse.rows() != ref.matrix.rows()) return Outcome{false, "dimension mismatch"};
      worst = std::max(worst, (sparse - ref.matrix).cwiseAbs().maxCoeff());
      worst_rhs = std::max(worst_rhs, (s.rhs() - ref.rhs).cwiseAbs().maxCoeff());
    }
    return Outcome{worst <= 1e-14 && worst_rhs <= 1e-14,
                   fmt("max entry difference %.3e", worst) + fmt(", rhs %.3e (limit 1e-14)", worst_rhs)};
  });

  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
