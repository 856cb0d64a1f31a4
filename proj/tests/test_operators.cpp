#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "stokes_fv/errors.hpp"
#include "stokes_fv/operators.hpp"
#include "support.hpp"

using namespace stokes_fv;
using test_support::random_scalar;
using test_support::random_vector;

namespace {

ScalarField checkerboard(const Grid& g) {
  ScalarField f = ScalarField::zeros(g);
  for (int c = 0; c < g.cell_count(); ++c) {
    auto [i, j] = g.cell_ij(c);
    f[c] = (i + j) % 2 == 0 ? 1.0 : -1.0;
  }
  return f;
}

Eigen::VectorXd stack(const VectorField& v) {
  Eigen::VectorXd out(2 * v.size());
  out << v.x.values, v.y.values;
  return out;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

std::vector<Grid> test_grids() {
  return {build_uniform(4), build_uniform(8), build_uniform(5), test_support::tensor_a(),
          test_support::tensor_b()};
}

}  // namespace

TEST_CASE("laplacian examples") {
  const Grid g4 = build_uniform(4);
  const ScalarField lc = laplacian_apply(g4, ScalarField::constant(g4, 3.0));
  for (int c = 0; c < g4.cell_count(); ++c) {
    if (!g4.has_boundary_edge(c)) CHECK(std::abs(lc[c]) < 1e-12);
  }
  const Grid g2 = build_uniform(2);
  ScalarField e0 = ScalarField::zeros(g2);
  e0[g2.cell_index(0, 0)] = 1.0;
  CHECK(laplacian_apply(g2, e0)[g2.cell_index(0, 0)] == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("coercivity identity") {
  std::mt19937_64 rng(17);
  for (const Grid& g : test_grids()) {
    for (int trial = 0; trial < 10; ++trial) {
      const VectorField u = random_vector(g, rng);
      const VectorField lu = laplacian_apply(g, u);
      double lhs = 0.0;
      for (int c = 0; c < g.cell_count(); ++c) lhs += g.cell_area(c) * dot(lu.at(c), u.at(c));
      const double rhs = h1_norm(g, u) * h1_norm(g, u);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradient examples") {
  for (const Grid& g : test_grids()) {
    const VectorField gc = gradient_apply(g, ScalarField::constant(g, 2.5));
    CHECK(max_abs(stack(gc)) < 1e-12);
  }
  const Grid g4 = build_uniform(4);
  const VectorField gcb = gradient_apply(g4, checkerboard(g4));
  int interior = 0;
  for (int c = 0; c < g4.cell_count(); ++c) {
    if (g4.has_boundary_edge(c)) continue;
    ++interior;
    CHECK(gcb.at(c) == Vec2{0.0, 0.0});
  }
  CHECK(interior == 4);

  const Grid g8 = build_uniform(8);
  const VectorField gx = gradient_apply(g8, sample(g8, [](Vec2 p) { return p.x; }));
  for (int c = 0; c < g8.cell_count(); ++c) {
    if (g8.has_boundary_edge(c)) continue;
    CHECK(gx.x[c] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(gx.y[c]) < 1e-12);
  }
}

TEST_CASE("divergence examples") {
  const Grid g4 = build_uniform(4);
  const ScalarField dc = divergence_apply(g4, VectorField{ScalarField::constant(g4, 1.0),
                                                          ScalarField::constant(g4, -2.0)});
  for (int c = 0; c < g4.cell_count(); ++c) {
    if (!g4.has_boundary_edge(c)) CHECK(std::abs(dc[c]) < 1e-12);
  }
  CHECK(max_abs(divergence_apply(g4, VectorField::zeros(g4)).values) == 0.0);

  std::mt19937_64 rng(19);
  for (const Grid& g : test_grids()) {
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField d = divergence_apply(g, random_vector(g, rng));
      double total = 0.0;
      for (int c = 0; c < g.cell_count(); ++c) total += g.cell_area(c) * d[c];
      CHECK(std::abs(total) < 1e-13);
    }
  }
}

TEST_CASE("stabilization operator examples") {
  const Grid g2 = build_uniform(2);
  const ScalarField cb = checkerboard(g2);
  CHECK(stab_laplacian_apply(g2, cb, StabilizationEdges::all)[g2.cell_index(0, 0)] ==
        doctest::Approx(16.0).epsilon(1e-14));

  const Grid g4 = build_uniform(4);
  const ClusterPartition p4 = make_clusters(g4);
  for (auto edges : {StabilizationEdges::all, StabilizationEdges::intra_cluster}) {
    CHECK(max_abs(stab_laplacian_apply(g4, ScalarField::constant(g4, 4.0), edges, &p4).values) < 1e-12);
  }
  ScalarField per_cluster = ScalarField::zeros(g4);
  for (int c = 0; c < g4.cell_count(); ++c) per_cluster[c] = 1.0 + p4.cluster_of(c) * p4.cluster_of(c);
  CHECK(max_abs(stab_laplacian_apply(g4, per_cluster, StabilizationEdges::intra_cluster, &p4).values) == 0.0);
  CHECK(max_abs(stab_laplacian_apply(g4, per_cluster, StabilizationEdges::all).values) > 1.0);

  CHECK_THROWS_AS(stab_laplacian_apply(g4, per_cluster, StabilizationEdges::intra_cluster), ConfigError);
  CHECK_THROWS_AS(stab_laplacian_matrix(g4, StabilizationEdges::intra_cluster), ConfigError);
  CHECK_THROWS_AS(jump_stabilization_form(g4, StabilizationEdges::intra_cluster), ConfigError);
}

TEST_CASE("duality") {
  std::mt19937_64 rng(23);
  const Grid g8 = build_uniform(8);
  CHECK(duality_defect(g8, random_scalar(g8, rng), VectorField::zeros(g8)) == 0.0);
  const Grid t = build_tensor({0.0, 0.2, 0.5, 1.0}, {0.0, 0.2, 0.5, 1.0});
  std::vector<Grid> grids = test_grids();
  grids.push_back(t);
  for (const Grid& g : grids) {
    for (int trial = 0; trial < 10; ++trial) {
      const ScalarField p = random_scalar(g, rng);
      const VectorField v = random_vector(g, rng);
      const double scale = std::abs(l2_inner(g, gradient_apply(g, p), v)) +
                           std::abs(l2_inner(g, p, divergence_apply(g, v)));
      CHECK(std::abs(duality_defect(g, p, v)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("apply and matrix forms agree") {
  std::mt19937_64 rng(29);
  for (const Grid& g : {build_uniform(4), build_uniform(6), test_support::tensor_a(),
                        build_tensor({0, 0.1, 0.3, 0.7, 1.0}, {0, 0.5, 0.6, 0.9, 1.0})}) {
    const bool clustered = g.nx() % 2 == 0 && g.ny() % 2 == 0;
    const SparseMatrix lap = laplacian_matrix(g);
    const SparseMatrix grad = gradient_matrix(g);
    const SparseMatrix div = divergence_matrix(g);
    CHECK(grad.rows() == 2 * g.cell_count());
    CHECK(div.cols() == 2 * g.cell_count());
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField p = random_scalar(g, rng);
      const VectorField u = random_vector(g, rng);
      CHECK(max_abs(lap * p.values - laplacian_apply(g, p).values) < 1e-10);
      CHECK(max_abs(grad * p.values - stack(gradient_apply(g, p))) < 1e-10);
      CHECK(max_abs(div * stack(u) - divergence_apply(g, u).values) < 1e-10);
      CHECK(max_abs(stab_laplacian_matrix(g, StabilizationEdges::all) * p.values -
                    stab_laplacian_apply(g, p, StabilizationEdges::all).values) < 1e-10);
      if (clustered) {
        const ClusterPartition part = make_clusters(g);
        CHECK(max_abs(stab_laplacian_matrix(g, StabilizationEdges::intra_cluster, &part) * p.values -
                      stab_laplacian_apply(g, p, StabilizationEdges::intra_cluster, &part).values) <
              1e-10);
      }
    }
  }
}

TEST_CASE("jump stabilization form") {
  std::mt19937_64 rng(31);
  const Grid g = build_uniform(6);
  const ClusterPartition part = make_clusters(g);
  const double h = 1.0 / 6.0;
  const SparseMatrix c_all = jump_stabilization_form(g, StabilizationEdges::all);
  const SparseMatrix c_in = jump_stabilization_form(g, StabilizationEdges::intra_cluster, &part);
  CHECK((Eigen::MatrixXd(c_all) - Eigen::MatrixXd(c_all).transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const ScalarField p = random_scalar(g, rng), q = random_scalar(g, rng);
    CHECK(p.values.dot(c_all * q.values) == doctest::Approx(h * h * jump_inner(g, p, q)).epsilon(1e-12));
    const double intra = split_seminorms(g, part, p).intra;
    CHECK(p.values.dot(c_in * p.values) == doctest::Approx(h * h * intra * intra).epsilon(1e-12));
    // Uniform grids: the form is |K| times the stabilization Laplacian, scaled by h^2.
    CHECK(max_abs(c_all * p.values - h * h * h * h * stab_laplacian_apply(g, p, StabilizationEdges::all).values) <
          1e-12);
  }
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(c_all)).eigenvalues();
  CHECK(ev.minCoeff() > -1e-14);
}

TEST_CASE("fluxes flip sign with the orientation") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Grid g = test_support::tensor_b();
  for (const Edge& e : g.interior_edges()) {
    Edge f = e;
    std::swap(f.k, f.l);
    std::swap(f.perp_k, f.perp_l);
    f.normal = -e.normal;
    const double a = d(rng), b = d(rng);
    const Vec2 ua{d(rng), d(rng)}, ub{d(rng), d(rng)};
    CHECK(diffusive_flux(f, b, a) == doctest::Approx(-diffusive_flux(e, a, b)));
    CHECK(mass_flux(f, ub, ua) == doctest::Approx(-mass_flux(e, ua, ub)));
    const Vec2 hp = pressure_flux(e, a, b), hf = pressure_flux(f, b, a);
    CHECK(hf.x == doctest::Approx(-hp.x));
    CHECK(hf.y == doctest::Approx(-hp.y));
  }
  for (const Edge& e : g.boundary_edges()) CHECK(mass_flux(e, {1.0, 2.0}, {}) == 0.0);
}

TEST_CASE("operators are linear") {
  std::mt19937_64 rng(41);
  const Grid g = test_support::tensor_a();
  const ScalarField p = random_scalar(g, rng), q = random_scalar(g, rng);
  const ScalarField combo(2.0 * p.values - 3.0 * q.values);
  CHECK(max_abs(stack(gradient_apply(g, combo)) -
                (2.0 * stack(gradient_apply(g, p)) - 3.0 * stack(gradient_apply(g, q)))) < 1e-10);
  CHECK(max_abs(laplacian_apply(g, combo).values -
                (2.0 * laplacian_apply(g, p).values - 3.0 * laplacian_apply(g, q).values)) < 1e-10);
  const VectorField u = random_vector(g, rng), v = random_vector(g, rng);
  const VectorField uv{ScalarField(u.x.values + v.x.values), ScalarField(u.y.values + v.y.values)};
  CHECK(max_abs(divergence_apply(g, uv).values -
                (divergence_apply(g, u).values + divergence_apply(g, v).values)) < 1e-10);
}
