#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "stokes_fv/errors.hpp"
#include "stokes_fv/solver.hpp"
#include "stokes_fv/verify.hpp"
#include "support.hpp"

using namespace stokes_fv;

namespace {

SaddleSystem ms1_system(SchemeKind kind, double lambda, const Grid& g) {
  return assemble(make_scheme(kind, lambda, g), g, manufactured_case("ms1").forcing);
}

SaddleSystem unforced(SchemeKind kind, const Grid& g) {
  return assemble(make_scheme(kind, 1.0, g), g, VectorField::zeros(g));
}

}  // namespace

TEST_CASE("names") {
  CHECK(parse_backend("sparse-lu") == Backend::sparse_lu);
  CHECK(parse_backend(to_string(Backend::dense_lu)) == Backend::dense_lu);
  CHECK_THROWS_AS(parse_backend("cg"), ConfigError);
  CHECK(parse_pressure_space("full") == PressureSpace::full);
  CHECK(parse_pressure_space("cluster") == PressureSpace::cluster_constant);
  CHECK(parse_pressure_space(to_string(PressureSpace::cluster_constant)) == PressureSpace::cluster_constant);
  CHECK_THROWS_AS(parse_pressure_space("p2"), ConfigError);
  CHECK(to_string(SolveStatus::singular) == "singular");
}

TEST_CASE("stabilized solve meets the tolerance") {
  const Grid g = build_uniform(8);
  const SolveReport r = solve(ms1_system(SchemeKind::brezzi_pitkaranta, 0.05, g));
  CHECK(r.ok());
  CHECK(r.residual_norm <= 1e-10);
  CHECK(std::abs(mean_value(g, r.p)) <= 1e-10);
  CHECK(r.spurious_pressure_modes == 0);
  CHECK(r.rcond_estimate > 1e-12);
  CHECK(r.diagnostic.empty());
  CHECK(std::abs(r.multiplier) < 1e-10);
}

TEST_CASE("natural scheme is reported singular without throwing") {
  for (int n : {4, 8}) {
    const Grid g = build_uniform(n);
    SolveReport r;
    CHECK_NOTHROW(r = solve(ms1_system(SchemeKind::natural, 0.0, g)));
    CHECK(r.status == SolveStatus::singular);
    CHECK(r.spurious_pressure_modes > 0);
    CHECK_FALSE(r.diagnostic.empty());
  }
  CHECK(count_spurious_pressure_modes(unforced(SchemeKind::natural, build_uniform(2))) == 3);
  CHECK(count_spurious_pressure_modes(unforced(SchemeKind::natural, build_uniform(4))) == 7);
  CHECK(count_spurious_pressure_modes(unforced(SchemeKind::natural, build_uniform(10))) == 7);
  for (SchemeKind k : {SchemeKind::brezzi_pitkaranta, SchemeKind::cluster_jump,
                       SchemeKind::cluster_constant_pressure}) {
    CHECK(count_spurious_pressure_modes(unforced(k, build_uniform(8))) == 0);
  }
}

TEST_CASE("backends agree") {
  const Grid g = test_support::tensor_a();
  const SaddleSystem s = ms1_system(SchemeKind::brezzi_pitkaranta, 0.3, g);
  SolverOptions dense;
  dense.backend = Backend::dense_lu;
  const SolveReport a = solve(s);
  const SolveReport b = solve(s, dense);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK((a.p.values - b.p.values).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a.u.x.values - b.u.x.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b.rcond_estimate > 0.0);
}

TEST_CASE("unreachable tolerance is reported") {
  SolverOptions opt;
  opt.tol = 1e-300;
  const SolveReport r = solve(ms1_system(SchemeKind::brezzi_pitkaranta, 1.0, build_uniform(8)), opt);
  CHECK(r.status == SolveStatus::unconverged);
  CHECK_FALSE(r.diagnostic.empty());
  opt.tol = 0.0;
  CHECK_THROWS_AS(solve(ms1_system(SchemeKind::brezzi_pitkaranta, 1.0, build_uniform(4)), opt),
                  ConfigError);
}

TEST_CASE("solution is linear in the forcing") {
  std::mt19937_64 rng(47);
  const Grid g = build_uniform(8);
  for (SchemeKind k : {SchemeKind::brezzi_pitkaranta, SchemeKind::cluster_jump,
                       SchemeKind::cluster_constant_pressure}) {
    const SchemeSpec spec = make_scheme(k, 0.2, g);
    const VectorField f1 = test_support::random_vector(g, rng);
    const VectorField f2 = test_support::random_vector(g, rng);
    const VectorField f12{ScalarField(2.0 * f1.x.values - 0.5 * f2.x.values),
                          ScalarField(2.0 * f1.y.values - 0.5 * f2.y.values)};
    const SolveReport r1 = solve(assemble(spec, g, f1));
    const SolveReport r2 = solve(assemble(spec, g, f2));
    const SolveReport r12 = solve(assemble(spec, g, f12));
    const Eigen::VectorXd pu = 2.0 * r1.u.x.values - 0.5 * r2.u.x.values;
    const Eigen::VectorXd pp = 2.0 * r1.p.values - 0.5 * r2.p.values;
    CHECK((r12.u.x.values - pu).norm() <= 1e-10 * pu.norm());
    CHECK((r12.p.values - pp).norm() <= 1e-10 * pp.norm());
  }
}

TEST_CASE("inf-sup constants") {
  const SaddleSystem s2 = unforced(SchemeKind::natural, build_uniform(2));
  const InfSupResult empty = schur_smallest_eigen(s2, PressureSpace::cluster_constant);
  CHECK(empty.empty());
  CHECK(empty.beta_squared == 0.0);

  const InfSupResult c4 = schur_smallest_eigen(unforced(SchemeKind::natural, build_uniform(4)),
                                               PressureSpace::cluster_constant);
  const InfSupResult c8 = schur_smallest_eigen(unforced(SchemeKind::natural, build_uniform(8)),
                                               PressureSpace::cluster_constant);
  CHECK(c4.dimension == 3);
  CHECK(c8.dimension == 15);
  CHECK(c4.beta_squared >= 0.0);
  CHECK(std::max(c4.beta, c8.beta) - std::min(c4.beta, c8.beta) < 0.2 * std::max(c4.beta, c8.beta));

  std::vector<double> full;
  for (int n : {4, 8, 16}) {
    full.push_back(schur_smallest_eigen(unforced(SchemeKind::natural, build_uniform(n)), PressureSpace::full).beta);
  }
  CHECK(full[1] < full[0]);
  CHECK(full[2] < full[1]);

  // Column permutations of the basis leave the eigenvalue unchanged.
  std::mt19937_64 rng(53);
  for (PressureSpace space : {PressureSpace::full, PressureSpace::cluster_constant}) {
    const SaddleSystem s = unforced(SchemeKind::natural, build_uniform(8));
    const SparseMatrix basis = pressure_basis(s.grid, space);
    std::vector<int> perm(basis.cols());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pm(basis.cols());
    for (std::size_t k = 0; k < perm.size(); ++k) pm.indices()[static_cast<Eigen::Index>(k)] = perm[k];
    const SparseMatrix permuted = basis * pm;
    const double a = schur_smallest_eigen(s, basis).beta_squared;
    const double b = schur_smallest_eigen(s, permuted).beta_squared;
    CHECK(std::abs(a - b) <= 1e-10);
  }

  CHECK_THROWS_AS(schur_smallest_eigen(unforced(SchemeKind::natural, build_uniform(8)), PressureSpace::full, 32),
                  NumericalError);
}
