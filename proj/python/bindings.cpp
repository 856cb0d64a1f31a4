#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stokes_fv/assembly.hpp"
#include "stokes_fv/errors.hpp"
#include "stokes_fv/grid.hpp"
#include "stokes_fv/operators.hpp"
#include "stokes_fv/solver.hpp"
#include "stokes_fv/verify.hpp"

namespace py = pybind11;
using namespace stokes_fv;

namespace {

using Columns = Eigen::Matrix<double, Eigen::Dynamic, 2>;

ScalarField to_scalar(const Grid& g, const Eigen::VectorXd& v) {
  ScalarField f(v);
  check_field(g, f);
  return f;
}

// Vector fields cross the boundary as (cells, 2) arrays.
VectorField to_vector(const Grid& g, const Columns& m) {
  VectorField f{ScalarField(Eigen::VectorXd(m.col(0))), ScalarField(Eigen::VectorXd(m.col(1)))};
  check_field(g, f);
  return f;
}

Columns from_vector(const VectorField& v) {
  Columns m(v.size(), 2);
  m.col(0) = v.x.values;
  m.col(1) = v.y.values;
  return m;
}

VectorFunction wrap_vector_function(py::function f) {
  return [f](Vec2 p) {
    py::gil_scoped_acquire gil;
    auto r = f(p.x, p.y).cast<std::pair<double, double>>();
    return Vec2{r.first, r.second};
  };
}

VectorField forcing_from(const Grid& g, const py::object& forcing, int quad_order) {
  if (forcing.is_none()) return VectorField::zeros(g);
  if (py::isinstance<py::str>(forcing)) {
    return cell_means(manufactured_case(forcing.cast<std::string>()).forcing, g, quad_order);
  }
  if (py::isinstance<py::function>(forcing)) {
    return cell_means(wrap_vector_function(forcing.cast<py::function>()), g, quad_order);
  }
  return to_vector(g, forcing.cast<Columns>());
}

SchemeKind scheme_from(const py::object& s) {
  if (py::isinstance<py::str>(s)) return parse_scheme_kind(s.cast<std::string>());
  return s.cast<SchemeKind>();
}

}  // namespace

PYBIND11_MODULE(_stokes_fv, m) {
  m.doc() = "Collocated finite-volume Stokes discretizations on Cartesian grids.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidGrid>(m, "InvalidGrid", base.ptr());
  py::register_exception<PartitionError>(m, "PartitionError", base.ptr());
  py::register_exception<GridMismatch>(m, "GridMismatch", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::enum_<SchemeKind>(m, "SchemeKind")
      .value("natural", SchemeKind::natural)
      .value("brezzi_pitkaranta", SchemeKind::brezzi_pitkaranta)
      .value("cluster_jump", SchemeKind::cluster_jump)
      .value("cluster_constant_pressure", SchemeKind::cluster_constant_pressure);
  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("ok", SolveStatus::ok)
      .value("singular", SolveStatus::singular)
      .value("unconverged", SolveStatus::unconverged);

  py::class_<Grid>(m, "Grid")
      .def(py::init([](std::vector<double> xs, std::vector<double> ys) { return build_tensor(xs, ys); }),
           py::arg("xs"), py::arg("ys"))
      .def_static("uniform", &build_uniform, py::arg("n"))
      .def_static("from_description", [](const std::string& s) { return grid_from_description(s); })
      .def_property_readonly("nx", &Grid::nx)
      .def_property_readonly("ny", &Grid::ny)
      .def_property_readonly("cell_count", &Grid::cell_count)
      .def_property_readonly("mesh_size", &Grid::mesh_size)
      .def_property_readonly("is_uniform", &Grid::is_uniform)
      .def_property_readonly("xs", [](const Grid& g) { return std::vector<double>(g.xs().begin(), g.xs().end()); })
      .def_property_readonly("ys", [](const Grid& g) { return std::vector<double>(g.ys().begin(), g.ys().end()); })
      .def("cell_index", &Grid::cell_index)
      .def("cell_ij", &Grid::cell_ij)
      .def("cell_area", &Grid::cell_area)
      .def("cell_center", [](const Grid& g, int c) {
        const Vec2 p = g.cell_center(c);
        return std::make_pair(p.x, p.y);
      })
      .def("centers", [](const Grid& g) {
        Columns out(g.cell_count(), 2);
        for (int c = 0; c < g.cell_count(); ++c) out.row(c) << g.cell_center(c).x, g.cell_center(c).y;
        return out;
      })
      .def("__repr__", [](const Grid& g) {
        return "<Grid " + std::to_string(g.nx()) + "x" + std::to_string(g.ny()) + ">";
      });

  m.def("cluster_regularity", [](const Grid& g) { return cluster_regularity(g, make_clusters(g)); });
  m.def("cluster_of", [](const Grid& g) {
    const ClusterPartition p = make_clusters(g);
    std::vector<int> out(g.cell_count());
    for (int c = 0; c < g.cell_count(); ++c) out[c] = p.cluster_of(c);
    return out;
  });

  m.def("laplacian", [](const Grid& g, const Eigen::VectorXd& u) {
    return laplacian_apply(g, to_scalar(g, u)).values;
  });
  m.def("gradient", [](const Grid& g, const Eigen::VectorXd& p) {
    return from_vector(gradient_apply(g, to_scalar(g, p)));
  });
  m.def("divergence", [](const Grid& g, const Columns& u) {
    return divergence_apply(g, to_vector(g, u)).values;
  });
  m.def("h1_norm", [](const Grid& g, const Columns& u) { return h1_norm(g, to_vector(g, u)); });
  m.def("l2_norm", [](const Grid& g, const Eigen::VectorXd& p) { return l2_norm(g, to_scalar(g, p)); });
  m.def("jump_seminorm", [](const Grid& g, const Eigen::VectorXd& p) {
    return jump_seminorm(g, to_scalar(g, p));
  });
  m.def("checkerboard", [](const Grid& g) { return checkerboard_field(g).values; });
  m.def("gradient_dual_norm", [](const Grid& g, const Eigen::VectorXd& q) {
    return gradient_dual_norm(g, to_scalar(g, q));
  });

  py::class_<SaddleSystem>(m, "SaddleSystem")
      .def_property_readonly("grid", [](const SaddleSystem& s) { return s.grid; })
      .def_property_readonly("scheme", [](const SaddleSystem& s) { return s.spec.kind; })
      .def_property_readonly("lambda_", &SaddleSystem::lambda)
      .def_property_readonly("size", &SaddleSystem::size)
      .def_property_readonly("pressure_count", &SaddleSystem::pressure_count)
      .def("matrix", &SaddleSystem::matrix)
      .def("rhs", &SaddleSystem::rhs)
      .def_readonly("velocity_block", &SaddleSystem::velocity)
      .def_readonly("stabilization", &SaddleSystem::stabilization)
      .def("coupling", &SaddleSystem::coupling);

  m.def(
      "assemble",
      [](const Grid& g, const py::object& scheme, double lambda, const py::object& forcing, int quad) {
        const SchemeKind kind = scheme_from(scheme);
        return assemble(make_scheme(kind, lambda, g), g, forcing_from(g, forcing, quad));
      },
      py::arg("grid"), py::arg("scheme"), py::arg("lambda_") = 1.0, py::arg("forcing") = py::none(),
      py::arg("quad_order") = 3,
      "forcing: None, a manufactured case id, f(x, y) -> (fx, fy), or a (cells, 2) array of cell values.");

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("status", &SolveReport::status)
      .def_property_readonly("ok", &SolveReport::ok)
      .def_property_readonly("u", [](const SolveReport& r) { return from_vector(r.u); })
      .def_property_readonly("p", [](const SolveReport& r) { return r.p.values; })
      .def_readonly("residual_norm", &SolveReport::residual_norm)
      .def_readonly("multiplier", &SolveReport::multiplier)
      .def_readonly("rcond_estimate", &SolveReport::rcond_estimate)
      .def_readonly("spurious_pressure_modes", &SolveReport::spurious_pressure_modes)
      .def_readonly("diagnostic", &SolveReport::diagnostic);

  m.def(
      "solve",
      [](const SaddleSystem& s, double tol, const std::string& backend) {
        SolverOptions opt;
        opt.tol = tol;
        opt.backend = parse_backend(backend);
        py::gil_scoped_release release;
        return solve(s, opt);
      },
      py::arg("system"), py::arg("tol") = 1e-10, py::arg("backend") = "sparse-lu");

  m.def("energy", [](const SaddleSystem& s, const SolveReport& r) {
    const EnergyTerms e = energy_functional(s, r.u, r.p);
    return py::dict(py::arg("velocity") = e.velocity, py::arg("stabilization") = e.stabilization,
                    py::arg("forcing_work") = forcing_work(s, r.u));
  });

  m.def(
      "solution_errors",
      [](const SaddleSystem& s, const SolveReport& r, const std::string& case_id) {
        const SolutionErrors e = solution_errors(s.grid, manufactured_case(case_id), r.u, r.p);
        return std::make_pair(e.velocity_h1, e.pressure_l2);
      },
      py::arg("system"), py::arg("report"), py::arg("case") = "ms1");

  m.def(
      "convergence",
      [](const py::object& scheme, double lambda, std::vector<int> n_list, const std::string& case_id) {
        const ConvergenceTable t = run_convergence(scheme_from(scheme), lambda, manufactured_case(case_id), n_list);
        py::list rows;
        for (const ConvergenceRow& r : t.rows) {
          rows.append(py::dict(py::arg("n") = r.n, py::arg("h") = r.h, py::arg("err_u_h1") = r.err_u_h1,
                               py::arg("err_p_l2") = r.err_p_l2, py::arg("order_u") = r.order_u,
                               py::arg("order_p") = r.order_p));
        }
        return rows;
      },
      py::arg("scheme"), py::arg("lambda_"), py::arg("n_list"), py::arg("case") = "ms1");

  m.def(
      "infsup",
      [](const std::string& space, std::vector<int> n_list) {
        py::list rows;
        for (const InfSupRow& r : infsup_sweep(parse_pressure_space(space), n_list)) {
          rows.append(py::dict(py::arg("n") = r.n, py::arg("h") = r.h, py::arg("beta") = r.beta,
                               py::arg("beta_squared") = r.beta_squared, py::arg("dimension") = r.dimension));
        }
        return rows;
      },
      py::arg("space"), py::arg("n_list"));

  m.def("checkerboard_sweep", [](std::vector<int> n_list) {
    const CheckerboardSweep s = checkerboard_sweep(n_list);
    std::vector<double> ratios;
    for (const CheckerboardRow& r : s.rows) ratios.push_back(r.ratio);
    return std::make_pair(ratios, s.decay_exponent);
  });

  m.def("consistency", [](const Grid& g) {
    const ConsistencyDefects d = consistency_check(g);
    return py::dict(py::arg("diffusive") = d.diffusive, py::arg("mass") = d.mass,
                    py::arg("boundary_diffusive") = d.boundary_diffusive);
  });
}
