#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stokes_fv/assembly.hpp"
#include "stokes_fv/fields.hpp"
#include "stokes_fv/grid.hpp"
#include "stokes_fv/operators.hpp"
#include "stokes_fv/verify.hpp"

namespace stokes_fv::io {

/// Shortest round-trip form is not used on purpose: always 17 significant
/// digits, '.' decimal, so files diff cleanly across runs.
std::string format_double(double v);

void write_scalar_csv(std::ostream& out, const Grid& grid, const ScalarField& f);
void write_vector_csv(std::ostream& out, const Grid& grid, const VectorField& f);
ScalarField read_scalar_csv(std::istream& in, const Grid& grid);
VectorField read_vector_csv(std::istream& in, const Grid& grid);

/// MatrixMarket coordinate real general, 1-based indices.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_matrix_market(std::istream& in);

/// `index,value` rows, 0-based.
void write_vector_rows(std::ostream& out, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_rows(std::istream& in);

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);
void write_checkerboard_csv(std::ostream& out, const CheckerboardSweep& sweep);
void write_checkerboard_fit_csv(std::ostream& out, const CheckerboardSweep& sweep);
void write_infsup_csv(std::ostream& out, PressureSpace space, std::span<const InfSupRow> rows);
void write_consistency_csv(std::ostream& out, const ConsistencyDefects& d);
void write_regularity_csv(std::ostream& out, const Grid& grid, double value);
void write_dual_bound_csv(std::ostream& out, std::span<const int> n_list,
                      std::span<const DualBoundFit> fits);

/// Opens `path` for writing (creating parent directories) and runs `body`.
template <class F>
void write_file(const std::filesystem::path& path, F&& body);

}  // namespace stokes_fv::io

#include <fstream>

#include "stokes_fv/errors.hpp"

template <class F>
void stokes_fv::io::write_file(const std::filesystem::path& path, F&& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  body(out);
  if (!out) throw ConfigError("write to '" + path.string() + "' failed");
}
