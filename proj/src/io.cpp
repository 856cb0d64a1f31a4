#include "stokes_fv/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "stokes_fv/errors.hpp"

namespace stokes_fv::io {

namespace {

using Triplet = Eigen::Triplet<double>;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  if (s == "nan") return std::nan("");
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

long parse_long(std::string_view s) {
  s = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

// Data rows of a headed CSV, each split into exactly `columns` fields.
std::vector<std::vector<std::string_view>> csv_rows(std::istream& in, std::string_view header,
                                                    std::size_t columns,
                                                    std::vector<std::string>& storage) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw ConfigError("expected CSV header '" + std::string(header) + "'");
  }
  while (std::getline(in, line)) {
    if (!trim(line).empty()) storage.push_back(line);
  }
  std::vector<std::vector<std::string_view>> rows;
  rows.reserve(storage.size());
  for (const std::string& s : storage) {
    auto parts = split(s, ',');
    if (parts.size() != columns) throw ConfigError("CSV row has wrong column count: " + s);
    rows.push_back(std::move(parts));
  }
  return rows;
}

int checked_cell(const Grid& grid, long i, long j) {
  if (i < 0 || j < 0 || i >= grid.nx() || j >= grid.ny()) {
    throw GridMismatch("CSV cell (" + std::to_string(i) + "," + std::to_string(j) +
                       ") outside the grid");
  }
  return grid.cell_index(static_cast<int>(i), static_cast<int>(j));
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_scalar_csv(std::ostream& out, const Grid& grid, const ScalarField& f) {
  check_field(grid, f);
  out << "i,j,value\n";
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto [i, j] = grid.cell_ij(c);
    out << i << ',' << j << ',' << format_double(f[c]) << '\n';
  }
}

void write_vector_csv(std::ostream& out, const Grid& grid, const VectorField& f) {
  check_field(grid, f);
  out << "i,j,vx,vy\n";
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto [i, j] = grid.cell_ij(c);
    out << i << ',' << j << ',' << format_double(f.x[c]) << ',' << format_double(f.y[c]) << '\n';
  }
}

ScalarField read_scalar_csv(std::istream& in, const Grid& grid) {
  std::vector<std::string> storage;
  const auto rows = csv_rows(in, "i,j,value", 3, storage);
  if (rows.size() != static_cast<std::size_t>(grid.cell_count())) {
    throw GridMismatch("CSV row count does not match the grid");
  }
  ScalarField f = ScalarField::zeros(grid);
  for (const auto& r : rows) f[checked_cell(grid, parse_long(r[0]), parse_long(r[1]))] = parse_double(r[2]);
  return f;
}

VectorField read_vector_csv(std::istream& in, const Grid& grid) {
  std::vector<std::string> storage;
  const auto rows = csv_rows(in, "i,j,vx,vy", 4, storage);
  if (rows.size() != static_cast<std::size_t>(grid.cell_count())) {
    throw GridMismatch("CSV row count does not match the grid");
  }
  VectorField f = VectorField::zeros(grid);
  for (const auto& r : rows) {
    const int c = checked_cell(grid, parse_long(r[0]), parse_long(r[1]));
    f.x[c] = parse_double(r[2]);
    f.y[c] = parse_double(r[3]);
  }
  return f;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
    }
  }
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0) {
    throw ConfigError("not a MatrixMarket real coordinate file");
  }
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line) && (line.empty() || line.front() == '%')) {
  }
  long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
      throw ConfigError("malformed MatrixMarket size line");
    }
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (long e = 0; e < nnz; ++e) {
    if (!std::getline(in, line)) throw ConfigError("MatrixMarket file ends early");
    std::istringstream entry(line);
    long r = 0, c = 0;
    std::string value;
    if (!(entry >> r >> c >> value) || r < 1 || c < 1 || r > rows || c > cols) {
      throw ConfigError("malformed MatrixMarket entry: " + line);
    }
    const double v = parse_double(value);
    t.emplace_back(r - 1, c - 1, v);
    if (symmetric && r != c) t.emplace_back(c - 1, r - 1, v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void write_vector_rows(std::ostream& out, const Eigen::VectorXd& v) {
  out << "index,value\n";
  for (Eigen::Index k = 0; k < v.size(); ++k) out << k << ',' << format_double(v[k]) << '\n';
}

Eigen::VectorXd read_vector_rows(std::istream& in) {
  std::vector<std::string> storage;
  const auto rows = csv_rows(in, "index,value", 2, storage);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.size()));
  for (const auto& r : rows) {
    const long k = parse_long(r[0]);
    if (k < 0 || k >= v.size()) throw ConfigError("vector index out of range");
    v[k] = parse_double(r[1]);
  }
  return v;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "scheme,lambda,n,h,err_u_h1,err_p_l2,order_u,order_p\n";
  for (const ConvergenceRow& r : table.rows) {
    out << to_string(table.kind) << ',' << format_double(table.lambda) << ',' << r.n << ','
        << format_double(r.h) << ',' << format_double(r.err_u_h1) << ','
        << format_double(r.err_p_l2) << ',' << format_double(r.order_u) << ','
        << format_double(r.order_p) << '\n';
  }
}

void write_checkerboard_csv(std::ostream& out, const CheckerboardSweep& sweep) {
  out << "n,h,dual_norm,l2_norm,ratio,smooth_ratio\n";
  for (const CheckerboardRow& r : sweep.rows) {
    out << r.n << ',' << format_double(r.h) << ',' << format_double(r.dual_norm) << ','
        << format_double(r.l2_norm) << ',' << format_double(r.ratio) << ','
        << format_double(r.smooth_ratio) << '\n';
  }
}

void write_checkerboard_fit_csv(std::ostream& out, const CheckerboardSweep& sweep) {
  out << "quantity,value\n";
  out << "decay_exponent," << format_double(sweep.decay_exponent) << '\n';
}

void write_infsup_csv(std::ostream& out, PressureSpace space, std::span<const InfSupRow> rows) {
  out << "space,n,h,dimension,beta2,beta\n";
  for (const InfSupRow& r : rows) {
    out << to_string(space) << ',' << r.n << ',' << format_double(r.h) << ',' << r.dimension
        << ',' << format_double(r.beta_squared) << ',' << format_double(r.beta) << '\n';
  }
}

void write_consistency_csv(std::ostream& out, const ConsistencyDefects& d) {
  out << "defect,value\n";
  out << "diffusive," << format_double(d.diffusive) << '\n';
  out << "mass," << format_double(d.mass) << '\n';
  out << "boundary_diffusive," << format_double(d.boundary_diffusive) << '\n';
  out << "max_interior," << format_double(d.max_interior()) << '\n';
}

void write_regularity_csv(std::ostream& out, const Grid& grid, double value) {
  out << "nx,ny,criterion\n";
  out << grid.nx() << ',' << grid.ny() << ',' << format_double(value) << '\n';
}

void write_dual_bound_csv(std::ostream& out, std::span<const int> n_list,
                      std::span<const DualBoundFit> fits) {
  if (n_list.size() != fits.size()) throw ConfigError("one fit per grid size expected");
  out << "n,samples,skipped,c1,c2\n";
  for (std::size_t k = 0; k < fits.size(); ++k) {
    out << n_list[k] << ',' << fits[k].samples.size() << ',' << fits[k].skipped << ','
        << format_double(fits[k].c1) << ',' << format_double(fits[k].c2) << '\n';
  }
}

}  // namespace stokes_fv::io
