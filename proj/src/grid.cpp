#include "stokes_fv/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include <json.hpp>

#include "stokes_fv/errors.hpp"

namespace stokes_fv {

namespace {

void check_coordinates(const std::vector<double>& c, const char* axis) {
  if (c.size() < 3) {
    throw InvalidGrid(std::string("grid needs at least 2 cells along ") + axis);
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!std::isfinite(c[i])) {
      throw InvalidGrid(std::string("non-finite coordinate along ") + axis);
    }
    if (i > 0 && !(c[i] > c[i - 1])) {
      throw InvalidGrid(std::string("coordinates along ") + axis +
                        " must be strictly increasing");
    }
  }
}

bool all_equal(const std::vector<double>& c, double step) {
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (std::abs((c[i] - c[i - 1]) - step) > 1e-12 * step) return false;
  }
  return true;
}

}  // namespace

Grid::Grid(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  check_coordinates(xs_, "x");
  check_coordinates(ys_, "y");
  nx_ = static_cast<int>(xs_.size()) - 1;
  ny_ = static_cast<int>(ys_.size()) - 1;

  const double step = xs_[1] - xs_[0];
  uniform_ = all_equal(xs_, step) && all_equal(ys_, step);
  for (int i = 0; i < nx_; ++i) mesh_size_ = std::max(mesh_size_, xs_[i + 1] - xs_[i]);
  for (int j = 0; j < ny_; ++j) mesh_size_ = std::max(mesh_size_, ys_[j + 1] - ys_[j]);

  auto width = [&](int i) { return xs_[i + 1] - xs_[i]; };
  auto height = [&](int j) { return ys_[j + 1] - ys_[j]; };
  auto xc = [&](int i) { return 0.5 * (xs_[i] + xs_[i + 1]); };
  auto yc = [&](int j) { return 0.5 * (ys_[j] + ys_[j + 1]); };

  edges_.reserve(static_cast<std::size_t>(2 * nx_ * ny_ + nx_ + ny_));

  // Vertical interior faces: (i,j) | (i+1,j).
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i + 1 < nx_; ++i) {
      Edge e;
      e.k = cell_index(i, j);
      e.l = cell_index(i + 1, j);
      e.normal = {1.0, 0.0};
      e.midpoint = {xs_[i + 1], yc(j)};
      e.length = height(j);
      e.distance = xc(i + 1) - xc(i);
      e.perp_k = width(i);
      e.perp_l = width(i + 1);
      edges_.push_back(e);
    }
  }
  // Horizontal interior faces: (i,j) | (i,j+1).
  for (int j = 0; j + 1 < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      Edge e;
      e.k = cell_index(i, j);
      e.l = cell_index(i, j + 1);
      e.normal = {0.0, 1.0};
      e.midpoint = {xc(i), ys_[j + 1]};
      e.length = width(i);
      e.distance = yc(j + 1) - yc(j);
      e.perp_k = height(j);
      e.perp_l = height(j + 1);
      edges_.push_back(e);
    }
  }
  interior_count_ = static_cast<int>(edges_.size());

  auto boundary = [&](int cell, Vec2 normal, Vec2 mid, double length, double perp) {
    Edge e;
    e.k = cell;
    e.normal = normal;
    e.midpoint = mid;
    e.length = length;
    e.distance = 0.5 * perp;
    e.perp_k = perp;
    edges_.push_back(e);
  };
  for (int i = 0; i < nx_; ++i) {
    boundary(cell_index(i, 0), {0.0, -1.0}, {xc(i), ys_.front()}, width(i), height(0));
    boundary(cell_index(i, ny_ - 1), {0.0, 1.0}, {xc(i), ys_.back()}, width(i),
             height(ny_ - 1));
  }
  for (int j = 0; j < ny_; ++j) {
    boundary(cell_index(0, j), {-1.0, 0.0}, {xs_.front(), yc(j)}, height(j), width(0));
    boundary(cell_index(nx_ - 1, j), {1.0, 0.0}, {xs_.back(), yc(j)}, height(j),
             width(nx_ - 1));
  }

  // Cell -> edge incidence in CSR form.
  std::vector<int> counts(cell_count(), 0);
  for (const Edge& e : edges_) {
    ++counts[e.k];
    if (!e.is_boundary()) ++counts[e.l];
  }
  cell_edge_offsets_.assign(cell_count() + 1, 0);
  for (int c = 0; c < cell_count(); ++c) {
    cell_edge_offsets_[c + 1] = cell_edge_offsets_[c] + counts[c];
  }
  cell_edge_ids_.assign(cell_edge_offsets_.back(), -1);
  std::vector<int> fill(cell_edge_offsets_.begin(), cell_edge_offsets_.end() - 1);
  for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
    const Edge& e = edges_[id];
    cell_edge_ids_[fill[e.k]++] = id;
    if (!e.is_boundary()) cell_edge_ids_[fill[e.l]++] = id;
  }
}

Vec2 Grid::cell_center(int cell) const {
  auto [i, j] = cell_ij(cell);
  return {0.5 * (xs_[i] + xs_[i + 1]), 0.5 * (ys_[j] + ys_[j + 1])};
}

double Grid::cell_width(int cell) const {
  const int i = cell % nx_;
  return xs_[i + 1] - xs_[i];
}

double Grid::cell_height(int cell) const {
  const int j = cell / nx_;
  return ys_[j + 1] - ys_[j];
}

double Grid::cell_area(int cell) const { return cell_width(cell) * cell_height(cell); }

double Grid::total_area() const {
  return (xs_.back() - xs_.front()) * (ys_.back() - ys_.front());
}

std::span<const int> Grid::cell_edges(int cell) const {
  return std::span<const int>(cell_edge_ids_)
      .subspan(cell_edge_offsets_[cell], cell_edge_offsets_[cell + 1] - cell_edge_offsets_[cell]);
}

Vec2 Grid::outward_normal(int id, int cell) const {
  const Edge& e = edges_[id];
  return e.k == cell ? e.normal : -e.normal;
}

std::optional<int> Grid::neighbour(int cell, int di, int dj) const {
  auto [i, j] = cell_ij(cell);
  const int ii = i + di;
  const int jj = j + dj;
  if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) return std::nullopt;
  return cell_index(ii, jj);
}

bool Grid::has_boundary_edge(int cell) const {
  auto [i, j] = cell_ij(cell);
  return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
}

Grid build_uniform(int n) {
  if (n < 2) throw InvalidGrid("uniform grid needs n >= 2, got " + std::to_string(n));
  std::vector<double> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = static_cast<double>(i) / n;
  return Grid(c, c);
}

Grid build_tensor(std::vector<double> xs, std::vector<double> ys) {
  return Grid(std::move(xs), std::move(ys));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidGrid("bad integer in grid description: '" + std::string(s) + "'");
  }
  return value;
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    std::string_view item = trim(s.substr(0, comma));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidGrid("bad coordinate in grid description: '" + std::string(item) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

Grid grid_from_description(std::string_view text) {
  text = trim(text);
  if (text.starts_with('{')) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      return build_tensor(j.at("x").get<std::vector<double>>(),
                          j.at("y").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw InvalidGrid(std::string("bad JSON grid description: ") + e.what());
    }
  }
  if (text.starts_with("uniform")) {
    std::string_view rest = trim(text.substr(7));
    if (rest.starts_with(':')) rest.remove_prefix(1);
    rest = trim(rest);
    if (rest.starts_with("n=")) rest.remove_prefix(2);
    return build_uniform(parse_int(rest));
  }
  if (text.starts_with("tensor:")) {
    std::string_view rest = text.substr(7);
    const auto semi = rest.find(';');
    if (semi == std::string_view::npos) {
      throw InvalidGrid("tensor grid description needs '<xs>;<ys>'");
    }
    return build_tensor(parse_list(rest.substr(0, semi)), parse_list(rest.substr(semi + 1)));
  }
  throw InvalidGrid("unrecognised grid description: '" + std::string(text) + "'");
}

ClusterPartition::ClusterPartition(const Grid& grid) : nx_(grid.nx()), ny_(grid.ny()) {
  if (nx_ % 2 != 0 || ny_ % 2 != 0) {
    throw PartitionError("2x2 clusters need an even number of cells per direction, got " +
                         std::to_string(nx_) + "x" + std::to_string(ny_));
  }
  cx_ = nx_ / 2;
  cy_ = ny_ / 2;
  cluster_of_.resize(grid.cell_count());
  members_.resize(cluster_count());
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto [i, j] = grid.cell_ij(c);
    const int g = (j / 2) * cx_ + i / 2;
    cluster_of_[c] = g;
    members_[g][(j % 2) * 2 + (i % 2)] = c;
  }
  intra_.assign(grid.edges().size(), false);
  for (int id = 0; id < grid.interior_edge_count(); ++id) {
    const Edge& e = grid.edge(id);
    if (cluster_of_[e.k] == cluster_of_[e.l]) {
      intra_[id] = true;
      intra_edges_.push_back(id);
    } else {
      cross_edges_.push_back(id);
    }
  }
}

ClusterPartition make_clusters(const Grid& grid) { return ClusterPartition(grid); }

double normal_set_criterion(std::span<const Vec2> normals) {
  const std::size_t m = normals.size();
  if (m == 0) return std::numeric_limits<double>::infinity();
  if (m > 2) return 0.0;
  if (m == 1) return dot(normals[0], normals[0]);
  // Smallest eigenvalue of the 2x2 Gram matrix [[a, b], [b, c]].
  const double a = dot(normals[0], normals[0]);
  const double b = dot(normals[0], normals[1]);
  const double c = dot(normals[1], normals[1]);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  return std::max(0.0, mean - radius);
}

double cluster_regularity(const Grid& grid, const ClusterPartition& partition) {
  if (!partition.matches(grid)) throw GridMismatch("partition built for another grid");
  double best = std::numeric_limits<double>::infinity();
  std::vector<Vec2> normals;
  for (int c = 0; c < grid.cell_count(); ++c) {
    normals.clear();
    for (int id : grid.cell_edges(c)) {
      const Edge& e = grid.edge(id);
      if (e.is_boundary()) continue;
      const int other = e.k == c ? e.l : e.k;
      if (partition.cluster_of(other) != partition.cluster_of(c)) {
        normals.push_back(grid.outward_normal(id, c));
      }
    }
    if (!normals.empty()) best = std::min(best, normal_set_criterion(normals));
  }
  return best;
}

}  // namespace stokes_fv
