#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace stokes_fv {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  constexpr Vec2& operator+=(Vec2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// One mesh edge. Interior edges join cell `k` to cell `l` and carry the unit
/// normal oriented from `k` to `l`; boundary edges have `l == -1` and the
/// outward normal of the domain.
struct Edge {
  int k = -1;
  int l = -1;
  Vec2 normal;
  Vec2 midpoint;
  double length = 0.0;
  /// |x_K - x_L| for interior edges, distance from x_K to the edge otherwise.
  double distance = 0.0;
  /// Extent of `k` (resp. `l`) perpendicular to the edge.
  double perp_k = 0.0;
  double perp_l = 0.0;

  bool is_boundary() const { return l < 0; }
};

/// Tensor-product mesh of the rectangle [x0,xn] x [y0,yn].
///
/// Cells are numbered lexicographically, `index = j * nx + i`, where `i` is
/// the column (x direction) and `j` the row (y direction), both from zero.
/// Cell centers are mass centers. Edges are stored interior first, then
/// boundary; `interior_edges()` and `boundary_edges()` are views into that
/// single array, so an edge id is valid for `edges()`.
///
/// Immutable after construction.
class Grid {
 public:
  Grid(std::vector<double> xs, std::vector<double> ys);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int cell_count() const { return nx_ * ny_; }

  int cell_index(int i, int j) const { return j * nx_ + i; }
  std::pair<int, int> cell_ij(int cell) const { return {cell % nx_, cell / nx_}; }

  Vec2 cell_center(int cell) const;
  double cell_area(int cell) const;
  double cell_width(int cell) const;
  double cell_height(int cell) const;

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Edge> interior_edges() const {
    return std::span<const Edge>(edges_).first(interior_count_);
  }
  std::span<const Edge> boundary_edges() const {
    return std::span<const Edge>(edges_).subspan(interior_count_);
  }
  int interior_edge_count() const { return interior_count_; }
  const Edge& edge(int id) const { return edges_[id]; }

  /// Ids of the (up to four) edges of a cell.
  std::span<const int> cell_edges(int cell) const;

  /// Unit normal of edge `id` pointing out of `cell`.
  Vec2 outward_normal(int id, int cell) const;

  /// Neighbour across the face in direction (di,dj), or nullopt at the boundary.
  std::optional<int> neighbour(int cell, int di, int dj) const;

  bool has_boundary_edge(int cell) const;

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }

  /// True when all cells are equal squares (up to rounding).
  bool is_uniform() const { return uniform_; }
  /// Largest cell side; equals the step on uniform grids.
  double mesh_size() const { return mesh_size_; }
  double total_area() const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.xs_ == b.xs_ && a.ys_ == b.ys_;
  }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<Edge> edges_;
  int interior_count_ = 0;
  std::vector<int> cell_edge_offsets_;
  std::vector<int> cell_edge_ids_;
  bool uniform_ = false;
  double mesh_size_ = 0.0;
};

/// Uniform grid of the unit square with `n` cells per side.
Grid build_uniform(int n);

/// Tensor-product grid from strictly increasing abscissas and ordinates.
Grid build_tensor(std::vector<double> xs, std::vector<double> ys);

/// Parses `uniform n=<int>`, `uniform:<int>`, `tensor:<x0,x1,...>;<y0,y1,...>`
/// or a JSON object `{"x":[...],"y":[...]}`.
Grid grid_from_description(std::string_view text);

/// Grouping of cells into 2x2 clusters, pairing columns (0,1),(2,3),... and
/// rows likewise.
class ClusterPartition {
 public:
  explicit ClusterPartition(const Grid& grid);

  int cluster_count() const { return cx_ * cy_; }
  int cluster_of(int cell) const { return cluster_of_[cell]; }
  /// Cells of cluster `g` in the order (0,0),(1,0),(0,1),(1,1) of local position.
  const std::array<int, 4>& members(int g) const { return members_[g]; }

  /// True when interior edge `id` separates two cells of the same cluster.
  bool is_intra_cluster(int edge_id) const { return intra_[edge_id]; }
  std::span<const int> intra_cluster_edges() const { return intra_edges_; }
  std::span<const int> cross_cluster_edges() const { return cross_edges_; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  bool matches(const Grid& grid) const { return grid.nx() == nx_ && grid.ny() == ny_; }

 private:
  int nx_ = 0;
  int ny_ = 0;
  int cx_ = 0;
  int cy_ = 0;
  std::vector<int> cluster_of_;
  std::vector<std::array<int, 4>> members_;
  std::vector<bool> intra_;
  std::vector<int> intra_edges_;
  std::vector<int> cross_edges_;
};

ClusterPartition make_clusters(const Grid& grid);

/// inf over coefficients a of |sum a_L n_L|^2 / sum a_L^2, i.e. the squared
/// smallest singular value of the 2 x m matrix of the given normals. Zero when
/// m > 2.
double normal_set_criterion(std::span<const Vec2> normals);

/// Minimum of `normal_set_criterion` over the cells having neighbours outside
/// their own cluster; +infinity when no cell has one.
double cluster_regularity(const Grid& grid, const ClusterPartition& partition);

}  // namespace stokes_fv
