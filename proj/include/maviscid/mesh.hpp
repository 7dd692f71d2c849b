#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "maviscid/common.hpp"

namespace maviscid {

/// Face shared by two cells. The plus side is always the cell with the
/// smaller index and the stored normal points out of it.
struct InteriorFace {
  Index plus_cell = -1;
  Index minus_cell = -1;
  int plus_local = -1;   // local face index in plus_cell (opposite vertex)
  int minus_local = -1;  // local face index in minus_cell
  std::array<Index, 3> vertex_ids{-1, -1, -1};  // dim entries used
  Vec3 normal_plus{};
  double diameter = 0.0;
};

struct BoundaryFace {
  Index cell = -1;
  int local = -1;
  std::array<Index, 3> vertex_ids{-1, -1, -1};
  Vec3 normal{};
  double diameter = 0.0;
};

/// Conforming simplicial triangulation of the unit square or cube with full
/// face topology. Immutable after construction.
class SimplicialMesh {
 public:
  /// Takes ownership of the geometry, orients cells positively and derives
  /// face topology. Throws TopologyError on non-conforming input.
  SimplicialMesh(int dim, std::vector<Vec3> vertices,
                 std::vector<std::array<Index, 4>> cells);

  int dim() const { return dim_; }
  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<Index, 4>>& cells() const { return cells_; }
  const std::vector<InteriorFace>& interior_faces() const { return interior_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_; }

  const Vec3& vertex(Index i) const { return vertices_[i]; }
  /// Vertex coordinates of a cell (dim+1 entries meaningful).
  std::array<Vec3, 4> cell_vertices(Index c) const;
  double cell_volume(Index c) const;
  double cell_diameter(Index c) const;
  Vec3 cell_centroid(Index c) const;
  /// max_K h_K.
  double h_max() const;
  double h_min() const;

  /// OFF-like dump: "V M" header, V coordinate lines, M lines "d+1 i0 ... id".
  void write_off(std::ostream& os) const;

 private:
  void build_faces();

  int dim_;
  std::vector<Vec3> vertices_;
  std::vector<std::array<Index, 4>> cells_;
  std::vector<InteriorFace> interior_;
  std::vector<BoundaryFace> boundary_;
};

/// Structured mesh of (0,1)^dim with n cells per axis. Squares are split along
/// their (0,0)-(1,1) diagonal; cubes into the six Kuhn tetrahedra.
SimplicialMesh build_structured_mesh(int dim, int n);

/// Signed volume of the simplex (dim+1 vertices).
double signed_volume(int dim, const std::array<Vec3, 4>& v);

}  // namespace maviscid
