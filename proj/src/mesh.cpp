#include "maviscid/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

namespace maviscid {

namespace {

using FaceKey = std::array<Index, 3>;

FaceKey face_key(int dim, const std::array<Index, 4>& cell, int local) {
  FaceKey key{-1, -1, -1};
  int m = 0;
  for (int v = 0; v <= dim; ++v)
    if (v != local) key[m++] = cell[v];
  std::sort(key.begin(), key.begin() + dim);
  return key;
}

// Unit normal of the face spanned by pts, oriented away from `inside`.
Vec3 face_normal(int dim, const std::array<Vec3, 3>& pts, const Vec3& inside) {
  Vec3 n{};
  if (dim == 2) {
    Vec3 t = sub(pts[1], pts[0]);
    n = {t[1], -t[0], 0.0};
  } else {
    n = cross(sub(pts[1], pts[0]), sub(pts[2], pts[0]));
  }
  const double len = std::sqrt(dot(n, n));
  for (auto& c : n) c /= len;
  Vec3 centroid{};
  for (int i = 0; i < dim; ++i)
    for (int a = 0; a < 3; ++a) centroid[a] += pts[i][a] / dim;
  if (dot(n, sub(centroid, inside)) < 0.0)
    for (auto& c : n) c = -c;
  return n;
}

double face_diameter(int dim, const std::array<Vec3, 3>& pts) {
  double d = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      Vec3 e = sub(pts[i], pts[j]);
      d = std::max(d, std::sqrt(dot(e, e)));
    }
  return d;
}

bool on_unit_boundary(int dim, const std::array<Vec3, 3>& pts) {
  constexpr double tol = 1e-12;
  for (int axis = 0; axis < dim; ++axis) {
    for (double side : {0.0, 1.0}) {
      bool all = true;
      for (int i = 0; i < dim; ++i)
        all = all && std::abs(pts[i][axis] - side) < tol;
      if (all) return true;
    }
  }
  return false;
}

}  // namespace

double signed_volume(int dim, const std::array<Vec3, 4>& v) {
  const Vec3 a = sub(v[1], v[0]);
  const Vec3 b = sub(v[2], v[0]);
  if (dim == 2) return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  const Vec3 c = sub(v[3], v[0]);
  return dot(a, cross(b, c)) / 6.0;
}

SimplicialMesh::SimplicialMesh(int dim, std::vector<Vec3> vertices,
                               std::vector<std::array<Index, 4>> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  require(dim == 2 || dim == 3, "mesh dimension must be 2 or 3");
  for (auto& cell : cells_) {
    for (int v = 0; v <= dim_; ++v)
      require(cell[v] >= 0 && cell[v] < num_vertices(),
              "cell references a missing vertex");
    std::array<Vec3, 4> pts{};
    for (int v = 0; v <= dim_; ++v) pts[v] = vertices_[cell[v]];
    const double vol = signed_volume(dim_, pts);
    if (std::abs(vol) < 1e-300) throw TopologyError("degenerate cell");
    if (vol < 0.0) std::swap(cell[0], cell[1]);
  }
  build_faces();
}

void SimplicialMesh::build_faces() {
  // Ordered map keeps the face lists independent of hash seeds and of the
  // order in which cells were supplied.
  std::map<FaceKey, std::vector<std::pair<Index, int>>> owners;
  for (Index c = 0; c < num_cells(); ++c)
    for (int f = 0; f <= dim_; ++f)
      owners[face_key(dim_, cells_[c], f)].emplace_back(c, f);

  for (auto& [key, list] : owners) {
    std::array<Vec3, 3> pts{};
    for (int i = 0; i < dim_; ++i) pts[i] = vertices_[key[i]];
    if (list.size() > 2)
      throw TopologyError("face shared by more than two cells");
    if (list.size() == 2) {
      std::sort(list.begin(), list.end());
      InteriorFace face;
      face.plus_cell = list[0].first;
      face.plus_local = list[0].second;
      face.minus_cell = list[1].first;
      face.minus_local = list[1].second;
      face.vertex_ids = key;
      const Vec3& opposite = vertices_[cells_[face.plus_cell][face.plus_local]];
      face.normal_plus = face_normal(dim_, pts, opposite);
      face.diameter = face_diameter(dim_, pts);
      interior_.push_back(face);
    } else {
      if (!on_unit_boundary(dim_, pts))
        throw TopologyError(
            "unmatched face in the domain interior (hanging vertex?)");
      BoundaryFace face;
      face.cell = list[0].first;
      face.local = list[0].second;
      face.vertex_ids = key;
      face.normal = face_normal(dim_, pts, vertices_[cells_[face.cell][face.local]]);
      face.diameter = face_diameter(dim_, pts);
      boundary_.push_back(face);
    }
  }
}

std::array<Vec3, 4> SimplicialMesh::cell_vertices(Index c) const {
  std::array<Vec3, 4> pts{};
  for (int v = 0; v <= dim_; ++v) pts[v] = vertices_[cells_[c][v]];
  return pts;
}

double SimplicialMesh::cell_volume(Index c) const {
  return signed_volume(dim_, cell_vertices(c));
}

double SimplicialMesh::cell_diameter(Index c) const {
  const auto pts = cell_vertices(c);
  double d = 0.0;
  for (int i = 0; i <= dim_; ++i)
    for (int j = i + 1; j <= dim_; ++j) {
      Vec3 e = sub(pts[i], pts[j]);
      d = std::max(d, std::sqrt(dot(e, e)));
    }
  return d;
}

Vec3 SimplicialMesh::cell_centroid(Index c) const {
  const auto pts = cell_vertices(c);
  Vec3 x{};
  for (int v = 0; v <= dim_; ++v)
    for (int a = 0; a < 3; ++a) x[a] += pts[v][a] / (dim_ + 1);
  return x;
}

double SimplicialMesh::h_max() const {
  double h = 0.0;
  for (Index c = 0; c < num_cells(); ++c) h = std::max(h, cell_diameter(c));
  return h;
}

double SimplicialMesh::h_min() const {
  double h = INFINITY;
  for (Index c = 0; c < num_cells(); ++c) h = std::min(h, cell_diameter(c));
  return h;
}

void SimplicialMesh::write_off(std::ostream& os) const {
  os << num_vertices() << ' ' << num_cells() << '\n';
  os.precision(17);
  for (const auto& v : vertices_) {
    for (int a = 0; a < dim_; ++a) os << (a ? " " : "") << v[a];
    os << '\n';
  }
  for (const auto& c : cells_) {
    os << dim_ + 1;
    for (int v = 0; v <= dim_; ++v) os << ' ' << c[v];
    os << '\n';
  }
}

SimplicialMesh build_structured_mesh(int dim, int n) {
  require(dim == 2 || dim == 3, "dim must be 2 or 3");
  require(n >= 1, "cells per axis must be >= 1");
  const Index np = n + 1;
  std::vector<Vec3> vertices;
  std::vector<std::array<Index, 4>> cells;

  if (dim == 2) {
    vertices.reserve(np * np);
    for (Index j = 0; j < np; ++j)
      for (Index i = 0; i < np; ++i)
        vertices.push_back({double(i) / n, double(j) / n, 0.0});
    auto id = [np](Index i, Index j) { return j * np + i; };
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
        cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
      }
  } else {
    vertices.reserve(np * np * np);
    for (Index k = 0; k < np; ++k)
      for (Index j = 0; j < np; ++j)
        for (Index i = 0; i < np; ++i)
          vertices.push_back({double(i) / n, double(j) / n, double(k) / n});
    auto id = [np](Index i, Index j, Index k) { return (k * np + j) * np + i; };
    // Kuhn subdivision: one tetrahedron per monotone lattice path from the
    // cube's (0,0,0) corner to its (1,1,1) corner.
    std::array<int, 3> perm{0, 1, 2};
    std::vector<std::array<int, 3>> perms;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    for (Index k = 0; k < n; ++k)
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          for (const auto& p : perms) {
            std::array<Index, 3> corner{i, j, k};
            std::array<Index, 4> tet{};
            tet[0] = id(corner[0], corner[1], corner[2]);
            for (int s = 0; s < 3; ++s) {
              ++corner[p[s]];
              tet[s + 1] = id(corner[0], corner[1], corner[2]);
            }
            cells.push_back(tet);
          }
  }
  return SimplicialMesh(dim, std::move(vertices), std::move(cells));
}

}  // namespace maviscid
