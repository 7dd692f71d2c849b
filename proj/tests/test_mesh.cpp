#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace mvtest;

namespace {

// Faces (as sorted vertex id tuples) with their owner counts, found by
// enumerating every cell's faces directly.
std::map<std::vector<Index>, int> brute_force_faces(const SimplicialMesh& m) {
  std::map<std::vector<Index>, int> faces;
  const int d = m.dim();
  for (const auto& c : m.cells())
    for (int skip = 0; skip <= d; ++skip) {
      std::vector<Index> f;
      for (int v = 0; v <= d; ++v)
        if (v != skip) f.push_back(c[v]);
      std::sort(f.begin(), f.end());
      ++faces[f];
    }
  return faces;
}

std::set<std::vector<Index>> interior_face_set(const SimplicialMesh& m) {
  std::set<std::vector<Index>> s;
  for (const auto& f : m.interior_faces()) {
    std::vector<Index> v(f.vertex_ids.begin(), f.vertex_ids.begin() + m.dim());
    std::sort(v.begin(), v.end());
    s.insert(v);
  }
  return s;
}

}  // namespace

TEST_CASE("structured mesh counts") {
  const auto m21 = build_structured_mesh(2, 1);
  CHECK(m21.num_cells() == 2);
  CHECK(m21.num_vertices() == 4);
  CHECK(m21.interior_faces().size() == 1);
  CHECK(m21.boundary_faces().size() == 4);

  const auto m22 = build_structured_mesh(2, 2);
  CHECK(m22.num_cells() == 8);
  CHECK(m22.num_vertices() == 9);

  const auto m31 = build_structured_mesh(3, 1);
  CHECK(m31.num_cells() == 6);
  CHECK(m31.num_vertices() == 8);
}

TEST_CASE("cell measures are positive and sum to one") {
  for (int dim : {2, 3})
    for (int n : {1, 2, 3, 5}) {
      const auto m = build_structured_mesh(dim, n);
      double total = 0.0;
      for (Index c = 0; c < m.num_cells(); ++c) {
        // Brute-force measure from the determinant of edge vectors.
        const auto v = m.cell_vertices(c);
        const Vec3 a = sub(v[1], v[0]), b = sub(v[2], v[0]);
        double vol;
        if (dim == 2) {
          vol = 0.5 * (a[0] * b[1] - a[1] * b[0]);
        } else {
          const Vec3 e = sub(v[3], v[0]);
          vol = dot(a, cross(b, e)) / 6.0;
        }
        CHECK(vol > 0.0);
        CHECK(m.cell_volume(c) == doctest::Approx(vol).epsilon(1e-14));
        total += vol;
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
      CHECK(m.h_max() / m.h_min() <= 4.0);
      CHECK(m.h_max() == doctest::Approx((dim == 2 ? std::sqrt(2.0) : std::sqrt(3.0)) / n));
    }
}

TEST_CASE("interior face count matches brute-force edge matching") {
  const auto m = build_structured_mesh(2, 4);
  int shared = 0;
  for (const auto& [f, owners] : brute_force_faces(m)) {
    CHECK(owners <= 2);
    if (owners == 2) ++shared;
  }
  CHECK(shared == 40);
  CHECK(m.interior_faces().size() == 40);
  CHECK(m.interior_faces().size() == 3 * 4 * 4 - 2 * 4);
}

TEST_CASE("3D faces are shared by exactly two tets or lie on the boundary") {
  const auto m = build_structured_mesh(3, 2);
  const auto faces = brute_force_faces(m);
  std::size_t shared = 0, single = 0;
  for (const auto& [f, owners] : faces) {
    CHECK((owners == 1 || owners == 2));
    if (owners == 2) ++shared;
    else ++single;
  }
  CHECK(m.interior_faces().size() == shared);
  CHECK(m.boundary_faces().size() == single);
  CHECK(single == 6 * 2 * 2 * 2);
}

TEST_CASE("interior face orientation and geometry") {
  for (int dim : {2, 3}) {
    const auto m = build_structured_mesh(dim, 3);
    for (const auto& f : m.interior_faces()) {
      CHECK(f.plus_cell < f.minus_cell);
      CHECK(std::abs(std::sqrt(dot(f.normal_plus, f.normal_plus)) - 1.0) < 1e-14);
      const Vec3 d = sub(m.cell_centroid(f.minus_cell), m.cell_centroid(f.plus_cell));
      CHECK(dot(f.normal_plus, d) > 0.0);
      double diam = 0.0;
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
          const Vec3 e = sub(m.vertex(f.vertex_ids[i]), m.vertex(f.vertex_ids[j]));
          diam = std::max(diam, std::sqrt(dot(e, e)));
        }
      CHECK(f.diameter == doctest::Approx(diam).epsilon(1e-14));
      // Face vertices belong to both cells.
      for (Index c : {f.plus_cell, f.minus_cell}) {
        const auto& cv = m.cells()[c];
        for (int i = 0; i < dim; ++i)
          CHECK(std::find(cv.begin(), cv.begin() + dim + 1, f.vertex_ids[i]) !=
                cv.begin() + dim + 1);
      }
    }
    for (const auto& b : m.boundary_faces()) {
      const Vec3 x = m.vertex(b.vertex_ids[0]);
      const Vec3 c = m.cell_centroid(b.cell);
      CHECK(dot(b.normal, sub(x, c)) > 0.0);
    }
  }
}

TEST_CASE("face topology is independent of cell order") {
  for (int dim : {2, 3}) {
    const auto ref = build_structured_mesh(dim, 2);
    auto cells = ref.cells();
    std::mt19937_64 rng(42);
    std::shuffle(cells.begin(), cells.end(), rng);
    const SimplicialMesh shuffled(dim, ref.vertices(), cells);
    CHECK(interior_face_set(shuffled) == interior_face_set(ref));
    CHECK(shuffled.boundary_faces().size() == ref.boundary_faces().size());
  }
}

TEST_CASE("hanging vertex is a topology error") {
  // Lower triangle intact, upper triangle split at the midpoint of the
  // diagonal: the diagonal edge is matched on one side only.
  std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
  std::vector<std::array<Index, 4>> cells{{0, 1, 2, -1}, {0, 4, 3, -1}, {4, 2, 3, -1}};
  CHECK_THROWS_AS(SimplicialMesh(2, v, cells), TopologyError);
}

TEST_CASE("mesh construction rejects bad input") {
  CHECK_THROWS_AS(build_structured_mesh(2, 0), Error);
  CHECK_THROWS_AS(build_structured_mesh(4, 2), Error);
}

TEST_CASE("OFF-like dump") {
  const auto m = build_structured_mesh(2, 1);
  std::ostringstream os;
  m.write_off(os);
  std::istringstream in(os.str());
  Index nv, nc;
  in >> nv >> nc;
  CHECK(nv == 4);
  CHECK(nc == 2);
  double x, y;
  for (int i = 0; i < 4; ++i) in >> x >> y;
  int k;
  Index a, b, c;
  in >> k >> a >> b >> c;
  CHECK(k == 3);
  CHECK(in.good());
}
