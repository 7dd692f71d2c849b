#include "maviscid/elements.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace maviscid {

namespace {

Mat3 invert(int dim, const Mat3& a, double& det) {
  Mat3 inv{};
  if (dim == 2) {
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    inv[0][0] = a[1][1] / det;
    inv[0][1] = -a[0][1] / det;
    inv[1][0] = -a[1][0] / det;
    inv[1][1] = a[0][0] / det;
    return inv;
  }
  det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
        a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
        a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // cofactor of a[j][i]
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / det;
    }
  return inv;
}

struct KeyHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

CellGeometry CellGeometry::from_vertices(int dim,
                                         const std::array<Vec3, 4>& v) {
  CellGeometry g;
  g.dim = dim;
  g.origin = v[0];
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g.jacobian[i][j] = v[j + 1][i] - v[0][i];
  g.inverse = invert(dim, g.jacobian, g.det);
  Vec3 sum{};
  for (int b = 1; b <= dim; ++b) {
    for (int a = 0; a < dim; ++a) {
      g.bary_grad[b][a] = g.inverse[b - 1][a];
      sum[a] += g.inverse[b - 1][a];
    }
  }
  for (int a = 0; a < dim; ++a) g.bary_grad[0][a] = -sum[a];
  return g;
}

Vec3 CellGeometry::to_physical(const Vec3& ref) const {
  Vec3 x = origin;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x[i] += jacobian[i][j] * ref[j];
  return x;
}

Vec3 CellGeometry::to_reference(const Vec3& x) const {
  Vec3 r{};
  const Vec3 d = sub(x, origin);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) r[i] += inverse[i][j] * d[j];
  return r;
}

ReferenceElement::ReferenceElement(int dim, int degree)
    : dim_(dim), degree_(degree) {
  require(dim == 2 || dim == 3, "element dimension must be 2 or 3");
  require(degree >= 1 && degree <= 3, "element degree must be 1, 2 or 3");
  // Lattice points alpha with |alpha| = k, alpha[0] paired with
  // lambda_0 = 1 - sum(x).
  std::array<int, 4> a{};
  for (a[1] = degree; a[1] >= 0; --a[1])
    for (a[2] = degree - a[1]; a[2] >= 0; --a[2]) {
      if (dim == 2) {
        a[3] = 0;
        a[0] = degree - a[1] - a[2];
        alphas_.push_back(a);
        continue;
      }
      for (a[3] = degree - a[1] - a[2]; a[3] >= 0; --a[3]) {
        a[0] = degree - a[1] - a[2] - a[3];
        alphas_.push_back(a);
      }
    }
  // Vertices first, then the rest, so that the P1 part of the numbering is
  // the usual one.
  std::stable_partition(alphas_.begin(), alphas_.end(),
                        [degree](const std::array<int, 4>& al) {
                          return std::count(al.begin(), al.end(), degree) == 1;
                        });
  for (const auto& al : alphas_) {
    Vec3 x{};
    for (int i = 0; i < dim; ++i) x[i] = double(al[i + 1]) / degree;
    nodes_.push_back(x);
  }
}

void ReferenceElement::eval_bary(const std::array<double, 4>& lambda,
                                 int basis, double& value,
                                 std::array<double, 4>& d1,
                                 std::array<std::array<double, 4>, 4>& d2) const {
  const auto& al = alphas_[basis];
  const double k = degree_;
  std::array<double, 4> f{}, f1{}, f2{};
  for (int i = 0; i <= dim_; ++i) {
    double p = 1.0, p1 = 0.0, p2 = 0.0;
    for (int j = 0; j < al[i]; ++j) {
      const double q = (k * lambda[i] - j) / (j + 1);
      const double q1 = k / (j + 1);
      p2 = p2 * q + 2.0 * p1 * q1;
      p1 = p1 * q + p * q1;
      p = p * q;
    }
    f[i] = p;
    f1[i] = p1;
    f2[i] = p2;
  }
  auto prod_except = [&](int skip0, int skip1) {
    double r = 1.0;
    for (int i = 0; i <= dim_; ++i)
      if (i != skip0 && i != skip1) r *= f[i];
    return r;
  };
  value = prod_except(-1, -1);
  for (auto& row : d2) row.fill(0.0);
  d1.fill(0.0);
  for (int i = 0; i <= dim_; ++i) {
    d1[i] = f1[i] * prod_except(i, -1);
    d2[i][i] = f2[i] * prod_except(i, -1);
    for (int j = i + 1; j <= dim_; ++j) {
      d2[i][j] = d2[j][i] = f1[i] * f1[j] * prod_except(i, j);
    }
  }
}

BarycentricTable ReferenceElement::tabulate(
    std::span<const Vec3> ref_points) const {
  BarycentricTable t;
  t.num_basis = num_nodes();
  t.num_points = static_cast<int>(ref_points.size());
  const std::size_t n = std::size_t(t.num_basis) * t.num_points;
  t.value.resize(n);
  t.d1.resize(n);
  t.d2.resize(n);
  for (int q = 0; q < t.num_points; ++q) {
    std::array<double, 4> lambda{};
    lambda[0] = 1.0;
    for (int i = 0; i < dim_; ++i) {
      lambda[i + 1] = ref_points[q][i];
      lambda[0] -= ref_points[q][i];
    }
    for (int b = 0; b < t.num_basis; ++b) {
      const std::size_t idx = std::size_t(q) * t.num_basis + b;
      eval_bary(lambda, b, t.value[idx], t.d1[idx], t.d2[idx]);
    }
  }
  return t;
}

void ReferenceElement::map_point(const BarycentricTable& table, int q,
                                 const CellGeometry& geo,
                                 std::span<Jet> out) const {
  const int nb = table.num_basis;
  const auto& g = geo.bary_grad;
  for (int b = 0; b < nb; ++b) {
    const std::size_t idx = std::size_t(q) * nb + b;
    Jet& jet = out[b];
    jet.value = table.value[idx];
    const auto& d1 = table.d1[idx];
    const auto& d2 = table.d2[idx];
    jet.gradient = {};
    for (int i = 0; i <= dim_; ++i)
      for (int a = 0; a < dim_; ++a) jet.gradient[a] += d1[i] * g[i][a];
    // H = sum_ij d2[i][j] g_i g_j^T, via w_j = sum_i d2[i][j] g_i.
    std::array<Vec3, 4> w{};
    for (int j = 0; j <= dim_; ++j)
      for (int i = 0; i <= dim_; ++i)
        for (int a = 0; a < dim_; ++a) w[j][a] += d2[i][j] * g[i][a];
    jet.hessian = {};
    for (int j = 0; j <= dim_; ++j)
      for (int a = 0; a < dim_; ++a)
        for (int c = 0; c < dim_; ++c) jet.hessian[a][c] += w[j][a] * g[j][c];
  }
}

std::vector<Jet> ReferenceElement::evaluate(const Vec3& ref_point) const {
  std::array<Vec3, 4> ref_vertices{};
  for (int i = 0; i < dim_; ++i) ref_vertices[i + 1][i] = 1.0;
  const auto geo = CellGeometry::from_vertices(dim_, ref_vertices);
  const auto table = tabulate(std::span<const Vec3>(&ref_point, 1));
  std::vector<Jet> out(num_nodes());
  map_point(table, 0, geo, out);
  return out;
}

FeSpace::FeSpace(std::shared_ptr<const SimplicialMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree), element_(mesh_->dim(), degree) {
  const int dim = mesh_->dim();
  const Index ncells = mesh_->num_cells();
  const int nloc = element_.num_nodes();
  geometry_.reserve(ncells);
  for (Index c = 0; c < ncells; ++c)
    geometry_.push_back(
        CellGeometry::from_vertices(dim, mesh_->cell_vertices(c)));

  // Identify nodes across cells by position, tolerance 1e-10 h.
  const double tol = 1e-10 * mesh_->h_max();
  std::unordered_map<std::array<std::int64_t, 3>, Index, KeyHash> lookup;
  auto quantize = [tol](const Vec3& x) {
    return std::array<std::int64_t, 3>{std::llround(x[0] / tol),
                                       std::llround(x[1] / tol),
                                       std::llround(x[2] / tol)};
  };
  cell_dofs_.assign(std::size_t(ncells) * nloc, -1);
  for (Index c = 0; c < ncells; ++c) {
    const auto& geo = geometry_[c];
    for (int i = 0; i < nloc; ++i) {
      const Vec3 x = geo.to_physical(element_.node_coords()[i]);
      const auto key = quantize(x);
      Index found = -1;
      for (int dx = -1; dx <= 1 && found < 0; ++dx)
        for (int dy = -1; dy <= 1 && found < 0; ++dy)
          for (int dz = -1; dz <= 1 && found < 0; ++dz) {
            auto it = lookup.find({key[0] + dx, key[1] + dy, key[2] + dz});
            if (it != lookup.end()) found = it->second;
          }
      if (found < 0) {
        found = static_cast<Index>(dof_coords_.size());
        dof_coords_.push_back(x);
        lookup.emplace(key, found);
      }
      cell_dofs_[std::size_t(c) * nloc + i] = found;
    }
  }

  // Nodes with zero weight on the opposite vertex lie on that face.
  boundary_flag_.assign(dof_coords_.size(), 0);
  for (const auto& face : mesh_->boundary_faces()) {
    auto dofs = cell_dofs(face.cell);
    for (int i = 0; i < nloc; ++i)
      if (element_.multi_indices()[i][face.local] == 0)
        boundary_flag_[dofs[i]] = 1;
  }
  for (Index d = 0; d < num_dofs(); ++d)
    (boundary_flag_[d] ? boundary_dofs_ : interior_dofs_).push_back(d);

  // Point location grid.
  lo_ = {INFINITY, INFINITY, INFINITY};
  hi_ = {-INFINITY, -INFINITY, -INFINITY};
  for (const auto& v : mesh_->vertices())
    for (int a = 0; a < 3; ++a) {
      lo_[a] = std::min(lo_[a], v[a]);
      hi_[a] = std::max(hi_[a], v[a]);
    }
  bins_ = std::max(1, int(std::ceil(std::pow(double(ncells), 1.0 / dim))));
  const int nz = dim == 3 ? bins_ : 1;
  bucket_cells_.assign(std::size_t(bins_) * bins_ * nz, {});
  auto bin_of = [this, dim](double x, int a) {
    const double span = hi_[a] - lo_[a];
    if (a >= dim || span <= 0.0) return 0;
    return std::clamp(int((x - lo_[a]) / span * bins_), 0, bins_ - 1);
  };
  for (Index c = 0; c < ncells; ++c) {
    const auto pts = mesh_->cell_vertices(c);
    std::array<int, 3> b0{}, b1{};
    for (int a = 0; a < 3; ++a) {
      double mn = INFINITY, mx = -INFINITY;
      for (int v = 0; v <= dim; ++v) {
        mn = std::min(mn, pts[v][a]);
        mx = std::max(mx, pts[v][a]);
      }
      b0[a] = bin_of(mn, a);
      b1[a] = bin_of(mx, a);
    }
    for (int i = b0[0]; i <= b1[0]; ++i)
      for (int j = b0[1]; j <= b1[1]; ++j)
        for (int k = b0[2]; k <= b1[2]; ++k)
          bucket_cells_[(std::size_t(k) * bins_ + j) * bins_ + i].push_back(c);
  }
}

int FeSpace::assembly_exactness() const {
  const int k = degree_, d = dim();
  return std::max(2 * k, d * (k - 2) + k) + 2;
}

int FeSpace::face_exactness() const { return 2 * (degree_ - 1) + 2; }

Index FeSpace::locate(const Vec3& x, Vec3& ref_point) const {
  const int dim = this->dim();
  std::array<int, 3> b{};
  for (int a = 0; a < dim; ++a) {
    const double span = hi_[a] - lo_[a];
    if (x[a] < lo_[a] - 1e-12 || x[a] > hi_[a] + 1e-12) return -1;
    b[a] = std::clamp(int((x[a] - lo_[a]) / span * bins_), 0, bins_ - 1);
  }
  Index best = -1;
  double best_min = -INFINITY;
  for (Index c : bucket_cells_[(std::size_t(b[2]) * bins_ + b[1]) * bins_ + b[0]]) {
    const Vec3 r = geometry_[c].to_reference(x);
    double l0 = 1.0, mn = INFINITY;
    for (int a = 0; a < dim; ++a) {
      l0 -= r[a];
      mn = std::min(mn, r[a]);
    }
    mn = std::min(mn, l0);
    if (mn > best_min) {
      best_min = mn;
      best = c;
      ref_point = r;
    }
  }
  if (best_min < -1e-10) return -1;
  return best;
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), coeffs_(space_->num_dofs(), 0.0) {}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space,
                       std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  require(static_cast<Index>(coeffs_.size()) == space_->num_dofs(),
          "coefficient vector length does not match the space");
}

Jet FeFunction::eval(Index cell, const Vec3& ref_point) const {
  require(cell >= 0 && cell < space_->mesh().num_cells(),
          "cell index out of range");
  const auto& el = space_->element();
  const auto table = el.tabulate(std::span<const Vec3>(&ref_point, 1));
  std::vector<Jet> basis(el.num_nodes());
  el.map_point(table, 0, space_->geometry(cell), basis);
  Jet out;
  auto dofs = space_->cell_dofs(cell);
  for (int i = 0; i < el.num_nodes(); ++i) {
    const double c = coeffs_[dofs[i]];
    out.value += c * basis[i].value;
    for (int a = 0; a < 3; ++a) {
      out.gradient[a] += c * basis[i].gradient[a];
      for (int b = 0; b < 3; ++b) out.hessian[a][b] += c * basis[i].hessian[a][b];
    }
  }
  return out;
}

double FeFunction::value_at(const Vec3& x) const {
  Vec3 ref{};
  const Index cell = space_->locate(x, ref);
  require(cell >= 0, "point outside the mesh");
  return eval(cell, ref).value;
}

FeFunction interpolate(std::shared_ptr<const FeSpace> space,
                       const ScalarField& g) {
  std::vector<double> c(space->num_dofs());
  for (Index d = 0; d < space->num_dofs(); ++d) c[d] = g(space->dof_coords()[d]);
  return FeFunction(std::move(space), std::move(c));
}

}  // namespace maviscid
