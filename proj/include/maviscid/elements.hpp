#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "maviscid/common.hpp"
#include "maviscid/mesh.hpp"
#include "maviscid/quadrature.hpp"

namespace maviscid {

/// Value, gradient and Hessian of a scalar function at a point.
struct Jet {
  double value = 0.0;
  Vec3 gradient{};
  Mat3 hessian{};
};

/// Derivatives of the basis with respect to the barycentric coordinates,
/// tabulated at a set of reference points.
struct BarycentricTable {
  int num_basis = 0;
  int num_points = 0;
  // Flattened [point * num_basis + basis].
  std::vector<double> value;
  std::vector<std::array<double, 4>> d1;
  std::vector<std::array<std::array<double, 4>, 4>> d2;
};

/// Affine map data of one simplex: x = v0 + J xhat.
struct CellGeometry {
  int dim = 0;
  Vec3 origin{};
  Mat3 jacobian{};
  Mat3 inverse{};
  double det = 0.0;
  /// Physical gradients of the dim+1 barycentric coordinates.
  std::array<Vec3, 4> bary_grad{};

  static CellGeometry from_vertices(int dim, const std::array<Vec3, 4>& v);
  Vec3 to_physical(const Vec3& ref) const;
  Vec3 to_reference(const Vec3& x) const;
};

/// Lagrange P_k element (k = 1..3) on the reference simplex, nodal basis on
/// the barycentric lattice.
class ReferenceElement {
 public:
  ReferenceElement(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int num_nodes() const { return static_cast<int>(alphas_.size()); }
  const std::vector<Vec3>& node_coords() const { return nodes_; }
  const std::vector<std::array<int, 4>>& multi_indices() const {
    return alphas_;
  }

  /// Basis jets in reference coordinates at a reference point.
  std::vector<Jet> evaluate(const Vec3& ref_point) const;

  BarycentricTable tabulate(std::span<const Vec3> ref_points) const;

  /// Physical jets of every basis function at tabulated point q.
  void map_point(const BarycentricTable& table, int q, const CellGeometry& geo,
                 std::span<Jet> out) const;

 private:
  void eval_bary(const std::array<double, 4>& lambda, int basis, double& value,
                 std::array<double, 4>& d1,
                 std::array<std::array<double, 4>, 4>& d2) const;

  int dim_;
  int degree_;
  std::vector<std::array<int, 4>> alphas_;
  std::vector<Vec3> nodes_;
};

/// Continuous Lagrange space on a mesh with global dof numbering.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const SimplicialMesh> mesh, int degree);

  const SimplicialMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const SimplicialMesh> mesh_ptr() const { return mesh_; }
  int dim() const { return mesh_->dim(); }
  int degree() const { return degree_; }
  const ReferenceElement& element() const { return element_; }

  Index num_dofs() const { return static_cast<Index>(dof_coords_.size()); }
  int dofs_per_cell() const { return element_.num_nodes(); }
  std::span<const Index> cell_dofs(Index cell) const {
    return {cell_dofs_.data() + cell * dofs_per_cell(),
            static_cast<std::size_t>(dofs_per_cell())};
  }
  const std::vector<Vec3>& dof_coords() const { return dof_coords_; }
  bool is_boundary_dof(Index d) const { return boundary_flag_[d] != 0; }
  const std::vector<Index>& boundary_dofs() const { return boundary_dofs_; }
  const std::vector<Index>& interior_dofs() const { return interior_dofs_; }
  const CellGeometry& geometry(Index cell) const { return geometry_[cell]; }

  /// Quadrature exactness used for assembly: max(2k, d(k-2)+k) + 2.
  int assembly_exactness() const;
  /// Face quadrature exactness: 2(k-1) + 2.
  int face_exactness() const;

  /// Cell containing x and the reference coordinates of x in it, or -1 when
  /// x lies outside the mesh.
  Index locate(const Vec3& x, Vec3& ref_point) const;

 private:
  std::shared_ptr<const SimplicialMesh> mesh_;
  int degree_;
  ReferenceElement element_;
  std::vector<Vec3> dof_coords_;
  std::vector<Index> cell_dofs_;
  std::vector<char> boundary_flag_;
  std::vector<Index> boundary_dofs_;
  std::vector<Index> interior_dofs_;
  std::vector<CellGeometry> geometry_;
  // Uniform bucket grid over the bounding box for point location.
  int bins_ = 1;
  Vec3 lo_{}, hi_{};
  std::vector<std::vector<Index>> bucket_cells_;
};

using ScalarField = std::function<double(const Vec3&)>;

/// Coefficient vector over an FeSpace.
class FeFunction {
 public:
  explicit FeFunction(std::shared_ptr<const FeSpace> space);
  FeFunction(std::shared_ptr<const FeSpace> space, std::vector<double> coeffs);

  const FeSpace& space() const { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const { return space_; }
  std::vector<double>& coefficients() { return coeffs_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// Physical value, gradient and (elementwise) Hessian at a reference point
  /// of the given cell.
  Jet eval(Index cell, const Vec3& ref_point) const;

  /// Point evaluation at a physical location (searches for a containing
  /// cell).
  double value_at(const Vec3& x) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  std::vector<double> coeffs_;
};

/// Nodal interpolant: coefficient i = g(dof coordinate i).
FeFunction interpolate(std::shared_ptr<const FeSpace> space,
                       const ScalarField& g);

}  // namespace maviscid
