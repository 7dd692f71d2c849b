#pragma once

#include <vector>

#include "maviscid/common.hpp"

namespace maviscid {

/// Quadrature on the reference simplex {x_i >= 0, sum x_i <= 1} of a given
/// dimension (1 = unit interval).
struct QuadratureRule {
  int dim = 0;
  int exactness = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Highest polynomial exactness offered for cell rules in each dimension.
int max_cell_exactness(int dim);

/// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre_01(int npoints, std::vector<double>& x,
                       std::vector<double>& w);

/// Conical-product (collapsed Gauss) rule on the reference simplex. All
/// weights are positive. Throws Error(quadrature) for unsupported requests.
QuadratureRule simplex_quadrature(int dim, int exactness);

/// Rule for cells of a dim-dimensional mesh.
inline QuadratureRule cell_quadrature(int dim, int exactness) {
  return simplex_quadrature(dim, exactness);
}

/// Rule for faces of a dim-dimensional mesh (reference (dim-1)-simplex).
QuadratureRule face_quadrature(int dim, int exactness);

}  // namespace maviscid
