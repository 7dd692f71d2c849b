#include "maviscid/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace maviscid {

int max_cell_exactness(int dim) { return dim == 2 ? 10 : (dim == 3 ? 8 : 21); }

namespace {

// P_n(z) and P_n'(z) by the three-term recurrence.
void legendre(int n, double z, double& p, double& dp) {
  double p0 = 1.0, p1 = z;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = (n == 0) ? 1.0 : p1;
  dp = n * (z * p - (n == 1 ? 1.0 : p0)) / (z * z - 1.0);
}

}  // namespace

void gauss_legendre_01(int npoints, std::vector<double>& x,
                       std::vector<double>& w) {
  x.assign(npoints, 0.0);
  w.assign(npoints, 0.0);
  for (int i = 0; i < npoints; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(npoints, z, p, dp);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    legendre(npoints, z, p, dp);
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

QuadratureRule simplex_quadrature(int dim, int exactness) {
  if (dim < 1 || dim > 3)
    throw Error(ErrorCode::quadrature, "quadrature dimension must be 1..3");
  if (exactness < 1 || exactness > max_cell_exactness(dim))
    throw Error(ErrorCode::quadrature,
                "unsupported quadrature exactness " + std::to_string(exactness) +
                    " in dimension " + std::to_string(dim));
  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness = exactness;

  // Collapsed coordinates: x1 = u, x2 = v(1-u), x3 = w(1-u)(1-v). The Duffy
  // Jacobian raises the degree in u by dim-1 and in v by dim-2.
  std::vector<double> xu, wu, xv, wv, xw, ww;
  gauss_legendre_01((exactness + dim - 1) / 2 + 1, xu, wu);
  if (dim >= 2) gauss_legendre_01((exactness + dim - 2) / 2 + 1, xv, wv);
  if (dim == 3) gauss_legendre_01(exactness / 2 + 1, xw, ww);

  if (dim == 1) {
    for (std::size_t i = 0; i < xu.size(); ++i) {
      rule.points.push_back({xu[i], 0.0, 0.0});
      rule.weights.push_back(wu[i]);
    }
  } else if (dim == 2) {
    for (std::size_t i = 0; i < xu.size(); ++i)
      for (std::size_t j = 0; j < xv.size(); ++j) {
        const double u = xu[i], v = xv[j];
        rule.points.push_back({u, v * (1.0 - u), 0.0});
        rule.weights.push_back(wu[i] * wv[j] * (1.0 - u));
      }
  } else {
    for (std::size_t i = 0; i < xu.size(); ++i)
      for (std::size_t j = 0; j < xv.size(); ++j)
        for (std::size_t k = 0; k < xw.size(); ++k) {
          const double u = xu[i], v = xv[j], w = xw[k];
          rule.points.push_back({u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)});
          rule.weights.push_back(wu[i] * wv[j] * ww[k] * (1.0 - u) * (1.0 - u) *
                                 (1.0 - v));
        }
  }
  return rule;
}

QuadratureRule face_quadrature(int dim, int exactness) {
  if (dim != 2 && dim != 3)
    throw Error(ErrorCode::quadrature, "face quadrature needs dim 2 or 3");
  return simplex_quadrature(dim - 1, exactness);
}

}  // namespace maviscid
