#pragma once

#include <cmath>
#include <memory>
#include <random>

#include "maviscid/analysis.hpp"
#include "maviscid/cases.hpp"
#include "maviscid/mesh.hpp"
#include "maviscid/solve.hpp"

namespace mvtest {

using namespace maviscid;

inline std::shared_ptr<const FeSpace> make_space(int dim, int n, int degree) {
  auto mesh = std::make_shared<const SimplicialMesh>(build_structured_mesh(dim, n));
  return std::make_shared<const FeSpace>(mesh, degree);
}

/// Random coefficients in (-1, 1) on every dof.
inline std::vector<double> random_coeffs(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> c(n);
  for (auto& v : c) v = d(rng);
  return c;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Exact integral of x^a y^b z^c over the unit reference simplex.
inline double simplex_monomial(int dim, int a, int b, int c) {
  return factorial(a) * factorial(b) * (dim == 3 ? factorial(c) : 1.0) /
         factorial(a + b + (dim == 3 ? c : 0) + dim);
}

/// Composite Simpson rule on [0, 1], independent of the library rules.
inline double integrate_segment(const std::function<double(double)>& f, int panels = 4000) {
  double s = 0.0;
  const double h = 1.0 / panels;
  for (int i = 0; i < panels; ++i) {
    const double a = i * h;
    s += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
  }
  return s;
}

}  // namespace mvtest
