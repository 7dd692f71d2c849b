#include "doctest.h"
#include "support.hpp"

using namespace mvtest;

namespace {

Vec3 random_ref_point(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (;;) {
    Vec3 p{d(rng), d(rng), dim == 3 ? d(rng) : 0.0};
    if (p[0] + p[1] + p[2] < 1.0) return p;
  }
}

// Quadratic and cubic test polynomials with their exact jets.
Jet poly2(const Vec3& x) {
  Jet j;
  j.value = 1.0 + x[0] - 2.0 * x[1] + 0.5 * x[2] + x[0] * x[0] + 3.0 * x[0] * x[1] -
            x[1] * x[1] + 2.0 * x[1] * x[2] + x[2] * x[2];
  j.gradient = {1.0 + 2.0 * x[0] + 3.0 * x[1], -2.0 + 3.0 * x[0] - 2.0 * x[1] + 2.0 * x[2],
                0.5 + 2.0 * x[1] + 2.0 * x[2]};
  j.hessian = {{{2.0, 3.0, 0.0}, {3.0, -2.0, 2.0}, {0.0, 2.0, 2.0}}};
  return j;
}

Jet poly3(const Vec3& x) {
  Jet j;
  j.value = x[0] * x[0] * x[0] - 2.0 * x[0] * x[1] * x[1] + x[1] * x[2] * x[2] + x[0];
  j.gradient = {3.0 * x[0] * x[0] - 2.0 * x[1] * x[1] + 1.0,
                -4.0 * x[0] * x[1] + x[2] * x[2], 2.0 * x[1] * x[2]};
  j.hessian = {{{6.0 * x[0], -4.0 * x[1], 0.0},
                {-4.0 * x[1], -4.0 * x[0], 2.0 * x[2]},
                {0.0, 2.0 * x[2], 2.0 * x[1]}}};
  return j;
}

Jet restrict_dim(Jet j, int dim) {
  for (int i = dim; i < 3; ++i) {
    j.gradient[i] = 0.0;
    for (int k = 0; k < 3; ++k) j.hessian[i][k] = j.hessian[k][i] = 0.0;
  }
  return j;
}

}  // namespace

TEST_CASE("reference basis is nodal and sums to one") {
  for (int dim : {2, 3})
    for (int k : {1, 2, 3}) {
      const ReferenceElement el(dim, k);
      const int expected = dim == 2 ? (k + 1) * (k + 2) / 2 : (k + 1) * (k + 2) * (k + 3) / 6;
      CHECK(el.num_nodes() == expected);
      for (int i = 0; i < el.num_nodes(); ++i) {
        const auto jets = el.evaluate(el.node_coords()[i]);
        for (int j = 0; j < el.num_nodes(); ++j)
          CHECK(std::abs(jets[j].value - (i == j ? 1.0 : 0.0)) < 1e-13);
      }
      std::mt19937_64 rng(3);
      for (int t = 0; t < 10; ++t) {
        const auto jets = el.evaluate(random_ref_point(dim, rng));
        double s = 0.0;
        Vec3 g{};
        double hs = 0.0;
        for (const auto& jt : jets) {
          s += jt.value;
          for (int a = 0; a < 3; ++a) g[a] += jt.gradient[a];
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) hs += std::abs(jt.hessian[a][b]);
        }
        CHECK(std::abs(s - 1.0) < 1e-13);
        for (int a = 0; a < 3; ++a) CHECK(std::abs(g[a]) < 1e-12);
        // Sum of Hessians vanishes entrywise; check through the total.
        Mat3 hsum{};
        for (const auto& jt : jets)
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) hsum[a][b] += jt.hessian[a][b];
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) CHECK(std::abs(hsum[a][b]) < 1e-11);
        (void)hs;
      }
    }
}

TEST_CASE("basis derivatives agree with finite differences") {
  const double t = 1e-5;
  for (int dim : {2, 3})
    for (int k : {1, 2, 3}) {
      const ReferenceElement el(dim, k);
      std::mt19937_64 rng(11);
      for (int trial = 0; trial < 4; ++trial) {
        Vec3 p = random_ref_point(dim, rng);
        for (int a = 0; a < dim; ++a) p[a] = 0.1 + 0.6 * p[a] / dim;
        const auto jets = el.evaluate(p);
        for (int a = 0; a < dim; ++a) {
          Vec3 pp = p, pm = p;
          pp[a] += t;
          pm[a] -= t;
          const auto jp = el.evaluate(pp), jm = el.evaluate(pm);
          for (int b = 0; b < el.num_nodes(); ++b) {
            CHECK(std::abs((jp[b].value - jm[b].value) / (2 * t) - jets[b].gradient[a]) < 1e-7);
            for (int c = 0; c < dim; ++c)
              CHECK(std::abs((jp[b].gradient[c] - jm[b].gradient[c]) / (2 * t) -
                             jets[b].hessian[a][c]) < 1e-6);
          }
        }
      }
    }
}

TEST_CASE("interpolation reproduces polynomials of the element degree") {
  for (int dim : {2, 3})
    for (int k : {2, 3}) {
      auto space = make_space(dim, 2, k);
      auto exact = [&](const Vec3& x) {
        return restrict_dim(k == 2 ? poly2({x[0], x[1], dim == 3 ? x[2] : 0.0})
                                   : poly3({x[0], x[1], dim == 3 ? x[2] : 0.0}),
                            dim);
      };
      const auto u = interpolate(space, [&](const Vec3& x) { return exact(x).value; });
      std::mt19937_64 rng(5);
      for (Index c = 0; c < space->mesh().num_cells(); ++c) {
        const Vec3 p = random_ref_point(dim, rng);
        const Jet got = u.eval(c, p);
        const Jet want = exact(space->geometry(c).to_physical(p));
        CHECK(std::abs(got.value - want.value) < 1e-12);
        for (int a = 0; a < dim; ++a) {
          CHECK(std::abs(got.gradient[a] - want.gradient[a]) < 1e-10);
          for (int b = 0; b < dim; ++b)
            CHECK(std::abs(got.hessian[a][b] - want.hessian[a][b]) < 1e-8);
        }
      }
    }
}

TEST_CASE("global dof counts") {
  for (int n : {1, 2, 4}) {
    for (int k : {1, 2, 3}) {
      const auto s2 = make_space(2, n, k);
      CHECK(s2->num_dofs() == (k * n + 1) * (k * n + 1));
      CHECK(static_cast<Index>(s2->boundary_dofs().size()) == 4 * k * n);
      const auto s3 = make_space(3, n, k);
      CHECK(s3->num_dofs() == (k * n + 1) * (k * n + 1) * (k * n + 1));
      CHECK(static_cast<Index>(s3->boundary_dofs().size() + s3->interior_dofs().size()) ==
            s3->num_dofs());
    }
  }
  CHECK(make_space(2, 2, 2)->boundary_dofs().size() == 16);
  CHECK_THROWS_AS(make_space(2, 2, 4), Error);
}

TEST_CASE("boundary dofs lie on the boundary") {
  for (int dim : {2, 3}) {
    const auto s = make_space(dim, 3, 3);
    for (Index d = 0; d < s->num_dofs(); ++d) {
      const auto& x = s->dof_coords()[d];
      bool on = false;
      for (int a = 0; a < dim; ++a) on = on || x[a] < 1e-12 || x[a] > 1.0 - 1e-12;
      CHECK(on == s->is_boundary_dof(d));
    }
  }
}

TEST_CASE("discrete functions are continuous across faces") {
  for (int dim : {2, 3})
    for (int k : {1, 2, 3}) {
      const auto s = make_space(dim, 2, k);
      const FeFunction u(s, random_coeffs(s->num_dofs(), 17));
      std::mt19937_64 rng(23);
      std::uniform_real_distribution<double> d(0.0, 1.0);
      for (const auto& f : s->mesh().interior_faces()) {
        // Random point on the face.
        double l0 = d(rng), l1 = d(rng) * (1.0 - l0), l2 = 1.0 - l0 - l1;
        if (dim == 2) {
          l1 = 1.0 - l0;
          l2 = 0.0;
        }
        Vec3 x{};
        const double lam[3] = {l0, l1, l2};
        for (int i = 0; i < dim; ++i)
          for (int a = 0; a < 3; ++a) x[a] += lam[i] * s->mesh().vertex(f.vertex_ids[i])[a];
        const double vp = u.eval(f.plus_cell, s->geometry(f.plus_cell).to_reference(x)).value;
        const double vm = u.eval(f.minus_cell, s->geometry(f.minus_cell).to_reference(x)).value;
        CHECK(std::abs(vp - vm) < 1e-12);
      }
    }
}

TEST_CASE("point location and evaluation") {
  const auto s = make_space(2, 4, 2);
  const auto u = interpolate(s, [](const Vec3& x) { return x[0] * x[0] - x[0] * x[1]; });
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Vec3 x{d(rng), d(rng), 0.0};
    Vec3 ref;
    const Index c = s->locate(x, ref);
    REQUIRE(c >= 0);
    const Vec3 back = s->geometry(c).to_physical(ref);
    CHECK(std::abs(back[0] - x[0]) < 1e-13);
    CHECK(std::abs(back[1] - x[1]) < 1e-13);
    CHECK(u.value_at(x) == doctest::Approx(x[0] * x[0] - x[0] * x[1]).epsilon(1e-12));
  }
  Vec3 ref;
  CHECK(s->locate({1.5, 0.5, 0.0}, ref) == -1);
  CHECK(u.value_at({1.0, 1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("broken H2 interpolation error decays at order k - 1") {
  // Oracle: the rate between n and 2n for a smooth function.
  const JetField f = [](const Vec3& x) {
    Jet j;
    const double s0 = std::sin(M_PI * x[0]), c0 = std::cos(M_PI * x[0]);
    const double s1 = std::sin(M_PI * x[1]), c1 = std::cos(M_PI * x[1]);
    j.value = s0 * s1;
    j.gradient = {M_PI * c0 * s1, M_PI * s0 * c1, 0.0};
    j.hessian = {{{-M_PI * M_PI * s0 * s1, M_PI * M_PI * c0 * c1, 0.0},
                  {M_PI * M_PI * c0 * c1, -M_PI * M_PI * s0 * s1, 0.0},
                  {0.0, 0.0, 0.0}}};
    return j;
  };
  for (int k : {2, 3}) {
    double prev = 0.0;
    for (int n : {8, 16}) {
      const auto s = make_space(2, n, k);
      const auto u = interpolate(s, [&](const Vec3& x) { return f(x).value; });
      const double e = error_norms(f, u).h2_broken;
      if (prev > 0.0) CHECK(std::log2(prev / e) == doctest::Approx(k - 1).epsilon(0.1));
      prev = e;
    }
  }
}
