#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace mvtest;

TEST_CASE("triplet builder sums duplicates and sorts columns") {
  TripletBuilder b(3, 3);
  b.add(0, 2, 1.0);
  b.add(0, 0, 2.0);
  b.add(0, 2, 0.5);
  b.add(2, 1, -1.0);
  const SparseMatrix m = b.build();
  CHECK(m.nonzeros() == 3);
  CHECK(m.at(0, 2) == 1.5);
  CHECK(m.at(0, 0) == 2.0);
  CHECK(m.at(2, 1) == -1.0);
  CHECK(m.at(1, 1) == 0.0);
  for (Index r = 0; r < m.rows(); ++r)
    for (Index k = m.row_ptr()[r] + 1; k < m.row_ptr()[r + 1]; ++k)
      CHECK(m.col_index()[k - 1] < m.col_index()[k]);
  const auto y = m.multiply(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(y[0] == doctest::Approx(6.5));
  CHECK(y[1] == 0.0);
  CHECK(y[2] == doctest::Approx(-2.0));
  CHECK(m.transpose().at(2, 0) == 1.5);
  CHECK_THROWS(SparseMatrix(m).add_to(1, 1, 1.0));
}

TEST_CASE("restriction and MatrixMarket output") {
  TripletBuilder b(3, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) b.add(i, j, 10.0 * i + j);
  const SparseMatrix m = b.build();
  const std::vector<Index> keep{2, 0};
  const SparseMatrix r = m.restrict_to(keep, keep);
  CHECK(r.rows() == 2);
  CHECK(r.at(0, 0) == 22.0);
  CHECK(r.at(0, 1) == 20.0);
  CHECK(r.at(1, 0) == 2.0);
  std::ostringstream os;
  r.write_matrix_market(os);
  std::istringstream in(os.str());
  std::string banner;
  std::getline(in, banner);
  CHECK(banner.rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  std::string line;
  while (std::getline(in, line) && line[0] == '%') {
  }
  std::istringstream size(line);
  Index rows, cols, nnz;
  size >> rows >> cols >> nnz;
  CHECK(rows == 2);
  CHECK(cols == 2);
  CHECK(nnz == 4);
}

TEST_CASE("sparse_solve small systems") {
  TripletBuilder b(2, 2);
  b.add(0, 0, 2.0);
  b.add(0, 1, 1.0);
  b.add(1, 0, 1.0);
  b.add(1, 1, 3.0);
  const auto x = sparse_solve(b.build(), std::vector<double>{1.0, 1.0});
  CHECK(x[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(0.2).epsilon(1e-14));

  TripletBuilder id(5, 5);
  for (Index i = 0; i < 5; ++i) id.add(i, i, 1.0);
  const std::vector<double> rhs{1.0, -2.0, 3.5, 0.0, 7.0};
  CHECK(sparse_solve(id.build(), rhs) == rhs);
}

TEST_CASE("sparse_solve reports singular matrices") {
  TripletBuilder b(3, 3);
  b.add(0, 0, 1.0);
  b.add(1, 1, 1.0);
  b.add(2, 0, 1.0);
  b.add(2, 1, 1.0);
  b.add(1, 2, 0.0);
  b.add(2, 2, 0.0);
  try {
    sparse_solve(b.build(), std::vector<double>{1.0, 1.0, 1.0});
    FAIL("expected a singular-matrix error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular);
    CHECK(std::string(e.what()).find("singular") != std::string::npos);
  }
  CHECK_THROWS_AS(sparse_solve(SparseMatrix(2, 3), std::vector<double>{1.0, 1.0}), Error);
}

TEST_CASE("linearized scheme recovers a representable quadratic") {
  // With Phi = I and q quadratic, A(q, w) = eps (Lap q, grad w . n)_boundary - (Lap q, w),
  // so the data phi = -Lap q, psi = Lap q reproduce the interpolant of q.
  for (int dim : {2, 3}) {
    auto space = make_space(dim, dim == 2 ? 4 : 2, 2);
    const Assembler assembler(space);
    auto q = [](const Vec3& x) {
      return 0.7 * x[0] * x[0] - 0.3 * x[0] * x[1] + 0.4 * x[1] * x[1] + 0.2 * x[2] * x[2] +
             x[1] * x[2] - x[0] + 0.5;
    };
    const double lap = 2.0 * 0.7 + 2.0 * 0.4 + (dim == 3 ? 0.4 : 0.0);
    const PenaltyParams params{1.0, 0.1, WeightMode::full};
    Mat3 identity{};
    for (int a = 0; a < 3; ++a) identity[a][a] = 1.0;
    const SparseMatrix a = assembler.assemble_stabilized(constant_field(identity), params);
    const auto rhs = assembler.assemble_linearized_rhs([&](const Vec3&) { return -lap; },
                                                       [&](const Vec3&) { return lap; }, params);
    const auto split = apply_dirichlet(*space, q);
    std::vector<double> full(space->num_dofs(), 0.0);
    for (std::size_t i = 0; i < split.boundary_dofs.size(); ++i)
      full[split.boundary_dofs[i]] = split.boundary_values[i];
    const auto lifted = a.multiply(full);
    std::vector<double> b(split.interior_dofs.size());
    for (std::size_t i = 0; i < b.size(); ++i)
      b[i] = rhs[split.interior_dofs[i]] - lifted[split.interior_dofs[i]];
    const auto x = sparse_solve(a.restrict_to(split.interior_dofs, split.interior_dofs), b);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      err = std::max(err, std::abs(x[i] - q(space->dof_coords()[split.interior_dofs[i]])));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("apply_dirichlet") {
  auto space = make_space(2, 2, 2);
  const auto zero = apply_dirichlet(*space, [](const Vec3&) { return 0.0; });
  CHECK(zero.boundary_dofs.size() == 16);
  for (double v : zero.boundary_values) CHECK(v == 0.0);
  const auto lin = apply_dirichlet(*space, [](const Vec3& x) { return x[0]; });
  for (std::size_t i = 0; i < lin.boundary_dofs.size(); ++i)
    CHECK(lin.boundary_values[i] == space->dof_coords()[lin.boundary_dofs[i]][0]);
  CHECK(lin.interior_dofs.size() + lin.boundary_dofs.size() ==
        static_cast<std::size_t>(space->num_dofs()));
}
