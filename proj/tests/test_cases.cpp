#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace mvtest;

TEST_CASE("built-in source terms") {
  const auto one = builtin_case("I");
  // det D^2 exp(|x|^2/2) = (1 + |x|^2) exp(|x|^2) in 2D.
  CHECK(one.data.f({0.5, 0.5, 0.0}, 0.01) == doctest::Approx(1.5 * std::exp(0.5)).epsilon(1e-14));
  CHECK(one.data.psi({0.0, 0.3, 0.0}, 0.004) == 0.004);

  const auto two = builtin_case("II");
  const Vec3 x{0.3, 0.7, 0.0};
  CHECK(two.data.f(x, 0.01) ==
        doctest::Approx(36.0 * 0.09 * 0.49 - 0.24).epsilon(1e-14));
  CHECK(two.data.psi(x, 0.01) == doctest::Approx(6.0 * 0.09 + 6.0 * 0.49).epsilon(1e-14));

  const auto three = builtin_case("III");
  CHECK(three.data.f(x, 0.01) == 1.0);
  CHECK(three.data.g(x) == 0.0);
  CHECK(three.data.psi(x, 0.02) == 0.02);
  CHECK(!three.exact);

  const auto four = builtin_case("IV");
  CHECK(four.dim == 3);
  CHECK(four.data.f({0.5, 0.5, 0.5}, 0.01) == doctest::Approx(1.75 * std::exp(1.125)).epsilon(1e-14));

  const auto five = builtin_case("V");
  CHECK(five.data.psi({0.5, 0.2, 0.1}, 0.01) == doctest::Approx(1.0 + 1.5 + 0.06).epsilon(1e-14));
  CHECK(builtin_case("VI").dim == 3);
  CHECK_THROWS_AS(builtin_case("VII"), Error);
}

TEST_CASE("exact solution jets agree with finite differences") {
  const double t = 1e-4;
  for (const char* id : {"I", "II", "IV", "V"}) {
    const auto spec = builtin_case(id);
    const auto& ex = *spec.exact;
    const int dim = spec.dim;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int i = 0; i < 5; ++i) {
      Vec3 x{u(rng), u(rng), dim == 3 ? u(rng) : 0.0};
      const Jet j = ex.jet(x);
      CHECK(spec.data.g(x) == doctest::Approx(j.value).epsilon(1e-14));
      auto lap = [&](const Vec3& y) { return trace(ex.jet(y).hessian, dim); };
      double bilap = 0.0;
      for (int a = 0; a < dim; ++a) {
        Vec3 p = x, m = x;
        p[a] += t;
        m[a] -= t;
        const Jet jp = ex.jet(p), jm = ex.jet(m);
        CHECK((jp.value - jm.value) / (2 * t) == doctest::Approx(j.gradient[a]).epsilon(1e-7));
        for (int b = 0; b < dim; ++b)
          CHECK((jp.gradient[b] - jm.gradient[b]) / (2 * t) ==
                doctest::Approx(j.hessian[a][b]).epsilon(1e-7));
        Vec3 p2 = x, m2 = x;
        p2[a] += 1e-3;
        m2[a] -= 1e-3;
        bilap += (lap(p2) - 2.0 * lap(x) + lap(m2)) / 1e-6;
      }
      CHECK(ex.bilaplacian(x) == doctest::Approx(bilap).epsilon(1e-5));
    }
  }
}

TEST_CASE("manufactured data consistency") {
  for (const char* id : {"I", "II", "III", "IV", "V", "VI"})
    for (double eps : {0.5, 0.01, 0.0025}) {
      const auto spec = builtin_case(id);
      CHECK(manufactured_data_mismatch(spec, eps) < 1e-10);
      CHECK_NOTHROW(check_manufactured_data(spec, eps));
    }
  auto broken = builtin_case("II");
  broken.data.f = [](const Vec3& x, double) { return x[0] * x[0] * x[1] * x[1]; };
  CHECK_THROWS_AS(check_manufactured_data(broken, 0.01), ContractError);
}

TEST_CASE("numbers and lists") {
  CHECK(parse_number("1/8") == 0.125);
  CHECK(parse_number(" 2.5e-3 ") == 0.0025);
  CHECK(parse_number_list("1/8, 1/16,0.5") == std::vector<double>{0.125, 0.0625, 0.5});
  CHECK(parse_number_list("").empty());
  CHECK_THROWS_AS(parse_number("abc"), Error);
  CHECK_THROWS_AS(parse_number("1/0"), Error);
  CHECK_THROWS_AS(parse_number("3x"), Error);
  CHECK_THROWS_AS(parse_number(""), Error);
}

TEST_CASE("spec files round trip") {
  for (const char* id : {"I", "II", "III", "V"}) {
    auto spec = builtin_case(id);
    spec.sigma = 3.5;
    spec.h_list = {1.0 / 8, 1.0 / 24};
    std::ostringstream os;
    write_spec(os, spec);
    std::istringstream in(os.str());
    const auto back = read_spec(in);
    CHECK(back.id == spec.id);
    CHECK(back.dim == spec.dim);
    CHECK(back.degrees == spec.degrees);
    CHECK(back.h_list == spec.h_list);
    CHECK(back.eps_list == spec.eps_list);
    CHECK(back.epsilon == spec.epsilon);
    CHECK(back.sigma == spec.sigma);
    CHECK(back.mode == spec.mode);
    CHECK(static_cast<bool>(back.exact) == static_cast<bool>(spec.exact));
    const Vec3 x{0.2, 0.6, 0.4};
    CHECK(back.data.f(x, 0.01) == spec.data.f(x, 0.01));
    CHECK(back.data.g(x) == spec.data.g(x));
  }
}

TEST_CASE("custom specs") {
  std::istringstream in("# custom\ncase = mine\ndim = 2\nf = 2\ng = const:0.5\npsi = epsilon\n"
                        "h_list = 1/4\n");
  const auto s = read_spec(in);
  CHECK(s.id == "mine");
  CHECK(s.data.f({0.1, 0.1, 0}, 0.3) == 2.0);
  CHECK(s.data.g({0.1, 0.1, 0}) == 0.5);
  CHECK(s.data.psi({0.1, 0.1, 0}, 0.3) == 0.3);
  CHECK(!s.exact);

  std::istringstream missing("case = mine\nf = 1\n");
  CHECK_THROWS_AS(read_spec(missing), Error);
  std::istringstream empty("dim = 3\n");
  CHECK(read_spec(empty, false).dim == 3);
  std::istringstream unknown("case = II\ncolour = blue\n");
  CHECK_THROWS_AS(read_spec(unknown), Error);
  std::istringstream bad_line("case II\n");
  CHECK_THROWS_AS(read_spec(bad_line), Error);
  std::istringstream bad_dim("case = II\ndim = 4\n");
  CHECK_THROWS_AS(read_spec(bad_dim), Error);
  CHECK_THROWS_AS(read_spec_file("/nonexistent/spec.cfg"), Error);
}
