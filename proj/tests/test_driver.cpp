#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "maviscid/driver.hpp"
#include "support.hpp"

using namespace mvtest;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / ("driver_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("explicit settings win over the config file, which wins over case defaults") {
  const fs::path dir = scratch("precedence");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# run settings\ncase = II\nsigma = 5\nh-list = 1/4, 1/8\nseed = 9\n";
  RunConfigBuilder b;
  b.load_file(cfg.string());
  b.set("sigma", "7");
  const RunOptions o = b.resolve();
  CHECK(o.spec.id == "II");
  CHECK(o.spec.sigma == 7.0);
  CHECK(o.spec.h_list == std::vector<double>{0.25, 0.125});
  CHECK(o.seed == 9);
  CHECK(o.spec.mode == WeightMode::plain);
  CHECK(o.spec.epsilon == 0.01);
  CHECK(o.levels == std::vector<int>{4, 8});

  RunConfigBuilder bad;
  std::ofstream(dir / "bad.cfg") << "colour = blue\n";
  CHECK_THROWS_AS(bad.load_file((dir / "bad.cfg").string()), Error);
  CHECK_THROWS_AS(bad.load_file((dir / "missing.cfg").string()), Error);
}

TEST_CASE("run option validation") {
  auto resolve_with = [](const std::string& k, const std::string& v) {
    RunConfigBuilder b;
    b.set("case", "II");
    b.set(k, v);
    return b.resolve();
  };
  CHECK_THROWS_AS(resolve_with("weight-mode", "heavy"), Error);
  CHECK_THROWS_AS(resolve_with("degree", "4"), Error);
  CHECK_THROWS_AS(resolve_with("h-list", "0.3"), Error);
  CHECK_THROWS_AS(resolve_with("eps-list", "0.1,0.2"), Error);
  CHECK_THROWS_AS(resolve_with("format", "pdf"), Error);
  CHECK_THROWS_AS(resolve_with("seed", "-1"), Error);
  CHECK_THROWS_AS(resolve_with("sigma", "-1"), Error);
  CHECK(resolve_with("format", "md").csv == false);
  CHECK(resolve_with("degree", "3").spec.degrees == std::vector<int>{3});
  CHECK(cells_per_axis(1.0 / 64) == 64);
}

TEST_CASE("MAVISCID_THREADS caps the worker count") {
  RunConfigBuilder b;
  b.set("case", "II");
  b.set("threads", "8");
  setenv("MAVISCID_THREADS", "2", 1);
  CHECK(b.resolve().threads == 2);
  setenv("MAVISCID_THREADS", "0", 1);
  CHECK_THROWS_AS(b.resolve(), Error);
  unsetenv("MAVISCID_THREADS");
  CHECK(b.resolve().threads == 8);
}

TEST_CASE("CSV tables round trip") {
  ResultTable t;
  t.degree = 2;
  t.fixed = 0.01;
  t.rows = rate_table({{1.0 / 8, {6.1934e-4, 6.3912e-3, 0.35412}},
                       {1.0 / 16, {1.4871e-4, 1.6102e-3, 0.17733}},
                       {1.0 / 32, {3.6123e-5, 4.0311e-4, 0.08871}}});
  const std::string csv = format_table_csv(t);
  CHECK(csv.rfind("h,l2,order_l2,h1,order_h1,h2,order_h2\n", 0) == 0);
  const ResultTable back = parse_table_csv(csv);
  REQUIRE(back.rows.size() == 3);
  std::vector<std::pair<double, ErrorNorms>> rows;
  for (const auto& r : back.rows) rows.push_back({r.parameter, r.errors});
  const auto recomputed = rate_table(rows);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.rows[i].parameter == t.rows[i].parameter);
    CHECK(format_order(recomputed[i].order_l2) == format_order(back.rows[i].order_l2));
    CHECK(format_order(recomputed[i].order_h1) == format_order(back.rows[i].order_h1));
    CHECK(format_order(recomputed[i].order_h2) == format_order(back.rows[i].order_h2));
  }
  CHECK(format_table_csv(back) == csv);
  const std::string md = format_table_md(t, "II");
  CHECK(md.find("| k=2 | 1/8 | 6.19e-04 | -- |") != std::string::npos);
  CHECK_THROWS_AS(parse_table_csv("x,y\n"), Error);
}

TEST_CASE("convergence usage errors") {
  auto run = [](std::map<std::string, std::string> kv) {
    RunConfigBuilder b;
    for (const auto& [k, v] : kv) b.set(k, v);
    return cmd_convergence(b.resolve());
  };
  const std::string out = scratch("usage").string();
  try {
    run({{"case", "III"}, {"out", out}});
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
  try {
    run({{"case", "II"}, {"h-list", ""}, {"out", out}});
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
  CHECK_THROWS_AS(run({{"dim", "2"}, {"out", out}}), Error);
}

TEST_CASE("convergence writes tables and flushes partial rows on failure") {
  const fs::path dir = scratch("convergence");
  RunConfigBuilder b;
  b.set("case", "II");
  b.set("degree", "2");
  b.set("h-list", "1/4,1/8");
  b.set("out", dir.string());
  b.set("threads", "1");
  const auto res = cmd_convergence(b.resolve());
  CHECK(res.passed);
  REQUIRE(res.tables.size() == 1);
  CHECK(fs::exists(dir / "II_k2_h.csv"));
  CHECK(fs::exists(dir / "II_k2_h.md"));
  const ResultTable parsed = parse_table_csv(slurp(dir / "II_k2_h.csv"));
  CHECK(parsed.rows.size() == 2);
  CHECK(*parsed.rows[1].order_h2 > 0.8);

  // Byte-identical output for identical input.
  const std::string first = slurp(dir / "II_k2_h.csv");
  cmd_convergence(b.resolve());
  CHECK(slurp(dir / "II_k2_h.csv") == first);

  RunConfigBuilder eps;
  eps.set("case", "II");
  eps.set("degree", "2");
  eps.set("h-list", "1/4");
  eps.set("eps-list", "0.1,0.05");
  eps.set("out", dir.string());
  const auto er = cmd_convergence(eps.resolve());
  CHECK(fs::exists(dir / "II_k2_eps_n4.csv"));
  CHECK(er.tables.at(0).eps_study);

  RunConfigBuilder fail;
  fail.set("case", "II");
  fail.set("h-list", "1/4,1/8");
  fail.set("max-iters", "1");
  fail.set("out", (dir / "fail").string());
  CHECK_THROWS_AS(cmd_convergence(fail.resolve()), SolveError);
}

TEST_CASE("solve writes the solution dump, grid and optional dumps") {
  const fs::path dir = scratch("solve");
  RunConfigBuilder b;
  b.set("case", "III");
  b.set("h-list", "1/8");
  b.set("dump-mesh", "true");
  b.set("dump-matrix", "true");
  b.set("out", dir.string());
  const auto res = cmd_solve(b.resolve());
  CHECK(fs::exists(dir / "III_solution.txt"));
  CHECK(fs::exists(dir / "III_grid.csv"));
  CHECK(fs::exists(dir / "III_mesh.off"));
  CHECK(fs::exists(dir / "III_jacobian.mtx"));
  CHECK(res.text.find("in the interior") != std::string::npos);
  CHECK(slurp(dir / "III_jacobian.mtx").rfind("%%MatrixMarket", 0) == 0);
  std::istringstream off(slurp(dir / "III_mesh.off"));
  Index nv, nc;
  off >> nv >> nc;
  CHECK(nv == 81);
  CHECK(nc == 128);

  // Custom constant boundary data is reproduced on the grid boundary.
  const fs::path cdir = scratch("solve_custom");
  const fs::path cfg = cdir / "c.cfg";
  std::ofstream(cfg) << "case = flat\nf = 1\ng = 0.5\npsi = epsilon\nh_list = 1/4\nepsilon = 0.1\n";
  RunConfigBuilder c;
  c.load_file(cfg.string());
  c.set("out", cdir.string());
  cmd_solve(c.resolve());
  std::istringstream grid(slurp(cdir / "flat_grid.csv"));
  std::string line;
  std::getline(grid, line);
  int boundary = 0;
  while (std::getline(grid, line)) {
    if (line.empty()) continue;
    double x, y, u;
    char c1, c2;
    std::istringstream ls(line);
    ls >> x >> c1 >> y >> c2 >> u;
    if (x == 0.0 || y == 0.0 || x == 1.0 || y == 1.0) {
      CHECK(std::abs(u - 0.5) < 1e-12);
      ++boundary;
    }
  }
  CHECK(boundary == 400);
}

TEST_CASE("3D solve writes six slices") {
  const fs::path dir = scratch("solve3d");
  RunConfigBuilder b;
  b.set("case", "VI");
  b.set("h-list", "1/2");
  b.set("epsilon", "0.1");
  b.set("out", dir.string());
  const auto res = cmd_solve(b.resolve());
  for (const char* name : {"VI_slice_x0.25.csv", "VI_slice_x0.50.csv", "VI_slice_x0.75.csv",
                           "VI_slice_y0.25.csv", "VI_slice_y0.50.csv", "VI_slice_y0.75.csv"})
    CHECK(fs::exists(dir / name));
  CHECK(res.text.find("y<->z symmetry defect") != std::string::npos);
}

TEST_CASE("verify is deterministic and detects missing penalty") {
  const fs::path dir = scratch("verify");
  RunConfigBuilder b;
  b.set("dim", "2");
  b.set("degree", "2");
  b.set("levels", "4,8");
  b.set("samples", "1");
  b.set("seed", "5");
  b.set("out", dir.string());
  const auto a = cmd_verify(b.resolve());
  const std::string csv = slurp(dir / "verify.csv");
  const auto again = cmd_verify(b.resolve());
  CHECK(a.text == again.text);
  CHECK(slurp(dir / "verify.csv") == csv);

  b.set("samples", "100");
  CHECK(cmd_verify(b.resolve()).passed);

  b.set("sigma", "0");
  b.set("epsilon", "0.1");
  const auto none = cmd_verify(b.resolve());
  CHECK_FALSE(none.passed);
  CHECK(none.text.find("FAIL coercivity at level n = 4") != std::string::npos);
  CHECK(none.text.find("worst seed") != std::string::npos);
}

TEST_CASE("symmetry defect") {
  auto space = make_space(2, 4, 2);
  const auto sym = interpolate(space, [](const Vec3& x) { return x[0] * x[1] + x[0] + x[1]; });
  CHECK(swap_symmetry_defect(sym, 0, 1) == 0.0);
  const auto asym = interpolate(space, [](const Vec3& x) { return x[0]; });
  CHECK(swap_symmetry_defect(asym, 0, 1) == doctest::Approx(1.0));
}
