#include "maviscid/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "maviscid/mesh.hpp"

namespace maviscid {

namespace {

const std::set<std::string> kSpecKeys{"case",  "dim",         "degrees", "h_list",
                                      "eps_list", "epsilon",  "sigma",   "weight_mode",
                                      "f",     "g",           "psi",     "exact"};
const std::set<std::string> kRunKeys{"seed",      "out",         "format",   "threads",
                                     "samples",   "levels",      "dump_mesh", "dump_matrix",
                                     "max_iters", "abs_tol"};

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "degree") key = "degrees";
  return key;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::invalid_argument, "expected a boolean, got '" + v + "'");
}

long long parse_integer(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::invalid_argument, key + ": expected an integer, got '" + v + "'");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string format_h(double h) {
  const double n = 1.0 / h;
  if (std::abs(n - std::round(n)) < 1e-9 * n) return "1/" + std::to_string(std::lround(n));
  return format_sci(h);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error(ErrorCode::io, "cannot create output directory '" + dir + "'");
}

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
  return path;
}

struct Discretization {
  std::shared_ptr<const SimplicialMesh> mesh;
  std::shared_ptr<const FeSpace> space;
  std::unique_ptr<Assembler> assembler;
};

Discretization discretize(int dim, int n, int degree) {
  Discretization d;
  d.mesh = std::make_shared<const SimplicialMesh>(build_structured_mesh(dim, n));
  d.space = std::make_shared<const FeSpace>(d.mesh, degree);
  d.assembler = std::make_unique<Assembler>(d.space);
  return d;
}

std::string label(const ExperimentSpec& s, int degree, const std::string& tail) {
  return s.id + "_k" + std::to_string(degree) + "_" + tail;
}

void require_data(const RunOptions& opts) {
  if (!opts.spec.data.f || !opts.spec.data.g || !opts.spec.data.psi)
    throw Error(ErrorCode::invalid_argument,
                "no problem data: give --case or f, g and psi in a config file");
}

// Runs jobs[i] for i in [0, n) on at most `threads` workers.
template <class Job>
void run_parallel(std::size_t n, int threads, Job job) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1, threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::mutex m;
  std::size_t next = 0;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(m);
          if (next >= n) return;
          i = next++;
        }
        job(i);
      }
    });
  for (auto& t : pool) t.join();
}

}  // namespace

void RunConfigBuilder::set(const std::string& key, const std::string& value) {
  const std::string k = normalize_key(key);
  if (!kSpecKeys.count(k) && !kRunKeys.count(k))
    throw Error(ErrorCode::invalid_argument, "unknown setting '" + key + "'");
  explicit_[k] = value;
}

void RunConfigBuilder::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::invalid_argument, path + ":" + std::to_string(lineno) +
                                                   ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
    };
    const std::string k = normalize_key(trim(line.substr(0, eq)));
    if (!kSpecKeys.count(k) && !kRunKeys.count(k))
      throw Error(ErrorCode::invalid_argument, path + ":" + std::to_string(lineno) +
                                                   ": unknown key '" + k + "'");
    file_[k] = trim(line.substr(eq + 1));
  }
}

RunOptions RunConfigBuilder::resolve() const {
  std::map<std::string, std::string> merged = file_;
  for (const auto& [k, v] : explicit_) merged[k] = v;

  RunOptions opts;
  std::ostringstream spec_text;
  for (const auto& [k, v] : merged)
    if (kSpecKeys.count(k)) spec_text << k << " = " << v << '\n';
  std::istringstream spec_in(spec_text.str());
  opts.spec = read_spec(spec_in, false);
  opts.has_case = merged.count("case") > 0;

  auto get = [&](const std::string& k) -> const std::string* {
    auto it = merged.find(k);
    return it == merged.end() ? nullptr : &it->second;
  };
  if (auto v = get("seed")) {
    const long long s = parse_integer(*v, "seed");
    require(s >= 0, "seed must be >= 0");
    opts.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("out")) opts.out_dir = *v;
  if (auto v = get("format")) {
    opts.csv = opts.md = false;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "csv") opts.csv = true;
      else if (item == "md") opts.md = true;
      else throw Error(ErrorCode::invalid_argument, "unknown format '" + item + "' (csv, md)");
    }
    require(opts.csv || opts.md, "format must list csv and/or md");
  }
  if (auto v = get("samples")) {
    opts.samples = static_cast<int>(parse_integer(*v, "samples"));
    require(opts.samples >= 1, "samples must be >= 1");
  }
  if (auto v = get("levels")) {
    opts.levels.clear();
    for (double x : parse_number_list(*v)) opts.levels.push_back(static_cast<int>(x));
  } else if (get("h_list")) {
    opts.levels.clear();
    for (double h : opts.spec.h_list) opts.levels.push_back(cells_per_axis(h));
  }
  for (int n : opts.levels) require(n >= 1, "levels must be >= 1");
  if (auto v = get("dump_mesh")) opts.dump_mesh = parse_bool(*v);
  if (auto v = get("dump_matrix")) opts.dump_matrix = parse_bool(*v);
  if (auto v = get("max_iters")) opts.newton.max_iters = static_cast<int>(parse_integer(*v, "max_iters"));
  if (auto v = get("abs_tol")) opts.newton.abs_tol = parse_number(*v);
  opts.newton.validate();

  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (auto v = get("threads")) threads = static_cast<int>(parse_integer(*v, "threads"));
  if (const char* env = std::getenv("MAVISCID_THREADS"); env && *env) {
    const long long cap = parse_integer(env, "MAVISCID_THREADS");
    require(cap >= 1, "MAVISCID_THREADS must be >= 1");
    threads = std::min<long long>(threads, cap);
  }
  require(threads >= 1, "threads must be >= 1");
  opts.threads = threads;

  for (int k : opts.spec.degrees) require(k >= 1 && k <= 3, "degree must be 1, 2 or 3");
  require(!opts.spec.degrees.empty(), "at least one degree is required");
  for (double h : opts.spec.h_list) cells_per_axis(h);
  for (double e : opts.spec.eps_list) require(e > 0.0, "eps values must be > 0");
  for (std::size_t i = 1; i < opts.spec.eps_list.size(); ++i)
    require(opts.spec.eps_list[i] < opts.spec.eps_list[i - 1],
            "eps list must be strictly decreasing");
  require(opts.spec.epsilon > 0.0, "epsilon must be > 0");
  PenaltyParams{opts.spec.sigma, opts.spec.epsilon, opts.spec.mode}.validate();
  return opts;
}

int cells_per_axis(double h) {
  require(h > 0.0 && h <= 1.0, "mesh size must lie in (0, 1]");
  const double n = 1.0 / h;
  const long r = std::lround(n);
  require(std::abs(n - double(r)) < 1e-6 * n,
          "mesh size must be 1/n for an integer n, got " + fmt("%g", h));
  return static_cast<int>(r);
}

std::string format_table_csv(const ResultTable& t) {
  const ResultTable r = rounded(t);
  std::ostringstream os;
  os << (t.eps_study ? "eps" : "h") << ",l2,order_l2,h1,order_h1,h2,order_h2\n";
  for (const auto& row : r.rows)
    os << fmt("%.17g", row.parameter) << ',' << format_sci(row.errors.l2) << ','
       << format_order(row.order_l2) << ',' << format_sci(row.errors.h1) << ','
       << format_order(row.order_h1) << ',' << format_sci(row.errors.h2_broken) << ','
       << format_order(row.order_h2) << '\n';
  return os.str();
}

std::string format_table_md(const ResultTable& t, const std::string& case_id) {
  const ResultTable r = rounded(t);
  std::ostringstream os;
  os << "Test " << case_id << ", k = " << t.degree << ", fixed "
     << (t.eps_study ? "h = " + format_h(t.fixed) : "eps = " + fmt("%g", t.fixed)) << "\n\n";
  os << "| Degree | " << (t.eps_study ? "eps" : "h")
     << " | L2 error | Order | H1 error | Order | H2 (broken) error | Order |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    os << "| " << (i == 0 ? "k=" + std::to_string(t.degree) : std::string()) << " | "
       << (t.eps_study ? format_sci(row.parameter) : format_h(row.parameter)) << " | "
       << format_sci(row.errors.l2) << " | " << format_order(row.order_l2) << " | "
       << format_sci(row.errors.h1) << " | " << format_order(row.order_h1) << " | "
       << format_sci(row.errors.h2_broken) << " | " << format_order(row.order_h2) << " |\n";
  }
  return os.str();
}

ResultTable rounded(const ResultTable& t) {
  ResultTable r = t;
  if (t.rows.empty()) return r;
  std::vector<std::pair<double, ErrorNorms>> rows;
  for (const auto& row : t.rows) {
    ErrorNorms e;
    e.l2 = std::stod(format_sci(row.errors.l2));
    e.h1 = std::stod(format_sci(row.errors.h1));
    e.h2_broken = std::stod(format_sci(row.errors.h2_broken));
    rows.push_back({row.parameter, e});
  }
  if (rows.size() == 1) {
    r.rows[0].errors = rows[0].second;
    return r;
  }
  r.rows = rate_table(rows);
  return r;
}

ResultTable parse_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty table");
  ResultTable t;
  t.eps_study = line.rfind("eps,", 0) == 0;
  require(t.eps_study || line.rfind("h,", 0) == 0, "unrecognized table header");
  auto order = [](const std::string& s) -> std::optional<double> {
    if (s == "--") return std::nullopt;
    return parse_number(s);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    require(f.size() == 7, "table rows need 7 fields");
    RateRow row;
    row.parameter = parse_number(f[0]);
    row.errors.l2 = parse_number(f[1]);
    row.order_l2 = order(f[2]);
    row.errors.h1 = parse_number(f[3]);
    row.order_h1 = order(f[4]);
    row.errors.h2_broken = parse_number(f[5]);
    row.order_h2 = order(f[6]);
    t.rows.push_back(row);
  }
  return t;
}

namespace {

struct RowOutcome {
  bool done = false;
  ErrorNorms errors;
  SolveReport report;
  std::optional<SolveError> failure;
  std::string other_failure;
  ErrorCode other_code = ErrorCode::ok;
};

std::string row_note(const std::string& what, const SolveReport& r) {
  std::ostringstream os;
  os << "  " << what << ": " << r.iterations << " Newton steps, final residual "
     << format_sci(r.residual_history.empty() ? 0.0 : r.residual_history.back())
     << ", " << fmt("%.1f", r.wall_seconds) << " s\n";
  return os.str();
}

void emit_table(const RunOptions& opts, const ResultTable& table, const std::string& name,
                CommandResult& out) {
  if (table.rows.empty()) return;
  if (opts.csv) out.files.push_back(write_file(opts.out_dir, name + ".csv", format_table_csv(table)));
  if (opts.md)
    out.files.push_back(write_file(opts.out_dir, name + ".md", format_table_md(table, opts.spec.id)));
  out.text += format_table_md(table, opts.spec.id) + "\n";
  out.tables.push_back(table);
}

}  // namespace

CommandResult cmd_convergence(const RunOptions& opts) {
  const auto& spec = opts.spec;
  require_data(opts);
  if (!spec.exact)
    throw Error(ErrorCode::invalid_argument,
                "case " + spec.id + " has no exact solution; convergence tables need one");
  require(!spec.h_list.empty() || !spec.eps_list.empty(),
          "convergence needs a non-empty h list or eps list");
  require(!spec.h_list.empty(), "an eps study needs a mesh size (h list)");
  const bool eps_study = !spec.eps_list.empty();
  if (!eps_study) require(spec.h_list.size() >= 2, "an h study needs at least two mesh sizes");
  for (double e : eps_study ? spec.eps_list : std::vector<double>{spec.epsilon})
    check_manufactured_data(spec, e);
  ensure_dir(opts.out_dir);

  CommandResult out;
  for (int degree : spec.degrees) {
    if (eps_study) {
      for (double h : spec.h_list) {
        const int n = cells_per_axis(h);
        ResultTable table{degree, true, h, {}};
        std::vector<std::pair<double, ErrorNorms>> rows;
        const std::string name = label(spec, degree, "eps_n" + std::to_string(n));
        auto flush = [&] {
          if (rows.size() >= 2) table.rows = rate_table(rows);
          else if (rows.size() == 1) table.rows = {RateRow{rows[0].first, rows[0].second, {}, {}, {}}};
          emit_table(opts, table, name, out);
        };
        Discretization d = discretize(spec.dim, n, degree);
        std::optional<FeFunction> u;
        for (double eps : spec.eps_list) {
          try {
            NewtonResult res =
                u ? newton_solve(*d.assembler, spec.data, PenaltyParams{spec.sigma, eps, spec.mode},
                                 opts.newton, *u)
                  : continuation_solve(*d.assembler, spec.data, spec.sigma, spec.mode, eps,
                                       opts.newton);
            u = std::move(res.solution);
            rows.push_back({eps, error_norms(spec.exact->jet, *u)});
            out.text += row_note("k=" + std::to_string(degree) + " n=" + std::to_string(n) +
                                     " eps=" + fmt("%g", eps),
                                 res.report);
          } catch (const SolveError& e) {
            flush();
            std::ostringstream os;
            os << e.what() << " [k = " << degree << ", n = " << n << ", eps = " << eps << "]";
            throw SolveError(e.code(), os.str(), e.report());
          }
        }
        flush();
      }
    } else {
      const auto& hs = spec.h_list;
      std::vector<RowOutcome> outcomes(hs.size());
      run_parallel(hs.size(), opts.threads, [&](std::size_t i) {
        RowOutcome& o = outcomes[i];
        try {
          Discretization d = discretize(spec.dim, cells_per_axis(hs[i]), degree);
          NewtonResult res = continuation_solve(*d.assembler, spec.data, spec.sigma, spec.mode,
                                                spec.epsilon, opts.newton);
          o.errors = error_norms(spec.exact->jet, res.solution);
          o.report = res.report;
          o.done = true;
        } catch (const SolveError& e) {
          o.failure = e;
        } catch (const Error& e) {
          o.other_failure = e.what();
          o.other_code = e.code();
        } catch (const std::exception& e) {
          o.other_failure = e.what();
          o.other_code = ErrorCode::unknown;
        }
      });
      ResultTable table{degree, false, spec.epsilon, {}};
      std::vector<std::pair<double, ErrorNorms>> rows;
      const std::string name = label(spec, degree, "h");
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const auto& o = outcomes[i];
        if (!o.done) {
          if (rows.size() >= 2) table.rows = rate_table(rows);
          else if (rows.size() == 1) table.rows = {RateRow{rows[0].first, rows[0].second, {}, {}, {}}};
          emit_table(opts, table, name, out);
          std::ostringstream where;
          where << " [k = " << degree << ", n = " << cells_per_axis(hs[i]) << "]";
          if (o.failure)
            throw SolveError(o.failure->code(), o.failure->what() + where.str(),
                             o.failure->report());
          throw Error(o.other_code, o.other_failure + where.str());
        }
        rows.push_back({hs[i], o.errors});
        out.text += row_note("k=" + std::to_string(degree) + " n=" +
                                 std::to_string(cells_per_axis(hs[i])),
                             o.report);
      }
      table.rows = rate_table(rows);
      emit_table(opts, table, name, out);
    }
  }
  return out;
}

double swap_symmetry_defect(const FeFunction& u, int a, int b) {
  const auto& sp = u.space();
  const double scale = 1e8;
  auto key = [&](const Vec3& x) {
    return std::array<long long, 3>{std::llround(x[0] * scale), std::llround(x[1] * scale),
                                    std::llround(x[2] * scale)};
  };
  std::map<std::array<long long, 3>, Index> index;
  for (Index d = 0; d < sp.num_dofs(); ++d) index[key(sp.dof_coords()[d])] = d;
  double worst = 0.0;
  for (Index d = 0; d < sp.num_dofs(); ++d) {
    Vec3 y = sp.dof_coords()[d];
    std::swap(y[a], y[b]);
    auto it = index.find(key(y));
    if (it == index.end())
      throw ContractError("swap_symmetry_defect: mesh is not symmetric under the swap");
    worst = std::max(worst, std::abs(u.coefficients()[d] - u.coefficients()[it->second]));
  }
  return worst;
}

CommandResult cmd_solve(const RunOptions& opts) {
  const auto& spec = opts.spec;
  require_data(opts);
  require(!spec.h_list.empty(), "solve needs a mesh size (h list)");
  const int n = cells_per_axis(spec.h_list.back());
  const double eps = spec.eps_list.empty() ? spec.epsilon : spec.eps_list.back();
  const int degree = spec.degrees.front();
  if (spec.exact) check_manufactured_data(spec, eps);
  ensure_dir(opts.out_dir);

  Discretization d = discretize(spec.dim, n, degree);
  NewtonResult res = continuation_solve(*d.assembler, spec.data, spec.sigma, spec.mode, eps,
                                        opts.newton);
  const FeFunction& u = res.solution;
  const auto& sp = *d.space;
  const int dim = spec.dim;

  CommandResult out;
  std::ostringstream text;
  text << "case " << spec.id << ": dim " << dim << ", k = " << degree << ", n = " << n
       << ", eps = " << eps << ", sigma = " << spec.sigma << " (" << to_string(spec.mode)
       << ")\n";
  text << row_note("solve", res.report);

  Index arg = 0;
  double umin = INFINITY, bdev = 0.0;
  for (Index i = 0; i < sp.num_dofs(); ++i)
    if (u.coefficients()[i] < umin) {
      umin = u.coefficients()[i];
      arg = i;
    }
  for (Index i : sp.boundary_dofs())
    bdev = std::max(bdev, std::abs(u.coefficients()[i] - spec.data.g(sp.dof_coords()[i])));
  const Vec3& xm = sp.dof_coords()[arg];
  text << "  minimum " << fmt("%.6g", umin) << " at (" << xm[0] << ", " << xm[1];
  if (dim == 3) text << ", " << xm[2];
  text << ")" << (sp.is_boundary_dof(arg) ? " on the boundary" : " in the interior") << '\n';
  text << "  max |u_h - g| on boundary dofs " << format_sci(bdev) << '\n';
  text << "  x<->y symmetry defect " << format_sci(swap_symmetry_defect(u, 0, 1)) << '\n';
  if (dim == 3)
    text << "  y<->z symmetry defect " << format_sci(swap_symmetry_defect(u, 1, 2)) << '\n';
  if (spec.exact) {
    const ErrorNorms e = error_norms(spec.exact->jet, u);
    text << "  errors: L2 " << format_sci(e.l2) << ", H1 " << format_sci(e.h1)
         << ", H2 (broken) " << format_sci(e.h2_broken) << '\n';
  }

  std::ostringstream dump;
  dump << (dim == 2 ? "# x y u\n" : "# x y z u\n");
  for (Index i = 0; i < sp.num_dofs(); ++i) {
    const Vec3& x = sp.dof_coords()[i];
    for (int a = 0; a < dim; ++a) dump << fmt("%.17g", x[a]) << ' ';
    dump << fmt("%.17g", u.coefficients()[i]) << '\n';
  }
  out.files.push_back(write_file(opts.out_dir, spec.id + "_solution.txt", dump.str()));

  const int grid = 101;
  auto sample_plane = [&](int fixed_axis, double value) {
    int axes[2];
    int k = 0;
    for (int a = 0; a < dim; ++a)
      if (a != fixed_axis) axes[k++] = a;
    const char* names = "xyz";
    std::ostringstream os;
    os << names[axes[0]] << ',' << names[axes[1]] << ",u\n";
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        Vec3 x{};
        if (fixed_axis >= 0) x[fixed_axis] = value;
        x[axes[0]] = double(i) / (grid - 1);
        x[axes[1]] = double(j) / (grid - 1);
        os << fmt("%.6f", x[axes[0]]) << ',' << fmt("%.6f", x[axes[1]]) << ','
           << fmt("%.17g", u.value_at(x)) << '\n';
      }
      os << '\n';
    }
    return os.str();
  };
  if (dim == 2) {
    out.files.push_back(write_file(opts.out_dir, spec.id + "_grid.csv", sample_plane(-1, 0.0)));
  } else {
    for (int axis : {0, 1})
      for (double v : {0.25, 0.5, 0.75}) {
        const std::string name = spec.id + "_slice_" + (axis == 0 ? "x" : "y") +
                                 fmt("%.2f", v) + ".csv";
        out.files.push_back(write_file(opts.out_dir, name, sample_plane(axis, v)));
      }
  }
  if (opts.dump_mesh) {
    std::ostringstream os;
    d.mesh->write_off(os);
    out.files.push_back(write_file(opts.out_dir, spec.id + "_mesh.off", os.str()));
  }
  if (opts.dump_matrix) {
    const SparseMatrix jac = d.assembler->assemble_jacobian(u, {spec.sigma, eps, spec.mode})
                                 .restrict_to(sp.interior_dofs(), sp.interior_dofs());
    std::ostringstream os;
    jac.write_matrix_market(os);
    out.files.push_back(write_file(opts.out_dir, spec.id + "_jacobian.mtx", os.str()));
  }
  out.text = text.str();
  return out;
}

CommandResult cmd_verify(const RunOptions& opts) {
  const auto& spec = opts.spec;
  require(!opts.levels.empty(), "verify needs at least one level");
  const int degree = spec.degrees.front();
  const PenaltyParams params{spec.sigma, spec.epsilon, spec.mode};
  const int dim = spec.dim;
  ensure_dir(opts.out_dir);

  struct Level {
    int n;
    InequalityReport mt, sobolev, h1;
    CoercivityReport coercivity;
  };
  std::vector<Level> levels;
  auto convex = [dim](const Vec3& x) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
    return std::exp(0.5 * r2);
  };
  for (int n : opts.levels) {
    Discretization d = discretize(dim, n, degree);
    Level l;
    l.n = n;
    l.mt = verify_miranda_talenti(*d.assembler, opts.samples, opts.seed);
    l.sobolev = verify_discrete_sobolev(*d.assembler, opts.samples, opts.seed);
    l.h1 = verify_h1_bound(*d.assembler, opts.samples, opts.seed);
    const FeFunction ui = interpolate(d.space, convex);
    l.coercivity = probe_coercivity(*d.assembler, cofactor_field(ui), params, opts.samples,
                                    opts.seed);
    levels.push_back(l);
  }

  CommandResult out;
  std::ostringstream text, csv;
  text << "verify: dim " << dim << ", k = " << degree << ", eps = " << spec.epsilon
       << ", sigma = " << spec.sigma << " (" << to_string(spec.mode) << "), " << opts.samples
       << " samples, seed " << opts.seed << '\n';
  csv << "n,miranda_talenti,sobolev,h1_bound,coercivity_min,coercivity_ratio,negative\n";
  for (const auto& l : levels) {
    text << "  n = " << l.n << ": miranda-talenti " << format_sci(l.mt.max_constant)
         << ", sobolev " << format_sci(l.sobolev.max_constant) << ", h1 bound "
         << format_sci(l.h1.max_constant) << ", min A(v,v) " << format_sci(l.coercivity.min_value)
         << ", min A(v,v)/(eps |v|_h^2) " << format_sci(l.coercivity.min_ratio) << '\n';
    csv << l.n << ',' << fmt("%.17g", l.mt.max_constant) << ','
        << fmt("%.17g", l.sobolev.max_constant) << ',' << fmt("%.17g", l.h1.max_constant) << ','
        << fmt("%.17g", l.coercivity.min_value) << ',' << fmt("%.17g", l.coercivity.min_ratio)
        << ',' << l.coercivity.negative << '\n';
  }
  auto fail = [&](const std::string& what) {
    out.passed = false;
    text << "FAIL " << what << '\n';
  };
  auto check_growth = [&](const char* name, auto get) {
    for (std::size_t i = 1; i < levels.size(); ++i) {
      const double prev = get(levels[i - 1]).max_constant;
      const double cur = get(levels[i]).max_constant;
      if (!std::isfinite(cur) || cur > 1.5 * prev + 1e-12)
        fail(std::string(name) + " at level n = " + std::to_string(levels[i].n) + ": constant " +
             format_sci(cur) + " exceeds 1.5 x " + format_sci(prev) + " (worst seed " +
             std::to_string(get(levels[i]).worst_seed) + ")");
    }
  };
  check_growth("discrete Miranda-Talenti", [](const Level& l) -> const InequalityReport& { return l.mt; });
  check_growth("discrete Sobolev", [](const Level& l) -> const InequalityReport& { return l.sobolev; });
  check_growth("H1 bound", [](const Level& l) -> const InequalityReport& { return l.h1; });
  for (const auto& l : levels) {
    if (l.mt.violations > 0)
      fail("discrete Miranda-Talenti at level n = " + std::to_string(l.n) + ": " +
           std::to_string(l.mt.violations) + " jump-free samples with |D^2 v| > |Lap v|");
    if (l.coercivity.negative > 0)
      fail("coercivity at level n = " + std::to_string(l.n) + ": " +
           std::to_string(l.coercivity.negative) + " of " + std::to_string(l.coercivity.samples) +
           " samples with A(v,v) <= 0 (worst seed " + std::to_string(l.coercivity.worst_seed) +
           ", A = " + format_sci(l.coercivity.min_value) + ")");
  }
  text << (out.passed ? "PASS" : "FAIL") << " verify\n";
  out.files.push_back(write_file(opts.out_dir, "verify.csv", csv.str()));
  out.text = text.str();
  return out;
}

}  // namespace maviscid
