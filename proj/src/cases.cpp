#include "maviscid/cases.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace maviscid {

namespace {

double radius2(const Vec3& x) { return dot(x, x); }

// u = exp(|x|^2 / 2).
ExactSolution exponential_solution(int dim) {
  ExactSolution s;
  s.limit = true;
  s.jet = [dim](const Vec3& x) {
    Jet j;
    Vec3 y{};
    for (int a = 0; a < dim; ++a) y[a] = x[a];
    const double u = std::exp(0.5 * radius2(y));
    j.value = u;
    for (int a = 0; a < dim; ++a) {
      j.gradient[a] = u * y[a];
      for (int b = 0; b < dim; ++b) j.hessian[a][b] = u * ((a == b ? 1.0 : 0.0) + y[a] * y[b]);
    }
    return j;
  };
  s.bilaplacian = [dim](const Vec3& x) {
    Vec3 y{};
    for (int a = 0; a < dim; ++a) y[a] = x[a];
    const double r2 = radius2(y);
    const double w = dim + r2;
    return std::exp(0.5 * r2) * (w * w + 4.0 * r2 + 2.0 * dim);
  };
  return s;
}

// u = (x^4 + y^4) / 2.
ExactSolution quartic_2d() {
  ExactSolution s;
  s.jet = [](const Vec3& x) {
    Jet j;
    j.value = 0.5 * (std::pow(x[0], 4) + std::pow(x[1], 4));
    j.gradient = {2.0 * std::pow(x[0], 3), 2.0 * std::pow(x[1], 3), 0.0};
    j.hessian[0][0] = 6.0 * x[0] * x[0];
    j.hessian[1][1] = 6.0 * x[1] * x[1];
    return j;
  };
  s.bilaplacian = [](const Vec3&) { return 24.0; };
  return s;
}

// u = (x^4 + y^2 + z^4) / 2.
ExactSolution quartic_3d() {
  ExactSolution s;
  s.jet = [](const Vec3& x) {
    Jet j;
    j.value = 0.5 * (std::pow(x[0], 4) + x[1] * x[1] + std::pow(x[2], 4));
    j.gradient = {2.0 * std::pow(x[0], 3), x[1], 2.0 * std::pow(x[2], 3)};
    j.hessian[0][0] = 6.0 * x[0] * x[0];
    j.hessian[1][1] = 1.0;
    j.hessian[2][2] = 6.0 * x[2] * x[2];
    return j;
  };
  s.bilaplacian = [](const Vec3&) { return 24.0; };
  return s;
}

EpsField constant_eps_field(double v) {
  return [v](const Vec3&, double) { return v; };
}

EpsField epsilon_field() {
  return [](const Vec3&, double eps) { return eps; };
}

const std::vector<double> kEpsLadder{0.5,  0.25,   0.125, 0.05,
                                     0.025, 0.0125, 0.005, 0.0025};

}  // namespace

ExperimentSpec builtin_case(const std::string& id) {
  ExperimentSpec s;
  s.id = id;
  s.f_source = s.g_source = s.psi_source = s.exact_source = "case:" + id;
  if (id == "I" || id == "IV") {
    const int dim = id == "I" ? 2 : 3;
    s.dim = dim;
    s.exact = exponential_solution(dim);
    // det(D^2 u) = (1 + |x|^2) exp(dim |x|^2 / 2).
    s.data.f = [dim](const Vec3& x, double) {
      const double r2 = radius2(x);
      return (1.0 + r2) * std::exp(0.5 * dim * r2);
    };
    s.data.g = [jet = s.exact->jet](const Vec3& x) { return jet(x).value; };
    s.data.psi = epsilon_field();
    s.degrees = {2, 3};
    s.h_list = {dim == 2 ? 1.0 / 64 : 1.0 / 8};
    s.eps_list = kEpsLadder;
    s.epsilon = 0.005;
  } else if (id == "II") {
    s.dim = 2;
    s.exact = quartic_2d();
    s.data.f = [](const Vec3& x, double eps) {
      return 36.0 * x[0] * x[0] * x[1] * x[1] - 24.0 * eps;
    };
    s.data.g = [jet = s.exact->jet](const Vec3& x) { return jet(x).value; };
    s.data.psi = [](const Vec3& x, double) { return 6.0 * x[0] * x[0] + 6.0 * x[1] * x[1]; };
    s.degrees = {2, 3};
    s.h_list = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    s.epsilon = 0.01;
  } else if (id == "V") {
    s.dim = 3;
    s.exact = quartic_3d();
    s.data.f = [](const Vec3& x, double eps) {
      return 36.0 * x[0] * x[0] * x[2] * x[2] - 24.0 * eps;
    };
    s.data.g = [jet = s.exact->jet](const Vec3& x) { return jet(x).value; };
    s.data.psi = [](const Vec3& x, double) {
      return 1.0 + 6.0 * x[0] * x[0] + 6.0 * x[2] * x[2];
    };
    s.degrees = {2, 3};
    s.h_list = {1.0 / 3, 1.0 / 6, 1.0 / 12};
    s.epsilon = 0.01;
  } else if (id == "III" || id == "VI") {
    s.dim = id == "III" ? 2 : 3;
    s.data.f = constant_eps_field(1.0);
    s.data.g = [](const Vec3&) { return 0.0; };
    s.data.psi = epsilon_field();
    s.degrees = {2};
    s.h_list = {s.dim == 2 ? 1.0 / 32 : 1.0 / 12};
    s.epsilon = 0.005;
    s.exact_source = "none";
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown case id '" + id + "'");
  }
  s.mode = WeightMode::plain;
  s.sigma = s.dim == 2 ? 10.0 : 100.0;
  return s;
}

double manufactured_data_mismatch(const ExperimentSpec& spec, double epsilon,
                                  int points, std::uint64_t seed) {
  if (!spec.exact) return 0.0;
  const auto& ex = *spec.exact;
  const int dim = spec.dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    Vec3 x{};
    for (int a = 0; a < dim; ++a) x[a] = unit(rng);
    const Jet j = ex.jet(x);
    const double det = det_and_cofactor(j.hessian, dim).det;
    const double f_expected = ex.limit ? det : -epsilon * ex.bilaplacian(x) + det;
    worst = std::max(worst, rel(spec.data.f(x, epsilon), f_expected));

    // Boundary point: pin one random coordinate to 0 or 1.
    Vec3 b{};
    for (int a = 0; a < dim; ++a) b[a] = unit(rng);
    const int axis = std::min(dim - 1, int(unit(rng) * dim));
    b[axis] = unit(rng) < 0.5 ? 0.0 : 1.0;
    const Jet jb = ex.jet(b);
    worst = std::max(worst, rel(spec.data.g(b), jb.value));
    const double psi_expected = ex.limit ? epsilon : trace(jb.hessian, dim);
    worst = std::max(worst, rel(spec.data.psi(b, epsilon), psi_expected));
  }
  return worst;
}

void check_manufactured_data(const ExperimentSpec& spec, double epsilon) {
  const double m = manufactured_data_mismatch(spec, epsilon);
  if (m > 1e-10) {
    std::ostringstream os;
    os << "case " << spec.id << ": data inconsistent with the exact solution "
       << "(relative mismatch " << m << ")";
    throw ContractError(os.str());
  }
}

double parse_number(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  require(!s.empty(), "empty number");
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double num = std::stod(s.substr(0, slash), &used);
      require(used == slash, "bad number '" + raw + "'");
      const std::string den_s = s.substr(slash + 1);
      const double den = std::stod(den_s, &used);
      require(used == den_s.size() && den != 0.0, "bad number '" + raw + "'");
      return num / den;
    }
    const double v = std::stod(s, &used);
    require(used == s.size(), "bad number '" + raw + "'");
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::invalid_argument, "bad number '" + raw + "'");
  }
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_number(item));
  }
  return out;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Resolves a data source description into the matching field of `target`.
void resolve_field(const std::string& key, const std::string& source,
                   ExperimentSpec& target) {
  if (source.rfind("case:", 0) == 0) {
    const ExperimentSpec base = builtin_case(source.substr(5));
    if (key == "f") target.data.f = base.data.f;
    if (key == "g") target.data.g = base.data.g;
    if (key == "psi") target.data.psi = base.data.psi;
    if (key == "exact") target.exact = base.exact;
    return;
  }
  if (key == "exact") {
    require(source == "none", "exact must be 'none' or 'case:<id>'");
    target.exact.reset();
    return;
  }
  if (key == "psi" && source == "epsilon") {
    target.data.psi = epsilon_field();
    return;
  }
  std::string num = source.rfind("const:", 0) == 0 ? source.substr(6) : source;
  const double v = parse_number(num);
  if (key == "f") target.data.f = constant_eps_field(v);
  if (key == "g") target.data.g = [v](const Vec3&) { return v; };
  if (key == "psi") target.data.psi = constant_eps_field(v);
}

}  // namespace

void write_spec(std::ostream& os, const ExperimentSpec& spec) {
  os << "# experiment specification\n";
  os << "case = " << spec.id << '\n';
  os << "dim = " << spec.dim << '\n';
  os << "degrees = ";
  for (std::size_t i = 0; i < spec.degrees.size(); ++i) os << (i ? "," : "") << spec.degrees[i];
  os << '\n';
  os << "h_list = " << join(spec.h_list) << '\n';
  os << "eps_list = " << join(spec.eps_list) << '\n';
  os << "epsilon = " << join({spec.epsilon}) << '\n';
  os << "sigma = " << join({spec.sigma}) << '\n';
  os << "weight_mode = " << to_string(spec.mode) << '\n';
  os << "f = " << spec.f_source << '\n';
  os << "g = " << spec.g_source << '\n';
  os << "psi = " << spec.psi_source << '\n';
  os << "exact = " << spec.exact_source << '\n';
}

ExperimentSpec read_spec(std::istream& is, bool require_data) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::invalid_argument,
                  "config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  ExperimentSpec spec;
  const std::string base = kv.count("case") ? kv["case"] : "custom";
  const bool builtin = base == "I" || base == "II" || base == "III" || base == "IV" ||
                       base == "V" || base == "VI";
  if (builtin) {
    spec = builtin_case(base);
  } else {
    spec.id = base;
    spec.f_source = spec.g_source = spec.psi_source = "";
    spec.exact_source = "none";
    spec.degrees = {2};
  }
  for (const auto& [key, value] : kv) {
    if (key == "case") continue;
    if (key == "dim") {
      spec.dim = static_cast<int>(parse_number(value));
      require(spec.dim == 2 || spec.dim == 3, "dim must be 2 or 3");
    } else if (key == "degrees" || key == "degree") {
      spec.degrees.clear();
      for (double d : parse_number_list(value)) spec.degrees.push_back(static_cast<int>(d));
    } else if (key == "h_list") {
      spec.h_list = parse_number_list(value);
    } else if (key == "eps_list") {
      spec.eps_list = parse_number_list(value);
    } else if (key == "epsilon") {
      spec.epsilon = parse_number(value);
    } else if (key == "sigma") {
      spec.sigma = parse_number(value);
    } else if (key == "weight_mode") {
      spec.mode = parse_weight_mode(value);
    } else if (key == "f" || key == "g" || key == "psi" || key == "exact") {
      resolve_field(key, value, spec);
      if (key == "f") spec.f_source = value;
      if (key == "g") spec.g_source = value;
      if (key == "psi") spec.psi_source = value;
      if (key == "exact") spec.exact_source = value;
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
    }
  }
  const bool complete = static_cast<bool>(spec.data.f) &&
                        static_cast<bool>(spec.data.g) &&
                        static_cast<bool>(spec.data.psi);
  const bool empty = !spec.data.f && !spec.data.g && !spec.data.psi;
  require(complete || (!require_data && empty),
          "config must define f, g and psi (or name a built-in case)");
  return spec;
}

ExperimentSpec read_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
  return read_spec(in);
}

}  // namespace maviscid
