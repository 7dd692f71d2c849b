#include "maviscid/solve.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace maviscid {

ScalarField ProblemData::f_at(double eps) const {
  if (!f) return nullptr;
  return [fn = f, eps](const Vec3& x) { return fn(x, eps); };
}

ScalarField ProblemData::psi_at(double eps) const {
  if (!psi) return nullptr;
  return [fn = psi, eps](const Vec3& x) { return fn(x, eps); };
}

void NewtonConfig::validate() const {
  require(abs_tol > 0.0, "abs_tol must be > 0");
  require(max_iters >= 1, "max_iters must be >= 1");
  require(step_tol >= 0.0 && stall_tol >= 0.0, "step tolerances must be >= 0");
  require(damping_factor > 0.0 && damping_factor < 1.0,
          "damping factor must lie in (0, 1)");
  for (std::size_t i = 1; i < continuation_schedule.size(); ++i)
    require(continuation_schedule[i] < continuation_schedule[i - 1],
            "continuation schedule must be strictly decreasing");
}

std::vector<double> sparse_solve(const SparseMatrix& a, std::span<const double> b) {
  require(a.rows() == a.cols(), "sparse_solve: matrix must be square");
  require(static_cast<Index>(b.size()) == a.rows(), "sparse_solve: size mismatch");
  const Index n = a.rows();
  if (n == 0) return {};
  using EMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  std::vector<Eigen::Triplet<double, int>> trips;
  trips.reserve(a.nonzeros());
  for (Index r = 0; r < n; ++r)
    for (Index k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
      trips.emplace_back(int(r), int(a.col_index()[k]), a.values()[k]);
  EMat m(static_cast<int>(n), static_cast<int>(n));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

  Eigen::SparseLU<EMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) {
    std::string msg = lu.lastErrorMessage();
    // Eigen reports the 1-based elimination step that found no usable pivot.
    const auto pos = msg.find_last_of(' ');
    std::string step = pos == std::string::npos ? std::string() : msg.substr(pos + 1);
    throw Error(ErrorCode::singular,
                "sparse LU: numerically singular matrix, no pivot at elimination "
                "step " + step + " (" + msg + ")");
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::VectorXd x = lu.solve(rhs);
  // One step of iterative refinement.
  Eigen::VectorXd res = rhs - m * x;
  x += lu.solve(res);
  res = rhs - m * x;
  const double anorm = a.norm_inf();
  const double scale = anorm * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
  const double rel = scale > 0.0 ? res.lpNorm<Eigen::Infinity>() / scale : 0.0;
  if (!x.allFinite() || !(rel < 1e-10)) {
    std::ostringstream os;
    os << "sparse LU: numerically singular matrix (relative residual " << rel << ")";
    throw Error(ErrorCode::singular, os.str());
  }
  return {x.data(), x.data() + n};
}

namespace {

double interior_norm_inf(const std::vector<double>& r) {
  double m = 0.0;
  for (double v : r) {
    if (!std::isfinite(v)) return INFINITY;
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

NewtonResult newton_solve(const Assembler& assembler, const ProblemData& data,
                          const PenaltyParams& params, const NewtonConfig& config,
                          const FeFunction& initial) {
  config.validate();
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& space = assembler.space();
  const auto& interior = space.interior_dofs();
  const ScalarField f = data.f_at(params.epsilon);
  const ScalarField psi = data.psi_at(params.epsilon);
  BoundaryData bd{data.g, psi};

  FeFunction u = initial;
  SolveReport report;
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  auto residual = assembler.assemble_residual(u, f, bd, params);
  double rnorm = interior_norm_inf(residual);
  report.residual_history.push_back(rnorm);
  if (!std::isfinite(rnorm)) {
    report.wall_seconds = elapsed();
    throw SolveError(ErrorCode::not_converged,
                     "Newton: non-finite residual at the initial guess", report);
  }
  while (rnorm > config.abs_tol) {
    if (report.iterations >= config.max_iters) {
      report.wall_seconds = elapsed();
      std::ostringstream os;
      os << "Newton: no convergence in " << config.max_iters
         << " iterations (residual " << rnorm << ")";
      throw SolveError(ErrorCode::not_converged, os.str(), report);
    }
    const SparseMatrix jac =
        assembler.assemble_jacobian(u, params).restrict_to(interior, interior);
    std::vector<double> rhs(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) rhs[i] = -residual[interior[i]];
    std::vector<double> step;
    try {
      step = sparse_solve(jac, rhs);
    } catch (const Error& e) {
      report.wall_seconds = elapsed();
      throw SolveError(ErrorCode::singular,
                       std::string("Newton: singular Jacobian: ") + e.what(), report);
    }

    const double step_norm = interior_norm_inf(step);
    report.last_step = step_norm;
    const double u_norm = interior_norm_inf(u.coefficients());
    if (step_norm <= config.step_tol * std::max(1.0, u_norm)) {
      for (std::size_t i = 0; i < interior.size(); ++i)
        u.coefficients()[interior[i]] += step[i];
      residual = assembler.assemble_residual(u, f, bd, params);
      rnorm = interior_norm_inf(residual);
      ++report.iterations;
      report.residual_history.push_back(rnorm);
      report.stopped_on_step = true;
      break;
    }

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= config.max_halvings; ++halving) {
      FeFunction trial = u;
      for (std::size_t i = 0; i < interior.size(); ++i)
        trial.coefficients()[interior[i]] += t * step[i];
      auto trial_res = assembler.assemble_residual(trial, f, bd, params);
      const double trial_norm = interior_norm_inf(trial_res);
      if (trial_norm < rnorm) {
        u = std::move(trial);
        residual = std::move(trial_res);
        rnorm = trial_norm;
        accepted = true;
        break;
      }
      t *= config.damping_factor;
    }
    ++report.iterations;
    if (!accepted && step_norm <= config.stall_tol * std::max(1.0, u_norm)) {
      report.residual_history.push_back(rnorm);
      report.stopped_on_step = true;
      break;
    }
    if (!accepted) {
      report.wall_seconds = elapsed();
      std::ostringstream os;
      os << "Newton: damping floor reached after " << config.max_halvings
         << " step halvings (residual " << rnorm << ")";
      throw SolveError(ErrorCode::damping_floor, os.str(), report);
    }
    report.residual_history.push_back(rnorm);
  }
  report.converged = true;
  report.wall_seconds = elapsed();
  return {std::move(u), std::move(report)};
}

std::vector<double> default_ladder(double eps_target) {
  require(eps_target > 0.0, "eps_target must be > 0");
  std::vector<double> ladder;
  double e = std::max(0.5, eps_target);
  while (e > eps_target * (1.0 + 1e-12)) {
    ladder.push_back(e);
    e *= 0.5;
  }
  ladder.push_back(eps_target);
  return ladder;
}

FeFunction convex_seed(std::shared_ptr<const FeSpace> space, const ScalarField& g) {
  const auto& sp = *space;
  const int dim = sp.dim();
  Vec3 lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
  for (const auto& x : sp.dof_coords())
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], x[a]);
      hi[a] = std::max(hi[a], x[a]);
    }
  Vec3 c{};
  for (int a = 0; a < dim; ++a) c[a] = 0.5 * (lo[a] + hi[a]);
  auto q = [&](const Vec3& x) {
    const Vec3 d = sub(x, c);
    return 0.5 * dot(d, d);
  };
  double qmax = 0.0, gmean = 0.0;
  for (Index d : sp.boundary_dofs()) {
    qmax = std::max(qmax, q(sp.dof_coords()[d]));
    gmean += g(sp.dof_coords()[d]);
  }
  if (!sp.boundary_dofs().empty()) gmean /= double(sp.boundary_dofs().size());
  FeFunction u(space);
  for (Index d = 0; d < sp.num_dofs(); ++d) {
    const Vec3& x = sp.dof_coords()[d];
    u.coefficients()[d] = sp.is_boundary_dof(d) ? g(x) : q(x) - qmax + gmean;
  }
  return u;
}

NewtonResult continuation_solve(const Assembler& assembler,
                                const ProblemData& data, double sigma,
                                WeightMode mode, double eps_target,
                                const NewtonConfig& config,
                                const FeFunction* initial) {
  config.validate();
  require(eps_target > 0.0, "eps_target must be > 0");
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> ladder = config.continuation_schedule.empty()
                                   ? default_ladder(eps_target)
                                   : config.continuation_schedule;
  if (ladder.back() != eps_target) ladder.push_back(eps_target);

  FeFunction u = initial ? *initial : convex_seed(assembler.space_ptr(), data.g);
  SolveReport total;
  for (double eps : ladder) {
    PenaltyParams params{sigma, eps, mode};
    try {
      auto res = newton_solve(assembler, data, params, config, u);
      u = std::move(res.solution);
      total.iterations += res.report.iterations;
      total.iterations_per_rung.push_back(res.report.iterations);
      total.ladder.push_back(eps);
      total.last_step = res.report.last_step;
      total.stopped_on_step = res.report.stopped_on_step;
      total.residual_history.insert(total.residual_history.end(),
                                    res.report.residual_history.begin(),
                                    res.report.residual_history.end());
    } catch (const SolveError& e) {
      SolveReport partial = total;
      partial.iterations += e.report().iterations;
      partial.residual_history.insert(partial.residual_history.end(),
                                      e.report().residual_history.begin(),
                                      e.report().residual_history.end());
      std::ostringstream os;
      os << e.what() << " [epsilon = " << eps << "]";
      throw SolveError(e.code(), os.str(), partial);
    }
  }
  total.converged = true;
  total.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(u), std::move(total)};
}

}  // namespace maviscid
