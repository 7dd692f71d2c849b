#pragma once

#include <functional>
#include <vector>

#include "maviscid/assembly.hpp"

namespace maviscid {

/// Field that may depend on the regularization parameter.
using EpsField = std::function<double(const Vec3& x, double epsilon)>;

/// Data of the regularized problem: source f, Dirichlet data g and the
/// Laplacian boundary trace psi.
struct ProblemData {
  EpsField f;
  ScalarField g;
  EpsField psi;

  ScalarField f_at(double eps) const;
  ScalarField psi_at(double eps) const;
};

/// Direct sparse LU with partial pivoting. Throws Error(singular) naming the
/// offending pivot when the factorization breaks down.
std::vector<double> sparse_solve(const SparseMatrix& a, std::span<const double> b);

struct NewtonConfig {
  double abs_tol = 1e-10;
  int max_iters = 50;
  double damping_factor = 0.5;
  int max_halvings = 20;
  /// Stop once the Newton increment satisfies |du|_inf <= step_tol * max(1, |u|_inf):
  /// the residual then sits at its round-off floor, which grows with the penalty.
  double step_tol = 1e-9;
  /// When backtracking cannot reduce the residual but the full increment is
  /// below stall_tol * max(1, |u|_inf), the iterate is accepted as converged.
  double stall_tol = 1e-8;
  /// Strictly decreasing epsilon ladder; empty selects the default halving
  /// ladder in continuation_solve.
  std::vector<double> continuation_schedule;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  double wall_seconds = 0.0;
  /// Epsilon values solved in order (continuation only).
  std::vector<double> ladder;
  std::vector<int> iterations_per_rung;
  /// Final Newton increment (infinity norm) and whether the increment test,
  /// rather than abs_tol, ended the iteration.
  double last_step = 0.0;
  bool stopped_on_step = false;
};

/// Raised by the Newton drivers; carries the partial report.
class SolveError : public Error {
 public:
  SolveError(ErrorCode code, const std::string& what, SolveReport report)
      : Error(code, what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct NewtonResult {
  FeFunction solution;
  SolveReport report;
};

/// Damped Newton iteration for the nonlinear interior-penalty scheme.
/// `initial` must carry the Dirichlet values.
NewtonResult newton_solve(const Assembler& assembler, const ProblemData& data,
                          const PenaltyParams& params, const NewtonConfig& config,
                          const FeFunction& initial);

/// Default ladder: max(0.5, target), halving while above target, ending at
/// target.
std::vector<double> default_ladder(double eps_target);

/// Convex seed: interior dofs from |x - c|^2/2 shifted below the data,
/// boundary dofs from g.
FeFunction convex_seed(std::shared_ptr<const FeSpace> space, const ScalarField& g);

/// Solves for every epsilon on the ladder, warm starting each rung.
NewtonResult continuation_solve(const Assembler& assembler,
                                const ProblemData& data, double sigma,
                                WeightMode mode, double eps_target,
                                const NewtonConfig& config,
                                const FeFunction* initial = nullptr);

}  // namespace maviscid
