#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maviscid/assembly.hpp"

namespace maviscid {

/// Analytic function with first and second derivatives.
using JetField = std::function<Jet(const Vec3&)>;

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2_broken = 0.0;
};

/// Full L2, H1 and broken H2 norms of u - u_h by cell quadrature at the
/// assembly exactness + 2 (capped at the highest supported rule).
ErrorNorms error_norms(const JetField& exact, const FeFunction& uh);

/// Elementwise norms of a discrete function.
struct DiscreteNorms {
  double hessian = 0.0;    // ||D^2 v||_{L2(T_h)}
  double laplacian = 0.0;  // ||Lap v||_{L2(T_h)}
  double jump = 0.0;       // (sum_F h_F^-1 ||[grad v]||^2)^(1/2)
  double h1 = 0.0;         // ||v||_{H1}
  double linf = 0.0;       // max over dofs and quadrature points
};
DiscreteNorms discrete_norms(const Assembler& assembler,
                             std::span<const double> coeffs);

/// ||v||_h = (||D^2 v||^2 + sum_F h_F^-1 ||[grad v]||^2)^(1/2). v must vanish
/// at boundary dofs.
double mesh_norm(const Assembler& assembler, const FeFunction& v);

/// iid uniform(-1, 1) on interior dofs, zero on the boundary.
std::vector<double> random_interior_function(const FeSpace& space,
                                             std::uint64_t seed);

struct InequalityReport {
  double max_constant = 0.0;
  std::uint64_t worst_seed = 0;
  int samples = 0;
  int skipped = 0;
  /// Samples violating a direct check (zero-jump Miranda-Talenti case).
  int violations = 0;
};

/// max over samples of (||D^2 v|| - ||Lap v||)_+ / jump seminorm.
InequalityReport verify_miranda_talenti(const Assembler& assembler, int samples,
                                        std::uint64_t seed);

/// max over samples of ||v||_inf / ||v||_h.
InequalityReport verify_discrete_sobolev(const Assembler& assembler, int samples,
                                         std::uint64_t seed);

/// max over samples of ||v||_H1 / ||v||_h.
InequalityReport verify_h1_bound(const Assembler& assembler, int samples,
                                 std::uint64_t seed);

struct CoercivityReport {
  double min_value = 0.0;          // min A(v, v)
  double min_ratio = 0.0;          // min A(v, v) / (eps ||v||_h^2)
  int negative = 0;                // samples with A(v, v) <= 0
  std::uint64_t worst_seed = 0;
  int samples = 0;
};

/// Monte-Carlo probe of A_h^sigma(v, v) over random v in V_h^0.
CoercivityReport probe_coercivity(const Assembler& assembler,
                                  const CoefficientField& phi,
                                  const PenaltyParams& params, int samples,
                                  std::uint64_t seed);

struct RateRow {
  double parameter = 0.0;
  ErrorNorms errors;
  std::optional<double> order_l2, order_h1, order_h2;
};

/// log(e_prev / e_cur) / log(p_prev / p_cur) between consecutive rows; orders
/// are omitted when an error is not positive.
std::vector<RateRow> rate_table(
    const std::vector<std::pair<double, ErrorNorms>>& rows);

/// Least-squares slope of log(error) against log(parameter).
double fitted_slope(std::span<const double> parameters,
                    std::span<const double> errors);

std::string format_sci(double v);
std::string format_order(const std::optional<double>& v);

}  // namespace maviscid
