#include "maviscid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace maviscid {

ErrorNorms error_norms(const JetField& exact, const FeFunction& uh) {
  const auto& sp = uh.space();
  const int dim = sp.dim();
  const int nloc = sp.dofs_per_cell();
  const int exactness =
      std::min(sp.assembly_exactness() + 2, max_cell_exactness(dim));
  const QuadratureRule rule = cell_quadrature(dim, exactness);
  const BarycentricTable table = sp.element().tabulate(rule.points);
  const auto& coeffs = uh.coefficients();
  std::vector<Jet> jets(nloc);
  double l2 = 0.0, g2 = 0.0, h2 = 0.0;
  for (Index c = 0; c < sp.mesh().num_cells(); ++c) {
    const auto& geo = sp.geometry(c);
    auto dofs = sp.cell_dofs(c);
    for (int q = 0; q < static_cast<int>(rule.size()); ++q) {
      sp.element().map_point(table, q, geo, jets);
      Jet e = exact(geo.to_physical(rule.points[q]));
      for (int b = 0; b < nloc; ++b) {
        const double cb = coeffs[dofs[b]];
        e.value -= cb * jets[b].value;
        for (int a = 0; a < dim; ++a) {
          e.gradient[a] -= cb * jets[b].gradient[a];
          for (int d = 0; d < dim; ++d) e.hessian[a][d] -= cb * jets[b].hessian[a][d];
        }
      }
      const double w = rule.weights[q] * std::abs(geo.det);
      l2 += w * e.value * e.value;
      g2 += w * dot(e.gradient, e.gradient);
      h2 += w * frobenius(e.hessian, e.hessian, dim);
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + g2), std::sqrt(l2 + g2 + h2)};
}

DiscreteNorms discrete_norms(const Assembler& assembler,
                             std::span<const double> coeffs) {
  const auto& sp = assembler.space();
  const int dim = sp.dim();
  const int nloc = sp.dofs_per_cell();
  const auto& rule = assembler.cell_rule();
  const auto& table = assembler.cell_table();
  std::vector<Jet> jets(nloc);
  DiscreteNorms out;
  double hess = 0.0, lap = 0.0, l2 = 0.0, g2 = 0.0, linf = 0.0;
  for (double v : coeffs) linf = std::max(linf, std::abs(v));
  for (Index c = 0; c < sp.mesh().num_cells(); ++c) {
    const auto& geo = sp.geometry(c);
    auto dofs = sp.cell_dofs(c);
    for (int q = 0; q < static_cast<int>(rule.size()); ++q) {
      sp.element().map_point(table, q, geo, jets);
      Jet v;
      for (int b = 0; b < nloc; ++b) {
        const double cb = coeffs[dofs[b]];
        v.value += cb * jets[b].value;
        for (int a = 0; a < dim; ++a) {
          v.gradient[a] += cb * jets[b].gradient[a];
          for (int d = 0; d < dim; ++d) v.hessian[a][d] += cb * jets[b].hessian[a][d];
        }
      }
      const double w = rule.weights[q] * std::abs(geo.det);
      const double lv = trace(v.hessian, dim);
      hess += w * frobenius(v.hessian, v.hessian, dim);
      lap += w * lv * lv;
      l2 += w * v.value * v.value;
      g2 += w * dot(v.gradient, v.gradient);
      linf = std::max(linf, std::abs(v.value));
    }
  }
  out.hessian = std::sqrt(hess);
  out.laplacian = std::sqrt(lap);
  out.jump = std::sqrt(assembler.jump_seminorm_squared(coeffs));
  out.h1 = std::sqrt(l2 + g2);
  out.linf = linf;
  return out;
}

double mesh_norm(const Assembler& assembler, const FeFunction& v) {
  const auto& sp = assembler.space();
  for (Index d : sp.boundary_dofs())
    if (v.coefficients()[d] != 0.0)
      throw ContractError("mesh_norm: function must vanish at boundary dofs");
  const auto n = discrete_norms(assembler, v.coefficients());
  return std::sqrt(n.hessian * n.hessian + n.jump * n.jump);
}

std::vector<double> random_interior_function(const FeSpace& space,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> c(space.num_dofs(), 0.0);
  for (Index d : space.interior_dofs()) c[d] = dist(rng);
  return c;
}

namespace {

template <class Ratio>
InequalityReport monte_carlo(const Assembler& assembler, int samples,
                             std::uint64_t seed, Ratio ratio) {
  require(samples >= 1, "samples must be >= 1");
  InequalityReport rep;
  rep.max_constant = 0.0;
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t sample_seed = seed + std::uint64_t(s);
    const auto c = random_interior_function(assembler.space(), sample_seed);
    const auto n = discrete_norms(assembler, c);
    std::optional<double> r = ratio(n, rep);
    if (!r) {
      ++rep.skipped;
      continue;
    }
    ++rep.samples;
    if (*r > rep.max_constant || rep.samples == 1) {
      rep.max_constant = std::max(rep.max_constant, *r);
      rep.worst_seed = sample_seed;
    }
  }
  return rep;
}

}  // namespace

InequalityReport verify_miranda_talenti(const Assembler& assembler, int samples,
                                        std::uint64_t seed) {
  return monte_carlo(assembler, samples, seed,
                     [](const DiscreteNorms& n, InequalityReport& rep) -> std::optional<double> {
                       const double excess = std::max(0.0, n.hessian - n.laplacian);
                       if (n.jump <= 1e-14 * std::max(1.0, n.hessian)) {
                         if (n.hessian > n.laplacian + 1e-12) ++rep.violations;
                         return std::nullopt;
                       }
                       return excess / n.jump;
                     });
}

InequalityReport verify_discrete_sobolev(const Assembler& assembler, int samples,
                                         std::uint64_t seed) {
  return monte_carlo(assembler, samples, seed,
                     [](const DiscreteNorms& n, InequalityReport&) -> std::optional<double> {
                       const double h = std::sqrt(n.hessian * n.hessian + n.jump * n.jump);
                       if (h == 0.0) return std::nullopt;
                       return n.linf / h;
                     });
}

InequalityReport verify_h1_bound(const Assembler& assembler, int samples,
                                 std::uint64_t seed) {
  return monte_carlo(assembler, samples, seed,
                     [](const DiscreteNorms& n, InequalityReport&) -> std::optional<double> {
                       const double h = std::sqrt(n.hessian * n.hessian + n.jump * n.jump);
                       if (h == 0.0) return std::nullopt;
                       return n.h1 / h;
                     });
}

CoercivityReport probe_coercivity(const Assembler& assembler,
                                  const CoefficientField& phi,
                                  const PenaltyParams& params, int samples,
                                  std::uint64_t seed) {
  require(samples >= 1, "samples must be >= 1");
  const SparseMatrix a = assembler.assemble_stabilized(phi, params);
  CoercivityReport rep;
  rep.min_value = INFINITY;
  rep.min_ratio = INFINITY;
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t sample_seed = seed + std::uint64_t(s);
    const auto c = random_interior_function(assembler.space(), sample_seed);
    const double value = a.bilinear(c, c);
    const auto n = discrete_norms(assembler, c);
    const double h2 = n.hessian * n.hessian + n.jump * n.jump;
    const double ratio = value / (params.epsilon * h2);
    ++rep.samples;
    if (!(value > 0.0)) ++rep.negative;
    if (value < rep.min_value) {
      rep.min_value = value;
      rep.worst_seed = sample_seed;
    }
    rep.min_ratio = std::min(rep.min_ratio, ratio);
  }
  return rep;
}

std::vector<RateRow> rate_table(
    const std::vector<std::pair<double, ErrorNorms>>& rows) {
  require(rows.size() >= 2, "rate_table needs at least two rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    require(rows[i].first < rows[i - 1].first && rows[i].first > 0.0,
            "rate_table parameters must be positive and strictly decreasing");
  auto order = [](double ep, double ec, double pp, double pc) -> std::optional<double> {
    if (!(ep > 0.0) || !(ec > 0.0)) return std::nullopt;
    return std::log(ep / ec) / std::log(pp / pc);
  };
  std::vector<RateRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    RateRow r;
    r.parameter = rows[i].first;
    r.errors = rows[i].second;
    if (i > 0) {
      const auto& p = rows[i - 1];
      r.order_l2 = order(p.second.l2, r.errors.l2, p.first, r.parameter);
      r.order_h1 = order(p.second.h1, r.errors.h1, p.first, r.parameter);
      r.order_h2 = order(p.second.h2_broken, r.errors.h2_broken, p.first, r.parameter);
    }
    out.push_back(r);
  }
  return out;
}

double fitted_slope(std::span<const double> parameters,
                    std::span<const double> errors) {
  require(parameters.size() == errors.size() && parameters.size() >= 2,
          "fitted_slope needs >= 2 paired values");
  const std::size_t n = parameters.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    require(parameters[i] > 0.0 && errors[i] > 0.0, "fitted_slope needs positive data");
    const double x = std::log(parameters[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string format_order(const std::optional<double>& v) {
  if (!v) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace maviscid
