#include "maviscid/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace maviscid {

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "full") return WeightMode::full;
  if (s == "reduced") return WeightMode::reduced;
  if (s == "plain") return WeightMode::plain;
  throw Error(ErrorCode::invalid_argument, "unknown weight mode '" + s + "'");
}

std::string to_string(WeightMode m) {
  switch (m) {
    case WeightMode::full: return "full";
    case WeightMode::reduced: return "reduced";
    case WeightMode::plain: return "plain";
  }
  return "full";
}

double PenaltyParams::weight() const {
  const double e = epsilon;
  switch (mode) {
    case WeightMode::full: return sigma * (e + 1.0 / (e * e * e));
    case WeightMode::reduced: return sigma * (e + 1.0 / (e * e));
    case WeightMode::plain: return sigma * e;
  }
  return 0.0;
}

void PenaltyParams::validate() const {
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be > 0");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be >= 0");
}

DetCof det_and_cofactor(const Mat3& h, int dim) {
  DetCof out;
  if (dim == 2) {
    out.det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    out.cof[0][0] = h[1][1];
    out.cof[0][1] = -h[1][0];
    out.cof[1][0] = -h[0][1];
    out.cof[1][1] = h[0][0];
    return out;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
      const int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
      out.cof[i][j] = h[r0][c0] * h[r1][c1] - h[r0][c1] * h[r1][c0];
    }
  out.det = h[0][0] * out.cof[0][0] + h[0][1] * out.cof[0][1] +
            h[0][2] * out.cof[0][2];
  return out;
}

CoefficientField constant_field(const Mat3& m) {
  return [m](Index, const Vec3&, const Vec3&) { return m; };
}

CoefficientField cofactor_field(const FeFunction& u) {
  return [u](Index cell, const Vec3& ref, const Vec3&) {
    return det_and_cofactor(u.eval(cell, ref).hessian, u.space().dim()).cof;
  };
}

namespace {

// Map reference points of the (dim-1)-simplex onto a face.
Vec3 face_point(int dim, const std::array<Vec3, 3>& v, const Vec3& ref) {
  Vec3 x = v[0];
  for (int j = 1; j < dim; ++j)
    for (int a = 0; a < 3; ++a) x[a] += ref[j - 1] * (v[j][a] - v[0][a]);
  return x;
}

double face_measure(int dim, const std::array<Vec3, 3>& v) {
  const Vec3 a = sub(v[1], v[0]);
  if (dim == 2) return std::sqrt(dot(a, a));
  const Vec3 c = cross(a, sub(v[2], v[0]));
  return std::sqrt(dot(c, c));  // = 2 |F|, matching the unit reference area 1/2
}

}  // namespace

Assembler::Assembler(std::shared_ptr<const FeSpace> space,
                     AssemblyOptions options)
    : space_(std::move(space)), options_(options) {
  const auto& sp = *space_;
  const auto& mesh = sp.mesh();
  const auto& el = sp.element();
  const int dim = sp.dim();
  const int nloc = sp.dofs_per_cell();
  const int exact = options_.cell_exactness > 0 ? options_.cell_exactness
                                                : sp.assembly_exactness();
  cell_rule_ = cell_quadrature(dim, std::min(exact, max_cell_exactness(dim)));
  cell_table_ = el.tabulate(cell_rule_.points);
  const QuadratureRule frule = face_quadrature(dim, sp.face_exactness());

  // Sparsity: cell couplings plus the two-cell patches of interior faces.
  pattern_.assign(sp.num_dofs(), {});
  auto couple = [&](std::span<const Index> a, std::span<const Index> b) {
    for (Index r : a) pattern_[r].insert(pattern_[r].end(), b.begin(), b.end());
  };
  for (Index c = 0; c < mesh.num_cells(); ++c) couple(sp.cell_dofs(c), sp.cell_dofs(c));
  for (const auto& f : mesh.interior_faces()) {
    couple(sp.cell_dofs(f.plus_cell), sp.cell_dofs(f.minus_cell));
    couple(sp.cell_dofs(f.minus_cell), sp.cell_dofs(f.plus_cell));
  }
  for (auto& row : pattern_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  std::vector<Jet> jets(nloc);
  faces_.reserve(mesh.interior_faces().size());
  for (Index fi = 0; fi < static_cast<Index>(mesh.interior_faces().size()); ++fi) {
    const auto& f = mesh.interior_faces()[fi];
    std::array<Vec3, 3> fv{};
    for (int i = 0; i < dim; ++i) fv[i] = mesh.vertex(f.vertex_ids[i]);
    const double measure = face_measure(dim, fv);
    FaceTrace tr;
    tr.face = fi;
    tr.h = f.diameter;
    const int nq = static_cast<int>(frule.size());
    tr.weights.resize(nq);
    tr.jump.assign(std::size_t(nq) * 2 * nloc, 0.0);
    tr.half_lap.assign(std::size_t(nq) * 2 * nloc, 0.0);
    std::array<Index, 2> cells{f.plus_cell, f.minus_cell};
    Vec3 n = f.normal_plus;
    if (options_.swap_face_sides) {
      std::swap(cells[0], cells[1]);
      for (auto& c : n) c = -c;
    }
    for (int s = 0; s < 2; ++s) tr.dofs[s] = sp.cell_dofs(cells[s]);
    for (int q = 0; q < nq; ++q) {
      tr.weights[q] = frule.weights[q] * measure;
      const Vec3 x = face_point(dim, fv, frule.points[q]);
      for (int s = 0; s < 2; ++s) {
        const auto& geo = sp.geometry(cells[s]);
        const Vec3 ref = geo.to_reference(x);
        const auto table = el.tabulate(std::span<const Vec3>(&ref, 1));
        el.map_point(table, 0, geo, jets);
        const double sgn = s == 0 ? 1.0 : -1.0;
        for (int b = 0; b < nloc; ++b) {
          const std::size_t idx = (std::size_t(q) * 2 + s) * nloc + b;
          tr.jump[idx] = sgn * dot(jets[b].gradient, n);
          tr.half_lap[idx] = 0.5 * trace(jets[b].hessian, dim);
        }
      }
    }
    faces_.push_back(std::move(tr));
  }

  for (const auto& f : mesh.boundary_faces()) {
    std::array<Vec3, 3> fv{};
    for (int i = 0; i < dim; ++i) fv[i] = mesh.vertex(f.vertex_ids[i]);
    const double measure = face_measure(dim, fv);
    BoundaryTrace tr;
    tr.cell = f.cell;
    const auto& geo = sp.geometry(f.cell);
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const Vec3 x = face_point(dim, fv, frule.points[q]);
      tr.points.push_back(x);
      tr.weights.push_back(frule.weights[q] * measure);
      const Vec3 ref = geo.to_reference(x);
      const auto table = el.tabulate(std::span<const Vec3>(&ref, 1));
      el.map_point(table, 0, geo, jets);
      for (int b = 0; b < nloc; ++b)
        tr.normal_derivative.push_back(dot(jets[b].gradient, f.normal));
    }
    boundary_.push_back(std::move(tr));
  }
  build_fixed_parts();
}

SparseMatrix Assembler::empty_matrix() const {
  return SparseMatrix::from_pattern(space_->num_dofs(), space_->num_dofs(),
                                    pattern_);
}

void Assembler::build_fixed_parts() {
  const auto& sp = *space_;
  const int dim = sp.dim();
  const int nloc = sp.dofs_per_cell();
  laplace_ = empty_matrix();
  std::vector<Jet> jets(nloc);
  std::vector<double> local(std::size_t(nloc) * nloc), lap(nloc);
  for (Index c = 0; c < sp.mesh().num_cells(); ++c) {
    const auto& geo = sp.geometry(c);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < static_cast<int>(cell_rule_.size()); ++q) {
      sp.element().map_point(cell_table_, q, geo, jets);
      const double w = cell_rule_.weights[q] * std::abs(geo.det);
      for (int b = 0; b < nloc; ++b) lap[b] = trace(jets[b].hessian, dim);
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j) local[std::size_t(i) * nloc + j] += w * lap[i] * lap[j];
    }
    auto dofs = sp.cell_dofs(c);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j)
        laplace_.add_to(dofs[i], dofs[j], local[std::size_t(i) * nloc + j]);
  }

  face_average_ = empty_matrix();
  face_penalty_ = empty_matrix();
  const int n2 = 2 * nloc;
  std::vector<double> avg_local(std::size_t(n2) * n2), pen_local(std::size_t(n2) * n2);
  for (const auto& tr : faces_) {
    std::fill(avg_local.begin(), avg_local.end(), 0.0);
    std::fill(pen_local.begin(), pen_local.end(), 0.0);
    const int nq = static_cast<int>(tr.weights.size());
    for (int q = 0; q < nq; ++q) {
      const double* jmp = tr.jump.data() + std::size_t(q) * n2;
      const double* avg = tr.half_lap.data() + std::size_t(q) * n2;
      const double w = tr.weights[q];
      for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) {
          avg_local[std::size_t(i) * n2 + j] += w * (avg[j] * jmp[i] + avg[i] * jmp[j]);
          pen_local[std::size_t(i) * n2 + j] += w / tr.h * jmp[i] * jmp[j];
        }
    }
    for (int i = 0; i < n2; ++i) {
      const Index r = tr.dofs[i / nloc][i % nloc];
      for (int j = 0; j < n2; ++j) {
        const Index c = tr.dofs[j / nloc][j % nloc];
        face_average_.add_to(r, c, avg_local[std::size_t(i) * n2 + j]);
        face_penalty_.add_to(r, c, pen_local[std::size_t(i) * n2 + j]);
      }
    }
  }
}

SparseMatrix Assembler::combine_fixed(double eps, double weight) const {
  SparseMatrix m = laplace_;
  auto& v = m.values();
  const auto& avg = face_average_.values();
  const auto& pen = face_penalty_.values();
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = eps * v[k] - eps * avg[k] + weight * pen[k];
  return m;
}

void Assembler::add_coefficient_term(SparseMatrix& m, const CoefficientField& phi,
                                     const std::vector<double>* u) const {
  const auto& sp = *space_;
  const int dim = sp.dim();
  const int nloc = sp.dofs_per_cell();
  std::vector<Jet> jets(nloc);
  std::vector<double> local(std::size_t(nloc) * nloc), contr(nloc);
  for (Index c = 0; c < sp.mesh().num_cells(); ++c) {
    const auto& geo = sp.geometry(c);
    auto dofs = sp.cell_dofs(c);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < static_cast<int>(cell_rule_.size()); ++q) {
      sp.element().map_point(cell_table_, q, geo, jets);
      const double w = cell_rule_.weights[q] * std::abs(geo.det);
      Mat3 coef{};
      if (phi) {
        coef = phi(c, cell_rule_.points[q], geo.to_physical(cell_rule_.points[q]));
      } else {
        Mat3 hess{};
        for (int b = 0; b < nloc; ++b) {
          const double cb = (*u)[dofs[b]];
          for (int a = 0; a < dim; ++a)
            for (int e = 0; e < dim; ++e) hess[a][e] += cb * jets[b].hessian[a][e];
        }
        coef = det_and_cofactor(hess, dim).cof;
      }
      for (int b = 0; b < nloc; ++b) contr[b] = frobenius(coef, jets[b].hessian, dim);
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          local[std::size_t(i) * nloc + j] -= w * contr[j] * jets[i].value;
    }
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j)
        m.add_to(dofs[i], dofs[j], local[std::size_t(i) * nloc + j]);
  }
}

SparseMatrix Assembler::assemble_stabilized(const CoefficientField& phi,
                                            const PenaltyParams& params) const {
  params.validate();
  SparseMatrix m = combine_fixed(params.epsilon, params.weight());
  if (phi) add_coefficient_term(m, phi, nullptr);
  return m;
}

SparseMatrix Assembler::assemble_biharmonic(const PenaltyParams& params) const {
  return assemble_stabilized(nullptr, params);
}

std::vector<double> Assembler::assemble_linearized_rhs(
    const ScalarField& source, const ScalarField& psi,
    const PenaltyParams& params) const {
  params.validate();
  const auto& sp = *space_;
  const int nloc = sp.dofs_per_cell();
  std::vector<double> rhs(sp.num_dofs(), 0.0);
  std::vector<Jet> jets(nloc);
  for (Index c = 0; c < sp.mesh().num_cells(); ++c) {
    const auto& geo = sp.geometry(c);
    auto dofs = sp.cell_dofs(c);
    for (int q = 0; q < static_cast<int>(cell_rule_.size()); ++q) {
      sp.element().map_point(cell_table_, q, geo, jets);
      const double w = cell_rule_.weights[q] * std::abs(geo.det);
      const double fx = source(geo.to_physical(cell_rule_.points[q]));
      for (int i = 0; i < nloc; ++i) rhs[dofs[i]] += w * fx * jets[i].value;
    }
  }
  for (const auto& tr : boundary_) {
    auto dofs = sp.cell_dofs(tr.cell);
    for (std::size_t q = 0; q < tr.weights.size(); ++q) {
      const double val = params.epsilon * psi(tr.points[q]) * tr.weights[q];
      for (int i = 0; i < nloc; ++i) rhs[dofs[i]] += val * tr.normal_derivative[q * nloc + i];
    }
  }
  for (Index d : sp.boundary_dofs()) rhs[d] = 0.0;
  return rhs;
}

void Assembler::check_dirichlet(const FeFunction& u, const ScalarField& g) const {
  const auto& sp = *space_;
  for (Index d : sp.boundary_dofs()) {
    const double gv = g(sp.dof_coords()[d]);
    if (std::abs(u.coefficients()[d] - gv) > 1e-10 * std::max(1.0, std::abs(gv)))
      throw ContractError("u_h violates the Dirichlet data at dof " +
                          std::to_string(d));
  }
}

std::vector<double> Assembler::residual_unchecked(const FeFunction& u,
                                                  const ScalarField& f,
                                                  const ScalarField& psi,
                                                  const PenaltyParams& params) const {
  params.validate();
  const auto& sp = *space_;
  const int dim = sp.dim();
  const int nloc = sp.dofs_per_cell();
  const double eps = params.epsilon;
  const auto& coeffs = u.coefficients();
  std::vector<double> r(sp.num_dofs(), 0.0);
  std::vector<Jet> jets(nloc);
  for (Index c = 0; c < sp.mesh().num_cells(); ++c) {
    const auto& geo = sp.geometry(c);
    auto dofs = sp.cell_dofs(c);
    for (int q = 0; q < static_cast<int>(cell_rule_.size()); ++q) {
      sp.element().map_point(cell_table_, q, geo, jets);
      const double w = cell_rule_.weights[q] * std::abs(geo.det);
      Mat3 hess{};
      for (int b = 0; b < nloc; ++b) {
        const double cb = coeffs[dofs[b]];
        for (int a = 0; a < dim; ++a)
          for (int e = 0; e < dim; ++e) hess[a][e] += cb * jets[b].hessian[a][e];
      }
      const double det_u = det_and_cofactor(hess, dim).det;
      const double fx = f ? f(geo.to_physical(cell_rule_.points[q])) : 0.0;
      for (int i = 0; i < nloc; ++i)
        r[dofs[i]] += w * (det_u - fx) * jets[i].value;
    }
  }
  // -eps (Lap u, Lap v_i) - b_h(u, v_i).
  const SparseMatrix fixed = combine_fixed(eps, params.weight());
  const auto fu = fixed.multiply(coeffs);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= fu[i];
  if (psi) {
    for (const auto& tr : boundary_) {
      auto dofs = sp.cell_dofs(tr.cell);
      for (std::size_t q = 0; q < tr.weights.size(); ++q) {
        const double val = eps * psi(tr.points[q]) * tr.weights[q];
        for (int i = 0; i < nloc; ++i) r[dofs[i]] += val * tr.normal_derivative[q * nloc + i];
      }
    }
  }
  for (Index d : sp.boundary_dofs()) r[d] = 0.0;
  return r;
}

std::vector<double> Assembler::assemble_residual(const FeFunction& u,
                                                 const ScalarField& f,
                                                 const BoundaryData& data,
                                                 const PenaltyParams& params) const {
  if (data.g) check_dirichlet(u, data.g);
  return residual_unchecked(u, f, data.psi, params);
}

SparseMatrix Assembler::assemble_jacobian(const FeFunction& u,
                                          const PenaltyParams& params) const {
  params.validate();
  SparseMatrix a = combine_fixed(params.epsilon, params.weight());
  add_coefficient_term(a, nullptr, &u.coefficients());
  for (auto& v : a.values()) v = -v;
  return a;
}

double Assembler::jump_seminorm_squared(std::span<const double> coeffs) const {
  const int nloc = space_->dofs_per_cell();
  const int n2 = 2 * nloc;
  double total = 0.0;
  for (const auto& tr : faces_) {
    double face = 0.0;
    for (std::size_t q = 0; q < tr.weights.size(); ++q) {
      const double* jmp = tr.jump.data() + q * n2;
      double j = 0.0;
      for (int i = 0; i < n2; ++i) j += coeffs[tr.dofs[i / nloc][i % nloc]] * jmp[i];
      face += tr.weights[q] * j * j;
    }
    total += face / tr.h;
  }
  return total;
}

DirichletSplit apply_dirichlet(const FeSpace& space, const ScalarField& g) {
  DirichletSplit out;
  out.boundary_dofs = space.boundary_dofs();
  out.interior_dofs = space.interior_dofs();
  out.boundary_values.reserve(out.boundary_dofs.size());
  for (Index d : out.boundary_dofs) out.boundary_values.push_back(g(space.dof_coords()[d]));
  return out;
}

}  // namespace maviscid
