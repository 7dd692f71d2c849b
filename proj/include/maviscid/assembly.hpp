#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "maviscid/elements.hpp"
#include "maviscid/sparse.hpp"

namespace maviscid {

/// Penalty weight in front of sum_F h_F^-1 (jump grad v, jump grad w):
/// full = sigma (eps + eps^-3), reduced = sigma (eps + eps^-2),
/// plain = sigma eps.
enum class WeightMode { full, reduced, plain };

WeightMode parse_weight_mode(const std::string& s);
std::string to_string(WeightMode m);

struct PenaltyParams {
  double sigma = 1.0;
  double epsilon = 1.0;
  WeightMode mode = WeightMode::full;

  double weight() const;
  void validate() const;
};

/// Symmetric matrix field evaluated per cell at a physical point; ref_point
/// is the same point in the cell's reference coordinates.
using CoefficientField =
    std::function<Mat3(Index cell, const Vec3& ref_point, const Vec3& x)>;

CoefficientField constant_field(const Mat3& m);
/// cof(D^2 u_h), evaluated elementwise.
CoefficientField cofactor_field(const FeFunction& u);

/// Dirichlet trace g and Laplacian trace psi.
struct BoundaryData {
  ScalarField g;
  ScalarField psi;
};

/// det(H) and cof(H) for the leading dim x dim block.
struct DetCof {
  double det = 0.0;
  Mat3 cof{};
};
DetCof det_and_cofactor(const Mat3& h, int dim);

struct AssemblyOptions {
  /// Swap the roles of K+ and K- on every interior face (and negate n+).
  /// Every assembled quantity is invariant under this relabelling.
  bool swap_face_sides = false;
  /// Cell quadrature exactness; 0 selects FeSpace::assembly_exactness().
  int cell_exactness = 0;
};

/// Assembler for the interior-penalty forms on one FeSpace. Precomputes the
/// sparsity pattern and face traces once, so repeated Newton assemblies only
/// pay for the cell kernels.
///
/// Conventions: matrices are indexed [test][trial] over all dofs; vectors
/// have one entry per dof with boundary entries zeroed where stated.
class Assembler {
 public:
  explicit Assembler(std::shared_ptr<const FeSpace> space,
                     AssemblyOptions options = {});

  const FeSpace& space() const { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const { return space_; }

  /// A_h^sigma(v, w) = eps(Lap v, Lap w) - eps sum_F ({Lap v}, [grad w])
  ///   - eps sum_F ({Lap w}, [grad v]) - (Phi : D^2 v, w)
  ///   + weight sum_F h_F^-1 ([grad v], [grad w]).
  /// Row = test w, column = trial v. Not symmetric in general.
  SparseMatrix assemble_stabilized(const CoefficientField& phi,
                                   const PenaltyParams& params) const;

  /// Same form without the coefficient term (symmetric).
  SparseMatrix assemble_biharmonic(const PenaltyParams& params) const;

  /// <phi, w_i> + eps (psi, grad w_i . n)_{boundary}; boundary rows zeroed.
  std::vector<double> assemble_linearized_rhs(const ScalarField& source,
                                              const ScalarField& psi,
                                              const PenaltyParams& params) const;

  /// Residual of the nonlinear scheme,
  /// R_i = -eps(Lap u, Lap v_i) + (det D^2 u, v_i) - b_h(u, v_i) - (f, v_i)
  ///       + eps (psi, grad v_i . n)_{boundary},
  /// boundary rows zeroed. u must match g at boundary dofs.
  std::vector<double> assemble_residual(const FeFunction& u,
                                        const ScalarField& f,
                                        const BoundaryData& data,
                                        const PenaltyParams& params) const;

  /// Frechet derivative of the residual; J = -A_h^sigma with
  /// Phi = cof(D^2 u). Rows/columns over all dofs.
  SparseMatrix assemble_jacobian(const FeFunction& u,
                                 const PenaltyParams& params) const;

  /// Same as assemble_residual without the Dirichlet contract check.
  std::vector<double> residual_unchecked(const FeFunction& u,
                                         const ScalarField& f,
                                         const ScalarField& psi,
                                         const PenaltyParams& params) const;

  /// Sum_F h_F^-1 ||[grad v]||^2_F over interior faces.
  double jump_seminorm_squared(std::span<const double> coeffs) const;

  /// Per-face traces, exposed for the analysis routines and tests.
  struct FaceTrace {
    Index face = -1;
    double h = 0.0;
    std::vector<double> weights;  // physical weights (|F| included)
    // [q][side * nloc + b]: jump contribution and half-Laplacian of basis b
    // of side 0 (K+) or 1 (K-).
    std::vector<double> jump;
    std::vector<double> half_lap;
    std::array<std::span<const Index>, 2> dofs;
  };
  const std::vector<FaceTrace>& face_traces() const { return faces_; }

  struct BoundaryTrace {
    Index cell = -1;
    std::vector<Vec3> points;
    std::vector<double> weights;
    std::vector<double> normal_derivative;  // [q * nloc + b]
  };
  const std::vector<BoundaryTrace>& boundary_traces() const { return boundary_; }

  const QuadratureRule& cell_rule() const { return cell_rule_; }
  const BarycentricTable& cell_table() const { return cell_table_; }

 private:
  SparseMatrix empty_matrix() const;
  void build_fixed_parts();
  SparseMatrix combine_fixed(double eps, double weight) const;
  // Adds -(coef : D^2 v_j, v_i) with coef = phi or, when phi is empty, the
  // cofactor of the Hessian of `u`.
  void add_coefficient_term(SparseMatrix& m, const CoefficientField& phi,
                            const std::vector<double>* u) const;
  void check_dirichlet(const FeFunction& u, const ScalarField& g) const;

  std::shared_ptr<const FeSpace> space_;
  AssemblyOptions options_;
  QuadratureRule cell_rule_;
  BarycentricTable cell_table_;
  std::vector<std::vector<Index>> pattern_;
  std::vector<FaceTrace> faces_;
  std::vector<BoundaryTrace> boundary_;
  // Epsilon-free pieces on the common pattern: (Lap v, Lap w), the two
  // average/jump face terms and sum_F h_F^-1 ([grad v], [grad w]).
  SparseMatrix laplace_, face_average_, face_penalty_;
};

/// Boundary dof values and interior index set for Dirichlet data g.
struct DirichletSplit {
  std::vector<Index> boundary_dofs;
  std::vector<double> boundary_values;
  std::vector<Index> interior_dofs;
};
DirichletSplit apply_dirichlet(const FeSpace& space, const ScalarField& g);

}  // namespace maviscid
