#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maviscid/analysis.hpp"
#include "maviscid/solve.hpp"

namespace maviscid {

/// Exact solution with the derivatives needed to manufacture data.
struct ExactSolution {
  JetField jet;
  ScalarField bilaplacian;
  /// True when u solves det(D^2 u) = f itself (the eps -> 0 limit), so that
  /// errors are measured against the limit and psi is the constant eps.
  bool limit = false;
};

/// Declarative experiment: data, discretization lists and penalty settings.
struct ExperimentSpec {
  std::string id;
  int dim = 2;
  std::optional<ExactSolution> exact;
  ProblemData data;
  std::vector<int> degrees;
  std::vector<double> h_list;   // nominal mesh sizes 1/n
  std::vector<double> eps_list; // epsilon study (fixed h)
  double epsilon = 0.01;        // epsilon for h studies and single solves
  double sigma = 1.0;
  WeightMode mode = WeightMode::full;

  // Descriptions of the data for serialization ("case:II", "const:1", ...).
  std::string f_source, g_source, psi_source, exact_source;
};

/// Built-in experiments "I" ... "VI".
ExperimentSpec builtin_case(const std::string& id);

/// Largest relative mismatch between the stored data and the data derived
/// from the exact solution at `points` random interior and boundary points.
/// Returns 0 for cases without an exact solution.
double manufactured_data_mismatch(const ExperimentSpec& spec, double epsilon,
                                  int points = 20, std::uint64_t seed = 7);

/// Throws ContractError when the mismatch exceeds 1e-10.
void check_manufactured_data(const ExperimentSpec& spec, double epsilon);

/// Key-value text form ("key = value" lines, '#' comments).
void write_spec(std::ostream& os, const ExperimentSpec& spec);
/// Without `require_data`, a spec with neither a case nor f/g/psi is
/// accepted and carries empty data fields.
ExperimentSpec read_spec(std::istream& is, bool require_data = true);
ExperimentSpec read_spec_file(const std::string& path);

/// Parses "1/8", "0.125" etc.
double parse_number(const std::string& s);
std::vector<double> parse_number_list(const std::string& s);

}  // namespace maviscid
