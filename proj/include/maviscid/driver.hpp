#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maviscid/cases.hpp"

namespace maviscid {

/// Everything a command needs, after merging case defaults, the config file
/// and explicit settings.
struct RunOptions {
  ExperimentSpec spec;
  bool has_case = false;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool csv = true;
  bool md = true;
  int threads = 1;
  int samples = 200;
  std::vector<int> levels{4, 8, 16};  // verify: cells per axis
  bool dump_mesh = false;
  bool dump_matrix = false;
  NewtonConfig newton;
};

/// Collects settings as key/value strings. Explicit settings win over the
/// config file, which wins over the case defaults. Keys accept '-' or '_'.
class RunConfigBuilder {
 public:
  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
  RunOptions resolve() const;

 private:
  std::map<std::string, std::string> explicit_;
  std::map<std::string, std::string> file_;
};

/// Cells per axis for a nominal mesh size h = 1/n.
int cells_per_axis(double h);

struct ResultTable {
  int degree = 2;
  bool eps_study = false;  // parameter column is eps (else h)
  double fixed = 0.0;      // eps of an h-study or h of an eps-study
  std::vector<RateRow> rows;
};

/// Rows use 3 significant digits for errors; orders are computed from the
/// printed errors so that a parsed table reproduces them.
std::string format_table_csv(const ResultTable& t);
std::string format_table_md(const ResultTable& t, const std::string& case_id);
ResultTable parse_table_csv(const std::string& text);
/// Rounds errors to the printed precision and recomputes the orders.
ResultTable rounded(const ResultTable& t);

struct CommandResult {
  bool passed = true;
  std::string text;
  std::vector<std::string> files;
  std::vector<ResultTable> tables;
};

/// Error/order tables. Runs an eps study for each h when eps_list is set,
/// otherwise an h study at spec.epsilon. Throws SolveError (after writing the
/// rows computed so far) when a solve fails.
CommandResult cmd_convergence(const RunOptions& opts);

/// Single solve at the last h and the last eps (eps_list) or spec.epsilon;
/// writes the dof dump and slice/grid samples.
CommandResult cmd_solve(const RunOptions& opts);

/// Monte-Carlo inequality and coercivity checks on opts.levels.
CommandResult cmd_verify(const RunOptions& opts);

/// max |u(x) - u(P x)| over dofs, where P swaps coordinates a and b.
double swap_symmetry_defect(const FeFunction& u, int a, int b);

}  // namespace maviscid
