// Command-line front end. Links only the C API.
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maviscid/maviscid.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct Settings {
  std::map<std::string, std::string> values;
  std::string config_path;
  bool dump_mesh = false;
  bool dump_matrix = false;
};

void add_common(CLI::App* cmd, Settings& s) {
  auto opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&s, key](const std::string& v) { s.values[key] = v; }, help);
  };
  opt("--case", "case", "built-in case: I, II, III, IV, V or VI");
  opt("--dim", "dim", "spatial dimension (2 or 3)");
  opt("--degree", "degree", "polynomial degree(s), e.g. 2 or 2,3");
  opt("--h-list", "h-list", "mesh sizes, e.g. 1/8,1/16,1/32");
  opt("--eps-list", "eps-list", "decreasing epsilon values");
  opt("--epsilon", "epsilon", "epsilon for h studies and single solves");
  opt("--sigma", "sigma", "penalty parameter sigma >= 0");
  cmd->add_option_function<std::string>(
         "--weight-mode", [&s](const std::string& v) { s.values["weight-mode"] = v; },
         "penalty weight: full, reduced or plain")
      ->check(CLI::IsMember({"full", "reduced", "plain"}));
  opt("--seed", "seed", "random seed");
  opt("--out", "out", "output directory");
  opt("--format", "format", "table formats: csv, md or csv,md");
  opt("--max-iters", "max-iters", "Newton iteration limit per epsilon");
  cmd->add_option("--config", s.config_path, "key = value config file (flags take precedence)");
}

int exit_code(maviscid_status st) {
  switch (st) {
    case MAVISCID_OK: return kExitOk;
    case MAVISCID_INVALID_ARGUMENT:
    case MAVISCID_IO: return kExitUsage;
    default: return kExitSolver;
  }
}

int run(const std::string& command, const Settings& s) {
  maviscid_config* cfg = nullptr;
  if (maviscid_config_create(&cfg) != MAVISCID_OK) {
    std::fprintf(stderr, "error: %s\n", maviscid_last_error());
    return kExitSolver;
  }
  auto fail = [&](maviscid_status st) {
    std::fprintf(stderr, "error (%s): %s\n", maviscid_status_name(st), maviscid_last_error());
    maviscid_config_destroy(cfg);
    return exit_code(st);
  };
  maviscid_status st = MAVISCID_OK;
  if (!s.config_path.empty() && (st = maviscid_config_load(cfg, s.config_path.c_str())) != MAVISCID_OK)
    return fail(st);
  for (const auto& [k, v] : s.values)
    if ((st = maviscid_config_set(cfg, k.c_str(), v.c_str())) != MAVISCID_OK) return fail(st);
  if (s.dump_mesh) maviscid_config_set(cfg, "dump-mesh", "1");
  if (s.dump_matrix) maviscid_config_set(cfg, "dump-matrix", "1");

  maviscid_report* report = nullptr;
  st = maviscid_run(cfg, command.c_str(), &report);
  if (report) {
    std::fputs(maviscid_report_text(report), stdout);
    for (size_t i = 0; i < maviscid_report_num_files(report); ++i)
      std::printf("wrote %s\n", maviscid_report_file(report, i));
    maviscid_report_destroy(report);
  }
  if (st != MAVISCID_OK) return fail(st);
  maviscid_config_destroy(cfg);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C0 interior penalty solver for the vanishing-moment Monge-Ampere problem"};
  app.require_subcommand(1);
  app.set_version_flag("--version", maviscid_version());

  Settings conv, solve, verify;
  auto* c = app.add_subcommand("convergence", "error/order tables over h or epsilon");
  add_common(c, conv);
  auto* s = app.add_subcommand("solve", "single solve with solution dump and slices");
  add_common(s, solve);
  s->add_flag("--dump-mesh", solve.dump_mesh, "write the mesh in OFF-like format");
  s->add_flag("--dump-matrix", solve.dump_matrix, "write the final Jacobian in MatrixMarket format");
  auto* v = app.add_subcommand("verify", "Monte-Carlo inequality and coercivity checks");
  add_common(v, verify);
  v->add_option_function<std::string>(
      "--samples", [&verify](const std::string& x) { verify.values["samples"] = x; },
      "random samples per level");
  v->add_option_function<std::string>(
      "--levels", [&verify](const std::string& x) { verify.values["levels"] = x; },
      "cells per axis, e.g. 4,8,16");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (c->parsed()) return run("convergence", conv);
  if (s->parsed()) return run("solve", solve);
  return run("verify", verify);
}
