#include "maviscid/maviscid.h"

#include <fstream>
#include <memory>
#include <string>

#include "maviscid/driver.hpp"
#include "maviscid/mesh.hpp"

using namespace maviscid;

struct maviscid_config {
  RunConfigBuilder builder;
};

struct maviscid_report {
  CommandResult result;
};

struct maviscid_mesh {
  std::shared_ptr<const SimplicialMesh> mesh;
};

namespace {

thread_local std::string g_last_error;

maviscid_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::ok: return MAVISCID_OK;
    case ErrorCode::invalid_argument: return MAVISCID_INVALID_ARGUMENT;
    case ErrorCode::topology: return MAVISCID_TOPOLOGY;
    case ErrorCode::contract: return MAVISCID_CONTRACT;
    case ErrorCode::quadrature: return MAVISCID_QUADRATURE;
    case ErrorCode::singular: return MAVISCID_SINGULAR;
    case ErrorCode::not_converged: return MAVISCID_NOT_CONVERGED;
    case ErrorCode::damping_floor: return MAVISCID_DAMPING_FLOOR;
    case ErrorCode::io: return MAVISCID_IO;
    case ErrorCode::verification_failed: return MAVISCID_VERIFICATION_FAILED;
    default: return MAVISCID_UNKNOWN;
  }
}

template <class F>
maviscid_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MAVISCID_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MAVISCID_UNKNOWN;
  }
}

maviscid_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return MAVISCID_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* maviscid_version(void) { return "0.1.0"; }

const char* maviscid_status_name(maviscid_status s) {
  switch (s) {
    case MAVISCID_OK: return "ok";
    case MAVISCID_INVALID_ARGUMENT: return "invalid argument";
    case MAVISCID_TOPOLOGY: return "topology error";
    case MAVISCID_CONTRACT: return "contract violation";
    case MAVISCID_QUADRATURE: return "quadrature error";
    case MAVISCID_SINGULAR: return "singular matrix";
    case MAVISCID_NOT_CONVERGED: return "not converged";
    case MAVISCID_DAMPING_FLOOR: return "damping floor";
    case MAVISCID_IO: return "i/o error";
    case MAVISCID_VERIFICATION_FAILED: return "verification failed";
    default: return "unknown error";
  }
}

const char* maviscid_last_error(void) { return g_last_error.c_str(); }

maviscid_status maviscid_config_create(maviscid_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new maviscid_config();
    return MAVISCID_OK;
  });
}

void maviscid_config_destroy(maviscid_config* config) { delete config; }

maviscid_status maviscid_config_set(maviscid_config* config, const char* key,
                                    const char* value) {
  if (!config) return null_argument("config");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    config->builder.set(key, value);
    return MAVISCID_OK;
  });
}

maviscid_status maviscid_config_load(maviscid_config* config, const char* path) {
  if (!config) return null_argument("config");
  if (!path) return null_argument("path");
  return guarded([&] {
    config->builder.load_file(path);
    return MAVISCID_OK;
  });
}

maviscid_status maviscid_config_validate(const maviscid_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] {
    config->builder.resolve();
    return MAVISCID_OK;
  });
}

maviscid_status maviscid_run(const maviscid_config* config, const char* command,
                             maviscid_report** out) {
  if (!config) return null_argument("config");
  if (!command) return null_argument("command");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const RunOptions opts = config->builder.resolve();
    const std::string cmd = command;
    auto report = std::make_unique<maviscid_report>();
    try {
      if (cmd == "convergence") {
        report->result = cmd_convergence(opts);
      } else if (cmd == "solve") {
        report->result = cmd_solve(opts);
      } else if (cmd == "verify") {
        report->result = cmd_verify(opts);
      } else {
        throw Error(ErrorCode::invalid_argument, "unknown command '" + cmd + "'");
      }
    } catch (const SolveError& e) {
      report->result.passed = false;
      report->result.text = e.what();
      *out = report.release();
      throw;
    }
    const bool passed = report->result.passed;
    *out = report.release();
    if (!passed) {
      g_last_error = "verification failed";
      return MAVISCID_VERIFICATION_FAILED;
    }
    return MAVISCID_OK;
  });
}

const char* maviscid_report_text(const maviscid_report* r) {
  return r ? r->result.text.c_str() : "";
}

int maviscid_report_passed(const maviscid_report* r) { return r && r->result.passed ? 1 : 0; }

size_t maviscid_report_num_files(const maviscid_report* r) {
  return r ? r->result.files.size() : 0;
}

const char* maviscid_report_file(const maviscid_report* r, size_t i) {
  if (!r || i >= r->result.files.size()) return nullptr;
  return r->result.files[i].c_str();
}

void maviscid_report_destroy(maviscid_report* r) { delete r; }

maviscid_status maviscid_mesh_create(int dim, int n, maviscid_mesh** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<maviscid_mesh>();
    m->mesh = std::make_shared<const SimplicialMesh>(build_structured_mesh(dim, n));
    *out = m.release();
    return MAVISCID_OK;
  });
}

void maviscid_mesh_destroy(maviscid_mesh* mesh) { delete mesh; }

int64_t maviscid_mesh_num_vertices(const maviscid_mesh* m) {
  return m ? static_cast<int64_t>(m->mesh->num_vertices()) : -1;
}

int64_t maviscid_mesh_num_cells(const maviscid_mesh* m) {
  return m ? static_cast<int64_t>(m->mesh->num_cells()) : -1;
}

int64_t maviscid_mesh_num_interior_faces(const maviscid_mesh* m) {
  return m ? static_cast<int64_t>(m->mesh->interior_faces().size()) : -1;
}

maviscid_status maviscid_mesh_write_off(const maviscid_mesh* mesh, const char* path) {
  if (!mesh) return null_argument("mesh");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::io, std::string("cannot write '") + path + "'");
    mesh->mesh->write_off(os);
    return MAVISCID_OK;
  });
}

maviscid_status maviscid_write_stabilized_matrix(const maviscid_mesh* mesh, int degree,
                                                 double epsilon, double sigma,
                                                 const char* weight_mode, const char* path) {
  if (!mesh) return null_argument("mesh");
  if (!weight_mode || !path) return null_argument("weight_mode/path");
  return guarded([&] {
    require(degree >= 1 && degree <= 3, "degree must be 1, 2 or 3");
    const PenaltyParams params{sigma, epsilon, parse_weight_mode(weight_mode)};
    auto space = std::make_shared<const FeSpace>(mesh->mesh, degree);
    const Assembler assembler(space);
    Mat3 identity{};
    for (int a = 0; a < 3; ++a) identity[a][a] = 1.0;
    const SparseMatrix a = assembler.assemble_stabilized(constant_field(identity), params);
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::io, std::string("cannot write '") + path + "'");
    a.write_matrix_market(os);
    return MAVISCID_OK;
  });
}

}  // extern "C"
