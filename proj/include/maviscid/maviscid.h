#ifndef MAVISCID_H
#define MAVISCID_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MAVISCID_API __declspec(dllexport)
#else
#define MAVISCID_API __attribute__((visibility("default")))
#endif

typedef enum maviscid_status {
  MAVISCID_OK = 0,
  MAVISCID_INVALID_ARGUMENT = 1,
  MAVISCID_TOPOLOGY = 2,
  MAVISCID_CONTRACT = 3,
  MAVISCID_QUADRATURE = 4,
  MAVISCID_SINGULAR = 5,
  MAVISCID_NOT_CONVERGED = 6,
  MAVISCID_DAMPING_FLOOR = 7,
  MAVISCID_IO = 8,
  MAVISCID_VERIFICATION_FAILED = 9,
  MAVISCID_UNKNOWN = 99
} maviscid_status;

typedef struct maviscid_config maviscid_config;
typedef struct maviscid_report maviscid_report;
typedef struct maviscid_mesh maviscid_mesh;

MAVISCID_API const char* maviscid_version(void);
MAVISCID_API const char* maviscid_status_name(maviscid_status status);
/* Message of the last failed call on this thread ("" if none). */
MAVISCID_API const char* maviscid_last_error(void);

/* Run configuration: settings given with maviscid_config_set override the
   config file, which overrides the case defaults. Keys: case, dim, degree,
   h-list, eps-list, epsilon, sigma, weight-mode, f, g, psi, exact, seed, out,
   format, threads, samples, levels, dump-mesh, dump-matrix, max-iters,
   abs-tol. */
MAVISCID_API maviscid_status maviscid_config_create(maviscid_config** out);
MAVISCID_API void maviscid_config_destroy(maviscid_config* config);
MAVISCID_API maviscid_status maviscid_config_set(maviscid_config* config, const char* key,
                                                 const char* value);
MAVISCID_API maviscid_status maviscid_config_load(maviscid_config* config, const char* path);
/* Checks the merged configuration without running anything. */
MAVISCID_API maviscid_status maviscid_config_validate(const maviscid_config* config);

/* command: "convergence", "solve" or "verify". On solver failure the report
   still holds the partial output and *out is set. A failed verification
   returns MAVISCID_VERIFICATION_FAILED with the report set. */
MAVISCID_API maviscid_status maviscid_run(const maviscid_config* config, const char* command,
                                          maviscid_report** out);
MAVISCID_API const char* maviscid_report_text(const maviscid_report* report);
MAVISCID_API int maviscid_report_passed(const maviscid_report* report);
MAVISCID_API size_t maviscid_report_num_files(const maviscid_report* report);
MAVISCID_API const char* maviscid_report_file(const maviscid_report* report, size_t i);
MAVISCID_API void maviscid_report_destroy(maviscid_report* report);

/* Structured mesh of the unit square (dim 2) or cube (dim 3), n cells per axis. */
MAVISCID_API maviscid_status maviscid_mesh_create(int dim, int n, maviscid_mesh** out);
MAVISCID_API void maviscid_mesh_destroy(maviscid_mesh* mesh);
MAVISCID_API int64_t maviscid_mesh_num_vertices(const maviscid_mesh* mesh);
MAVISCID_API int64_t maviscid_mesh_num_cells(const maviscid_mesh* mesh);
MAVISCID_API int64_t maviscid_mesh_num_interior_faces(const maviscid_mesh* mesh);
MAVISCID_API maviscid_status maviscid_mesh_write_off(const maviscid_mesh* mesh, const char* path);

/* Writes the stabilized matrix A_h^sigma with coefficient Phi = I on P_degree
   over `mesh` in MatrixMarket format. weight_mode: "full", "reduced", "plain". */
MAVISCID_API maviscid_status maviscid_write_stabilized_matrix(const maviscid_mesh* mesh, int degree,
                                                              double epsilon, double sigma,
                                                              const char* weight_mode,
                                                              const char* path);

#ifdef __cplusplus
}
#endif

#endif
