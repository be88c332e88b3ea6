/* seamforge C API: welding-seam detection and path planning over point clouds.
 *
 * Every function returns sf_status; SF_OK is 0. On failure, sf_last_error()
 * returns a thread-local description of the most recent error. Objects are
 * opaque handles released with their matching *_free function. Strings
 * returned through char** are heap-allocated; release them with
 * sf_string_free.
 */
#ifndef SEAMFORGE_H
#define SEAMFORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SF_API __declspec(dllexport)
#else
#define SF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
    SF_OK = 0,
    SF_ERROR_INVALID_ARGUMENT = 1,
    SF_ERROR_INVALID_PARAMETER = 2,
    SF_ERROR_EMPTY_INPUT = 3,
    SF_ERROR_INSUFFICIENT_POINTS = 4,
    SF_ERROR_DEGENERATE = 5,
    SF_ERROR_NO_OVERLAP = 6,
    SF_ERROR_PARSE = 7,
    SF_ERROR_DATA = 8,
    SF_ERROR_INVALID_POSE = 9,
    SF_ERROR_EMPTY_VIEW = 10,
    SF_ERROR_AMBIGUOUS_ROTATION = 11,
    SF_ERROR_IO = 12,
    SF_ERROR_INTERNAL = 13
} sf_status;

typedef struct sf_config sf_config;
typedef struct sf_cloud sf_cloud;
typedef struct sf_path sf_path;

SF_API const char* sf_version(void);
SF_API const char* sf_status_name(sf_status status);
SF_API const char* sf_last_error(void);
SF_API void sf_string_free(char* s);

/* Configuration (JSON, unknown keys rejected). */
SF_API sf_status sf_config_default(sf_config** out);
SF_API sf_status sf_config_load(const char* json_file, sf_config** out);
SF_API sf_status sf_config_parse(const char* json_text, sf_config** out);
SF_API sf_status sf_config_dump(const sf_config* cfg, char** json_out);
SF_API void sf_config_free(sf_config* cfg);

/* Point clouds. */
SF_API sf_status sf_cloud_read_ply(const char* path, sf_cloud** out);
SF_API sf_status sf_cloud_write_ply(const sf_cloud* cloud, const char* path);
SF_API sf_status sf_cloud_create(const double* xyz, size_t count, const double* normals_or_null,
                                 sf_cloud** out);
SF_API size_t sf_cloud_size(const sf_cloud* cloud);
SF_API int sf_cloud_has_normals(const sf_cloud* cloud);
SF_API sf_status sf_cloud_get_points(const sf_cloud* cloud, double* xyz_out);
SF_API sf_status sf_cloud_get_normals(const sf_cloud* cloud, double* xyz_out);
SF_API void sf_cloud_free(sf_cloud* cloud);

/* 6-DOF paths (x, y, z, rx, ry, rz per pose; rotation vector in radians). */
SF_API sf_status sf_path_read_csv(const char* path, sf_path** out);
SF_API sf_status sf_path_write_csv(const sf_path* path_obj, const char* path);
SF_API size_t sf_path_size(const sf_path* path_obj);
SF_API sf_status sf_path_get_poses(const sf_path* path_obj, double* pose6_out);
SF_API void sf_path_free(sf_path* path_obj);

/* Pipeline stages. All file-path arguments are UTF-8. */

/* Writes a synthetic scan session (frames, poses, analytic truth) into
 * out_dir. kind: v_butt_plate | cylinder_on_plate | y_shape | dihedral. */
SF_API sf_status sf_synth_session(const char* kind, uint64_t seed, const sf_config* cfg,
                                  const char* out_dir);

/* Registers and merges a scan session into a model; report_json_out (optional)
 * receives per-frame fitness and iteration counts. */
SF_API sf_status sf_reconstruct(const char* session_dir, const sf_config* cfg,
                                sf_cloud** model_out, char** report_json_out);

/* Bilateral denoising (normals estimated when missing). */
SF_API sf_status sf_denoise(const sf_cloud* model, const sf_config* cfg, sf_cloud** out);

/* Edge-intensity seam detection; debug_csv_out (optional) receives the
 * per-point intensity/gradient/ratio table. */
SF_API sf_status sf_detect_seam(const sf_cloud* denoised, const sf_config* cfg,
                                sf_cloud** edges_out, char** debug_csv_out);

/* Orders edge points, offsets them, builds and densifies torch frames. */
SF_API sf_status sf_plan_path(const sf_cloud* edges, const sf_cloud* model, const sf_config* cfg,
                              sf_path** path_out, char** report_json_out);

/* Scores a detected path/edge file against a truth path/seam file.
 * CSV inputs are read as 6-DOF paths, PLY inputs as point sets. */
SF_API sf_status sf_evaluate(const char* detected_file, const char* truth_file,
                             const sf_config* cfg, char** report_json_out);

/* Runs every stage over a session directory, writing model.ply, denoised.ply,
 * edges.ply, edges_debug.csv, path.csv, report.json and timings.json into
 * out_dir. */
SF_API sf_status sf_run_pipeline(const char* session_dir, const sf_config* cfg,
                                 const char* out_dir, char** report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* SEAMFORGE_H */
