#include "seamforge.h"

#include <cstring>
#include <new>
#include <string>

#include "seamforge/pcio.hpp"
#include "seamforge/pipeline.hpp"

using namespace seamforge;

struct sf_config {
    pipeline::PipelineConfig cfg;
};

struct sf_cloud {
    PointCloud cloud;
};

struct sf_path {
    Path path;
};

namespace {

thread_local std::string g_last_error;

sf_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return SF_ERROR_INVALID_ARGUMENT;
        case ErrorCode::InvalidParameter: return SF_ERROR_INVALID_PARAMETER;
        case ErrorCode::EmptyInput: return SF_ERROR_EMPTY_INPUT;
        case ErrorCode::InsufficientPoints: return SF_ERROR_INSUFFICIENT_POINTS;
        case ErrorCode::DegenerateNeighborhood:
        case ErrorCode::DegenerateSystem:
        case ErrorCode::DegenerateFrame: return SF_ERROR_DEGENERATE;
        case ErrorCode::NoOverlap: return SF_ERROR_NO_OVERLAP;
        case ErrorCode::ParseError: return SF_ERROR_PARSE;
        case ErrorCode::DataError: return SF_ERROR_DATA;
        case ErrorCode::InvalidPose: return SF_ERROR_INVALID_POSE;
        case ErrorCode::EmptyView: return SF_ERROR_EMPTY_VIEW;
        case ErrorCode::AmbiguousRotation: return SF_ERROR_AMBIGUOUS_ROTATION;
        case ErrorCode::IoError: return SF_ERROR_IO;
        case ErrorCode::Internal: return SF_ERROR_INTERNAL;
    }
    return SF_ERROR_INTERNAL;
}

template <typename Fn>
sf_status guarded(Fn&& fn) {
    try {
        fn();
        return SF_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SF_ERROR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SF_ERROR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

sf_status require(bool ok, const char* message) {
    if (!ok) {
        g_last_error = message;
        return SF_ERROR_INVALID_ARGUMENT;
    }
    return SF_OK;
}

const pipeline::PipelineConfig& config_of(const sf_config* cfg) {
    static const pipeline::PipelineConfig defaults;
    return cfg ? cfg->cfg : defaults;
}

}  // namespace

extern "C" {

const char* sf_version(void) { return "0.1.0"; }

const char* sf_status_name(sf_status status) {
    switch (status) {
        case SF_OK: return "ok";
        case SF_ERROR_INVALID_ARGUMENT: return "invalid_argument";
        case SF_ERROR_INVALID_PARAMETER: return "invalid_parameter";
        case SF_ERROR_EMPTY_INPUT: return "empty_input";
        case SF_ERROR_INSUFFICIENT_POINTS: return "insufficient_points";
        case SF_ERROR_DEGENERATE: return "degenerate";
        case SF_ERROR_NO_OVERLAP: return "no_overlap";
        case SF_ERROR_PARSE: return "parse_error";
        case SF_ERROR_DATA: return "data_error";
        case SF_ERROR_INVALID_POSE: return "invalid_pose";
        case SF_ERROR_EMPTY_VIEW: return "empty_view";
        case SF_ERROR_AMBIGUOUS_ROTATION: return "ambiguous_rotation";
        case SF_ERROR_IO: return "io_error";
        case SF_ERROR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* sf_last_error(void) { return g_last_error.c_str(); }

void sf_string_free(char* s) { delete[] s; }

sf_status sf_config_default(sf_config** out) {
    if (sf_status st = require(out != nullptr, "out must not be null")) return st;
    return guarded([&] { *out = new sf_config(); });
}

sf_status sf_config_load(const char* json_file, sf_config** out) {
    if (sf_status st = require(json_file && out, "json_file and out must not be null")) return st;
    return guarded([&] {
        auto cfg = pipeline::PipelineConfig::load(json_file);
        *out = new sf_config{cfg};
    });
}

sf_status sf_config_parse(const char* json_text, sf_config** out) {
    if (sf_status st = require(json_text && out, "json_text and out must not be null")) return st;
    return guarded([&] {
        auto cfg = pipeline::PipelineConfig::parse_json(json_text);
        *out = new sf_config{cfg};
    });
}

sf_status sf_config_dump(const sf_config* cfg, char** json_out) {
    if (sf_status st = require(json_out != nullptr, "json_out must not be null")) return st;
    return guarded([&] { *json_out = dup_string(config_of(cfg).to_json()); });
}

void sf_config_free(sf_config* cfg) { delete cfg; }

sf_status sf_cloud_read_ply(const char* path, sf_cloud** out) {
    if (sf_status st = require(path && out, "path and out must not be null")) return st;
    return guarded([&] { *out = new sf_cloud{pcio::read_ply(path)}; });
}

sf_status sf_cloud_write_ply(const sf_cloud* cloud, const char* path) {
    if (sf_status st = require(cloud && path, "cloud and path must not be null")) return st;
    return guarded([&] { pcio::write_ply(cloud->cloud, path); });
}

sf_status sf_cloud_create(const double* xyz, size_t count, const double* normals_or_null,
                          sf_cloud** out) {
    if (sf_status st = require(xyz && out, "xyz and out must not be null")) return st;
    return guarded([&] {
        PointCloud c;
        c.points.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            c.points.emplace_back(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
        }
        if (normals_or_null) {
            c.normals.reserve(count);
            for (size_t i = 0; i < count; ++i) {
                c.normals.emplace_back(normals_or_null[3 * i], normals_or_null[3 * i + 1],
                                       normals_or_null[3 * i + 2]);
            }
        }
        c.validate();
        *out = new sf_cloud{std::move(c)};
    });
}

size_t sf_cloud_size(const sf_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

int sf_cloud_has_normals(const sf_cloud* cloud) {
    return cloud && cloud->cloud.has_normals() ? 1 : 0;
}

sf_status sf_cloud_get_points(const sf_cloud* cloud, double* xyz_out) {
    if (sf_status st = require(cloud && xyz_out, "cloud and xyz_out must not be null")) return st;
    for (size_t i = 0; i < cloud->cloud.size(); ++i) {
        const Vec3& p = cloud->cloud.points[i];
        xyz_out[3 * i] = p.x();
        xyz_out[3 * i + 1] = p.y();
        xyz_out[3 * i + 2] = p.z();
    }
    return SF_OK;
}

sf_status sf_cloud_get_normals(const sf_cloud* cloud, double* xyz_out) {
    if (sf_status st = require(cloud && xyz_out, "cloud and xyz_out must not be null")) return st;
    if (sf_status st = require(cloud->cloud.has_normals(), "cloud has no normals")) return st;
    for (size_t i = 0; i < cloud->cloud.size(); ++i) {
        const Vec3& n = cloud->cloud.normals[i];
        xyz_out[3 * i] = n.x();
        xyz_out[3 * i + 1] = n.y();
        xyz_out[3 * i + 2] = n.z();
    }
    return SF_OK;
}

void sf_cloud_free(sf_cloud* cloud) { delete cloud; }

sf_status sf_path_read_csv(const char* path, sf_path** out) {
    if (sf_status st = require(path && out, "path and out must not be null")) return st;
    return guarded([&] { *out = new sf_path{pcio::read_path_csv(path)}; });
}

sf_status sf_path_write_csv(const sf_path* path_obj, const char* path) {
    if (sf_status st = require(path_obj && path, "path_obj and path must not be null")) return st;
    return guarded([&] { pcio::write_path_csv(path_obj->path, path); });
}

size_t sf_path_size(const sf_path* path_obj) { return path_obj ? path_obj->path.size() : 0; }

sf_status sf_path_get_poses(const sf_path* path_obj, double* pose6_out) {
    if (sf_status st = require(path_obj && pose6_out, "path_obj and pose6_out must not be null")) {
        return st;
    }
    for (size_t i = 0; i < path_obj->path.size(); ++i) {
        const PathPoint& pp = path_obj->path[i];
        const Vec3 rv = pp.rotation_vector();
        pose6_out[6 * i] = pp.position.x();
        pose6_out[6 * i + 1] = pp.position.y();
        pose6_out[6 * i + 2] = pp.position.z();
        pose6_out[6 * i + 3] = rv.x();
        pose6_out[6 * i + 4] = rv.y();
        pose6_out[6 * i + 5] = rv.z();
    }
    return SF_OK;
}

void sf_path_free(sf_path* path_obj) { delete path_obj; }

sf_status sf_synth_session(const char* kind, uint64_t seed, const sf_config* cfg,
                           const char* out_dir) {
    if (sf_status st = require(kind && out_dir, "kind and out_dir must not be null")) return st;
    return guarded([&] {
        pipeline::synth_session_dir(synth::parse_kind(kind), seed, config_of(cfg), out_dir);
    });
}

sf_status sf_reconstruct(const char* session_dir, const sf_config* cfg, sf_cloud** model_out,
                         char** report_json_out) {
    if (sf_status st = require(session_dir && model_out,
                               "session_dir and model_out must not be null")) {
        return st;
    }
    return guarded([&] {
        const ScanSession session = pcio::read_session(session_dir);
        const pipeline::ReconstructResult res = pipeline::reconstruct(session, config_of(cfg));
        if (report_json_out) {
            std::string rep = "{\n  \"total_iterations\": " +
                              std::to_string(res.report.total_iterations) +
                              ",\n  \"final_fitness\": " +
                              pcio::format_g9(res.report.final_fitness) +
                              ",\n  \"merged_points\": " + std::to_string(res.report.merged_size) +
                              ",\n  \"voxel_size\": " + pcio::format_g9(res.voxel) + "\n}\n";
            *report_json_out = dup_string(rep);
        }
        *model_out = new sf_cloud{std::move(res.model)};
    });
}

sf_status sf_denoise(const sf_cloud* model, const sf_config* cfg, sf_cloud** out) {
    if (sf_status st = require(model && out, "model and out must not be null")) return st;
    return guarded([&] {
        pipeline::DenoiseResult res = pipeline::run_denoise(model->cloud, config_of(cfg));
        *out = new sf_cloud{std::move(res.cloud)};
    });
}

sf_status sf_detect_seam(const sf_cloud* denoised, const sf_config* cfg, sf_cloud** edges_out,
                         char** debug_csv_out) {
    if (sf_status st = require(denoised && edges_out,
                               "denoised and edges_out must not be null")) {
        return st;
    }
    return guarded([&] {
        const pipeline::SeamStageResult res = pipeline::run_seam(denoised->cloud, config_of(cfg));
        PointCloud edges;
        for (std::size_t i : res.indices) {
            edges.points.push_back(denoised->cloud.points[i]);
            if (denoised->cloud.has_normals()) edges.normals.push_back(denoised->cloud.normals[i]);
        }
        if (debug_csv_out) *debug_csv_out = dup_string(pipeline::seam_debug_csv(res.scores));
        *edges_out = new sf_cloud{std::move(edges)};
    });
}

sf_status sf_plan_path(const sf_cloud* edges, const sf_cloud* model, const sf_config* cfg,
                       sf_path** path_out, char** report_json_out) {
    if (sf_status st = require(edges && model && path_out,
                               "edges, model and path_out must not be null")) {
        return st;
    }
    return guarded([&] {
        const pipeline::PipelineConfig& pc = config_of(cfg);
        const double spacing = mean_point_spacing(model->cloud);
        const seam::SeamConfig seam_cfg = pipeline::resolved_seam(pc, spacing);
        const pipeline::PathStageResult res = pipeline::run_path(
            edges->cloud.points, model->cloud, pc, seam_cfg.neighborhood.radius);
        if (report_json_out) {
            std::string rep =
                "{\n  \"detected_points\": " + std::to_string(res.plan.waypoints.size()) +
                ",\n  \"interpolated_points\": " + std::to_string(res.plan.path.size()) +
                ",\n  \"polylines\": " + std::to_string(res.plan.order.polyline_count) +
                ",\n  \"cyclic\": " + (res.plan.order.cyclic ? "true" : "false") + "\n}\n";
            *report_json_out = dup_string(rep);
        }
        *path_out = new sf_path{res.plan.path};
    });
}

sf_status sf_evaluate(const char* detected_file, const char* truth_file, const sf_config* cfg,
                      char** report_json_out) {
    if (sf_status st = require(detected_file && truth_file && report_json_out,
                               "detected_file, truth_file and report_json_out must not be null")) {
        return st;
    }
    return guarded([&] {
        *report_json_out =
            dup_string(pipeline::evaluate_files(detected_file, truth_file, config_of(cfg)));
    });
}

sf_status sf_run_pipeline(const char* session_dir, const sf_config* cfg, const char* out_dir,
                          char** report_json_out) {
    if (sf_status st = require(session_dir && out_dir,
                               "session_dir and out_dir must not be null")) {
        return st;
    }
    return guarded([&] {
        const std::string report =
            pipeline::run_pipeline_dir(session_dir, config_of(cfg), out_dir);
        if (report_json_out) *report_json_out = dup_string(report);
    });
}

}  // extern "C"
