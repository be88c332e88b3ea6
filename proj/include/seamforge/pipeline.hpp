#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "seamforge/denoise.hpp"
#include "seamforge/eval.hpp"
#include "seamforge/path.hpp"
#include "seamforge/registration.hpp"
#include "seamforge/seam.hpp"
#include "seamforge/synth.hpp"
#include "seamforge/types.hpp"

namespace seamforge::pipeline {

/// Every free parameter of the pipeline. Scale-dependent values left at 0
/// are derived from the data (factor * mean point spacing, or * voxel size);
/// explicit values win. Unknown keys in config files are rejected.
struct NeighborhoodOptions {
    double radius = 0.0;
    double radius_factor = 3.0;
    int min_points = 10;
};

struct IcpOptions {
    int max_iterations = 30;
    double max_correspondence_distance = 0.0;
    double max_correspondence_factor = 10.0;
    double convergence_delta = 1e-6;
    double fitness_distance = 0.0;        // literal threshold on squared distance
    double fitness_distance_factor = 2.0;  // * voxel size when fitness_distance is 0
};

struct BilateralOptions {
    double radius = 0.0;
    double radius_factor = 3.0;
    double sigma_m = 0.0;
    double sigma_m_factor = 0.5;  // * radius
    double sigma_n = 0.0;
    double sigma_n_factor = 1.0;  // * mean point spacing
    int iterations = 1;
};

struct SeamOptions {
    double threshold = 50.0;
    bool smoothing = true;
    bool suppress_boundary = true;
    double boundary_gap_deg = 120.0;
    double det_floor = 1.0;
    double intensity_gate = 3.0;
    double radius = 0.0;
    double radius_factor = 6.0;
    int min_points = 10;
};

struct PathOptions {
    double torch_offset = 0.0;
    int smoothing_window = 5;
    int interpolation_density = 4;
    double normal_radius_factor = 2.0;  // * seam radius, for path-point normals
};

struct EvalOptions {
    double cell_size = 0.0;
    double cell_factor = 2.0;  // * voxel size (pipeline) or truth spacing (standalone)
    int tolerance_cells = 1;
};

struct SynthOptions {
    double density = 0.0;             // 0 = workpiece default
    double depth_noise_sigma = -1.0;  // negative = bundled script default
    double pose_noise_rot_deg = -1.0;
    double pose_noise_trans = -1.0;
};

struct PipelineConfig {
    std::uint64_t seed = 42;
    double voxel_size = 0.0;
    double voxel_factor = 2.0;
    NeighborhoodOptions neighborhood;
    IcpOptions icp;
    BilateralOptions bilateral;
    SeamOptions seam;
    PathOptions path;
    EvalOptions eval;
    SynthOptions synth;

    void validate() const;

    static PipelineConfig parse_json(const std::string& text);
    static PipelineConfig load(const std::filesystem::path& file);
    std::string to_json() const;
};

// Resolved (data-derived) per-stage configurations.
double resolved_voxel(const PipelineConfig& cfg, double spacing);
NeighborhoodSpec resolved_neighborhood(const NeighborhoodOptions& opt, double spacing);
registration::IcpConfig resolved_icp(const PipelineConfig& cfg, double spacing, double voxel);
denoise::BilateralConfig resolved_bilateral(const PipelineConfig& cfg, double spacing);
seam::SeamConfig resolved_seam(const PipelineConfig& cfg, double spacing);

struct ReconstructResult {
    PointCloud model;
    registration::MergeReport report;
    double spacing = 0.0;  // mean point spacing of the first composed frame
    double voxel = 0.0;
};

ReconstructResult reconstruct(const ScanSession& session, const PipelineConfig& cfg);

struct DenoiseResult {
    PointCloud cloud;
    denoise::BilateralConfig used;
    double spacing = 0.0;
};

DenoiseResult run_denoise(const PointCloud& model, const PipelineConfig& cfg);

struct SeamStageResult {
    std::vector<std::size_t> indices;          // surviving edge points
    std::vector<seam::EdgeScore> scores;       // per cloud point
    std::vector<std::uint8_t> boundary_flags;  // per cloud point (empty if suppression off)
    seam::SeamConfig used;
    std::size_t candidates = 0;  // before boundary suppression
};

SeamStageResult run_seam(const PointCloud& denoised, const PipelineConfig& cfg);

struct PathStageResult {
    path::PlanResult plan;
    path::PathConfig used;
};

PathStageResult run_path(const std::vector<Vec3>& edge_points, const PointCloud& model,
                         const PipelineConfig& cfg, double seam_radius);

/// Per-point debug dump (intensity, gradient, ratio, is_edge) as CSV text.
std::string seam_debug_csv(const std::vector<seam::EdgeScore>& scores);

struct StageTimings {
    double reconstruct_ms = 0.0;
    double denoise_ms = 0.0;
    double seam_ms = 0.0;
    double path_ms = 0.0;
    double eval_ms = 0.0;
    double total_ms = 0.0;              // reconstruct + denoise + seam + path
    double detection_speed_mm_s = 0.0;  // seam length / total_ms
};

struct PipelineRun {
    ReconstructResult reconstruct;
    DenoiseResult denoise;
    SeamStageResult seam;
    PathStageResult path;
    std::string report_json;   // deterministic metrics report
    std::string timings_json;  // wall-clock timings (not reproducible)
    StageTimings timings;
};

/// Full pipeline over an in-memory session. Truth inputs, when given, add an
/// eval section to the report.
PipelineRun run_pipeline(const ScanSession& session, const PipelineConfig& cfg,
                         const std::vector<Vec3>* truth_seam = nullptr,
                         const Path* truth_path = nullptr);

/// Directory-level pipeline: reads the session, picks up truth_seam.ply and
/// truth_path.csv next to session.json when present, writes model.ply,
/// denoised.ply, edges.ply, edges_debug.csv, path.csv, report.json and
/// timings.json into out_dir. Returns the report JSON.
std::string run_pipeline_dir(const std::filesystem::path& session_dir, const PipelineConfig& cfg,
                             const std::filesystem::path& out_dir);

/// Synthesizes a session (bundled scan script for the kind) and writes it
/// with truth_seam.ply / truth_path.csv into out_dir.
void synth_session_dir(synth::WorkpieceKind kind, std::uint64_t seed, const PipelineConfig& cfg,
                       const std::filesystem::path& out_dir);

/// Standalone evaluation of a detected file (path CSV or edge PLY) against a
/// truth file (path CSV or seam PLY). Returns the report JSON.
std::string evaluate_files(const std::filesystem::path& detected,
                           const std::filesystem::path& truth, const PipelineConfig& cfg);

}  // namespace seamforge::pipeline
