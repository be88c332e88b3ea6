#include "seamforge/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "seamforge/pcio.hpp"

namespace seamforge::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

void require_keys(const json& obj, const char* section,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        raise(ErrorCode::ParseError, std::string("config section '") + section +
                                         "' must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            raise(ErrorCode::ParseError,
                  std::string("unknown config key '") + key + "' in section '" + section + "'");
        }
    }
}

template <typename T>
void get_if(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            raise(ErrorCode::ParseError, std::string("config key '") + key + "' has a wrong type");
        }
    }
}

void positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        raise(ErrorCode::InvalidParameter, std::string(what) + " must be positive");
    }
}

}  // namespace

void PipelineConfig::validate() const {
    if (voxel_size < 0.0) raise(ErrorCode::InvalidParameter, "voxel_size must be >= 0");
    if (voxel_size == 0.0) positive(voxel_factor, "voxel_factor");
    if (neighborhood.radius < 0.0 || seam.radius < 0.0 || bilateral.radius < 0.0) {
        raise(ErrorCode::InvalidParameter, "radii must be >= 0 (0 selects the derived default)");
    }
    positive(neighborhood.radius_factor, "neighborhood.radius_factor");
    if (neighborhood.min_points < 3 || seam.min_points < 3) {
        raise(ErrorCode::InvalidParameter, "min_points must be >= 3");
    }
    if (icp.max_iterations < 1) raise(ErrorCode::InvalidParameter, "icp.max_iterations must be >= 1");
    positive(icp.convergence_delta, "icp.convergence_delta");
    positive(icp.max_correspondence_factor, "icp.max_correspondence_factor");
    positive(icp.fitness_distance_factor, "icp.fitness_distance_factor");
    positive(bilateral.radius_factor, "bilateral.radius_factor");
    positive(bilateral.sigma_m_factor, "bilateral.sigma_m_factor");
    positive(bilateral.sigma_n_factor, "bilateral.sigma_n_factor");
    if (bilateral.iterations < 1) {
        raise(ErrorCode::InvalidParameter, "bilateral.iterations must be >= 1");
    }
    if (!(seam.threshold > 27.0)) {
        raise(ErrorCode::InvalidParameter,
              "seam.threshold must exceed 27 (the ratio's analytic minimum)");
    }
    if (!(seam.boundary_gap_deg > 0.0) || !(seam.boundary_gap_deg < 360.0)) {
        raise(ErrorCode::InvalidParameter, "seam.boundary_gap_deg must lie in (0, 360)");
    }
    if (seam.det_floor < 0.0) raise(ErrorCode::InvalidParameter, "seam.det_floor must be >= 0");
    if (seam.intensity_gate < 0.0) {
        raise(ErrorCode::InvalidParameter, "seam.intensity_gate must be >= 0");
    }
    positive(seam.radius_factor, "seam.radius_factor");
    if (path.torch_offset < 0.0) raise(ErrorCode::InvalidParameter, "path.torch_offset must be >= 0");
    if (path.smoothing_window < 1 || path.smoothing_window % 2 == 0) {
        raise(ErrorCode::InvalidParameter, "path.smoothing_window must be odd and >= 1");
    }
    if (path.interpolation_density < 1) {
        raise(ErrorCode::InvalidParameter, "path.interpolation_density must be >= 1");
    }
    positive(path.normal_radius_factor, "path.normal_radius_factor");
    if (eval.cell_size < 0.0) raise(ErrorCode::InvalidParameter, "eval.cell_size must be >= 0");
    if (eval.cell_size == 0.0) positive(eval.cell_factor, "eval.cell_factor");
    if (eval.tolerance_cells < 0) {
        raise(ErrorCode::InvalidParameter, "eval.tolerance_cells must be >= 0");
    }
    if (synth.density < 0.0) raise(ErrorCode::InvalidParameter, "synth.density must be >= 0");
}

PipelineConfig PipelineConfig::parse_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    require_keys(doc, "root",
                 {"seed", "voxel_size", "voxel_factor", "neighborhood", "icp", "bilateral",
                  "seam", "path", "eval", "synth"});

    PipelineConfig cfg;
    get_if(doc, "seed", cfg.seed);
    get_if(doc, "voxel_size", cfg.voxel_size);
    get_if(doc, "voxel_factor", cfg.voxel_factor);

    if (doc.contains("neighborhood")) {
        const json& o = doc["neighborhood"];
        require_keys(o, "neighborhood", {"radius", "radius_factor", "min_points"});
        get_if(o, "radius", cfg.neighborhood.radius);
        get_if(o, "radius_factor", cfg.neighborhood.radius_factor);
        get_if(o, "min_points", cfg.neighborhood.min_points);
    }
    if (doc.contains("icp")) {
        const json& o = doc["icp"];
        require_keys(o, "icp",
                     {"max_iterations", "max_correspondence_distance", "max_correspondence_factor",
                      "convergence_delta", "fitness_distance", "fitness_distance_factor"});
        get_if(o, "max_iterations", cfg.icp.max_iterations);
        get_if(o, "max_correspondence_distance", cfg.icp.max_correspondence_distance);
        get_if(o, "max_correspondence_factor", cfg.icp.max_correspondence_factor);
        get_if(o, "convergence_delta", cfg.icp.convergence_delta);
        get_if(o, "fitness_distance", cfg.icp.fitness_distance);
        get_if(o, "fitness_distance_factor", cfg.icp.fitness_distance_factor);
    }
    if (doc.contains("bilateral")) {
        const json& o = doc["bilateral"];
        require_keys(o, "bilateral",
                     {"radius", "radius_factor", "sigma_m", "sigma_m_factor", "sigma_n",
                      "sigma_n_factor", "iterations"});
        get_if(o, "radius", cfg.bilateral.radius);
        get_if(o, "radius_factor", cfg.bilateral.radius_factor);
        get_if(o, "sigma_m", cfg.bilateral.sigma_m);
        get_if(o, "sigma_m_factor", cfg.bilateral.sigma_m_factor);
        get_if(o, "sigma_n", cfg.bilateral.sigma_n);
        get_if(o, "sigma_n_factor", cfg.bilateral.sigma_n_factor);
        get_if(o, "iterations", cfg.bilateral.iterations);
    }
    if (doc.contains("seam")) {
        const json& o = doc["seam"];
        require_keys(o, "seam",
                     {"threshold", "smoothing", "suppress_boundary", "boundary_gap_deg",
                      "det_floor", "intensity_gate", "radius", "radius_factor", "min_points"});
        get_if(o, "threshold", cfg.seam.threshold);
        get_if(o, "smoothing", cfg.seam.smoothing);
        get_if(o, "suppress_boundary", cfg.seam.suppress_boundary);
        get_if(o, "boundary_gap_deg", cfg.seam.boundary_gap_deg);
        get_if(o, "det_floor", cfg.seam.det_floor);
        get_if(o, "intensity_gate", cfg.seam.intensity_gate);
        get_if(o, "radius", cfg.seam.radius);
        get_if(o, "radius_factor", cfg.seam.radius_factor);
        get_if(o, "min_points", cfg.seam.min_points);
    }
    if (doc.contains("path")) {
        const json& o = doc["path"];
        require_keys(o, "path",
                     {"torch_offset", "smoothing_window", "interpolation_density",
                      "normal_radius_factor"});
        get_if(o, "torch_offset", cfg.path.torch_offset);
        get_if(o, "smoothing_window", cfg.path.smoothing_window);
        get_if(o, "interpolation_density", cfg.path.interpolation_density);
        get_if(o, "normal_radius_factor", cfg.path.normal_radius_factor);
    }
    if (doc.contains("eval")) {
        const json& o = doc["eval"];
        require_keys(o, "eval", {"cell_size", "cell_factor", "tolerance_cells"});
        get_if(o, "cell_size", cfg.eval.cell_size);
        get_if(o, "cell_factor", cfg.eval.cell_factor);
        get_if(o, "tolerance_cells", cfg.eval.tolerance_cells);
    }
    if (doc.contains("synth")) {
        const json& o = doc["synth"];
        require_keys(o, "synth",
                     {"density", "depth_noise_sigma", "pose_noise_rot_deg", "pose_noise_trans"});
        get_if(o, "density", cfg.synth.density);
        get_if(o, "depth_noise_sigma", cfg.synth.depth_noise_sigma);
        get_if(o, "pose_noise_rot_deg", cfg.synth.pose_noise_rot_deg);
        get_if(o, "pose_noise_trans", cfg.synth.pose_noise_trans);
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) raise(ErrorCode::IoError, "cannot open config " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

std::string PipelineConfig::to_json() const {
    json doc;
    doc["seed"] = seed;
    doc["voxel_size"] = voxel_size;
    doc["voxel_factor"] = voxel_factor;
    doc["neighborhood"] = {{"radius", neighborhood.radius},
                           {"radius_factor", neighborhood.radius_factor},
                           {"min_points", neighborhood.min_points}};
    doc["icp"] = {{"max_iterations", icp.max_iterations},
                  {"max_correspondence_distance", icp.max_correspondence_distance},
                  {"max_correspondence_factor", icp.max_correspondence_factor},
                  {"convergence_delta", icp.convergence_delta},
                  {"fitness_distance", icp.fitness_distance},
                  {"fitness_distance_factor", icp.fitness_distance_factor}};
    doc["bilateral"] = {{"radius", bilateral.radius},
                        {"radius_factor", bilateral.radius_factor},
                        {"sigma_m", bilateral.sigma_m},
                        {"sigma_m_factor", bilateral.sigma_m_factor},
                        {"sigma_n", bilateral.sigma_n},
                        {"sigma_n_factor", bilateral.sigma_n_factor},
                        {"iterations", bilateral.iterations}};
    doc["seam"] = {{"threshold", seam.threshold},
                   {"smoothing", seam.smoothing},
                   {"suppress_boundary", seam.suppress_boundary},
                   {"boundary_gap_deg", seam.boundary_gap_deg},
                   {"det_floor", seam.det_floor},
                   {"intensity_gate", seam.intensity_gate},
                   {"radius", seam.radius},
                   {"radius_factor", seam.radius_factor},
                   {"min_points", seam.min_points}};
    doc["path"] = {{"torch_offset", path.torch_offset},
                   {"smoothing_window", path.smoothing_window},
                   {"interpolation_density", path.interpolation_density},
                   {"normal_radius_factor", path.normal_radius_factor}};
    doc["eval"] = {{"cell_size", eval.cell_size},
                   {"cell_factor", eval.cell_factor},
                   {"tolerance_cells", eval.tolerance_cells}};
    doc["synth"] = {{"density", synth.density},
                    {"depth_noise_sigma", synth.depth_noise_sigma},
                    {"pose_noise_rot_deg", synth.pose_noise_rot_deg},
                    {"pose_noise_trans", synth.pose_noise_trans}};
    return doc.dump(2) + "\n";
}

double resolved_voxel(const PipelineConfig& cfg, double spacing) {
    return cfg.voxel_size > 0.0 ? cfg.voxel_size : cfg.voxel_factor * spacing;
}

NeighborhoodSpec resolved_neighborhood(const NeighborhoodOptions& opt, double spacing) {
    NeighborhoodSpec spec;
    spec.radius = opt.radius > 0.0 ? opt.radius : opt.radius_factor * spacing;
    spec.min_points = opt.min_points;
    return spec;
}

registration::IcpConfig resolved_icp(const PipelineConfig& cfg, double spacing, double voxel) {
    registration::IcpConfig icp;
    icp.max_iterations = cfg.icp.max_iterations;
    icp.max_correspondence_distance = cfg.icp.max_correspondence_distance > 0.0
                                          ? cfg.icp.max_correspondence_distance
                                          : cfg.icp.max_correspondence_factor * spacing;
    icp.convergence_delta = cfg.icp.convergence_delta;
    icp.fitness_distance = cfg.icp.fitness_distance > 0.0
                               ? cfg.icp.fitness_distance
                               : cfg.icp.fitness_distance_factor * voxel;
    return icp;
}

denoise::BilateralConfig resolved_bilateral(const PipelineConfig& cfg, double spacing) {
    denoise::BilateralConfig b;
    b.radius = cfg.bilateral.radius > 0.0 ? cfg.bilateral.radius
                                          : cfg.bilateral.radius_factor * spacing;
    b.sigma_m = cfg.bilateral.sigma_m > 0.0 ? cfg.bilateral.sigma_m
                                            : cfg.bilateral.sigma_m_factor * b.radius;
    b.sigma_n = cfg.bilateral.sigma_n > 0.0 ? cfg.bilateral.sigma_n
                                            : cfg.bilateral.sigma_n_factor * spacing;
    b.iterations = cfg.bilateral.iterations;
    return b;
}

seam::SeamConfig resolved_seam(const PipelineConfig& cfg, double spacing) {
    seam::SeamConfig s;
    s.neighborhood.radius =
        cfg.seam.radius > 0.0 ? cfg.seam.radius : cfg.seam.radius_factor * spacing;
    s.neighborhood.min_points = cfg.seam.min_points;
    s.threshold = cfg.seam.threshold;
    s.smoothing = cfg.seam.smoothing;
    s.suppress_boundary = cfg.seam.suppress_boundary;
    s.boundary_gap = cfg.seam.boundary_gap_deg * M_PI / 180.0;
    s.det_floor = cfg.seam.det_floor;
    s.intensity_gate = cfg.seam.intensity_gate;
    return s;
}

ReconstructResult reconstruct(const ScanSession& session, const PipelineConfig& cfg) {
    cfg.validate();
    if (session.frames.empty()) raise(ErrorCode::EmptyInput, "session has no frames");

    ReconstructResult out;
    const PointCloud first = registration::compose_to_base(session.frames.front());
    if (first.size() < 2) raise(ErrorCode::InsufficientPoints, "first frame is too small");
    out.spacing = mean_point_spacing(first);
    out.voxel = resolved_voxel(cfg, out.spacing);

    const registration::IcpConfig icp_cfg = resolved_icp(cfg, out.spacing, out.voxel);
    const NeighborhoodSpec nbr = resolved_neighborhood(cfg.neighborhood, out.spacing);
    out.model = registration::merge_session(session, icp_cfg, out.voxel, nbr, &out.report);
    return out;
}

DenoiseResult run_denoise(const PointCloud& model, const PipelineConfig& cfg) {
    DenoiseResult out;
    if (model.size() < 2) raise(ErrorCode::InsufficientPoints, "model too small to denoise");
    out.spacing = mean_point_spacing(model);
    out.used = resolved_bilateral(cfg, out.spacing);
    const NeighborhoodSpec nbr = resolved_neighborhood(cfg.neighborhood, out.spacing);
    PointCloud input = model;
    if (!input.has_normals()) {
        input = estimate_all_normals(input, nbr);
    }
    out.cloud = denoise::bilateral_filter(input, out.used, nbr);
    return out;
}

SeamStageResult run_seam(const PointCloud& denoised, const PipelineConfig& cfg) {
    SeamStageResult out;
    if (denoised.size() < 2) raise(ErrorCode::InsufficientPoints, "cloud too small for seam detection");
    const double spacing = mean_point_spacing(denoised);
    out.used = resolved_seam(cfg, spacing);
    out.scores = seam::compute_edge_scores(denoised, out.used);
    std::vector<std::size_t> candidates = seam::edge_indices(out.scores, out.used.threshold);
    out.candidates = candidates.size();
    if (out.used.suppress_boundary) {
        out.boundary_flags = seam::boundary_flags(denoised, out.used);
        std::vector<std::size_t> kept;
        kept.reserve(candidates.size());
        for (std::size_t i : candidates) {
            if (!out.boundary_flags[i]) kept.push_back(i);
        }
        out.indices = std::move(kept);
    } else {
        out.indices = std::move(candidates);
    }
    return out;
}

PathStageResult run_path(const std::vector<Vec3>& edge_points, const PointCloud& model,
                         const PipelineConfig& cfg, double seam_radius) {
    PathStageResult out;
    out.used.torch_offset = cfg.path.torch_offset;
    out.used.smoothing_window = cfg.path.smoothing_window;
    out.used.interpolation_density = cfg.path.interpolation_density;

    NeighborhoodSpec normal_spec;
    normal_spec.radius = cfg.path.normal_radius_factor * seam_radius;
    normal_spec.min_points = cfg.seam.min_points;
    out.plan = path::plan(edge_points, model, out.used, normal_spec);
    return out;
}

std::string seam_debug_csv(const std::vector<seam::EdgeScore>& scores) {
    std::string out = "intensity,ix,iy,iz,ratio,gated,is_edge\n";
    out.reserve(out.size() + scores.size() * 64);
    char buf[192];
    for (const seam::EdgeScore& s : scores) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d\n", s.intensity,
                      s.gradient.x(), s.gradient.y(), s.gradient.z(), s.ratio, s.gated ? 1 : 0,
                      s.is_edge ? 1 : 0);
        out += buf;
    }
    return out;
}

namespace {

double path_arc_length(const Path& p) {
    double len = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        len += (p[i].position - p[i - 1].position).norm();
    }
    return len;
}

json eval_report(const std::vector<Vec3>& detected, const std::vector<Vec3>& truth_pts,
                 const Path* detected_path, const Path* truth_path, double cell,
                 int tolerance_cells) {
    json out;
    out["cell_size"] = cell;
    const eval::PlaneScore xy = eval::plane_score(detected, truth_pts, eval::Plane::XY, cell,
                                                  tolerance_cells);
    const eval::PlaneScore xz = eval::plane_score(detected, truth_pts, eval::Plane::XZ, cell,
                                                  tolerance_cells);
    const eval::PlaneScore yz = eval::plane_score(detected, truth_pts, eval::Plane::YZ, cell,
                                                  tolerance_cells);
    out["planes"] = {
        {"xy", {{"precision", xy.precision}, {"recall", xy.recall}, {"accuracy", xy.accuracy}}},
        {"xz", {{"precision", xz.precision}, {"recall", xz.recall}, {"accuracy", xz.accuracy}}},
        {"yz", {{"precision", yz.precision}, {"recall", yz.recall}, {"accuracy", yz.accuracy}}}};
    out["f1"] = eval::f1_from_accuracies(xy.accuracy, xz.accuracy, yz.accuracy);
    out["raster_recall"] = {
        {"xy", eval::raster_accuracy(detected, truth_pts, eval::Plane::XY, cell)},
        {"xz", eval::raster_accuracy(detected, truth_pts, eval::Plane::XZ, cell)},
        {"yz", eval::raster_accuracy(detected, truth_pts, eval::Plane::YZ, cell)}};
    if (detected_path && truth_path && detected_path->size() > 1 && truth_path->size() > 1) {
        const eval::RmseResult rmse = eval::pose_rmse(*detected_path, *truth_path);
        out["rmse_position_m"] = rmse.position;
        out["rmse_rotation_deg"] = rmse.rotation_deg;
    }
    return out;
}

}  // namespace

PipelineRun run_pipeline(const ScanSession& session, const PipelineConfig& cfg,
                         const std::vector<Vec3>* truth_seam, const Path* truth_path) {
    PipelineRun run;
    double t0 = now_ms();
    run.reconstruct = reconstruct(session, cfg);
    run.timings.reconstruct_ms = now_ms() - t0;

    t0 = now_ms();
    run.denoise = run_denoise(run.reconstruct.model, cfg);
    run.timings.denoise_ms = now_ms() - t0;

    t0 = now_ms();
    run.seam = run_seam(run.denoise.cloud, cfg);
    run.timings.seam_ms = now_ms() - t0;

    t0 = now_ms();
    std::vector<Vec3> edge_points;
    edge_points.reserve(run.seam.indices.size());
    for (std::size_t i : run.seam.indices) edge_points.push_back(run.denoise.cloud.points[i]);
    run.path = run_path(edge_points, run.denoise.cloud, cfg, run.seam.used.neighborhood.radius);
    run.timings.path_ms = now_ms() - t0;

    run.timings.total_ms = run.timings.reconstruct_ms + run.timings.denoise_ms +
                           run.timings.seam_ms + run.timings.path_ms;
    const double seam_len = path_arc_length(run.path.plan.path);
    run.timings.detection_speed_mm_s =
        run.timings.total_ms > 0.0 ? seam_len * 1000.0 / (run.timings.total_ms / 1000.0) : 0.0;

    json report;
    report["seed"] = cfg.seed;
    for (const auto& [k, v] : session.metadata) report["session"][k] = v;
    report["reconstruct"] = {{"frames", json::array()},
                             {"total_iterations", run.reconstruct.report.total_iterations},
                             {"final_fitness", run.reconstruct.report.final_fitness},
                             {"merged_points", run.reconstruct.report.merged_size},
                             {"voxel_size", run.reconstruct.voxel},
                             {"spacing", run.reconstruct.spacing}};
    for (const registration::FrameReport& fr : run.reconstruct.report.frames) {
        report["reconstruct"]["frames"].push_back({{"pre_fitness", fr.pre_fitness},
                                                   {"post_fitness", fr.post_fitness},
                                                   {"iterations", fr.iterations},
                                                   {"converged", fr.converged}});
    }
    report["denoise"] = {{"points", run.denoise.cloud.size()},
                         {"radius", run.denoise.used.radius},
                         {"sigma_m", run.denoise.used.sigma_m},
                         {"sigma_n", run.denoise.used.sigma_n},
                         {"iterations", run.denoise.used.iterations}};
    report["seam"] = {{"candidates", run.seam.candidates},
                      {"edges", run.seam.indices.size()},
                      {"threshold", run.seam.used.threshold},
                      {"radius", run.seam.used.neighborhood.radius},
                      {"suppress_boundary", run.seam.used.suppress_boundary}};
    report["path"] = {{"detected_points", run.path.plan.waypoints.size()},
                      {"interpolated_points", run.path.plan.path.size()},
                      {"polylines", run.path.plan.order.polyline_count},
                      {"dropped_points", run.path.plan.order.dropped_points},
                      {"dropped_duplicates", run.path.plan.dropped_duplicates},
                      {"cyclic", run.path.plan.order.cyclic},
                      {"length_m", seam_len}};

    if (truth_seam && !truth_seam->empty()) {
        const double t_eval = now_ms();
        const double cell = cfg.eval.cell_size > 0.0 ? cfg.eval.cell_size
                                                     : cfg.eval.cell_factor * run.reconstruct.voxel;
        std::vector<Vec3> path_positions;
        path_positions.reserve(run.path.plan.path.size());
        for (const PathPoint& pp : run.path.plan.path) path_positions.push_back(pp.position);
        report["eval"] = eval_report(path_positions, *truth_seam, &run.path.plan.path, truth_path,
                                     cell, cfg.eval.tolerance_cells);
        run.timings.eval_ms = now_ms() - t_eval;
    }

    run.report_json = report.dump(2) + "\n";
    json timings;
    timings["reconstruct_ms"] = run.timings.reconstruct_ms;
    timings["denoise_ms"] = run.timings.denoise_ms;
    timings["seam_ms"] = run.timings.seam_ms;
    timings["path_ms"] = run.timings.path_ms;
    timings["eval_ms"] = run.timings.eval_ms;
    timings["total_ms"] = run.timings.total_ms;
    timings["detection_speed_mm_s"] = run.timings.detection_speed_mm_s;
    run.timings_json = timings.dump(2) + "\n";
    return run;
}

std::string run_pipeline_dir(const fs::path& session_dir, const PipelineConfig& cfg,
                             const fs::path& out_dir) {
    const ScanSession session = pcio::read_session(session_dir);

    std::vector<Vec3> truth_seam;
    Path truth_path;
    if (fs::exists(session_dir / "truth_seam.ply")) {
        truth_seam = pcio::read_ply(session_dir / "truth_seam.ply").points;
    }
    if (fs::exists(session_dir / "truth_path.csv")) {
        truth_path = pcio::read_path_csv(session_dir / "truth_path.csv");
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) raise(ErrorCode::IoError, "cannot create " + out_dir.string());

    const PipelineRun run = run_pipeline(session, cfg, truth_seam.empty() ? nullptr : &truth_seam,
                                         truth_path.empty() ? nullptr : &truth_path);

    pcio::write_ply(run.reconstruct.model, out_dir / "model.ply");
    pcio::write_ply(run.denoise.cloud, out_dir / "denoised.ply");
    PointCloud edges;
    for (std::size_t i : run.seam.indices) {
        edges.points.push_back(run.denoise.cloud.points[i]);
        if (run.denoise.cloud.has_normals()) {
            edges.normals.push_back(run.denoise.cloud.normals[i]);
        }
    }
    pcio::write_ply(edges, out_dir / "edges.ply");
    pcio::atomic_write(out_dir / "edges_debug.csv", seam_debug_csv(run.seam.scores));
    if (!run.path.plan.path.empty()) {
        pcio::write_path_csv(run.path.plan.path, out_dir / "path.csv");
    }
    pcio::atomic_write(out_dir / "report.json", run.report_json);
    pcio::atomic_write(out_dir / "timings.json", run.timings_json);
    return run.report_json;
}

void synth_session_dir(synth::WorkpieceKind kind, std::uint64_t seed, const PipelineConfig& cfg,
                       const fs::path& out_dir) {
    synth::Workpiece w = synth::Workpiece::standard(kind);
    if (cfg.synth.density > 0.0) w.density = cfg.synth.density;
    std::vector<synth::ScannerModel> poses = synth::default_scan_poses(kind);
    for (synth::ScannerModel& s : poses) {
        if (cfg.synth.depth_noise_sigma >= 0.0) s.depth_noise_sigma = cfg.synth.depth_noise_sigma;
        if (cfg.synth.pose_noise_rot_deg >= 0.0) s.pose_noise_rot_deg = cfg.synth.pose_noise_rot_deg;
        if (cfg.synth.pose_noise_trans >= 0.0) s.pose_noise_trans = cfg.synth.pose_noise_trans;
    }
    const ScanSession session = synth::scan_session(w, poses, seed);
    pcio::write_session(session, out_dir);

    PointCloud seam_cloud;
    seam_cloud.points = synth::seam_points(w, 0.001);
    pcio::write_ply(seam_cloud, out_dir / "truth_seam.ply");
    const Path truth = synth::seam_path(w, 0.002);
    if (!truth.empty()) {
        pcio::write_path_csv(truth, out_dir / "truth_path.csv");
    }
}

std::string evaluate_files(const fs::path& detected_file, const fs::path& truth_file,
                           const PipelineConfig& cfg) {
    auto load = [](const fs::path& p, std::vector<Vec3>& pts, Path& path) {
        if (p.extension() == ".csv") {
            path = pcio::read_path_csv(p);
            pts.reserve(path.size());
            for (const PathPoint& pp : path) pts.push_back(pp.position);
        } else {
            pts = pcio::read_ply(p).points;
        }
    };
    std::vector<Vec3> detected_pts, truth_pts;
    Path detected_path, truth_path;
    load(detected_file, detected_pts, detected_path);
    load(truth_file, truth_pts, truth_path);
    if (truth_pts.empty()) raise(ErrorCode::EmptyInput, "truth file holds no points");

    double cell = cfg.eval.cell_size;
    if (!(cell > 0.0)) {
        PointCloud t;
        t.points = truth_pts;
        cell = cfg.eval.cell_factor * (t.size() > 1 ? mean_point_spacing(t) : 0.001);
    }
    const json out = eval_report(detected_pts, truth_pts,
                                 detected_path.empty() ? nullptr : &detected_path,
                                 truth_path.empty() ? nullptr : &truth_path, cell,
                                 cfg.eval.tolerance_cells);
    return out.dump(2) + "\n";
}

}  // namespace seamforge::pipeline
