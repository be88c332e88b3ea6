// seamforge command line: synth | reconstruct | denoise | seam | path | eval | pipeline.
// Thin argument layer over the seamforge C API; exits 0 on success, 1 on
// input errors, 2 on internal errors.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "seamforge.h"

namespace {

int exit_code(sf_status status) {
    switch (status) {
        case SF_OK: return 0;
        case SF_ERROR_INTERNAL: return 2;
        default: return 1;  // input / parameter problems
    }
}

int fail(sf_status status) {
    std::fprintf(stderr, "error (%s): %s\n", sf_status_name(status), sf_last_error());
    return exit_code(status);
}

struct ConfigHandle {
    sf_config* cfg = nullptr;
    ~ConfigHandle() { sf_config_free(cfg); }
};

struct CloudHandle {
    sf_cloud* cloud = nullptr;
    ~CloudHandle() { sf_cloud_free(cloud); }
};

struct PathHandle {
    sf_path* path = nullptr;
    ~PathHandle() { sf_path_free(path); }
};

struct StringHandle {
    char* s = nullptr;
    ~StringHandle() { sf_string_free(s); }
};

sf_status load_config(const std::string& file, ConfigHandle& out) {
    return file.empty() ? sf_config_default(&out.cfg) : sf_config_load(file.c_str(), &out.cfg);
}

bool write_text(const std::string& path, const char* text) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) return false;
    const bool ok = std::fputs(text, f) >= 0;
    return std::fclose(f) == 0 && ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seamforge: weld seam detection and 6-DOF path planning from multi-view scans"};
    app.require_subcommand(1);

    std::string config_file;
    app.add_option("--config", config_file, "pipeline configuration JSON")->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic scan session");
    std::string synth_kind = "v_butt_plate";
    std::uint64_t synth_seed = 42;
    std::string synth_out;
    synth->add_option("--kind", synth_kind,
                      "v_butt_plate | cylinder_on_plate | y_shape | dihedral");
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--out", synth_out, "output session directory")->required();

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "merge a scan session into a model");
    std::string rec_session, rec_out, rec_report;
    rec->add_option("--session", rec_session, "session directory")->required();
    rec->add_option("--out", rec_out, "output model PLY")->required();
    rec->add_option("--report", rec_report, "fitness report JSON");

    // denoise
    auto* den = app.add_subcommand("denoise", "bilateral-filter a model");
    std::string den_in, den_out;
    den->add_option("--in", den_in, "input PLY")->required();
    den->add_option("--out", den_out, "output PLY")->required();

    // seam
    auto* seam = app.add_subcommand("seam", "detect weld seam edge points");
    std::string seam_in, seam_edges, seam_debug;
    seam->add_option("--in", seam_in, "denoised model PLY")->required();
    seam->add_option("--edges", seam_edges, "output edge-point PLY")->required();
    seam->add_option("--debug", seam_debug, "per-point score CSV");

    // path
    auto* path = app.add_subcommand("path", "plan the 6-DOF welding path");
    std::string path_edges, path_model, path_out;
    path->add_option("--edges", path_edges, "edge-point PLY")->required();
    path->add_option("--model", path_model, "model PLY (for surface normals)")->required();
    path->add_option("--out", path_out, "output path CSV")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "score a detection/path against ground truth");
    std::string ev_detected, ev_truth, ev_report;
    ev->add_option("--detected", ev_detected, "path CSV or edge PLY")->required();
    ev->add_option("--truth", ev_truth, "truth path CSV or seam PLY")->required();
    ev->add_option("--report", ev_report, "output report JSON")->required();

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "run every stage over a session");
    std::string pipe_session, pipe_out;
    pipe->add_option("--session", pipe_session, "session directory")->required();
    pipe->add_option("--out", pipe_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    ConfigHandle cfg;
    if (sf_status st = load_config(config_file, cfg)) return fail(st);

    if (synth->parsed()) {
        if (sf_status st =
                sf_synth_session(synth_kind.c_str(), synth_seed, cfg.cfg, synth_out.c_str())) {
            return fail(st);
        }
        std::printf("session written to %s\n", synth_out.c_str());
        return 0;
    }

    if (rec->parsed()) {
        CloudHandle model;
        StringHandle report;
        if (sf_status st =
                sf_reconstruct(rec_session.c_str(), cfg.cfg, &model.cloud, &report.s)) {
            return fail(st);
        }
        if (sf_status st = sf_cloud_write_ply(model.cloud, rec_out.c_str())) return fail(st);
        if (!rec_report.empty() && !write_text(rec_report, report.s)) {
            std::fprintf(stderr, "error: cannot write %s\n", rec_report.c_str());
            return 1;
        }
        std::printf("%s", report.s);
        return 0;
    }

    if (den->parsed()) {
        CloudHandle in, out;
        if (sf_status st = sf_cloud_read_ply(den_in.c_str(), &in.cloud)) return fail(st);
        if (sf_status st = sf_denoise(in.cloud, cfg.cfg, &out.cloud)) return fail(st);
        if (sf_status st = sf_cloud_write_ply(out.cloud, den_out.c_str())) return fail(st);
        std::printf("denoised %zu points\n", sf_cloud_size(out.cloud));
        return 0;
    }

    if (seam->parsed()) {
        CloudHandle in, edges;
        StringHandle debug;
        if (sf_status st = sf_cloud_read_ply(seam_in.c_str(), &in.cloud)) return fail(st);
        if (sf_status st = sf_detect_seam(in.cloud, cfg.cfg, &edges.cloud,
                                          seam_debug.empty() ? nullptr : &debug.s)) {
            return fail(st);
        }
        if (sf_status st = sf_cloud_write_ply(edges.cloud, seam_edges.c_str())) return fail(st);
        if (!seam_debug.empty() && !write_text(seam_debug, debug.s)) {
            std::fprintf(stderr, "error: cannot write %s\n", seam_debug.c_str());
            return 1;
        }
        std::printf("detected %zu edge points\n", sf_cloud_size(edges.cloud));
        return 0;
    }

    if (path->parsed()) {
        CloudHandle edges, model;
        PathHandle planned;
        StringHandle report;
        if (sf_status st = sf_cloud_read_ply(path_edges.c_str(), &edges.cloud)) return fail(st);
        if (sf_status st = sf_cloud_read_ply(path_model.c_str(), &model.cloud)) return fail(st);
        if (sf_status st =
                sf_plan_path(edges.cloud, model.cloud, cfg.cfg, &planned.path, &report.s)) {
            return fail(st);
        }
        if (sf_status st = sf_path_write_csv(planned.path, path_out.c_str())) return fail(st);
        std::printf("%s", report.s);
        return 0;
    }

    if (ev->parsed()) {
        StringHandle report;
        if (sf_status st =
                sf_evaluate(ev_detected.c_str(), ev_truth.c_str(), cfg.cfg, &report.s)) {
            return fail(st);
        }
        if (!write_text(ev_report, report.s)) {
            std::fprintf(stderr, "error: cannot write %s\n", ev_report.c_str());
            return 1;
        }
        std::printf("%s", report.s);
        return 0;
    }

    if (pipe->parsed()) {
        StringHandle report;
        if (sf_status st =
                sf_run_pipeline(pipe_session.c_str(), cfg.cfg, pipe_out.c_str(), &report.s)) {
            return fail(st);
        }
        std::printf("%s", report.s);
        return 0;
    }

    return 0;
}
