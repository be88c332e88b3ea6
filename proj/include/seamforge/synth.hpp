#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seamforge/rng.hpp"
#include "seamforge/types.hpp"

namespace seamforge::synth {

enum class WorkpieceKind { VButtPlate, CylinderOnPlate, YShape, Dihedral };

WorkpieceKind parse_kind(const std::string& name);  // InvalidArgument on unknown names
const char* kind_name(WorkpieceKind kind);

/// Synthetic workpiece with analytic surfaces and an analytic seam.
/// Dimensions are fixture constants in meters; density is the surface
/// sampling rate in points per square meter.
struct Workpiece {
    WorkpieceKind kind = WorkpieceKind::VButtPlate;
    double density = 1.0e6;

    // v_butt_plate: groove over a 2*extent_x long joint
    double vbutt_seam_length = 0.50;
    double vbutt_extent = 0.30;        // plate half extent in x and y
    double vbutt_groove_half = 0.006;  // half width of the groove mouth
    double vbutt_depth = 0.010;        // root depth
    double vbutt_fillet = 0.004;       // shoulder blend radius

    // cylinder_on_plate: dome-capped cylinder standing on a square plate
    double cyl_radius = 0.05;
    double cyl_height = 0.08;      // straight section, dome on top
    double cyl_plate_half = 0.15;  // 300 mm plate

    // dihedral: two square faces meeting at 90 degrees
    double dihedral_length = 0.40;  // extent along the crease
    double dihedral_width = 0.20;   // extent of each face
    double dihedral_seam_length = 0.30;

    // y_shape: three ribs on a plate, 120 degrees apart
    double y_plate_half = 0.14;
    double y_rib_length = 0.11;
    double y_rib_half_thickness = 0.007;
    double y_rib_height = 0.07;

    static Workpiece standard(WorkpieceKind kind);
};

/// Quasi-uniform jittered-grid sampling of every surface patch with exact
/// analytic normals.
PointCloud sample_surface(const Workpiece& w, double density, Rng& rng);

/// Analytic seam sampled at the given spacing (arc-length parameterized).
std::vector<Vec3> seam_points(const Workpiece& w, double spacing);

/// Seam with analytic torch frames (travel tangent, torch along the bisector
/// of the adjacent surface normals). cyclic reports closed seams. The y_shape
/// seam is a set of disjoint fillet lines, so it has no single path: its
/// seam_path is empty.
Path seam_path(const Workpiece& w, double spacing, bool* cyclic = nullptr);

/// Pinhole depth scanner standing in for the RGB-D camera.
struct ScannerModel {
    RigidTransform pose;             // true camera-to-base transform
    double fov_deg = 45.0;           // full angle of the square image
    int resolution = 480;            // pixels per image side
    double depth_noise_sigma = 0.0;  // Gaussian noise along each ray, meters
    double pose_noise_rot_deg = 0.0;   // reported-pose perturbation magnitudes
    double pose_noise_trans = 0.0;     // (exact magnitude, random direction)
    double occlusion_tolerance = 0.0;  // z-buffer depth window; 0 = auto

    void validate() const;
};

/// Camera at `eye` looking at `target` (camera +Z forward, +Y down).
ScannerModel look_at(const Vec3& eye, const Vec3& target, double fov_deg, int resolution);

struct ScanResult {
    ScanFrame frame;           // cloud in camera coordinates, reported pose
    RigidTransform true_pose;  // pose before the injected perturbation
    RigidTransform injected;   // reported = injected * true
};

/// Z-buffer visibility from the scanner pose over a pre-sampled surface,
/// depth noise along rays, pose perturbation of exactly the configured
/// magnitude. Throws EmptyView when nothing is visible.
ScanResult virtual_scan_sampled(const PointCloud& surface, const ScannerModel& scanner, Rng& rng,
                                double sample_spacing);

/// Convenience wrapper: samples the workpiece, then scans it.
ScanResult virtual_scan(const Workpiece& w, const ScannerModel& scanner, std::uint64_t seed);

/// The bundled scan scripts (poses, noise) per workpiece kind.
std::vector<ScannerModel> default_scan_poses(WorkpieceKind kind);

/// Samples the workpiece once and scans it from every pose. Frames keep the
/// perturbed (reported) poses; the true poses are retained in the session.
ScanSession scan_session(const Workpiece& w, const std::vector<ScannerModel>& poses,
                         std::uint64_t seed);

/// Fixed flange-to-camera calibration used by the synthetic sessions.
RigidTransform synthetic_hand_eye();

}  // namespace seamforge::synth
