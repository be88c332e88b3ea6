#pragma once

#include <vector>

#include "seamforge/geometry.hpp"
#include "seamforge/types.hpp"

namespace seamforge::path {

struct PathConfig {
    double torch_offset = 0.0;      // stand-off along the surface normal, meters, >= 0
    int smoothing_window = 5;       // moving-direction average window, odd, >= 1
    int interpolation_density = 4;  // subdivisions per segment, >= 1

    void validate() const;
};

struct OrderResult {
    std::vector<std::size_t> order;  // indices into the input list, longest polyline
    std::size_t polyline_count = 0;
    std::size_t dropped_points = 0;  // points on the discarded polylines
    double median_spacing = 0.0;     // median consecutive distance of the greedy walk
    bool cyclic = false;             // endpoints of the longest polyline nearly meet
};

/// Greedy nearest-neighbor chaining from the extremal point along the
/// dominant PCA axis. Consecutive jumps longer than 5x the median spacing
/// split the walk; the longest polyline (by count, ties by length) is
/// returned, the rest is reported. cyclic is set when the retained polyline
/// closes on itself within 2x the median spacing.
OrderResult order_seam_points(const std::vector<Vec3>& edge_points);

/// p + d * n for each point.
std::vector<Vec3> offset_points(const std::vector<Vec3>& ordered, const std::vector<Vec3>& normals,
                                double d);

struct FrameBuildResult {
    Path path;
    std::size_t dropped_duplicates = 0;
};

/// Frames along an ordered path: travel vectors between consecutive points,
/// averaged over the smoothing window (clamped at open ends, wrapped when
/// cyclic), re-orthogonalized against the per-point surface normals.
/// Consecutive duplicate positions are skipped and reported.
FrameBuildResult build_frames(const std::vector<Vec3>& positions, const std::vector<Vec3>& normals,
                              const PathConfig& cfg, bool cyclic);

/// Densifies with rho subdivisions per segment: linear positions, sine-
/// weighted spherical interpolation of the frame rotations. Endpoints of each
/// segment are preserved bit-exactly; output size is (n-1)*rho + 1.
Path interpolate_path(const Path& sparse, int rho);

/// Single rotation slerp used by interpolate_path; alpha in [0,1]. Throws
/// AmbiguousRotation when the two frames are a half-turn apart.
Mat3 slerp_rotation(const Mat3& a, const Mat3& b, double alpha);

struct PlanResult {
    Path path;           // densified 6-DOF path
    Path waypoints;      // pre-interpolation path points (the detected ones)
    OrderResult order;
    std::size_t dropped_duplicates = 0;
};

/// Full planning stage: order the edge points, re-estimate normals on the
/// model at each retained point (window-averaged alongside the travel
/// smoothing), offset by the torch stand-off, build frames, interpolate.
PlanResult plan(const std::vector<Vec3>& edge_points, const PointCloud& model,
                const PathConfig& cfg, const NeighborhoodSpec& normal_spec);

}  // namespace seamforge::path
