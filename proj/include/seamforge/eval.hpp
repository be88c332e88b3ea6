#pragma once

#include <vector>

#include "seamforge/seam.hpp"
#include "seamforge/types.hpp"

namespace seamforge::eval {

enum class Plane { XY, XZ, YZ };

/// Coverage of the truth raster by the detected raster on one projection
/// plane: |truth cells hit by a detected cell| / |truth cells|. Exact-cell
/// matching. Throws EmptyInput when truth is empty.
double raster_accuracy(const std::vector<Vec3>& detected, const std::vector<Vec3>& truth,
                       Plane plane, double cell_size);

struct PlaneScore {
    double precision = 0.0;  // detected cells within tolerance of a truth cell
    double recall = 0.0;     // truth cells within tolerance of a detected cell
    double accuracy = 0.0;   // harmonic mean of the two
};

/// Tolerant per-plane score: a cell matches when a counterpart exists within
/// `tolerance_cells` (Chebyshev) on the same grid.
PlaneScore plane_score(const std::vector<Vec3>& detected, const std::vector<Vec3>& truth,
                       Plane plane, double cell_size, int tolerance_cells);

/// Harmonic mean of three plane accuracies: 3 / (1/a_xy + 1/a_xz + 1/a_yz).
/// Zero when any accuracy is zero (continuous extension).
double f1_from_accuracies(double a_xy, double a_xz, double a_yz);

/// Overall rasterized score: harmonic mean over the three coordinate planes
/// of the tolerant per-plane accuracies.
double f1_score(const std::vector<Vec3>& detected, const std::vector<Vec3>& truth,
                double cell_size, int tolerance_cells = 1);

struct RmseResult {
    double position = 0.0;      // meters
    double rotation_deg = 0.0;  // geodesic angle between frames
};

/// RMSE between two 6-DOF paths corresponded by normalized arc length.
/// The model path's direction (and, for closed paths, its cyclic phase) is
/// aligned to the truth by minimizing the position error first.
RmseResult pose_rmse(const Path& model_path, const Path& truth_path);

struct SweepEntry {
    double threshold = 0.0;
    double f1 = 0.0;
    std::size_t detected_count = 0;  // raw superlevel-set size at this threshold
    std::size_t chained_count = 0;   // points on the retained polyline
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    double best_threshold = 0.0;
    double best_f1 = 0.0;
};

/// Re-thresholds precomputed edge scores over t_values and scores each
/// detected set against the truth seam. chain_filter applies the same
/// longest-polyline selection the path stage uses, which is what turns the
/// nested superlevel sets into the unimodal quality curve. boundary_mask,
/// when non-empty, removes open-boundary points before chaining.
SweepResult threshold_sweep(const PointCloud& cloud, const std::vector<seam::EdgeScore>& scores,
                            const std::vector<std::uint8_t>& boundary_mask,
                            const std::vector<Vec3>& truth_seam,
                            const std::vector<double>& t_values, double cell_size,
                            bool chain_filter = true);

}  // namespace seamforge::eval
