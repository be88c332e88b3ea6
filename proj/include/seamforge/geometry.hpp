#pragma once

#include <optional>
#include <vector>

#include "seamforge/kdtree.hpp"
#include "seamforge/types.hpp"

namespace seamforge {

/// Radius-with-minimum-count neighborhood rule: the radius grows until at
/// least min_points neighbors exist.
struct NeighborhoodSpec {
    double radius = 0.0;  // meters, > 0
    int min_points = 10;  // >= 3

    void validate() const;
};

/// Result of a neighborhood query. realized_radius equals the spec radius on
/// the radius branch and the distance to the farthest returned neighbor when
/// the minimum-count fallback triggered.
struct Neighborhood {
    std::vector<std::size_t> indices;  // sorted by (distance, index); query point excluded
    double realized_radius = 0.0;
    bool fallback = false;
};

/// Neighbors of p under the adaptive rule. Zero-distance matches (p itself
/// when p belongs to the cloud) are excluded. Throws InsufficientPoints when
/// the cloud has fewer than min_points + 1 points.
Neighborhood adaptive_neighbors(const KdTree& index, const Vec3& p, const NeighborhoodSpec& spec);

/// Plane-fit normal: eigenvector of the neighborhood covariance (about the
/// neighbor centroid) with the smallest eigenvalue, unit length. Sign points
/// toward `viewpoint` when given, else into the +Z hemisphere. Throws
/// DegenerateNeighborhood for collinear or coincident neighborhoods.
Vec3 estimate_normal(const KdTree& index, const Vec3& p, const NeighborhoodSpec& spec,
                     const std::optional<Vec3>& viewpoint = std::nullopt);

/// Cloud-wide normal estimation. Points with degenerate neighborhoods take
/// the nearest valid point's normal; throws DegenerateNeighborhood only when
/// every point is degenerate.
PointCloud estimate_all_normals(const PointCloud& cloud, const NeighborhoodSpec& spec,
                                const std::optional<Vec3>& viewpoint = std::nullopt);

/// One point per occupied voxel: the centroid of the voxel's points, normals
/// averaged and renormalized. Output voxels ordered by first occurrence in
/// the input. Throws InvalidParameter for voxel_size <= 0.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

/// Mean nearest-neighbor distance; the pipeline's scale reference for
/// default radii and voxel sizes. Throws InsufficientPoints for size < 2.
double mean_point_spacing(const PointCloud& cloud);

}  // namespace seamforge
