#pragma once

#include <vector>

#include "seamforge/geometry.hpp"
#include "seamforge/types.hpp"

namespace seamforge::denoise {

struct BilateralConfig {
    double radius = 0.0;   // neighborhood radius, meters
    double sigma_m = 0.0;  // Gaussian width on spatial distance, meters
    double sigma_n = 0.0;  // Gaussian width on normal distance, meters
    int iterations = 1;

    void validate() const;
};

/// Normal-distance displacement for one point: the Gaussian-weighted average
/// of the neighbors' offsets along the normal,
///   dp = sum w_m(|q-p|) * w_n(|<n,q-p>|) * <n,q-p> / sum w_m * w_n.
/// An empty neighborhood yields 0 by convention.
double bilateral_delta(const Vec3& p, const Vec3& n_p, const std::vector<Vec3>& neighbors,
                       const BilateralConfig& cfg);

/// Moves every point to p + dp * n_p, with all displacements computed from
/// the frozen input cloud (simultaneous update, deterministic under any point
/// order). Repeats cfg.iterations times, re-estimating normals between
/// passes; output normals are re-estimated after the final pass.
/// normal_spec drives the normal re-estimation.
PointCloud bilateral_filter(const PointCloud& cloud, const BilateralConfig& cfg,
                            const NeighborhoodSpec& normal_spec);

}  // namespace seamforge::denoise
