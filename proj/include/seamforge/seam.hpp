#pragma once

#include <vector>

#include "seamforge/geometry.hpp"
#include "seamforge/kdtree.hpp"
#include "seamforge/types.hpp"

namespace seamforge::seam {

struct SeamConfig {
    NeighborhoodSpec neighborhood;
    /// Trace^3/Det acceptance threshold. 27 is the analytic minimum of the
    /// ratio for SPD matrices, so values at or below it accept everything.
    double threshold = 50.0;
    /// Gaussian-weighted neighborhood sum for the structure matrix; without
    /// it H degrades to the single outer product at the query point.
    bool smoothing = true;
    /// Drop detections whose neighborhood covers less than a half-disc of the
    /// tangent plane (open cloud boundaries, not welding grooves).
    bool suppress_boundary = false;
    double boundary_gap = 2.0943951023931953;  // radians, 120 degrees
    /// Spectral floor keeping Det(H) away from zero: before the ratio test,
    /// H += floor * median(Tr(H)) * I. Scattered surface data otherwise
    /// yields rank-deficient H almost everywhere (all neighbor directions
    /// near one plane), which would let the ratio diverge off-seam. The
    /// floor pins the smallest eigenvalue at the cloud's baseline gradient
    /// energy, so the ratio ranks edge strength. 0 disables.
    double det_floor = 1.0;
    /// Edge intensity stays at the sampling-noise baseline over edge-free
    /// areas and peaks at edges; points below intensity_gate * median
    /// intensity are never classified as edges. 0 disables.
    double intensity_gate = 3.0;

    void validate() const;
};

struct EdgeScore {
    double intensity = 0.0;
    Vec3 gradient = Vec3::Zero();
    double ratio = 0.0;  // +inf marks a rank-deficient (boundary-like) structure matrix
    bool gated = true;   // intensity above the edge-free baseline
    bool is_edge = false;
};

struct RatioResult {
    double ratio = 0.0;
    bool is_edge = false;
};

/// Normalized distance from p to its neighborhood centroid (Eq.-intensity).
/// The normalizer is the realized adaptive radius.
double edge_intensity(const KdTree& index, const Vec3& p, const NeighborhoodSpec& spec);

/// Per-axis intensity gradient at cloud point `point_index`: the signed max
/// over neighbors of the finite-difference slope projected onto the axis,
/// (I_i - I_o) * (q_k - p_k) / |q - p|^2. Neighbors with |q_k - p_k| below
/// 1e-3 of the realized radius carry no axis-k information and are skipped;
/// axes with no usable neighbor contribute 0.
Vec3 intensity_gradient(const KdTree& index, std::size_t point_index,
                        const std::vector<double>& intensities, const NeighborhoodSpec& spec);

/// Structure matrix at cloud point `point_index` from its neighbors'
/// gradients: H = sum_i G(o,i) g_i g_i^T with the Gaussian of the neighbor
/// distances (sigma = their standard deviation; uniform weights when it
/// vanishes). With smoothing disabled, H is the single outer product of the
/// point's own gradient.
Mat3 structure_matrix(const KdTree& index, std::size_t point_index,
                      const std::vector<Vec3>& gradients, const NeighborhoodSpec& spec,
                      bool smoothing);

/// Trace^3/Det edge test, eigendecomposition-free. Rank-deficient H with
/// positive trace classifies as edge with ratio +inf (a vanishing eigenvalue
/// drives the ratio beyond any threshold); zero H is never an edge. All
/// branches are invariant under H -> c H.
RatioResult ratio_test(const Mat3& h, double threshold);

/// Tangent-plane gap test: true when the neighbors of `point_index`, seen in
/// the tangent plane of its normal, leave an angular gap wider than max_gap
/// (the signature of an open cloud boundary).
bool open_boundary(const KdTree& index, std::size_t point_index, const Vec3& normal,
                   const NeighborhoodSpec& spec, double max_gap);

/// Intensity, gradient and ratio for every point (three data-parallel passes
/// with the previous pass frozen). Does not apply boundary suppression; the
/// stored is_edge reflects cfg.threshold alone.
std::vector<EdgeScore> compute_edge_scores(const PointCloud& cloud, const SeamConfig& cfg);

/// Indices with ratio >= threshold given precomputed scores (superlevel-set
/// re-filtering for threshold sweeps).
std::vector<std::size_t> edge_indices(const std::vector<EdgeScore>& scores, double threshold);

/// Boundary flags for every point; requires cloud normals.
std::vector<std::uint8_t> boundary_flags(const PointCloud& cloud, const SeamConfig& cfg);

/// Full detection pipeline on a denoised, downsampled cloud with normals:
/// scores, threshold, optional boundary suppression. Returns ascending indices
/// of the surviving edge points.
std::vector<std::size_t> extract_seam(const PointCloud& cloud, const SeamConfig& cfg);

}  // namespace seamforge::seam
