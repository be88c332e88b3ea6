#include "seamforge/seam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seamforge/parallel.hpp"

namespace seamforge::seam {

namespace {
constexpr double kRatioMinimum = 27.0;  // (a+b+1)^3/(ab) at a=b=1
constexpr double kDetRelEps = 1e-12;    // det below this fraction of tr^3 counts as rank-deficient
constexpr double kGradientSupport = 0.4;  // axis offset floor as a fraction of the radius
}  // namespace

void SeamConfig::validate() const {
    neighborhood.validate();
    if (!(threshold > kRatioMinimum)) {
        raise(ErrorCode::InvalidParameter,
              "seam threshold must exceed 27, the analytic minimum of tr^3/det");
    }
    if (!(boundary_gap > 0.0) || !(boundary_gap < 2.0 * M_PI)) {
        raise(ErrorCode::InvalidParameter, "boundary gap must lie in (0, 2*pi)");
    }
    if (det_floor < 0.0 || !std::isfinite(det_floor)) {
        raise(ErrorCode::InvalidParameter, "det floor must be >= 0");
    }
    if (intensity_gate < 0.0 || !std::isfinite(intensity_gate)) {
        raise(ErrorCode::InvalidParameter, "intensity gate must be >= 0");
    }
}

double edge_intensity(const KdTree& index, const Vec3& p, const NeighborhoodSpec& spec) {
    const Neighborhood nb = adaptive_neighbors(index, p, spec);
    if (nb.indices.empty()) return 0.0;
    Vec3 centroid = Vec3::Zero();
    for (std::size_t i : nb.indices) centroid += index.point(i);
    centroid /= static_cast<double>(nb.indices.size());
    return (p - centroid).norm() / nb.realized_radius;
}

Vec3 intensity_gradient(const KdTree& index, std::size_t point_index,
                        const std::vector<double>& intensities, const NeighborhoodSpec& spec) {
    const Vec3& p = index.point(point_index);
    const Neighborhood nb = adaptive_neighbors(index, p, spec);
    const double i_o = intensities[point_index];
    // Slopes are sampled at the neighborhood scale: neighbors offset along
    // the axis by less than this fraction of the radius carry no axis-k
    // information, only short-range sampling noise (whose local slopes rival
    // any real edge ramp).
    const double min_delta = kGradientSupport * nb.realized_radius;

    Vec3 grad = Vec3::Zero();
    for (int axis = 0; axis < 3; ++axis) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j : nb.indices) {
            const Vec3 d = index.point(j) - p;
            const double delta_k = d[axis];
            if (std::abs(delta_k) < min_delta) continue;
            // Finite-difference slope toward neighbor j projected onto the
            // axis: |I_j - I_o|/d * |delta_k|/d. Bounded by |I_j - I_o|/d,
            // unlike the reciprocal form, which diverges for neighbors
            // perpendicular to the axis and swamps every axis with noise.
            // The magnitude is what matters: the structure matrix squares
            // the components, and an intensity peak has slopes of both
            // signs on its two sides.
            const double dist_sq = d.squaredNorm();
            const double value = std::abs(intensities[j] - i_o) * std::abs(delta_k) / dist_sq;
            best = std::max(best, value);
        }
        grad[axis] = std::isfinite(best) ? best : 0.0;
    }
    return grad;
}

Mat3 structure_matrix(const KdTree& index, std::size_t point_index,
                      const std::vector<Vec3>& gradients, const NeighborhoodSpec& spec,
                      bool smoothing) {
    if (!smoothing) {
        const Vec3& g = gradients[point_index];
        return g * g.transpose();
    }

    const Vec3& p = index.point(point_index);
    const Neighborhood nb = adaptive_neighbors(index, p, spec);
    const std::size_t n = nb.indices.size();

    std::vector<double> dist(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        dist[j] = (index.point(nb.indices[j]) - p).norm();
        mean += dist[j];
    }
    mean /= static_cast<double>(n);
    double variance = 0.0;
    for (double d : dist) variance += (d - mean) * (d - mean);
    variance /= static_cast<double>(n);
    const double sigma = std::sqrt(variance);

    Mat3 h = Mat3::Zero();
    if (sigma <= 1e-12 * std::max(mean, 1.0)) {
        // Equidistant neighbors: the Gaussian is undefined, use uniform weights.
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3& g = gradients[nb.indices[j]];
            h += g * g.transpose();
        }
        return h;
    }
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = norm * std::exp(-dist[j] * dist[j] * inv_2s2);
        const Vec3& g = gradients[nb.indices[j]];
        h += w * (g * g.transpose());
    }
    return h;
}

RatioResult ratio_test(const Mat3& h, double threshold) {
    const double tr = h.trace();
    const double det = h.determinant();
    if (!(tr > 0.0)) {
        return {0.0, false};  // zero structure matrix: featureless
    }
    if (det <= kDetRelEps * tr * tr * tr) {
        // A vanishing eigenvalue: the ratio diverges, which is the boundary /
        // single-high-eigenvalue case. Relative test keeps this scale-invariant.
        return {std::numeric_limits<double>::infinity(), true};
    }
    const double ratio = (tr * tr * tr) / det;
    return {ratio, ratio >= threshold};
}

bool open_boundary(const KdTree& index, std::size_t point_index, const Vec3& normal,
                   const NeighborhoodSpec& spec, double max_gap) {
    const Vec3& p = index.point(point_index);
    const Neighborhood nb = adaptive_neighbors(index, p, spec);
    if (nb.indices.size() < 3) return true;

    // Orthobasis of the tangent plane; seed axis chosen deterministically.
    int min_axis = 0;
    normal.cwiseAbs().minCoeff(&min_axis);
    const Vec3 u = normal.cross(Vec3::Unit(min_axis)).normalized();
    const Vec3 v = normal.cross(u);

    std::vector<double> angles;
    angles.reserve(nb.indices.size());
    for (std::size_t j : nb.indices) {
        const Vec3 d = index.point(j) - p;
        const double x = d.dot(u);
        const double y = d.dot(v);
        if (x * x + y * y < 1e-24) continue;  // along the normal, no azimuth
        angles.push_back(std::atan2(y, x));
    }
    if (angles.size() < 3) return true;
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * M_PI - angles.back();
    for (std::size_t j = 1; j < angles.size(); ++j) {
        gap = std::max(gap, angles[j] - angles[j - 1]);
    }
    return gap > max_gap;
}

std::vector<EdgeScore> compute_edge_scores(const PointCloud& cloud, const SeamConfig& cfg) {
    cfg.validate();
    const KdTree index(cloud);
    const std::size_t n = cloud.size();
    std::vector<EdgeScore> scores(n);

    std::vector<double> intensities(n);
    parallel_for(n, [&](std::size_t i) {
        intensities[i] = edge_intensity(index, cloud.points[i], cfg.neighborhood);
        scores[i].intensity = intensities[i];
    });

    std::vector<Vec3> gradients(n);
    parallel_for(n, [&](std::size_t i) {
        gradients[i] = intensity_gradient(index, i, intensities, cfg.neighborhood);
        scores[i].gradient = gradients[i];
    });

    std::vector<Mat3> matrices(n);
    parallel_for(n, [&](std::size_t i) {
        matrices[i] = structure_matrix(index, i, gradients, cfg.neighborhood, cfg.smoothing);
    });

    // Spectral floor: pin the smallest eigenvalue at the cloud's baseline
    // gradient energy so Det(H) stays away from zero and the ratio orders
    // points by edge strength.
    double floor_value = 0.0;
    if (cfg.det_floor > 0.0) {
        std::vector<double> traces(n);
        for (std::size_t i = 0; i < n; ++i) traces[i] = matrices[i].trace();
        const std::size_t mid = n / 2;
        std::nth_element(traces.begin(), traces.begin() + mid, traces.end());
        floor_value = cfg.det_floor * traces[mid];
    }

    double gate_value = 0.0;
    if (cfg.intensity_gate > 0.0) {
        std::vector<double> sorted = intensities;
        const std::size_t mid = n / 2;
        std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
        gate_value = cfg.intensity_gate * sorted[mid];
    }

    parallel_for(n, [&](std::size_t i) {
        Mat3 h = matrices[i];
        if (floor_value > 0.0) h += floor_value * Mat3::Identity();
        const RatioResult r = ratio_test(h, cfg.threshold);
        scores[i].ratio = r.ratio;
        scores[i].gated = intensities[i] >= gate_value;
        scores[i].is_edge = r.is_edge && scores[i].gated;
    });
    return scores;
}

std::vector<std::size_t> edge_indices(const std::vector<EdgeScore>& scores, double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].gated && scores[i].ratio >= threshold && scores[i].ratio > 0.0) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::uint8_t> boundary_flags(const PointCloud& cloud, const SeamConfig& cfg) {
    if (!cloud.has_normals()) {
        raise(ErrorCode::InvalidArgument, "boundary detection requires normals");
    }
    const KdTree index(cloud);
    std::vector<std::uint8_t> open(cloud.size(), 0);
    parallel_for(cloud.size(), [&](std::size_t i) {
        open[i] = open_boundary(index, i, cloud.normals[i], cfg.neighborhood, cfg.boundary_gap)
                      ? 1
                      : 0;
    });
    // Dilate by one support radius: the elevated intensity next to an open
    // boundary extends a full neighborhood inward, and those responses are
    // boundary artifacts, not seams.
    std::vector<std::uint8_t> flags(cloud.size(), 0);
    parallel_for(cloud.size(), [&](std::size_t i) {
        if (open[i]) {
            flags[i] = 1;
            return;
        }
        for (std::size_t j : index.radius(cloud.points[i], cfg.neighborhood.radius)) {
            if (open[j]) {
                flags[i] = 1;
                return;
            }
        }
    });
    return flags;
}

std::vector<std::size_t> extract_seam(const PointCloud& cloud, const SeamConfig& cfg) {
    const std::vector<EdgeScore> scores = compute_edge_scores(cloud, cfg);
    std::vector<std::size_t> candidates = edge_indices(scores, cfg.threshold);
    if (!cfg.suppress_boundary || candidates.empty()) return candidates;

    const std::vector<std::uint8_t> boundary = boundary_flags(cloud, cfg);
    std::vector<std::size_t> out;
    out.reserve(candidates.size());
    for (std::size_t i : candidates) {
        if (!boundary[i]) out.push_back(i);
    }
    return out;
}

}  // namespace seamforge::seam
