#include "seamforge/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "seamforge/parallel.hpp"

namespace seamforge {

void NeighborhoodSpec::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        raise(ErrorCode::InvalidParameter, "neighborhood radius must be positive");
    }
    if (min_points < 3) {
        raise(ErrorCode::InvalidParameter, "neighborhood min_points must be at least 3");
    }
}

Neighborhood adaptive_neighbors(const KdTree& index, const Vec3& p, const NeighborhoodSpec& spec) {
    spec.validate();
    const std::size_t m = static_cast<std::size_t>(spec.min_points);
    if (index.size() < m + 1) {
        raise(ErrorCode::InsufficientPoints,
              "cloud smaller than min_points + 1 for adaptive neighborhood");
    }

    Neighborhood out;
    std::vector<std::size_t> in_radius = index.radius(p, spec.radius);
    // Drop exact coincidences (the query point itself when it is in the cloud).
    in_radius.erase(std::remove_if(in_radius.begin(), in_radius.end(),
                                   [&](std::size_t i) { return index.point(i) == p; }),
                    in_radius.end());
    if (in_radius.size() >= m) {
        out.indices = std::move(in_radius);
        out.realized_radius = spec.radius;
        out.fallback = false;
        return out;
    }

    out.indices = index.knn(p, m, /*exclude_zero=*/true);
    out.fallback = true;
    out.realized_radius = spec.radius;
    if (!out.indices.empty()) {
        const double far = (index.point(out.indices.back()) - p).norm();
        out.realized_radius = std::max(spec.radius, far);
    }
    return out;
}

namespace {

struct NormalFit {
    Vec3 normal = Vec3::Zero();
    bool valid = false;
};

NormalFit fit_plane_normal(const KdTree& index, const Vec3& p,
                           const std::vector<std::size_t>& neighbors) {
    NormalFit fit;
    if (neighbors.size() < 3) return fit;

    Vec3 centroid = Vec3::Zero();
    for (std::size_t i : neighbors) centroid += index.point(i);
    centroid /= static_cast<double>(neighbors.size());

    Mat3 cov = Mat3::Zero();
    for (std::size_t i : neighbors) {
        const Vec3 d = index.point(i) - centroid;
        cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 evals = eig.eigenvalues();  // ascending
    // Coincident neighbors: all spread vanishes. Collinear: the two smallest
    // eigenvalues vanish together.
    if (!(evals[2] > 0.0) || evals[1] <= 1e-12 * evals[2]) return fit;

    fit.normal = eig.eigenvectors().col(0).normalized();
    fit.valid = true;
    (void)p;
    return fit;
}

Vec3 oriented(const Vec3& n, const Vec3& p, const std::optional<Vec3>& viewpoint) {
    if (viewpoint) {
        return (n.dot(*viewpoint - p) < 0.0) ? Vec3(-n) : n;
    }
    if (n.z() < 0.0) return -n;
    if (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0))) return -n;
    return n;
}

}  // namespace

Vec3 estimate_normal(const KdTree& index, const Vec3& p, const NeighborhoodSpec& spec,
                     const std::optional<Vec3>& viewpoint) {
    const Neighborhood nb = adaptive_neighbors(index, p, spec);
    const NormalFit fit = fit_plane_normal(index, p, nb.indices);
    if (!fit.valid) {
        raise(ErrorCode::DegenerateNeighborhood,
              "neighborhood is collinear or coincident; no plane normal exists");
    }
    return oriented(fit.normal, p, viewpoint);
}

PointCloud estimate_all_normals(const PointCloud& cloud, const NeighborhoodSpec& spec,
                                const std::optional<Vec3>& viewpoint) {
    spec.validate();
    if (cloud.size() < static_cast<std::size_t>(spec.min_points) + 1) {
        raise(ErrorCode::InsufficientPoints, "cloud too small to estimate normals");
    }
    const KdTree index(cloud);
    PointCloud out;
    out.points = cloud.points;
    out.normals.assign(cloud.size(), Vec3::Zero());
    std::vector<std::uint8_t> valid(cloud.size(), 0);

    parallel_for(cloud.size(), [&](std::size_t i) {
        const Neighborhood nb = adaptive_neighbors(index, cloud.points[i], spec);
        const NormalFit fit = fit_plane_normal(index, cloud.points[i], nb.indices);
        if (fit.valid) {
            out.normals[i] = oriented(fit.normal, cloud.points[i], viewpoint);
            valid[i] = 1;
        }
    });

    std::vector<std::size_t> good;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (valid[i]) good.push_back(i);
    }
    if (good.empty()) {
        raise(ErrorCode::DegenerateNeighborhood, "every neighborhood in the cloud is degenerate");
    }
    if (good.size() < cloud.size()) {
        // Degenerate points borrow the nearest valid point's normal.
        std::vector<Vec3> good_points(good.size());
        for (std::size_t j = 0; j < good.size(); ++j) good_points[j] = cloud.points[good[j]];
        const KdTree good_index(std::move(good_points));
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (!valid[i]) {
                const std::size_t j = good_index.nearest(cloud.points[i]);
                out.normals[i] = out.normals[good[j]];
            }
        }
    }
    return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
    if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
        raise(ErrorCode::InvalidParameter, "voxel size must be positive");
    }
    cloud.validate();

    struct Bucket {
        Vec3 position_sum = Vec3::Zero();
        Vec3 normal_sum = Vec3::Zero();
        std::size_t count = 0;
        std::size_t first = 0;
    };

    auto key_of = [voxel_size](const Vec3& p) {
        const auto cell = [voxel_size](double v) {
            return static_cast<std::int64_t>(std::floor(v / voxel_size));
        };
        // 21 bits per axis, offset into the positive range.
        const std::int64_t kOffset = std::int64_t(1) << 20;
        const std::int64_t kMask = (std::int64_t(1) << 21) - 1;
        const std::int64_t x = (cell(p.x()) + kOffset) & kMask;
        const std::int64_t y = (cell(p.y()) + kOffset) & kMask;
        const std::int64_t z = (cell(p.z()) + kOffset) & kMask;
        return (x << 42) | (y << 21) | z;
    };

    const bool with_normals = cloud.has_normals();
    std::unordered_map<std::int64_t, Bucket> buckets;
    buckets.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        Bucket& b = buckets[key_of(cloud.points[i])];
        if (b.count == 0) b.first = i;
        b.position_sum += cloud.points[i];
        if (with_normals) b.normal_sum += cloud.normals[i];
        ++b.count;
    }

    // Emit voxels in order of first occurrence so the result does not depend
    // on hash iteration order.
    std::vector<const Bucket*> ordered;
    ordered.reserve(buckets.size());
    for (const auto& [key, bucket] : buckets) ordered.push_back(&bucket);
    std::sort(ordered.begin(), ordered.end(),
              [](const Bucket* a, const Bucket* b) { return a->first < b->first; });

    PointCloud out;
    out.points.reserve(ordered.size());
    if (with_normals) out.normals.reserve(ordered.size());
    for (const Bucket* b : ordered) {
        out.points.push_back(b->position_sum / static_cast<double>(b->count));
        if (with_normals) {
            Vec3 n = b->normal_sum;
            const double len = n.norm();
            if (len > 1e-12) {
                n /= len;
            } else {
                n = cloud.normals[b->first];  // cancelling normals: keep the first
            }
            out.normals.push_back(n);
        }
    }
    return out;
}

double mean_point_spacing(const PointCloud& cloud) {
    if (cloud.size() < 2) {
        raise(ErrorCode::InsufficientPoints, "mean point spacing needs at least two points");
    }
    const KdTree index(cloud);
    std::vector<double> nn(cloud.size());
    parallel_for(cloud.size(), [&](std::size_t i) {
        const auto k = index.knn(cloud.points[i], 2);
        const std::size_t other = (k[0] == i && k.size() > 1) ? k[1] : k[0];
        nn[i] = (cloud.points[other] - cloud.points[i]).norm();
    });
    double total = 0.0;
    for (double d : nn) total += d;  // fixed-order reduction
    return total / static_cast<double>(cloud.size());
}

}  // namespace seamforge
