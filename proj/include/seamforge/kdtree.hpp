#pragma once

#include <cstddef>
#include <vector>

#include "seamforge/types.hpp"

namespace seamforge {

/// Exact kd-tree over a point cloud. Immutable after construction and safe
/// for concurrent queries. Results are exact (verified against linear scans
/// in the test suite), never approximate.
class KdTree {
public:
    /// Copies the positions; throws EmptyInput on an empty cloud.
    explicit KdTree(const PointCloud& cloud);
    explicit KdTree(std::vector<Vec3> points);

    std::size_t size() const { return points_.size(); }
    const Vec3& point(std::size_t i) const { return points_[i]; }
    const std::vector<Vec3>& points() const { return points_; }

    /// Indices of all points with ||q - p|| < r (strict), sorted by
    /// (distance, index).
    std::vector<std::size_t> radius(const Vec3& p, double r) const;

    /// The k nearest points, sorted ascending by distance, ties broken by
    /// original index. Returns fewer when the cloud is smaller than k.
    /// exclude_zero drops exact coincidences with the query point.
    std::vector<std::size_t> knn(const Vec3& p, std::size_t k, bool exclude_zero = false) const;

    /// Index of the nearest point (ties by index). Cloud is never empty.
    std::size_t nearest(const Vec3& p) const;
    /// Nearest point with squared distance <= max_sq_dist, or npos.
    std::size_t nearest_within(const Vec3& p, double max_sq_dist) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    struct Node {
        double split = 0.0;
        int axis = -1;               // -1 marks a leaf
        std::uint32_t left = 0;      // child node ids, or [begin, end) into order_ for leaves
        std::uint32_t right = 0;
    };

    void build();
    std::uint32_t build_range(std::size_t begin, std::size_t end);

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;  // permutation of point ids, leaf ranges index into this
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;

    static constexpr std::size_t kLeafSize = 16;
};

}  // namespace seamforge
