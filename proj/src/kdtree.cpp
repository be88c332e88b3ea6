#include "seamforge/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seamforge/error.hpp"

namespace seamforge {

namespace {
struct Candidate {
    double sq_dist;
    std::size_t index;
    bool operator<(const Candidate& other) const {
        if (sq_dist != other.sq_dist) return sq_dist < other.sq_dist;
        return index < other.index;
    }
};
}  // namespace

KdTree::KdTree(const PointCloud& cloud) : KdTree(cloud.points) {}

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.empty()) {
        raise(ErrorCode::EmptyInput, "cannot build a spatial index over an empty cloud");
    }
    for (const Vec3& p : points_) {
        if (!p.allFinite()) {
            raise(ErrorCode::DataError, "spatial index input contains non-finite coordinates");
        }
    }
    build();
}

void KdTree::build() {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    root_ = build_range(0, points_.size());
}

std::uint32_t KdTree::build_range(std::size_t begin, std::size_t end) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[id].axis = -1;
        nodes_[id].left = static_cast<std::uint32_t>(begin);
        nodes_[id].right = static_cast<std::uint32_t>(end);
        return id;
    }

    Vec3 lo = points_[order_[begin]];
    Vec3 hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [this, axis](std::uint32_t a, std::uint32_t b) {
                         const double ca = points_[a][axis];
                         const double cb = points_[b][axis];
                         if (ca != cb) return ca < cb;
                         return a < b;  // deterministic layout under ties
                     });
    const double split = points_[order_[mid]][axis];

    const std::uint32_t left = build_range(begin, mid);
    const std::uint32_t right = build_range(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

std::vector<std::size_t> KdTree::radius(const Vec3& p, double r) const {
    std::vector<Candidate> found;
    if (r > 0.0) {
        const double r_sq = r * r;
        std::vector<std::uint32_t> stack{root_};
        while (!stack.empty()) {
            const Node& node = nodes_[stack.back()];
            stack.pop_back();
            if (node.axis < 0) {
                for (std::uint32_t i = node.left; i < node.right; ++i) {
                    const std::size_t idx = order_[i];
                    const double d_sq = (points_[idx] - p).squaredNorm();
                    if (d_sq < r_sq) found.push_back({d_sq, idx});
                }
                continue;
            }
            const double diff = p[node.axis] - node.split;
            // A subtree on the far side of the plane only holds points at
            // axis distance >= |diff|; with the strict < radius it can be
            // skipped as soon as diff^2 >= r^2.
            if (diff < 0.0) {
                stack.push_back(node.left);
                if (diff * diff < r_sq) stack.push_back(node.right);
            } else {
                stack.push_back(node.right);
                if (diff * diff < r_sq) stack.push_back(node.left);
            }
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<std::size_t> out(found.size());
    for (std::size_t i = 0; i < found.size(); ++i) out[i] = found[i].index;
    return out;
}

std::vector<std::size_t> KdTree::knn(const Vec3& p, std::size_t k, bool exclude_zero) const {
    std::vector<std::size_t> out;
    if (k == 0) return out;

    // Max-heap of the best k candidates seen so far (worst on top).
    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    auto worse = [](const Candidate& a, const Candidate& b) { return a < b; };

    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
        const std::uint32_t node_id = stack.back();
        stack.pop_back();
        const Node& node = nodes_[node_id];
        if (node.axis >= 0) {
            const double diff = p[node.axis] - node.split;
            const bool full = heap.size() == k;
            const bool visit_far = !full || diff * diff <= heap.front().sq_dist;
            if (diff < 0.0) {
                if (visit_far) stack.push_back(node.right);
                stack.push_back(node.left);
            } else {
                if (visit_far) stack.push_back(node.left);
                stack.push_back(node.right);
            }
            continue;
        }
        for (std::uint32_t i = node.left; i < node.right; ++i) {
            const std::size_t idx = order_[i];
            const double d_sq = (points_[idx] - p).squaredNorm();
            if (exclude_zero && d_sq == 0.0) continue;
            const Candidate cand{d_sq, idx};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), worse);
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end(), worse);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), worse);
            }
        }
    }

    std::sort(heap.begin(), heap.end());
    out.resize(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].index;
    return out;
}

std::size_t KdTree::nearest(const Vec3& p) const {
    const std::vector<std::size_t> r = knn(p, 1);
    return r.empty() ? npos : r.front();
}

std::size_t KdTree::nearest_within(const Vec3& p, double max_sq_dist) const {
    Candidate best{max_sq_dist, npos};
    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.axis < 0) {
            for (std::uint32_t i = node.left; i < node.right; ++i) {
                const std::size_t idx = order_[i];
                const double d_sq = (points_[idx] - p).squaredNorm();
                if (d_sq < best.sq_dist || (d_sq == best.sq_dist && idx < best.index)) {
                    best = {d_sq, idx};
                }
            }
            continue;
        }
        const double diff = p[node.axis] - node.split;
        if (diff < 0.0) {
            if (diff * diff <= best.sq_dist) stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            if (diff * diff <= best.sq_dist) stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    return best.index;
}

}  // namespace seamforge
