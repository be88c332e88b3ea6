#include "seamforge/path.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "seamforge/kdtree.hpp"

namespace seamforge::path {

void PathConfig::validate() const {
    if (torch_offset < 0.0 || !std::isfinite(torch_offset)) {
        raise(ErrorCode::InvalidParameter, "torch offset must be >= 0");
    }
    if (smoothing_window < 1 || smoothing_window % 2 == 0) {
        raise(ErrorCode::InvalidParameter, "smoothing window must be odd and >= 1");
    }
    if (interpolation_density < 1) {
        raise(ErrorCode::InvalidParameter, "interpolation density must be >= 1");
    }
}

namespace {

// Dominant PCA axis with a deterministic sign (largest |component| positive).
Vec3 dominant_axis(const std::vector<Vec3>& pts) {
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : pts) centroid += p;
    centroid /= static_cast<double>(pts.size());
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : pts) {
        const Vec3 d = p - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Vec3 axis = eig.eigenvectors().col(2);
    int max_c = 0;
    axis.cwiseAbs().maxCoeff(&max_c);
    if (axis[max_c] < 0.0) axis = -axis;
    return axis;
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    return values[mid];
}

}  // namespace

OrderResult order_seam_points(const std::vector<Vec3>& edge_points) {
    const std::size_t n = edge_points.size();
    if (n < 2) {
        raise(ErrorCode::InsufficientPoints, "seam ordering needs at least two points");
    }

    const Vec3 axis = dominant_axis(edge_points);
    std::size_t start = 0;
    double best = edge_points[0].dot(axis);
    for (std::size_t i = 1; i < n; ++i) {
        const double proj = edge_points[i].dot(axis);
        if (proj < best) {
            best = proj;
            start = i;
        }
    }

    // Greedy walk over all points, nearest unvisited next.
    const KdTree tree(edge_points);
    std::vector<std::uint8_t> visited(n, 0);
    std::vector<std::size_t> walk;
    walk.reserve(n);
    std::vector<double> jumps;
    jumps.reserve(n - 1);

    std::size_t current = start;
    visited[current] = 1;
    walk.push_back(current);
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t next = KdTree::npos;
        for (std::size_t k = 2; next == KdTree::npos; k *= 2) {
            const auto cand = tree.knn(edge_points[current], std::min(k, n));
            for (std::size_t c : cand) {
                if (!visited[c]) {
                    next = c;
                    break;
                }
            }
            if (k >= n) break;
        }
        if (next == KdTree::npos) break;  // all visited
        jumps.push_back((edge_points[next] - edge_points[current]).norm());
        visited[next] = 1;
        walk.push_back(next);
        current = next;
    }

    OrderResult result;
    result.median_spacing = median_of(jumps);
    const double split_at = 5.0 * result.median_spacing;

    // Cut the walk at long jumps, keep the longest piece.
    std::vector<std::pair<std::size_t, std::size_t>> pieces;  // [begin, end) into walk
    std::size_t begin = 0;
    for (std::size_t j = 0; j < jumps.size(); ++j) {
        if (jumps[j] > split_at && split_at > 0.0) {
            pieces.emplace_back(begin, j + 1);
            begin = j + 1;
        }
    }
    pieces.emplace_back(begin, walk.size());
    result.polyline_count = pieces.size();

    auto piece_length = [&](const std::pair<std::size_t, std::size_t>& piece) {
        double len = 0.0;
        for (std::size_t i = piece.first + 1; i < piece.second; ++i) {
            len += (edge_points[walk[i]] - edge_points[walk[i - 1]]).norm();
        }
        return len;
    };
    std::size_t best_piece = 0;
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        const std::size_t cur_n = pieces[i].second - pieces[i].first;
        const std::size_t best_n = pieces[best_piece].second - pieces[best_piece].first;
        if (cur_n > best_n ||
            (cur_n == best_n && piece_length(pieces[i]) > piece_length(pieces[best_piece]))) {
            best_piece = i;
        }
    }

    const auto [pb, pe] = pieces[best_piece];
    result.order.assign(walk.begin() + pb, walk.begin() + pe);
    result.dropped_points = n - result.order.size();
    if (result.order.size() >= 3 && result.median_spacing > 0.0) {
        const double closure =
            (edge_points[result.order.front()] - edge_points[result.order.back()]).norm();
        result.cyclic = closure <= 2.0 * result.median_spacing;
    }
    return result;
}

std::vector<Vec3> offset_points(const std::vector<Vec3>& ordered, const std::vector<Vec3>& normals,
                                double d) {
    if (ordered.size() != normals.size()) {
        raise(ErrorCode::InvalidArgument, "offset needs one normal per point");
    }
    std::vector<Vec3> out(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) out[i] = ordered[i] + d * normals[i];
    return out;
}

FrameBuildResult build_frames(const std::vector<Vec3>& positions, const std::vector<Vec3>& normals,
                              const PathConfig& cfg, bool cyclic) {
    cfg.validate();
    if (positions.size() != normals.size()) {
        raise(ErrorCode::InvalidArgument, "build_frames needs one normal per point");
    }

    // Skip consecutive duplicates (they carry no travel direction).
    std::vector<Vec3> pts;
    std::vector<Vec3> nrm;
    pts.reserve(positions.size());
    nrm.reserve(positions.size());
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!pts.empty() && (positions[i] - pts.back()).norm() < 1e-12) {
            ++dropped;
            continue;
        }
        pts.push_back(positions[i]);
        nrm.push_back(normals[i]);
    }
    const std::size_t n = pts.size();
    if (n < 2) {
        raise(ErrorCode::InsufficientPoints, "need at least two distinct path points");
    }

    std::vector<Vec3> travel(n);
    for (std::size_t i = 0; i + 1 < n; ++i) travel[i] = (pts[i + 1] - pts[i]).normalized();
    travel[n - 1] = cyclic ? (pts[0] - pts[n - 1]).normalized() : travel[n - 2];

    const int half = cfg.smoothing_window / 2;
    FrameBuildResult out;
    out.dropped_duplicates = dropped;
    out.path.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 avg = Vec3::Zero();
        for (int w = -half; w <= half; ++w) {
            long j = static_cast<long>(i) + w;
            if (cyclic) {
                j = ((j % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
            } else {
                j = std::clamp<long>(j, 0, static_cast<long>(n) - 1);
            }
            avg += travel[static_cast<std::size_t>(j)];
        }
        const double len = avg.norm();
        if (len < 1e-12) {
            raise(ErrorCode::DegenerateFrame, "smoothed travel direction vanished");
        }
        out.path.push_back(PathPoint::from_directions(pts[i], avg / len, nrm[i]));
    }
    return out;
}

Mat3 slerp_rotation(const Mat3& a, const Mat3& b, double alpha) {
    Eigen::Quaterniond qa(a);
    Eigen::Quaterniond qb(b);
    double dot = qa.dot(qb);
    if (dot < 0.0) {
        qb.coeffs() = -qb.coeffs();
        dot = -dot;
    }
    dot = std::min(dot, 1.0);
    // Quaternion angle is half the rotation angle; a half-turn between the
    // frames (rotation angle pi) leaves the interpolation path ambiguous.
    const double theta = std::acos(dot);
    if (2.0 * theta > M_PI - 1e-9) {
        raise(ErrorCode::AmbiguousRotation,
              "consecutive rotations are a half-turn apart; interpolation is ambiguous");
    }
    Eigen::Quaterniond q;
    if (theta < 1e-12) {
        // sin(theta) -> 0 limit: linear blend.
        q.coeffs() = (1.0 - alpha) * qa.coeffs() + alpha * qb.coeffs();
    } else {
        const double s = std::sin(theta);
        q.coeffs() =
            (std::sin((1.0 - alpha) * theta) * qa.coeffs() + std::sin(alpha * theta) * qb.coeffs()) /
            s;
    }
    q.normalize();
    return q.toRotationMatrix();
}

Path interpolate_path(const Path& sparse, int rho) {
    if (rho < 1) raise(ErrorCode::InvalidParameter, "interpolation density must be >= 1");
    if (sparse.size() < 2) {
        raise(ErrorCode::InsufficientPoints, "interpolation needs at least two path points");
    }
    if (rho == 1) return sparse;

    Path out;
    out.reserve((sparse.size() - 1) * static_cast<std::size_t>(rho) + 1);
    for (std::size_t i = 0; i + 1 < sparse.size(); ++i) {
        const PathPoint& p0 = sparse[i];
        const PathPoint& p1 = sparse[i + 1];
        const Vec3 delta = (p1.position - p0.position) / static_cast<double>(rho);
        out.push_back(p0);  // j = 0: segment endpoint, bit-exact
        for (int j = 1; j < rho; ++j) {
            const double alpha = static_cast<double>(j) / static_cast<double>(rho);
            const Mat3 r = slerp_rotation(p0.frame(), p1.frame(), alpha);
            PathPoint pp;
            pp.position = p0.position + static_cast<double>(j) * delta;
            pp.o = r.col(0);
            pp.m = r.col(1);
            pp.n = r.col(2);
            out.push_back(pp);
        }
    }
    out.push_back(sparse.back());
    return out;
}

PlanResult plan(const std::vector<Vec3>& edge_points, const PointCloud& model,
                const PathConfig& cfg, const NeighborhoodSpec& normal_spec) {
    cfg.validate();
    PlanResult result;
    result.order = order_seam_points(edge_points);

    const std::size_t n = result.order.order.size();
    std::vector<Vec3> ordered(n);
    for (std::size_t i = 0; i < n; ++i) ordered[i] = edge_points[result.order.order[i]];

    // Surface normal of the welding region around each path point,
    // re-estimated on the full model.
    const KdTree model_index(model);
    std::vector<Vec3> raw_normals(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw_normals[i] = estimate_normal(model_index, ordered[i], normal_spec);
    }
    // The same window average as the travel direction, so the torch axis
    // reflects the region rather than single-point estimates.
    const int half = cfg.smoothing_window / 2;
    std::vector<Vec3> normals(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 avg = Vec3::Zero();
        for (int w = -half; w <= half; ++w) {
            long j = static_cast<long>(i) + w;
            if (result.order.cyclic) {
                j = ((j % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
            } else {
                j = std::clamp<long>(j, 0, static_cast<long>(n) - 1);
            }
            avg += raw_normals[static_cast<std::size_t>(j)];
        }
        const double len = avg.norm();
        normals[i] = len > 1e-12 ? Vec3(avg / len) : raw_normals[i];
    }

    const std::vector<Vec3> offset = offset_points(ordered, normals, cfg.torch_offset);
    FrameBuildResult frames = build_frames(offset, normals, cfg, result.order.cyclic);
    result.dropped_duplicates = frames.dropped_duplicates;
    result.waypoints = frames.path;
    result.path = interpolate_path(frames.path, cfg.interpolation_density);
    return result;
}

}  // namespace seamforge::path
