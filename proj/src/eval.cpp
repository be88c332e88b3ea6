#include "seamforge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "seamforge/path.hpp"

namespace seamforge::eval {

namespace {

using CellSet = std::unordered_set<std::int64_t>;

std::pair<double, double> project(const Vec3& p, Plane plane) {
    switch (plane) {
        case Plane::XY: return {p.x(), p.y()};
        case Plane::XZ: return {p.x(), p.z()};
        case Plane::YZ: return {p.y(), p.z()};
    }
    return {0.0, 0.0};
}

std::int64_t cell_key(std::int64_t i, std::int64_t j) {
    return ((i + (std::int64_t(1) << 30)) << 32) | ((j + (std::int64_t(1) << 30)) & 0xffffffffll);
}

CellSet rasterize(const std::vector<Vec3>& points, Plane plane, double cell_size) {
    CellSet cells;
    cells.reserve(points.size());
    for (const Vec3& p : points) {
        const auto [u, v] = project(p, plane);
        cells.insert(cell_key(static_cast<std::int64_t>(std::floor(u / cell_size)),
                              static_cast<std::int64_t>(std::floor(v / cell_size))));
    }
    return cells;
}

std::size_t count_matched(const CellSet& from, const CellSet& against, int tolerance) {
    std::size_t matched = 0;
    for (const std::int64_t key : from) {
        const std::int64_t i = (key >> 32) - (std::int64_t(1) << 30);
        const std::int64_t j = (key & 0xffffffffll) - (std::int64_t(1) << 30);
        bool hit = false;
        for (std::int64_t di = -tolerance; di <= tolerance && !hit; ++di) {
            for (std::int64_t dj = -tolerance; dj <= tolerance && !hit; ++dj) {
                hit = against.count(cell_key(i + di, j + dj)) > 0;
            }
        }
        if (hit) ++matched;
    }
    return matched;
}

}  // namespace

double raster_accuracy(const std::vector<Vec3>& detected, const std::vector<Vec3>& truth,
                       Plane plane, double cell_size) {
    if (truth.empty()) raise(ErrorCode::EmptyInput, "raster accuracy needs non-empty truth");
    if (!(cell_size > 0.0)) raise(ErrorCode::InvalidParameter, "cell size must be positive");
    const CellSet truth_cells = rasterize(truth, plane, cell_size);
    if (detected.empty()) return 0.0;
    const CellSet detected_cells = rasterize(detected, plane, cell_size);
    const std::size_t covered = count_matched(truth_cells, detected_cells, 0);
    return static_cast<double>(covered) / static_cast<double>(truth_cells.size());
}

PlaneScore plane_score(const std::vector<Vec3>& detected, const std::vector<Vec3>& truth,
                       Plane plane, double cell_size, int tolerance_cells) {
    if (truth.empty()) raise(ErrorCode::EmptyInput, "plane score needs non-empty truth");
    if (!(cell_size > 0.0)) raise(ErrorCode::InvalidParameter, "cell size must be positive");
    PlaneScore s;
    if (detected.empty()) return s;
    const CellSet d = rasterize(detected, plane, cell_size);
    const CellSet t = rasterize(truth, plane, cell_size);
    s.precision = static_cast<double>(count_matched(d, t, tolerance_cells)) /
                  static_cast<double>(d.size());
    s.recall = static_cast<double>(count_matched(t, d, tolerance_cells)) /
               static_cast<double>(t.size());
    s.accuracy = (s.precision > 0.0 && s.recall > 0.0)
                     ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                     : 0.0;
    return s;
}

double f1_from_accuracies(double a_xy, double a_xz, double a_yz) {
    if (a_xy <= 0.0 || a_xz <= 0.0 || a_yz <= 0.0) return 0.0;
    return 3.0 / (1.0 / a_xy + 1.0 / a_xz + 1.0 / a_yz);
}

double f1_score(const std::vector<Vec3>& detected, const std::vector<Vec3>& truth,
                double cell_size, int tolerance_cells) {
    const PlaneScore xy = plane_score(detected, truth, Plane::XY, cell_size, tolerance_cells);
    const PlaneScore xz = plane_score(detected, truth, Plane::XZ, cell_size, tolerance_cells);
    const PlaneScore yz = plane_score(detected, truth, Plane::YZ, cell_size, tolerance_cells);
    return f1_from_accuracies(xy.accuracy, xz.accuracy, yz.accuracy);
}

namespace {

// Uniform arc-length resampling to n samples (endpoints included).
Path resample(const Path& path, std::size_t n) {
    std::vector<double> arc(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        arc[i] = arc[i - 1] + (path[i].position - path[i - 1].position).norm();
    }
    const double total = arc.back();
    Path out;
    out.reserve(n);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
        while (seg + 2 < path.size() && arc[seg + 1] < s) ++seg;
        const double seg_len = arc[seg + 1] - arc[seg];
        const double alpha = seg_len > 0.0 ? std::clamp((s - arc[seg]) / seg_len, 0.0, 1.0) : 0.0;
        PathPoint pp;
        pp.position =
            path[seg].position + alpha * (path[seg + 1].position - path[seg].position);
        Mat3 r;
        if (alpha <= 0.0) {
            r = path[seg].frame();
        } else if (alpha >= 1.0) {
            r = path[seg + 1].frame();
        } else {
            r = path::slerp_rotation(path[seg].frame(), path[seg + 1].frame(), alpha);
        }
        pp.o = r.col(0);
        pp.m = r.col(1);
        pp.n = r.col(2);
        out.push_back(pp);
    }
    return out;
}

double path_length(const Path& p) {
    double len = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        len += (p[i].position - p[i - 1].position).norm();
    }
    return len;
}

bool is_closed(const Path& p) {
    const double len = path_length(p);
    if (len <= 0.0) return false;
    return (p.front().position - p.back().position).norm() < 0.05 * len;
}

double mean_sq_position_error(const Path& a, const Path& b, std::size_t shift, bool reversed) {
    const std::size_t n = a.size();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t ai = reversed ? n - 1 - ((k + shift) % n) : (k + shift) % n;
        sum += (a[ai].position - b[k].position).squaredNorm();
    }
    return sum / static_cast<double>(n);
}

}  // namespace

RmseResult pose_rmse(const Path& model_path, const Path& truth_path) {
    if (model_path.empty() || truth_path.empty()) {
        raise(ErrorCode::EmptyInput, "pose RMSE needs two non-empty paths");
    }
    if (model_path.size() == 1 || truth_path.size() == 1) {
        raise(ErrorCode::InvalidArgument, "pose RMSE needs at least two points per path");
    }

    constexpr std::size_t kSamples = 256;
    const Path m = resample(model_path, kSamples);
    const Path g = resample(truth_path, kSamples);

    // Correspondence is by normalized arc length; the detected path's start
    // and direction are arbitrary, so align them to the truth first.
    const bool closed = is_closed(model_path) && is_closed(truth_path);
    std::size_t best_shift = 0;
    bool best_rev = false;
    double best_err = mean_sq_position_error(m, g, 0, false);
    const std::size_t max_shift = closed ? kSamples : 1;
    for (std::size_t shift = 0; shift < max_shift; ++shift) {
        for (const bool rev : {false, true}) {
            if (shift == 0 && !rev) continue;
            const double err = mean_sq_position_error(m, g, shift, rev);
            if (err < best_err) {
                best_err = err;
                best_shift = shift;
                best_rev = rev;
            }
        }
    }

    double rot_sum_sq = 0.0;
    for (std::size_t k = 0; k < kSamples; ++k) {
        const std::size_t mi =
            best_rev ? kSamples - 1 - ((k + best_shift) % kSamples) : (k + best_shift) % kSamples;
        Mat3 rm = m[mi].frame();
        if (best_rev) {
            // A reversed traversal flips the travel direction; compare the
            // physically equivalent frame (m -> -m, o -> -o).
            rm.col(0) = -rm.col(0);
            rm.col(1) = -rm.col(1);
        }
        const Mat3 rel = rm.transpose() * g[k].frame();
        const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
        const double angle = std::acos(c);
        rot_sum_sq += angle * angle;
    }

    RmseResult out;
    out.position = std::sqrt(best_err);
    out.rotation_deg = std::sqrt(rot_sum_sq / static_cast<double>(kSamples)) * 180.0 / M_PI;
    return out;
}

SweepResult threshold_sweep(const PointCloud& cloud, const std::vector<seam::EdgeScore>& scores,
                            const std::vector<std::uint8_t>& boundary_mask,
                            const std::vector<Vec3>& truth_seam,
                            const std::vector<double>& t_values, double cell_size,
                            bool chain_filter) {
    if (t_values.size() < 3) {
        raise(ErrorCode::InvalidParameter, "threshold sweep needs at least three thresholds");
    }
    if (scores.size() != cloud.size()) {
        raise(ErrorCode::InvalidArgument, "one edge score per cloud point required");
    }

    SweepResult result;
    for (const double t : t_values) {
        SweepEntry entry;
        entry.threshold = t;

        std::vector<std::size_t> detected = seam::edge_indices(scores, t);
        entry.detected_count = detected.size();
        if (!boundary_mask.empty()) {
            std::vector<std::size_t> kept;
            kept.reserve(detected.size());
            for (std::size_t i : detected) {
                if (!boundary_mask[i]) kept.push_back(i);
            }
            detected = std::move(kept);
        }

        std::vector<Vec3> pts;
        pts.reserve(detected.size());
        for (std::size_t i : detected) pts.push_back(cloud.points[i]);

        if (chain_filter && pts.size() >= 2) {
            const path::OrderResult order = path::order_seam_points(pts);
            std::vector<Vec3> chained;
            chained.reserve(order.order.size());
            for (std::size_t i : order.order) chained.push_back(pts[i]);
            pts = std::move(chained);
            entry.chained_count = pts.size();
        } else {
            entry.chained_count = pts.size();
        }

        entry.f1 = pts.empty() ? 0.0 : f1_score(pts, truth_seam, cell_size);
        result.entries.push_back(entry);
        if (entry.f1 > result.best_f1) {
            result.best_f1 = entry.f1;
            result.best_threshold = t;
        }
    }
    if (result.best_f1 == 0.0 && !result.entries.empty()) {
        result.best_threshold = result.entries.front().threshold;
    }
    return result;
}

}  // namespace seamforge::eval
