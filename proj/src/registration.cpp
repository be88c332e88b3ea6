#include "seamforge/registration.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "seamforge/parallel.hpp"

namespace seamforge::registration {

void IcpConfig::validate() const {
    if (max_iterations < 1) raise(ErrorCode::InvalidParameter, "max_iterations must be >= 1");
    if (!(max_correspondence_distance > 0.0)) {
        raise(ErrorCode::InvalidParameter, "max_correspondence_distance must be positive");
    }
    if (!(convergence_delta > 0.0)) {
        raise(ErrorCode::InvalidParameter, "convergence_delta must be positive");
    }
    if (!(fitness_distance > 0.0)) {
        raise(ErrorCode::InvalidParameter, "fitness_distance must be positive");
    }
}

PointCloud compose_to_base(const ScanFrame& frame) {
    PointCloud out;
    out.points.resize(frame.cloud.size());
    const bool with_normals = frame.cloud.has_normals();
    if (with_normals) out.normals.resize(frame.cloud.size());
    const RigidTransform& pose = frame.camera_pose;
    parallel_for(frame.cloud.size(), [&](std::size_t i) {
        out.points[i] = pose.apply(frame.cloud.points[i]);
        if (with_normals) out.normals[i] = pose.rotate(frame.cloud.normals[i]);
    });
    return out;
}

std::vector<Correspondence> find_correspondences(const PointCloud& source,
                                                 const PointCloud& target,
                                                 const KdTree& target_index,
                                                 const RigidTransform& current, double max_dist) {
    if (!target.has_normals()) {
        raise(ErrorCode::InvalidArgument, "correspondence target must carry normals");
    }
    const double max_sq = max_dist * max_dist;
    std::vector<std::size_t> hit(source.size(), KdTree::npos);
    std::vector<Vec3> moved(source.size());
    parallel_for(source.size(), [&](std::size_t i) {
        moved[i] = current.apply(source.points[i]);
        hit[i] = target_index.nearest_within(moved[i], max_sq);
    });

    std::vector<Correspondence> pairs;
    pairs.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (hit[i] == KdTree::npos) continue;
        pairs.push_back({moved[i], target.points[hit[i]], target.normals[hit[i]]});
    }
    if (pairs.empty()) {
        raise(ErrorCode::NoOverlap, "no correspondences within the maximum distance");
    }
    return pairs;
}

RigidTransform solve_linear_step(const std::vector<Correspondence>& pairs) {
    if (pairs.size() < 6) {
        raise(ErrorCode::DegenerateSystem, "need at least 6 correspondences for the 6-DOF step");
    }
    Eigen::MatrixXd a(pairs.size(), 6);
    Eigen::VectorXd b(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Correspondence& c = pairs[i];
        const Vec3 cx = c.source.cross(c.normal);
        a(i, 0) = cx.x();
        a(i, 1) = cx.y();
        a(i, 2) = cx.z();
        a(i, 3) = c.normal.x();
        a(i, 4) = c.normal.y();
        a(i, 5) = c.normal.z();
        b(i) = (c.target - c.source).dot(c.normal);
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    // Truncated pseudo-inverse: unconstrained directions (a single plane
    // leaves in-plane slide and spin free; a dihedral leaves the slide along
    // the crease free) get a zero component instead of noise amplification.
    int rank = 0;
    while (rank < 6 && sv(rank) > 1e-10 * sv(0)) ++rank;
    if (rank < 3) {
        raise(ErrorCode::DegenerateSystem,
              "correspondences constrain fewer than three degrees of freedom");
    }
    const Eigen::VectorXd ub = svd.matrixU().leftCols(rank).transpose() * b;
    Eigen::Matrix<double, 6, 1> x = Eigen::Matrix<double, 6, 1>::Zero();
    for (int i = 0; i < rank; ++i) {
        x += (ub(i) / sv(i)) * svd.matrixV().col(i);
    }

    // Linearized rotation I + skew(alpha, beta, gamma), projected back onto
    // SO(3) before use so accumulated transforms stay rigid.
    Mat3 approx;
    approx << 1.0, -x(2), x(1),
              x(2), 1.0, -x(0),
              -x(1), x(0), 1.0;
    const Mat3 r = RigidTransform::project_to_rotation(approx);
    return RigidTransform::from_parts(r, Vec3(x(3), x(4), x(5)));
}

double fitness(const PointCloud& source, const KdTree& target_index, const RigidTransform& m,
               double d) {
    if (!(d > 0.0)) raise(ErrorCode::InvalidParameter, "fitness distance must be positive");
    if (source.empty()) return 0.0;
    std::vector<std::uint8_t> ok(source.size(), 0);
    parallel_for(source.size(), [&](std::size_t i) {
        const Vec3 p = m.apply(source.points[i]);
        const std::size_t j = target_index.nearest_within(p, d);
        if (j != KdTree::npos && (target_index.point(j) - p).squaredNorm() < d) ok[i] = 1;
    });
    std::size_t aligned = 0;
    for (std::uint8_t v : ok) aligned += v;
    return static_cast<double>(aligned) / static_cast<double>(source.size());
}

IcpResult icp(const PointCloud& source, const PointCloud& target, const RigidTransform& initial,
              const IcpConfig& cfg) {
    cfg.validate();
    if (source.empty() || target.empty()) {
        raise(ErrorCode::EmptyInput, "icp requires non-empty source and target");
    }
    if (!target.has_normals()) {
        raise(ErrorCode::InvalidArgument, "icp target must carry normals");
    }
    const KdTree target_index(target);

    IcpResult result;
    result.transform = initial;
    double prev_objective = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const std::vector<Correspondence> pairs = find_correspondences(
            source, target, target_index, result.transform, cfg.max_correspondence_distance);
        const RigidTransform step = solve_linear_step(pairs);
        result.transform = step.compose(result.transform);

        double sum_sq = 0.0;
        for (const Correspondence& c : pairs) {
            const double r = (step.apply(c.source) - c.target).dot(c.normal);
            sum_sq += r * r;
        }
        const double objective = sum_sq / static_cast<double>(pairs.size());

        result.objective_history.push_back(objective);
        result.fitness_history.push_back(
            fitness(source, target_index, result.transform, cfg.fitness_distance));
        result.iterations_run = iter + 1;

        // Converged when the mean squared residual stops changing in relative
        // terms, or collapses outright.
        if (objective < 1e-24) {
            result.converged = true;
            break;
        }
        if (std::isfinite(prev_objective)) {
            const double change = std::abs(prev_objective - objective);
            if (change < cfg.convergence_delta * std::max(prev_objective, 1e-300)) {
                result.converged = true;
                break;
            }
        }
        prev_objective = objective;
    }
    return result;
}

PointCloud merge_session(const ScanSession& session, const IcpConfig& cfg, double voxel_size,
                         const NeighborhoodSpec& normal_spec, MergeReport* report) {
    cfg.validate();
    if (session.frames.empty()) {
        raise(ErrorCode::EmptyInput, "session must contain at least one frame");
    }

    MergeReport local;
    PointCloud accumulated;
    for (std::size_t fi = 0; fi < session.frames.size(); ++fi) {
        const ScanFrame& frame = session.frames[fi];
        PointCloud composed = compose_to_base(frame);
        Vec3 camera_origin = frame.camera_pose.translation();

        FrameReport fr;
        if (fi == 0) {
            fr.pre_fitness = 1.0;
            fr.post_fitness = 1.0;
            accumulated = estimate_all_normals(composed, normal_spec, camera_origin);
        } else {
            const KdTree accumulated_index(accumulated);
            fr.pre_fitness =
                fitness(composed, accumulated_index, RigidTransform::identity(),
                        cfg.fitness_distance);
            const IcpResult res = icp(composed, accumulated, RigidTransform::identity(), cfg);
            fr.iterations = res.iterations_run;
            fr.converged = res.converged;
            fr.post_fitness =
                res.fitness_history.empty() ? fr.pre_fitness : res.fitness_history.back();

            PointCloud refined;
            refined.points.resize(composed.size());
            parallel_for(composed.size(), [&](std::size_t i) {
                refined.points[i] = res.transform.apply(composed.points[i]);
            });
            camera_origin = res.transform.apply(camera_origin);
            const PointCloud with_normals =
                estimate_all_normals(refined, normal_spec, camera_origin);

            accumulated.points.insert(accumulated.points.end(), with_normals.points.begin(),
                                      with_normals.points.end());
            accumulated.normals.insert(accumulated.normals.end(), with_normals.normals.begin(),
                                       with_normals.normals.end());
        }
        local.total_iterations += fr.iterations;
        local.frames.push_back(fr);
    }

    local.final_fitness = local.frames.back().post_fitness;
    PointCloud merged = voxel_downsample(accumulated, voxel_size);
    local.merged_size = merged.size();
    if (report) *report = local;
    return merged;
}

}  // namespace seamforge::registration
