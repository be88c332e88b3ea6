#pragma once

#include <vector>

#include "seamforge/geometry.hpp"
#include "seamforge/kdtree.hpp"
#include "seamforge/types.hpp"

namespace seamforge::registration {

struct IcpConfig {
    int max_iterations = 30;
    double max_correspondence_distance = 0.0;  // meters, > 0
    double convergence_delta = 1e-6;           // relative objective change
    /// Fitness threshold d, compared against the squared distance in m^2 as
    /// the source text defines it (dimensionally odd; kept literal).
    double fitness_distance = 0.0;

    void validate() const;
};

struct IcpResult {
    RigidTransform transform;
    std::vector<double> fitness_history;    // one entry per iteration, values in [0,1]
    std::vector<double> objective_history;  // mean squared point-to-plane residual
    int iterations_run = 0;
    bool converged = false;
};

/// One point-to-plane correspondence: the source point already moved by the
/// current transform, its nearest target point, and the target's unit normal.
struct Correspondence {
    Vec3 source;
    Vec3 target;
    Vec3 normal;
};

/// Applies the frame's camera-to-base pose to the cloud (normals are rotated,
/// not translated).
PointCloud compose_to_base(const ScanFrame& frame);

/// Nearest-target pairing under `current`, dropping pairs farther than
/// max_dist. Throws NoOverlap when nothing pairs up.
std::vector<Correspondence> find_correspondences(const PointCloud& source,
                                                 const PointCloud& target,
                                                 const KdTree& target_index,
                                                 const RigidTransform& current, double max_dist);

/// Small-angle linearized point-to-plane step: solves the Nx6 least-squares
/// system in (alpha, beta, gamma, px, py, pz) by SVD and re-orthonormalizes
/// the linearized rotation into SO(3). Throws DegenerateSystem when the
/// system does not constrain all six parameters.
RigidTransform solve_linear_step(const std::vector<Correspondence>& pairs);

/// Iterated correspondence + linear step, accumulating onto `initial`.
IcpResult icp(const PointCloud& source, const PointCloud& target, const RigidTransform& initial,
              const IcpConfig& cfg);

/// Fraction of source points whose transformed position has a target point
/// with squared distance < d.
double fitness(const PointCloud& source, const KdTree& target_index, const RigidTransform& m,
               double d);

struct FrameReport {
    double pre_fitness = 0.0;
    double post_fitness = 0.0;
    int iterations = 0;
    bool converged = true;
};

struct MergeReport {
    std::vector<FrameReport> frames;
    int total_iterations = 0;
    double final_fitness = 0.0;  // last frame's post-ICP fitness, 1.0 for single-frame sessions
    std::size_t merged_size = 0;
};

/// Sequential merge: frame 0 seeds the model; each later frame is composed to
/// base, refined by ICP against the accumulated model, and unioned. The union
/// is voxel-downsampled at voxel_size before returning. normal_spec drives
/// per-frame normal estimation (normals oriented toward each frame's camera).
PointCloud merge_session(const ScanSession& session, const IcpConfig& cfg, double voxel_size,
                         const NeighborhoodSpec& normal_spec, MergeReport* report = nullptr);

}  // namespace seamforge::registration
