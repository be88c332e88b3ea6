#include "seamforge/denoise.hpp"

#include <cmath>

#include "seamforge/kdtree.hpp"
#include "seamforge/parallel.hpp"

namespace seamforge::denoise {

void BilateralConfig::validate() const {
    if (!(radius > 0.0) || !(sigma_m > 0.0) || !(sigma_n > 0.0)) {
        raise(ErrorCode::InvalidParameter, "bilateral radius and sigmas must be positive");
    }
    if (iterations < 1) {
        raise(ErrorCode::InvalidParameter, "bilateral iterations must be >= 1");
    }
}

double bilateral_delta(const Vec3& p, const Vec3& n_p, const std::vector<Vec3>& neighbors,
                       const BilateralConfig& cfg) {
    double weighted = 0.0;
    double total = 0.0;
    const double inv_2sm = 1.0 / (2.0 * cfg.sigma_m * cfg.sigma_m);
    const double inv_2sn = 1.0 / (2.0 * cfg.sigma_n * cfg.sigma_n);
    for (const Vec3& q : neighbors) {
        const Vec3 d = q - p;
        const double spatial = d.norm();
        const double along = n_p.dot(d);
        const double w = std::exp(-spatial * spatial * inv_2sm) *
                         std::exp(-along * along * inv_2sn);
        weighted += w * along;
        total += w;
    }
    if (total <= 0.0) return 0.0;
    return weighted / total;
}

PointCloud bilateral_filter(const PointCloud& cloud, const BilateralConfig& cfg,
                            const NeighborhoodSpec& normal_spec) {
    cfg.validate();
    if (!cloud.has_normals()) {
        raise(ErrorCode::InvalidArgument, "bilateral filter input must carry normals");
    }

    PointCloud current = cloud;
    for (int pass = 0; pass < cfg.iterations; ++pass) {
        if (pass > 0) {
            current = estimate_all_normals(current, normal_spec);
        }
        const KdTree index(current);
        PointCloud next;
        next.points.resize(current.size());
        next.normals = current.normals;
        parallel_for(current.size(), [&](std::size_t i) {
            const Vec3& p = current.points[i];
            const Vec3& n = current.normals[i];
            std::vector<Vec3> neighbors;
            for (std::size_t j : index.radius(p, cfg.radius)) {
                if (index.point(j) == p) continue;
                neighbors.push_back(index.point(j));
            }
            next.points[i] = p + bilateral_delta(p, n, neighbors, cfg) * n;
        });
        current = std::move(next);
    }
    return estimate_all_normals(current, normal_spec);
}

}  // namespace seamforge::denoise
