#include "seamforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace seamforge::synth {

WorkpieceKind parse_kind(const std::string& name) {
    if (name == "v_butt_plate" || name == "v_butt") return WorkpieceKind::VButtPlate;
    if (name == "cylinder_on_plate" || name == "cylinder") return WorkpieceKind::CylinderOnPlate;
    if (name == "y_shape") return WorkpieceKind::YShape;
    if (name == "dihedral") return WorkpieceKind::Dihedral;
    raise(ErrorCode::InvalidArgument, "unknown workpiece kind '" + name + "'");
}

const char* kind_name(WorkpieceKind kind) {
    switch (kind) {
        case WorkpieceKind::VButtPlate: return "v_butt_plate";
        case WorkpieceKind::CylinderOnPlate: return "cylinder_on_plate";
        case WorkpieceKind::YShape: return "y_shape";
        case WorkpieceKind::Dihedral: return "dihedral";
    }
    return "unknown";
}

Workpiece Workpiece::standard(WorkpieceKind kind) {
    Workpiece w;
    w.kind = kind;
    switch (kind) {
        case WorkpieceKind::VButtPlate: w.density = 1.0e6; break;
        case WorkpieceKind::CylinderOnPlate: w.density = 2.2e6; break;
        case WorkpieceKind::YShape: w.density = 1.0e6; break;
        case WorkpieceKind::Dihedral: w.density = 1.6e6; break;
    }
    return w;
}

namespace {

using Emit = std::function<void(const Vec3&, const Vec3&)>;

// Jittered grid over a [0,a]x[0,b] parameter rectangle with unit area
// measure; fn maps (u, v) to a surface point + normal.
void sample_rect_domain(double a, double b, double density, Rng& rng,
                        const std::function<void(double, double)>& fn) {
    const double step = 1.0 / std::sqrt(density);
    const int nu = std::max(1, static_cast<int>(std::llround(a / step)));
    const int nv = std::max(1, static_cast<int>(std::llround(b / step)));
    const double du = a / nu;
    const double dv = b / nv;
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double u = (i + 0.5 + rng.uniform(-0.4, 0.4)) * du;
            const double v = (j + 0.5 + rng.uniform(-0.4, 0.4)) * dv;
            fn(u, v);
        }
    }
}

// Planar patch: origin + u*dir_u + v*dir_v.
void sample_plane_patch(const Vec3& origin, const Vec3& dir_u, double len_u, const Vec3& dir_v,
                        double len_v, const Vec3& normal, double density, Rng& rng,
                        const Emit& emit,
                        const std::function<bool(const Vec3&)>& accept = nullptr) {
    sample_rect_domain(len_u, len_v, density, rng, [&](double u, double v) {
        const Vec3 p = origin + u * dir_u + v * dir_v;
        if (!accept || accept(p)) emit(p, normal);
    });
}

struct VButtSection {
    double wall_len;  // root to fillet tangency, along the wall
    Vec3 wall_dir;    // (0, dy, dz), unit, from root toward the shoulder
    Vec3 wall_normal;
    double arc_start;   // fillet arc angles (in the (y,z) cross-section)
    double arc_end;
    Vec3 arc_center;    // (0, yc, -fr)
    double top_begin;   // y where the flat plate resumes
};

VButtSection vbutt_section(const Workpiece& w) {
    const double g = w.vbutt_groove_half;
    const double h = w.vbutt_depth;
    const double fr = w.vbutt_fillet;
    const double wall_full = std::hypot(g, h);

    VButtSection s;
    s.wall_dir = Vec3(0.0, g / wall_full, h / wall_full);
    s.wall_normal = Vec3(0.0, -h / wall_full, g / wall_full);
    // Fillet circle tangent to the wall line and to the plate plane z = 0.
    const double yc = (fr * wall_full + g * (h - fr)) / h;
    s.arc_center = Vec3(0.0, yc, -fr);
    // Tangency on the wall: center projected along the wall normal.
    const Vec3 t1 = s.arc_center + fr * s.wall_normal;
    s.wall_len = (t1 - Vec3(0.0, 0.0, -h)).norm();
    // Arc from the wall tangency to the top tangency (0, yc, 0).
    s.arc_start = std::atan2(t1.z() - s.arc_center.z(), t1.y() - s.arc_center.y());
    s.arc_end = M_PI / 2.0;  // normal (0,0,1) at the top tangency
    s.top_begin = yc;
    return s;
}

void sample_vbutt(const Workpiece& w, double density, Rng& rng, const Emit& emit) {
    const double ex = w.vbutt_extent;
    const double ey = w.vbutt_extent;
    const VButtSection s = vbutt_section(w);
    const Vec3 root(0.0, 0.0, -w.vbutt_depth);

    for (const double side : {+1.0, -1.0}) {
        const Vec3 mirror(1.0, side, 1.0);
        // Groove wall strip, swept along x.
        sample_rect_domain(2.0 * ex, s.wall_len, density, rng, [&](double u, double v) {
            const Vec3 sec = root + v * s.wall_dir;
            emit(Vec3(u - ex, side * sec.y(), sec.z()),
                 Vec3(0.0, side * s.wall_normal.y(), s.wall_normal.z()));
        });
        // Shoulder fillet strip.
        const double arc_len = (s.arc_end - s.arc_start) * w.vbutt_fillet;
        sample_rect_domain(2.0 * ex, arc_len, density, rng, [&](double u, double v) {
            const double ang = s.arc_start + v / w.vbutt_fillet;
            const Vec3 radial(0.0, std::cos(ang), std::sin(ang));
            const Vec3 sec = s.arc_center + w.vbutt_fillet * radial;
            emit(Vec3(u - ex, side * sec.y(), sec.z()),
                 Vec3(0.0, side * radial.y(), radial.z()));
        });
        // Flat plate top.
        sample_plane_patch(Vec3(-ex, side * s.top_begin, 0.0), Vec3::UnitX(), 2.0 * ex,
                           Vec3(0.0, side, 0.0), ey - s.top_begin, Vec3::UnitZ(), density, rng,
                           emit);
        (void)mirror;
    }
}

void sample_cylinder(const Workpiece& w, double density, Rng& rng, const Emit& emit) {
    const double r = w.cyl_radius;
    const double h = w.cyl_height;
    const double p = w.cyl_plate_half;

    // Plate with a hole where the cylinder stands.
    sample_plane_patch(Vec3(-p, -p, 0.0), Vec3::UnitX(), 2.0 * p, Vec3::UnitY(), 2.0 * p,
                       Vec3::UnitZ(), density, rng, emit,
                       [r](const Vec3& q) { return q.head<2>().norm() > r; });
    // Side wall (angle, height) with arc-length azimuth.
    sample_rect_domain(2.0 * M_PI * r, h, density, rng, [&](double u, double v) {
        const double phi = u / r;
        const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
        emit(Vec3(r * radial.x(), r * radial.y(), v), radial);
    });
    // Spherical dome cap: area element is uniform in (azimuth-arc, z).
    sample_rect_domain(2.0 * M_PI * r, r, density, rng, [&](double u, double v) {
        const double phi = u / r;
        const double z = v;  // height above the dome equator
        const double ring = std::sqrt(std::max(0.0, r * r - z * z));
        const Vec3 n(ring * std::cos(phi) / r, ring * std::sin(phi) / r, z / r);
        emit(Vec3(0.0, 0.0, h) + r * n, n);
    });
}

void sample_dihedral(const Workpiece& w, double density, Rng& rng, const Emit& emit) {
    const double half = w.dihedral_length / 2.0;
    sample_plane_patch(Vec3(-half, 0.0, 0.0), Vec3::UnitX(), w.dihedral_length, Vec3::UnitY(),
                       w.dihedral_width, Vec3::UnitZ(), density, rng, emit);
    sample_plane_patch(Vec3(-half, 0.0, 0.0), Vec3::UnitX(), w.dihedral_length, Vec3::UnitZ(),
                       w.dihedral_width, Vec3::UnitY(), density, rng, emit);
}

void sample_yshape(const Workpiece& w, double density, Rng& rng, const Emit& emit) {
    const double a0 = M_PI / 2.0;
    std::vector<Vec3> rib_u, rib_t;
    for (int k = 0; k < 3; ++k) {
        const double a = a0 + k * 2.0 * M_PI / 3.0;
        rib_u.emplace_back(std::cos(a), std::sin(a), 0.0);
        rib_t.emplace_back(-std::sin(a), std::cos(a), 0.0);
    }
    const double th = w.y_rib_half_thickness;
    const double len = w.y_rib_length;
    const double hf = w.y_rib_height;

    auto inside_rib = [&](const Vec3& p, int k) {
        const double r = p.dot(rib_u[k]);
        const double s = p.dot(rib_t[k]);
        return r >= -1e-9 && r <= len && std::abs(s) <= th && p.z() <= hf + 1e-9;
    };
    auto inside_any_other = [&](const Vec3& p, int self) {
        for (int k = 0; k < 3; ++k) {
            if (k != self && inside_rib(p, k)) return true;
        }
        return false;
    };

    // Base plate, excluding rib footprints.
    const double p_half = w.y_plate_half;
    sample_plane_patch(Vec3(-p_half, -p_half, 0.0), Vec3::UnitX(), 2.0 * p_half, Vec3::UnitY(),
                       2.0 * p_half, Vec3::UnitZ(), density, rng, emit, [&](const Vec3& q) {
                           return !inside_rib(q, 0) && !inside_rib(q, 1) && !inside_rib(q, 2);
                       });

    for (int k = 0; k < 3; ++k) {
        const Vec3& u = rib_u[k];
        const Vec3& t = rib_t[k];
        // Top face.
        sample_rect_domain(len, 2.0 * th, density, rng, [&](double a, double b) {
            const Vec3 p = a * u + (b - th) * t + Vec3(0, 0, hf);
            if (!inside_any_other(p, k)) emit(p, Vec3::UnitZ());
        });
        // Side faces.
        for (const double side : {+1.0, -1.0}) {
            sample_rect_domain(len, hf, density, rng, [&](double a, double b) {
                const Vec3 p = a * u + side * th * t + Vec3(0, 0, b);
                if (!inside_any_other(p, k)) emit(p, side * t);
            });
        }
        // Outer end cap.
        sample_rect_domain(2.0 * th, hf, density, rng, [&](double a, double b) {
            emit(len * u + (a - th) * t + Vec3(0, 0, b), u);
        });
    }
}

}  // namespace

PointCloud sample_surface(const Workpiece& w, double density, Rng& rng) {
    if (!(density > 0.0)) raise(ErrorCode::InvalidParameter, "sampling density must be positive");
    PointCloud cloud;
    const Emit emit = [&cloud](const Vec3& p, const Vec3& n) {
        cloud.points.push_back(p);
        cloud.normals.push_back(n.normalized());
    };
    switch (w.kind) {
        case WorkpieceKind::VButtPlate: sample_vbutt(w, density, rng, emit); break;
        case WorkpieceKind::CylinderOnPlate: sample_cylinder(w, density, rng, emit); break;
        case WorkpieceKind::YShape: sample_yshape(w, density, rng, emit); break;
        case WorkpieceKind::Dihedral: sample_dihedral(w, density, rng, emit); break;
    }
    return cloud;
}

namespace {

Path line_seam(const Vec3& a, const Vec3& b, const Vec3& torch, double spacing) {
    const double len = (b - a).norm();
    const int n = std::max(2, static_cast<int>(std::ceil(len / spacing)) + 1);
    const Vec3 travel = (b - a).normalized();
    Path path;
    path.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        path.push_back(PathPoint::from_directions(a + s * (b - a), travel, torch));
    }
    return path;
}

}  // namespace

Path seam_path(const Workpiece& w, double spacing, bool* cyclic) {
    if (!(spacing > 0.0)) raise(ErrorCode::InvalidParameter, "seam spacing must be positive");
    if (cyclic) *cyclic = false;
    switch (w.kind) {
        case WorkpieceKind::VButtPlate: {
            const double half = w.vbutt_seam_length / 2.0;
            return line_seam(Vec3(-half, 0.0, -w.vbutt_depth), Vec3(half, 0.0, -w.vbutt_depth),
                             Vec3::UnitZ(), spacing);
        }
        case WorkpieceKind::Dihedral: {
            const double half = w.dihedral_seam_length / 2.0;
            const Vec3 torch = Vec3(0.0, 1.0, 1.0).normalized();
            return line_seam(Vec3(-half, 0.0, 0.0), Vec3(half, 0.0, 0.0), torch, spacing);
        }
        case WorkpieceKind::CylinderOnPlate: {
            if (cyclic) *cyclic = true;
            const double r = w.cyl_radius;
            const int n = std::max(8, static_cast<int>(std::ceil(2.0 * M_PI * r / spacing)));
            Path path;
            path.reserve(n);
            for (int i = 0; i < n; ++i) {
                const double phi = 2.0 * M_PI * i / n;
                const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
                const Vec3 torch = (radial + Vec3::UnitZ()).normalized();
                const Vec3 travel(-radial.y(), radial.x(), 0.0);
                path.push_back(
                    PathPoint::from_directions(r * radial, travel, torch));
            }
            return path;
        }
        case WorkpieceKind::YShape:
            return {};  // three disjoint fillet lines; no single path
    }
    return {};
}

std::vector<Vec3> seam_points(const Workpiece& w, double spacing) {
    if (w.kind == WorkpieceKind::YShape) {
        // Six fillet segments where the ribs meet the plate.
        std::vector<Vec3> pts;
        const double a0 = M_PI / 2.0;
        for (int k = 0; k < 3; ++k) {
            const double a = a0 + k * 2.0 * M_PI / 3.0;
            const Vec3 u(std::cos(a), std::sin(a), 0.0);
            const Vec3 t(-std::sin(a), std::cos(a), 0.0);
            // Junctions start outside the central joint where ribs overlap.
            const double r0 = 2.5 * w.y_rib_half_thickness;
            const int n = std::max(2, static_cast<int>(std::ceil((w.y_rib_length - r0) / spacing)));
            for (const double side : {+1.0, -1.0}) {
                for (int i = 0; i <= n; ++i) {
                    const double r = r0 + (w.y_rib_length - r0) * i / n;
                    pts.push_back(r * u + side * w.y_rib_half_thickness * t);
                }
            }
        }
        return pts;
    }
    const Path path = seam_path(w, spacing);
    std::vector<Vec3> pts;
    pts.reserve(path.size());
    for (const PathPoint& pp : path) pts.push_back(pp.position);
    return pts;
}

void ScannerModel::validate() const {
    if (!(fov_deg > 1.0) || !(fov_deg < 170.0)) {
        raise(ErrorCode::InvalidParameter, "scanner fov must lie in (1, 170) degrees");
    }
    if (resolution < 8) raise(ErrorCode::InvalidParameter, "scanner resolution too small");
    if (depth_noise_sigma < 0.0 || pose_noise_rot_deg < 0.0 || pose_noise_trans < 0.0 ||
        occlusion_tolerance < 0.0) {
        raise(ErrorCode::InvalidParameter, "scanner noise parameters must be >= 0");
    }
}

ScannerModel look_at(const Vec3& eye, const Vec3& target, double fov_deg, int resolution) {
    const Vec3 forward = (target - eye).normalized();
    Vec3 up = Vec3::UnitZ();
    if (std::abs(forward.dot(up)) > 0.999) up = Vec3::UnitY();
    const Vec3 right = forward.cross(up).normalized();
    const Vec3 down = forward.cross(right);
    Mat3 r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    ScannerModel s;
    s.pose = RigidTransform::from_parts(r, eye);
    s.fov_deg = fov_deg;
    s.resolution = resolution;
    return s;
}

ScanResult virtual_scan_sampled(const PointCloud& surface, const ScannerModel& scanner, Rng& rng,
                                double sample_spacing) {
    scanner.validate();
    const RigidTransform to_camera = scanner.pose.inverse();
    const int res = scanner.resolution;
    const double focal = (res / 2.0) / std::tan(scanner.fov_deg * M_PI / 360.0);
    const double near_z = 0.02;
    const double occl_tol = scanner.occlusion_tolerance > 0.0 ? scanner.occlusion_tolerance
                                                              : 4.0 * sample_spacing;

    struct Projected {
        Vec3 cam;
        std::int32_t pixel;
    };
    std::vector<Projected> visible;
    visible.reserve(surface.size() / 4);
    std::vector<float> depth(static_cast<std::size_t>(res) * res,
                             std::numeric_limits<float>::infinity());

    for (const Vec3& p : surface.points) {
        const Vec3 q = to_camera.apply(p);
        if (q.z() < near_z) continue;
        const double u = focal * q.x() / q.z() + res / 2.0;
        const double v = focal * q.y() / q.z() + res / 2.0;
        if (u < 0.0 || v < 0.0 || u >= res || v >= res) continue;
        const std::int32_t pix =
            static_cast<std::int32_t>(v) * res + static_cast<std::int32_t>(u);
        visible.push_back({q, pix});
        depth[pix] = std::min(depth[pix], static_cast<float>(q.z()));
    }

    ScanResult out;
    for (const Projected& pr : visible) {
        if (pr.cam.z() <= depth[pr.pixel] + occl_tol) {
            Vec3 q = pr.cam;
            if (scanner.depth_noise_sigma > 0.0) {
                q += rng.normal(0.0, scanner.depth_noise_sigma) * q.normalized();
            }
            out.frame.cloud.points.push_back(q);
        }
    }
    if (out.frame.cloud.empty()) {
        raise(ErrorCode::EmptyView, "no surface points visible from the scanner pose");
    }

    out.true_pose = scanner.pose;
    out.injected = RigidTransform::identity();
    if (scanner.pose_noise_rot_deg > 0.0 || scanner.pose_noise_trans > 0.0) {
        const Vec3 axis = rng.unit_vector();
        const Vec3 dir = rng.unit_vector();
        out.injected = RigidTransform::from_rotation_vector(
            axis * (scanner.pose_noise_rot_deg * M_PI / 180.0), dir * scanner.pose_noise_trans);
    }
    out.frame.camera_pose = out.injected.compose(out.true_pose);
    return out;
}

ScanResult virtual_scan(const Workpiece& w, const ScannerModel& scanner, std::uint64_t seed) {
    Rng rng(seed);
    const PointCloud surface = sample_surface(w, w.density, rng);
    return virtual_scan_sampled(surface, scanner, rng, 1.0 / std::sqrt(w.density));
}

RigidTransform synthetic_hand_eye() {
    const Vec3 axis = Vec3(1.0, 0.0, 0.0);
    return RigidTransform::from_rotation_vector(axis * (15.0 * M_PI / 180.0),
                                                Vec3(0.03, -0.02, 0.08));
}

std::vector<ScannerModel> default_scan_poses(WorkpieceKind kind) {
    std::vector<ScannerModel> poses;
    auto ring = [&poses](int count, double ring_radius, double height, const Vec3& target,
                         double fov, int res) {
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * M_PI * i / count + 0.3;
            poses.push_back(look_at(
                Vec3(ring_radius * std::cos(a), ring_radius * std::sin(a), height), target, fov,
                res));
        }
    };
    switch (kind) {
        case WorkpieceKind::VButtPlate:
            // The paper reconstructs this joint from a single capture.
            poses.push_back(look_at(Vec3(0.0, 0.0, 0.50), Vec3(0.001, 0.0, 0.0), 56.0, 560));
            break;
        case WorkpieceKind::CylinderOnPlate:
            ring(6, 0.26, 0.34, Vec3(0.0, 0.0, 0.03), 38.0, 480);
            break;
        case WorkpieceKind::YShape:
            ring(6, 0.24, 0.32, Vec3(0.0, 0.0, 0.02), 40.0, 480);
            break;
        case WorkpieceKind::Dihedral:
            // Both faces are visible from one pose over the open quadrant.
            poses.push_back(look_at(Vec3(0.0, 0.30, 0.30), Vec3(0.001, 0.015, 0.015), 50.0, 520));
            break;
    }
    // Shared sensor noise model for the bundled scripts.
    for (ScannerModel& s : poses) {
        s.depth_noise_sigma = 0.00025;
        s.pose_noise_rot_deg = 0.5;
        s.pose_noise_trans = 0.0015;
    }
    return poses;
}

ScanSession scan_session(const Workpiece& w, const std::vector<ScannerModel>& poses,
                         std::uint64_t seed) {
    if (poses.empty()) raise(ErrorCode::EmptyInput, "scan session needs at least one pose");
    Rng rng(seed);
    const PointCloud surface = sample_surface(w, w.density, rng);
    const double spacing = 1.0 / std::sqrt(w.density);

    ScanSession session;
    session.hand_eye = synthetic_hand_eye();
    session.metadata["workpiece"] = kind_name(w.kind);
    session.metadata["seed"] = std::to_string(seed);
    session.metadata["density"] = std::to_string(w.density);
    for (const ScannerModel& scanner : poses) {
        ScanResult r = virtual_scan_sampled(surface, scanner, rng, spacing);
        session.frames.push_back(std::move(r.frame));
        session.true_camera_poses.push_back(r.true_pose);
    }
    return session;
}

}  // namespace seamforge::synth
