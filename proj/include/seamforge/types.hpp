#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <map>
#include <string>
#include <vector>

#include "seamforge/error.hpp"

namespace seamforge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Point cloud in meters. Normals, when present, are unit vectors and
/// parallel to `points` (one per point).
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_normals() const { return !normals.empty() && normals.size() == points.size(); }

    void reserve(std::size_t n) {
        points.reserve(n);
        normals.reserve(n);
    }

    /// Throws DataError / InvalidParameter when the invariants are violated:
    /// finite coordinates, unit normals (1e-6), matching lengths.
    void validate() const;
};

/// Proper rigid motion: x -> R x + t with R in SO(3).
class RigidTransform {
public:
    RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

    static RigidTransform identity() { return RigidTransform(); }

    /// Validates orthonormality and det(R)=+1 within `tolerance`
    /// (throws InvalidPose), then projects R onto SO(3) so the stored
    /// rotation is exact to machine precision.
    static RigidTransform from_matrix(const Mat4& m, double tolerance = 1e-9);
    static RigidTransform from_parts(const Mat3& rotation, const Vec3& translation,
                                     double tolerance = 1e-9);
    /// Rodrigues: rotation by |w| radians about w/|w|.
    static RigidTransform from_rotation_vector(const Vec3& w, const Vec3& translation);

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    Mat4 matrix() const;

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

    /// this ∘ other: applies `other` first.
    RigidTransform compose(const RigidTransform& other) const;
    RigidTransform inverse() const;

    /// Inverse Rodrigues (axis * angle, angle in [0, pi]).
    Vec3 rotation_vector() const;
    double rotation_angle() const;  // radians

    /// Nearest rotation to an arbitrary 3x3 matrix (polar decomposition).
    static Mat3 project_to_rotation(const Mat3& m);

private:
    RigidTransform(const Mat3& r, const Vec3& t) : rotation_(r), translation_(t) {}

    Mat3 rotation_;
    Vec3 translation_;
};

/// One captured view: cloud in the camera frame plus the camera-to-base pose.
struct ScanFrame {
    PointCloud cloud;
    RigidTransform camera_pose;  // maps camera coordinates to base coordinates
};

/// An ordered capture session. `hand_eye` is the flange-to-camera calibration;
/// frame poses stored on disk are end-effector poses, composed with hand_eye
/// on load. `true_camera_poses` carries synthetic ground truth when known.
struct ScanSession {
    std::vector<ScanFrame> frames;
    RigidTransform hand_eye;
    std::map<std::string, std::string> metadata;
    std::vector<RigidTransform> true_camera_poses;  // empty unless synthetic

    std::size_t size() const { return frames.size(); }
};

/// 6-DOF welding pose: position plus right-handed orthonormal frame.
/// Columns of the rotation are (o, m, n): o = m x n, m is the travel
/// direction, n the torch axis.
struct PathPoint {
    Vec3 position = Vec3::Zero();
    Vec3 o = Vec3::UnitX();
    Vec3 m = Vec3::UnitY();
    Vec3 n = Vec3::UnitZ();

    Mat3 frame() const {
        Mat3 f;
        f.col(0) = o;
        f.col(1) = m;
        f.col(2) = n;
        return f;
    }

    Vec3 rotation_vector() const;

    /// Builds the frame from a travel direction and torch axis; m is
    /// re-orthogonalized against n. Throws DegenerateFrame when m ∥ n.
    static PathPoint from_directions(const Vec3& position, const Vec3& travel, const Vec3& torch);
    /// Reconstructs the frame from a serialized rotation vector.
    static PathPoint from_rotation_vector(const Vec3& position, const Vec3& rotation_vector);

    /// Frame invariants: unit axes, mutual orthogonality, o = m x n (1e-9).
    bool frame_valid(double tolerance = 1e-9) const;
};

using Path = std::vector<PathPoint>;

}  // namespace seamforge
