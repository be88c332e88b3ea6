#include "seamforge/types.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace seamforge {

void PointCloud::validate() const {
    for (const Vec3& p : points) {
        if (!p.allFinite()) {
            raise(ErrorCode::DataError, "point cloud contains non-finite coordinates");
        }
    }
    if (!normals.empty()) {
        if (normals.size() != points.size()) {
            raise(ErrorCode::DataError, "normal count does not match point count");
        }
        for (const Vec3& n : normals) {
            if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6) {
                raise(ErrorCode::DataError, "normals must be finite unit vectors");
            }
        }
    }
}

Mat3 RigidTransform::project_to_rotation(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

static void check_rotation(const Mat3& r, double tolerance) {
    const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!r.allFinite() || ortho > tolerance) {
        raise(ErrorCode::InvalidPose, "rotation block is not orthonormal");
    }
    if (std::abs(r.determinant() - 1.0) > tolerance) {
        raise(ErrorCode::InvalidPose, "rotation block determinant is not +1");
    }
}

RigidTransform RigidTransform::from_parts(const Mat3& rotation, const Vec3& translation,
                                          double tolerance) {
    check_rotation(rotation, tolerance);
    if (!translation.allFinite()) {
        raise(ErrorCode::InvalidPose, "translation is not finite");
    }
    return RigidTransform(project_to_rotation(rotation), translation);
}

RigidTransform RigidTransform::from_matrix(const Mat4& m, double tolerance) {
    const Eigen::RowVector4d bottom = m.row(3);
    if ((bottom - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tolerance) {
        raise(ErrorCode::InvalidPose, "bottom row of homogeneous matrix must be (0,0,0,1)");
    }
    return from_parts(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>(), tolerance);
}

RigidTransform RigidTransform::from_rotation_vector(const Vec3& w, const Vec3& translation) {
    const double angle = w.norm();
    Mat3 r = Mat3::Identity();
    if (angle > 0.0) {
        r = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
    }
    return RigidTransform(r, translation);
}

Mat4 RigidTransform::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
    return RigidTransform(project_to_rotation(rotation_ * other.rotation_),
                          rotation_ * other.translation_ + translation_);
}

RigidTransform RigidTransform::inverse() const {
    return RigidTransform(rotation_.transpose(), -(rotation_.transpose() * translation_));
}

Vec3 RigidTransform::rotation_vector() const {
    Eigen::AngleAxisd aa(rotation_);
    return aa.axis() * aa.angle();
}

double RigidTransform::rotation_angle() const {
    return Eigen::AngleAxisd(rotation_).angle();
}

Vec3 PathPoint::rotation_vector() const {
    Eigen::AngleAxisd aa(frame());
    return aa.axis() * aa.angle();
}

PathPoint PathPoint::from_directions(const Vec3& position, const Vec3& travel, const Vec3& torch) {
    const double tn = torch.norm();
    const double tv = travel.norm();
    if (tn < 1e-12 || tv < 1e-12) {
        raise(ErrorCode::DegenerateFrame, "zero-length direction");
    }
    const Vec3 n = torch / tn;
    Vec3 m = travel / tv;
    m -= m.dot(n) * n;  // Gram-Schmidt against the torch axis
    const double mn = m.norm();
    if (mn < 1e-9) {
        raise(ErrorCode::DegenerateFrame, "travel direction parallel to torch axis");
    }
    PathPoint out;
    out.position = position;
    out.n = n;
    out.m = m / mn;
    out.o = out.m.cross(out.n);
    return out;
}

PathPoint PathPoint::from_rotation_vector(const Vec3& position, const Vec3& rotation_vector) {
    const RigidTransform t = RigidTransform::from_rotation_vector(rotation_vector, Vec3::Zero());
    PathPoint out;
    out.position = position;
    out.o = t.rotation().col(0);
    out.m = t.rotation().col(1);
    out.n = t.rotation().col(2);
    return out;
}

bool PathPoint::frame_valid(double tolerance) const {
    if (std::abs(o.norm() - 1.0) > tolerance || std::abs(m.norm() - 1.0) > tolerance ||
        std::abs(n.norm() - 1.0) > tolerance) {
        return false;
    }
    if (std::abs(o.dot(m)) > tolerance || std::abs(m.dot(n)) > tolerance ||
        std::abs(n.dot(o)) > tolerance) {
        return false;
    }
    return (o - m.cross(n)).norm() <= tolerance;
}

}  // namespace seamforge
