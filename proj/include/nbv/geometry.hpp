#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace nbv {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Axis-aligned box, min < max componentwise.
struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();

    static Aabb make(const Vec3& min, const Vec3& max);

    Vec3 extent() const { return max - min; }
    Vec3 center() const { return 0.5 * (min + max); }
    double diagonal() const { return extent().norm(); }
    double volume() const { return extent().prod(); }

    /// Closed containment test.
    bool contains(const Vec3& p) const;
    bool contains(const Aabb& other) const;
    bool intersects(const Aabb& other) const;

    friend bool operator==(const Aabb& a, const Aabb& b) { return a.min == b.min && a.max == b.max; }
};

/// Pinhole intrinsics; angles in radians.
struct Intrinsics {
    double fov_x = 1.0471975511965976;  // 60 degrees
    double fov_y = 1.0471975511965976;
    double near = 0.05;
    double far = 100.0;

    static Intrinsics make(double fov_x, double fov_y, double near, double far);
    void validate() const;

    friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

/// Camera-to-world pose. The camera looks along its local -Z axis with +Y up
/// and +X right.
class CameraPose {
public:
    CameraPose() = default;
    CameraPose(const Vec3& position, const Quat& orientation);

    /// Orientation looking from `eye` towards `target` with world +Y up.
    static CameraPose look_at(const Vec3& eye, const Vec3& target);
    /// Orientation looking along `forward` with world +Y up. When `forward`
    /// is within 1e-6 of +-Y the up hint falls back to world +Z.
    static CameraPose from_forward(const Vec3& eye, const Vec3& forward);
    /// Inverse of `matrix()`; the upper-left block must be a rotation.
    static CameraPose from_matrix(const Mat4& camera_to_world);

    const Vec3& position() const { return position_; }
    const Quat& orientation() const { return orientation_; }
    Mat3 rotation() const { return orientation_.toRotationMatrix(); }
    Mat4 matrix() const;

    Vec3 forward() const { return -rotation().col(2); }
    Vec3 up() const { return rotation().col(1); }
    Vec3 right() const { return rotation().col(0); }

    friend bool operator==(const CameraPose& a, const CameraPose& b) {
        return a.position_ == b.position_ && a.orientation_.coeffs() == b.orientation_.coeffs();
    }

private:
    Vec3 position_ = Vec3::Zero();
    Quat orientation_ = Quat::Identity();
};

/// Oriented plane; points with signed_distance >= 0 are on the inner side.
struct Plane {
    Vec3 normal = Vec3::UnitZ();
    double offset = 0.0;

    // The evaluation order is fixed; SIMD kernels reproduce it bit for bit.
    double signed_distance(const Vec3& p) const {
        return ((normal.x() * p.x() + normal.y() * p.y()) + normal.z() * p.z()) + offset;
    }
};

/// Six inward-facing planes: near, far, left, right, bottom, top.
struct Frustum {
    enum Side { Near = 0, Far, Left, Right, Bottom, Top };
    std::array<Plane, 6> planes;

    bool contains(const Vec3& p) const;
};

Frustum build_frustum(const CameraPose& pose, const Intrinsics& intr);

/// The eight frustum corners in world space, near face first
/// (-x-y, +x-y, +x+y, -x+y), then the far face in the same order.
std::array<Vec3, 8> frustum_corners(const CameraPose& pose, const Intrinsics& intr);

/// Frustum containment, inclusive of the boundary. No occlusion.
inline bool observes(const Frustum& frustum, const Vec3& p) { return frustum.contains(p); }

/// Unit direction with spherical angles: theta is the polar angle from world
/// +Y in [0, pi], phi the azimuth in the XZ plane measured from +X towards +Z
/// in [0, 2pi). At the poles phi is 0.
struct Direction {
    Vec3 v = Vec3::UnitY();
    double theta = 0.0;
    double phi = 0.0;

    static Direction from_vector(const Vec3& v);
    static Direction from_angles(double theta, double phi);
};

/// Direction from `p` towards the camera centre. Throws DegenerateDirection
/// when the camera sits exactly on `p`.
Direction direction_to_camera(const Vec3& p, const CameraPose& pose);

}  // namespace nbv
