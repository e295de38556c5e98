#include "nbv/geometry.hpp"

#include <cmath>
#include <numbers>

#include "nbv/error.hpp"

namespace nbv {

Aabb Aabb::make(const Vec3& min, const Vec3& max) {
    if (!min.allFinite() || !max.allFinite() || !(min.array() < max.array()).all()) {
        throw Error(ErrorCode::InvalidArgument, "aabb requires finite min < max componentwise");
    }
    return Aabb{min, max};
}

bool Aabb::contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

bool Aabb::contains(const Aabb& other) const { return contains(other.min) && contains(other.max); }

bool Aabb::intersects(const Aabb& other) const {
    return (other.min.array() <= max.array()).all() && (other.max.array() >= min.array()).all();
}

Intrinsics Intrinsics::make(double fov_x, double fov_y, double near, double far) {
    Intrinsics intr{fov_x, fov_y, near, far};
    intr.validate();
    return intr;
}

void Intrinsics::validate() const {
    constexpr double pi = std::numbers::pi;
    if (!(fov_x > 0.0 && fov_x < pi) || !(fov_y > 0.0 && fov_y < pi)) {
        throw Error(ErrorCode::InvalidArgument, "field of view must lie in (0, pi)");
    }
    if (!(near > 0.0) || !(far > near) || !std::isfinite(far)) {
        throw Error(ErrorCode::InvalidArgument, "clip planes require 0 < near < far");
    }
}

CameraPose::CameraPose(const Vec3& position, const Quat& orientation)
    : position_(position), orientation_(orientation) {
    if (!position.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "camera position must be finite");
    }
    const double n = orientation.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-6) {
        throw Error(ErrorCode::InvalidArgument, "camera orientation must be a unit quaternion");
    }
    orientation_.normalize();
}

namespace {

CameraPose pose_from_axes(const Vec3& eye, const Vec3& forward, const Vec3& up_hint) {
    const Vec3 z = -forward.normalized();
    const Vec3 x = up_hint.cross(z).normalized();
    const Vec3 y = z.cross(x);
    Mat3 r;
    r.col(0) = x;
    r.col(1) = y;
    r.col(2) = z;
    return CameraPose(eye, Quat(r).normalized());
}

}  // namespace

CameraPose CameraPose::from_forward(const Vec3& eye, const Vec3& forward) {
    const double len = forward.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw Error(ErrorCode::DegenerateDirection, "view direction has zero length");
    }
    const Vec3 f = forward / len;
    const Vec3 up = std::abs(f.y()) >= 1.0 - 1e-6 ? Vec3::UnitZ() : Vec3::UnitY();
    return pose_from_axes(eye, f, up);
}

CameraPose CameraPose::look_at(const Vec3& eye, const Vec3& target) {
    return from_forward(eye, target - eye);
}

CameraPose CameraPose::from_matrix(const Mat4& m) {
    const Mat3 r = m.topLeftCorner<3, 3>();
    if (!((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6) || r.determinant() < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "transform is not a rigid camera-to-world matrix");
    }
    return CameraPose(m.topRightCorner<3, 1>(), Quat(r).normalized());
}

Mat4 CameraPose::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation();
    m.topRightCorner<3, 1>() = position_;
    return m;
}

bool Frustum::contains(const Vec3& p) const {
    for (const Plane& plane : planes) {
        if (!(plane.signed_distance(p) >= 0.0)) return false;
    }
    return true;
}

Frustum build_frustum(const CameraPose& pose, const Intrinsics& intr) {
    const double tx = std::tan(0.5 * intr.fov_x);
    const double ty = std::tan(0.5 * intr.fov_y);
    const double sx = 1.0 / std::sqrt(1.0 + tx * tx);
    const double sy = 1.0 / std::sqrt(1.0 + ty * ty);

    // Camera-space planes, inner side where signed distance >= 0.
    std::array<Plane, 6> local;
    local[Frustum::Near] = {Vec3(0, 0, -1), -intr.near};
    local[Frustum::Far] = {Vec3(0, 0, 1), intr.far};
    local[Frustum::Left] = {Vec3(sx, 0, -tx * sx), 0.0};    // x >= tx * z
    local[Frustum::Right] = {Vec3(-sx, 0, -tx * sx), 0.0};  // -x >= tx * z
    local[Frustum::Bottom] = {Vec3(0, sy, -ty * sy), 0.0};
    local[Frustum::Top] = {Vec3(0, -sy, -ty * sy), 0.0};

    const Mat3 r = pose.rotation();
    Frustum f;
    for (std::size_t i = 0; i < local.size(); ++i) {
        const Vec3 n = (r * local[i].normal).normalized();
        f.planes[i].normal = n;
        f.planes[i].offset = local[i].offset - n.dot(pose.position());
    }
    return f;
}

std::array<Vec3, 8> frustum_corners(const CameraPose& pose, const Intrinsics& intr) {
    const double tx = std::tan(0.5 * intr.fov_x);
    const double ty = std::tan(0.5 * intr.fov_y);
    const Mat3 r = pose.rotation();
    std::array<Vec3, 8> out;
    const double depths[2] = {intr.near, intr.far};
    const double signs[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (int face = 0; face < 2; ++face) {
        const double d = depths[face];
        for (int k = 0; k < 4; ++k) {
            const Vec3 local(signs[k][0] * tx * d, signs[k][1] * ty * d, -d);
            out[face * 4 + k] = r * local + pose.position();
        }
    }
    return out;
}

Direction Direction::from_vector(const Vec3& v) {
    const double len = v.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw Error(ErrorCode::DegenerateDirection, "direction has zero length");
    }
    Direction d;
    d.v = v / len;
    const double rho = std::hypot(d.v.x(), d.v.z());
    d.theta = std::atan2(rho, d.v.y());
    if (rho == 0.0) {
        d.phi = 0.0;
    } else {
        double phi = std::atan2(d.v.z(), d.v.x());
        if (phi < 0.0) phi += 2.0 * std::numbers::pi;
        if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
        d.phi = phi;
    }
    return d;
}

Direction Direction::from_angles(double theta, double phi) {
    const double s = std::sin(theta);
    Direction d = from_vector(Vec3(s * std::cos(phi), std::cos(theta), s * std::sin(phi)));
    return d;
}

Direction direction_to_camera(const Vec3& p, const CameraPose& pose) {
    const Vec3 offset = pose.position() - p;
    if (offset.squaredNorm() == 0.0) {
        throw Error(ErrorCode::DegenerateDirection, "camera centre coincides with the query point");
    }
    return Direction::from_vector(offset);
}

}  // namespace nbv
