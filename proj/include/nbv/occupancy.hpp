#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "nbv/geometry.hpp"

namespace nbv {

/// Binarized voxel grid over `box`. Voxel index = x + nx * (y + ny * z);
/// voxel intervals are half-open [lo, hi) except at the upper box face.
class OccupancyGrid {
public:
    OccupancyGrid(const Aabb& box, std::array<int, 3> resolution);
    OccupancyGrid(const Aabb& box, std::array<int, 3> resolution, std::vector<std::uint8_t> bits);

    const Aabb& box() const { return box_; }
    const std::array<int, 3>& resolution() const { return res_; }
    std::size_t voxel_count() const { return bits_.size(); }
    Vec3 voxel_size() const { return voxel_; }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(res_[0]) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(res_[1]) * z);
    }
    std::array<int, 3> coords(std::size_t index) const;
    Vec3 voxel_center(int x, int y, int z) const;

    bool occupied(int x, int y, int z) const { return bits_[index(x, y, z)] != 0; }
    void set(int x, int y, int z, bool occupied) { bits_[index(x, y, z)] = occupied ? 1 : 0; }
    std::span<const std::uint8_t> bits() const { return bits_; }
    std::size_t occupied_count() const;

    /// Voxel containing `p`, or nothing when p is outside the box.
    std::optional<std::array<int, 3>> voxel_of(const Vec3& p) const;

    /// True iff p is inside the box and its voxel is free.
    bool is_free(const Vec3& p) const;

    /// True iff no voxel overlapping `region` is occupied and region lies in the box.
    bool region_free(const Aabb& region) const;

    struct RayHit {
        double distance;
        std::array<int, 3> voxel;
    };

    /// First occupied voxel met by the ray within max_dist, found by visiting
    /// every voxel the ray passes through. Rays leaving the box do not hit.
    std::optional<RayHit> first_hit(const Vec3& origin, const Direction& dir, double max_dist) const;

    /// Distance to the first occupied voxel boundary along `dir`, or max_dist
    /// when there is none in range. Throws OriginOccupied if `origin` is not free.
    double clearance_along(const Vec3& origin, const Direction& dir, double max_dist) const;

private:
    Aabb box_;
    std::array<int, 3> res_;
    Vec3 voxel_;
    std::vector<std::uint8_t> bits_;
};

struct BoxPrimitive {
    Vec3 min;
    Vec3 max;
};

struct SpherePrimitive {
    Vec3 center;
    double radius;
};

using Primitive = std::variant<BoxPrimitive, SpherePrimitive>;

bool primitive_contains(const Primitive& prim, const Vec3& p);

/// Scene built from boxes and spheres, the stand-in for a trained density field.
struct PrimitiveScene {
    Aabb box;
    std::array<int, 3> resolution{128, 128, 128};
    std::vector<Primitive> primitives;

    /// Every primitive must intersect the scene box.
    void validate() const;
};

/// A voxel is occupied iff its centre lies inside at least one primitive.
OccupancyGrid voxelize(const PrimitiveScene& scene);

/// A voxel is occupied iff its density is strictly above `threshold`.
/// `density` is x-fastest with resolution[0] * resolution[1] * resolution[2] values.
OccupancyGrid binarize_density(const Aabb& box, std::array<int, 3> resolution, std::span<const float> density,
                               double threshold);

}  // namespace nbv
