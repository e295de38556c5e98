#include "nbv/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbv/error.hpp"

namespace nbv {

namespace {

std::size_t checked_volume(std::array<int, 3> res) {
    for (int r : res) {
        if (r < 1) throw Error(ErrorCode::InvalidArgument, "occupancy resolution must be positive");
    }
    return static_cast<std::size_t>(res[0]) * res[1] * res[2];
}

}  // namespace

OccupancyGrid::OccupancyGrid(const Aabb& box, std::array<int, 3> resolution)
    : OccupancyGrid(box, resolution, std::vector<std::uint8_t>(checked_volume(resolution), 0)) {}

OccupancyGrid::OccupancyGrid(const Aabb& box, std::array<int, 3> resolution, std::vector<std::uint8_t> bits)
    : box_(Aabb::make(box.min, box.max)), res_(resolution), bits_(std::move(bits)) {
    if (bits_.size() != checked_volume(res_)) {
        throw Error(ErrorCode::InvalidArgument, "occupancy bit count does not match resolution");
    }
    voxel_ = box_.extent().cwiseQuotient(Vec3(res_[0], res_[1], res_[2]));
}

std::array<int, 3> OccupancyGrid::coords(std::size_t i) const {
    const std::size_t nx = static_cast<std::size_t>(res_[0]);
    const std::size_t ny = static_cast<std::size_t>(res_[1]);
    return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny), static_cast<int>(i / (nx * ny))};
}

Vec3 OccupancyGrid::voxel_center(int x, int y, int z) const {
    return box_.min + Vec3(x + 0.5, y + 0.5, z + 0.5).cwiseProduct(voxel_);
}

std::size_t OccupancyGrid::occupied_count() const {
    return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

std::optional<std::array<int, 3>> OccupancyGrid::voxel_of(const Vec3& p) const {
    if (!box_.contains(p)) return std::nullopt;
    std::array<int, 3> v;
    for (int a = 0; a < 3; ++a) {
        const int i = static_cast<int>(std::floor((p[a] - box_.min[a]) / voxel_[a]));
        v[static_cast<std::size_t>(a)] = std::clamp(i, 0, res_[static_cast<std::size_t>(a)] - 1);
    }
    return v;
}

bool OccupancyGrid::is_free(const Vec3& p) const {
    const auto v = voxel_of(p);
    return v && !occupied((*v)[0], (*v)[1], (*v)[2]);
}

bool OccupancyGrid::region_free(const Aabb& region) const {
    if (!box_.contains(region)) return false;
    const auto lo = voxel_of(region.min);
    const auto hi = voxel_of(region.max);
    for (int z = (*lo)[2]; z <= (*hi)[2]; ++z)
        for (int y = (*lo)[1]; y <= (*hi)[1]; ++y)
            for (int x = (*lo)[0]; x <= (*hi)[0]; ++x)
                if (occupied(x, y, z)) return false;
    return true;
}

std::optional<OccupancyGrid::RayHit> OccupancyGrid::first_hit(const Vec3& origin, const Direction& dir,
                                                               double max_dist) const {
    const Vec3& d = dir.v;
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Clip the ray against the box.
    double t_enter = 0.0;
    double t_exit = max_dist;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (origin[a] < box_.min[a] || origin[a] > box_.max[a]) return std::nullopt;
            continue;
        }
        double t0 = (box_.min[a] - origin[a]) / d[a];
        double t1 = (box_.max[a] - origin[a]) / d[a];
        if (t0 > t1) std::swap(t0, t1);
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
    }
    if (t_enter > t_exit) return std::nullopt;

    std::array<int, 3> v;
    std::array<int, 3> step;
    std::array<double, 3> t_max;
    std::array<double, 3> t_delta;
    const Vec3 start = origin + t_enter * d;
    for (int a = 0; a < 3; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        int i = static_cast<int>(std::floor((start[a] - box_.min[a]) / voxel_[a]));
        i = std::clamp(i, 0, res_[ua] - 1);
        v[ua] = i;
        if (d[a] > 0.0) {
            step[ua] = 1;
            t_max[ua] = (box_.min[a] + (i + 1) * voxel_[a] - origin[a]) / d[a];
            t_delta[ua] = voxel_[a] / d[a];
        } else if (d[a] < 0.0) {
            step[ua] = -1;
            t_max[ua] = (box_.min[a] + i * voxel_[a] - origin[a]) / d[a];
            t_delta[ua] = -voxel_[a] / d[a];
        } else {
            step[ua] = 0;
            t_max[ua] = inf;
            t_delta[ua] = inf;
        }
    }

    double t = t_enter;
    while (true) {
        if (occupied(v[0], v[1], v[2])) return RayHit{t, v};
        std::size_t axis = 0;
        if (t_max[1] < t_max[axis]) axis = 1;
        if (t_max[2] < t_max[axis]) axis = 2;
        t = t_max[axis];
        if (t > t_exit) return std::nullopt;
        v[axis] += step[axis];
        if (v[axis] < 0 || v[axis] >= res_[axis]) return std::nullopt;
        t_max[axis] += t_delta[axis];
    }
}

double OccupancyGrid::clearance_along(const Vec3& origin, const Direction& dir, double max_dist) const {
    if (!is_free(origin)) {
        throw Error(ErrorCode::OriginOccupied, "clearance query from an occupied or outside point");
    }
    const auto hit = first_hit(origin, dir, max_dist);
    return hit ? std::min(hit->distance, max_dist) : max_dist;
}

bool primitive_contains(const Primitive& prim, const Vec3& p) {
    if (const auto* b = std::get_if<BoxPrimitive>(&prim)) {
        return (p.array() >= b->min.array()).all() && (p.array() <= b->max.array()).all();
    }
    const auto& s = std::get<SpherePrimitive>(prim);
    return (p - s.center).squaredNorm() <= s.radius * s.radius;
}

void PrimitiveScene::validate() const {
    Aabb::make(box.min, box.max);
    checked_volume(resolution);
    for (const Primitive& prim : primitives) {
        Aabb bounds;
        if (const auto* b = std::get_if<BoxPrimitive>(&prim)) {
            if (!(b->min.array() <= b->max.array()).all()) {
                throw Error(ErrorCode::InvalidArgument, "box primitive with min > max");
            }
            bounds = {b->min, b->max};
        } else {
            const auto& s = std::get<SpherePrimitive>(prim);
            if (!(s.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere primitive needs a positive radius");
            bounds = {s.center.array() - s.radius, s.center.array() + s.radius};
        }
        if (!box.intersects(bounds)) {
            throw Error(ErrorCode::InvalidArgument, "primitive lies entirely outside the scene box");
        }
    }
}

OccupancyGrid voxelize(const PrimitiveScene& scene) {
    scene.validate();
    OccupancyGrid grid(scene.box, scene.resolution);
    const auto& r = scene.resolution;
    for (int z = 0; z < r[2]; ++z)
        for (int y = 0; y < r[1]; ++y)
            for (int x = 0; x < r[0]; ++x) {
                const Vec3 c = grid.voxel_center(x, y, z);
                const bool occ = std::any_of(scene.primitives.begin(), scene.primitives.end(),
                                             [&](const Primitive& p) { return primitive_contains(p, c); });
                if (occ) grid.set(x, y, z, true);
            }
    return grid;
}

OccupancyGrid binarize_density(const Aabb& box, std::array<int, 3> resolution, std::span<const float> density,
                               double threshold) {
    if (density.size() != checked_volume(resolution)) {
        throw Error(ErrorCode::InvalidArgument, "density array size does not match its dimensions");
    }
    std::vector<std::uint8_t> bits(density.size());
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (!std::isfinite(density[i])) throw Error(ErrorCode::InvalidArgument, "density values must be finite");
        bits[i] = static_cast<double>(density[i]) > threshold ? 1 : 0;
    }
    return OccupancyGrid(box, resolution, std::move(bits));
}

}  // namespace nbv
