#include "nbv/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nbv {

std::size_t Rng::index(std::size_t n) {
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

Vec3 Rng::point_in(const Aabb& box) {
    const double x = uniform(box.min.x(), box.max.x());
    const double y = uniform(box.min.y(), box.max.y());
    const double z = uniform(box.min.z(), box.max.z());
    return {x, y, z};
}

Vec3 Rng::unit_vector() {
    const double y = 1.0 - 2.0 * uniform();
    const double phi = 2.0 * std::numbers::pi * uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    return {r * std::cos(phi), y, r * std::sin(phi)};
}

Vec3 Rng::upper_hemisphere() {
    const double y = uniform();
    const double phi = 2.0 * std::numbers::pi * uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    return {r * std::cos(phi), y, r * std::sin(phi)};
}

}  // namespace nbv
