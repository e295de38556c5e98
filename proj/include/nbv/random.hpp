#pragma once

#include <cstdint>
#include <random>

#include "nbv/geometry.hpp"

namespace nbv {

/// Seeded generator with a platform-independent output stream: mt19937_64
/// is fully specified, and the real-valued draws below avoid the
/// implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);

    Vec3 point_in(const Aabb& box);

    /// Uniform on the unit sphere (Archimedes: uniform height, uniform azimuth).
    Vec3 unit_vector();

    /// Uniform by area on the upper (+Y) unit hemisphere.
    Vec3 upper_hemisphere();

private:
    std::mt19937_64 engine_;
};

}  // namespace nbv
