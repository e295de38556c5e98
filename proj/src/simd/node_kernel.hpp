#pragma once

// Single-node forms of the row kernels. The scalar backend is built from
// these, and SIMD backends use them for row tails.

#include <cmath>

#include "nbv/simd/kernels.hpp"

namespace nbv::simd::detail {

inline bool inside(const PlaneSet& p, double x, double y, double z) {
    bool in = true;
    for (int k = 0; k < 6; ++k) {
        const double s = ((p.nx[k] * x + p.ny[k] * y) + p.nz[k] * z) + p.d[k];
        in = in && (s >= 0.0);
    }
    return in;
}

inline double score_node(const PlaneSet& planes, const RowGeometry& row, const RowState& state,
                         const ScoreTables& tables, const Vec3& cam, std::size_t i) {
    if (!inside(planes, row.xs[i], row.y, row.z)) return 0.0;
    const double dx = cam.x() - row.xs[i];
    const double dy = cam.y() - row.y;
    const double dz = cam.z() - row.z;
    const int bin = bin_of_offset(*tables.bins, dx, dy, dz);
    const std::uint32_t k = state.observers[i];
    const double c = static_cast<double>(state.counts[i * tables.n_bins + static_cast<std::size_t>(bin)]);
    const double t1 = static_cast<double>(k) + 1.0;
    const double expected = t1 * tables.uniform_mass[bin];
    const double before = std::abs(c - expected);
    const double after = std::abs((c + 1.0) - expected);
    const double spread = (state.spread_next[i] - before) + after;
    const double tv_after = 0.5 * (spread / t1);
    return (state.tv_now[i] - tv_after) + tables.freq_gain[k];
}

}  // namespace nbv::simd::detail
