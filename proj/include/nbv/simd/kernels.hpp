#pragma once

// Data-parallel inner loops of the planner. Every kernel has a scalar
// reference and optional SIMD variants; all variants are required to return
// bit-identical results (no FMA contraction, identical operation order,
// reductions left to the caller).

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "nbv/angular.hpp"
#include "nbv/geometry.hpp"

namespace nbv::simd {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);

/// Frustum planes in structure-of-arrays form.
struct PlaneSet {
    alignas(32) double nx[6];
    alignas(32) double ny[6];
    alignas(32) double nz[6];
    alignas(32) double d[6];

    static PlaneSet from(const Frustum& frustum);
};

/// One contiguous run of nodes along x at fixed (y, z).
struct RowGeometry {
    const double* xs = nullptr;  // node x coordinates, `count` entries
    std::size_t count = 0;
    double y = 0.0;
    double z = 0.0;
};

/// Per-node state consumed by the delta kernel, all pointers already offset
/// to the first node of the row.
struct RowState {
    const std::uint32_t* counts = nullptr;     // n_bins per node, node-major
    const std::uint32_t* observers = nullptr;  // per node
    const double* tv_now = nullptr;            // current TV per node
    const double* spread_next = nullptr;       // sum_b |c_b - (t + 1) u_b| per node
};

/// Candidate-independent tables frozen for one greedy step.
struct ScoreTables {
    const BinThresholds* bins = nullptr;
    const double* uniform_mass = nullptr;  // per bin
    const double* freq_gain = nullptr;     // ((k+1)/n)^g - (k/n)^g, indexed by observer count k
    std::uint32_t n_bins = 0;
};

struct KernelTable {
    Backend backend;

    /// mask[i] = 1 iff node i has nonnegative signed distance to all planes.
    void (*classify_row)(const PlaneSet& planes, const RowGeometry& row, std::uint8_t* mask);

    /// out[i] = change of the node's (1 - TV) + O_f^g score if a camera at
    /// `cam` were added, or 0 for nodes outside the frustum.
    void (*score_row)(const PlaneSet& planes, const RowGeometry& row, const RowState& state,
                      const ScoreTables& tables, const Vec3& cam, double* out);
};

const KernelTable& scalar_kernels();

/// Null when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();

/// The table used by the library. Picks the widest supported backend on
/// first use; the environment variable NBV_SIMD=scalar forces the reference.
const KernelTable& active_kernels();

/// Overrides the active table (tests and benchmarks).
void set_active_backend(Backend backend);

}  // namespace nbv::simd
