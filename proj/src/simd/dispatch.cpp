#include <atomic>
#include <cstdlib>
#include <string>

#include "nbv/error.hpp"
#include "nbv/simd/kernels.hpp"

namespace nbv::simd {

#ifndef NBV_HAVE_AVX2_KERNELS
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string_view to_string(Backend backend) {
    switch (backend) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

PlaneSet PlaneSet::from(const Frustum& frustum) {
    PlaneSet p{};
    for (int k = 0; k < 6; ++k) {
        p.nx[k] = frustum.planes[k].normal.x();
        p.ny[k] = frustum.planes[k].normal.y();
        p.nz[k] = frustum.planes[k].normal.z();
        p.d[k] = frustum.planes[k].offset;
    }
    return p;
}

namespace {

const KernelTable* select_default() {
    const char* env = std::getenv("NBV_SIMD");
    if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{select_default()};
    return slot;
}

}  // namespace

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_backend(Backend backend) {
    const KernelTable* table = &scalar_kernels();
    if (backend == Backend::Avx2) {
        table = avx2_kernels();
        if (table == nullptr) throw Error(ErrorCode::InvalidArgument, "AVX2 kernels unavailable on this machine");
    }
    active_slot().store(table, std::memory_order_release);
}

}  // namespace nbv::simd
