#include "node_kernel.hpp"

namespace nbv::simd {

namespace {

void classify_row_scalar(const PlaneSet& planes, const RowGeometry& row, std::uint8_t* mask) {
    for (std::size_t i = 0; i < row.count; ++i) {
        mask[i] = detail::inside(planes, row.xs[i], row.y, row.z) ? 1 : 0;
    }
}

void score_row_scalar(const PlaneSet& planes, const RowGeometry& row, const RowState& state,
                      const ScoreTables& tables, const Vec3& cam, double* out) {
    for (std::size_t i = 0; i < row.count; ++i) {
        out[i] = detail::score_node(planes, row, state, tables, cam, i);
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Backend::Scalar, &classify_row_scalar, &score_row_scalar};
    return table;
}

}  // namespace nbv::simd
