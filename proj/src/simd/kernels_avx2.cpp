#include <immintrin.h>

#include "node_kernel.hpp"

namespace nbv::simd {

namespace {

inline __m256d inside4(const PlaneSet& p, __m256d x, __m256d y, __m256d z) {
    __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (int k = 0; k < 6; ++k) {
        const __m256d s = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(p.nx[k]), x), _mm256_mul_pd(_mm256_set1_pd(p.ny[k]), y)),
                          _mm256_mul_pd(_mm256_set1_pd(p.nz[k]), z)),
            _mm256_set1_pd(p.d[k]));
        mask = _mm256_and_pd(mask, _mm256_cmp_pd(s, _mm256_setzero_pd(), _CMP_GE_OQ));
    }
    return mask;
}

void classify_row_avx2(const PlaneSet& planes, const RowGeometry& row, std::uint8_t* mask) {
    const __m256d y = _mm256_set1_pd(row.y);
    const __m256d z = _mm256_set1_pd(row.z);
    std::size_t i = 0;
    for (; i + 4 <= row.count; i += 4) {
        const int bits = _mm256_movemask_pd(inside4(planes, _mm256_loadu_pd(row.xs + i), y, z));
        mask[i + 0] = static_cast<std::uint8_t>(bits & 1);
        mask[i + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
        mask[i + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
        mask[i + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
    }
    for (; i < row.count; ++i) {
        mask[i] = detail::inside(planes, row.xs[i], row.y, row.z) ? 1 : 0;
    }
}

void score_row_avx2(const PlaneSet& planes, const RowGeometry& row, const RowState& state, const ScoreTables& tables,
                    const Vec3& cam, double* out) {
    const BinThresholds& bins = *tables.bins;
    const __m256d y = _mm256_set1_pd(row.y);
    const __m256d z = _mm256_set1_pd(row.z);
    const __m256d cam_x = _mm256_set1_pd(cam.x());
    const __m256d dy = _mm256_set1_pd(cam.y() - row.y);
    const __m256d dz = _mm256_set1_pd(cam.z() - row.z);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d n_az = _mm256_set1_pd(static_cast<double>(bins.n_azimuth));
    const int nb = static_cast<int>(tables.n_bins);
    const __m128i node_stride = _mm_setr_epi32(0, nb, 2 * nb, 3 * nb);

    // The row shares dy and dz, so the dz part of the lower-half test is uniform.
    const __m256d dz_neg = _mm256_cmp_pd(dz, zero, _CMP_LT_OQ);
    const __m256d dz_zero = _mm256_cmp_pd(dz, zero, _CMP_EQ_OQ);
    const __m256d dzdz = _mm256_mul_pd(dz, dz);
    const __m256d dydy = _mm256_mul_pd(dy, dy);

    std::size_t i = 0;
    for (; i + 4 <= row.count; i += 4) {
        const __m256d x = _mm256_loadu_pd(row.xs + i);
        const __m256d in = inside4(planes, x, y, z);
        if (_mm256_movemask_pd(in) == 0) {
            _mm256_storeu_pd(out + i, zero);
            continue;
        }
        const __m256d dx = _mm256_sub_pd(cam_x, x);
        const __m256d dxdx = _mm256_mul_pd(dx, dx);
        const __m256d len = _mm256_sqrt_pd(_mm256_add_pd(_mm256_add_pd(dxdx, dydy), dzdz));
        const __m256d yn = _mm256_div_pd(dy, len);
        __m256d row_idx = zero;
        for (double c : bins.row_cos) {
            row_idx = _mm256_add_pd(row_idx, _mm256_and_pd(_mm256_cmp_pd(yn, _mm256_set1_pd(c), _CMP_LE_OQ), one));
        }

        const __m256d rho = _mm256_sqrt_pd(_mm256_add_pd(dxdx, dzdz));
        const __m256d rho_zero = _mm256_cmp_pd(rho, zero, _CMP_EQ_OQ);
        const __m256d xn = _mm256_blendv_pd(_mm256_div_pd(dx, rho), one, rho_zero);
        const __m256d lower = _mm256_or_pd(dz_neg, _mm256_and_pd(dz_zero, _mm256_cmp_pd(dx, zero, _CMP_LT_OQ)));
        __m256d col_idx = zero;
        for (std::size_t j = 0; j < bins.col_cos.size(); ++j) {
            const __m256d c = _mm256_set1_pd(bins.col_cos[j]);
            const __m256d past = bins.col_lower[j] ? _mm256_and_pd(lower, _mm256_cmp_pd(xn, c, _CMP_GE_OQ))
                                                   : _mm256_or_pd(lower, _mm256_cmp_pd(xn, c, _CMP_LE_OQ));
            col_idx = _mm256_add_pd(col_idx, _mm256_and_pd(past, one));
        }
        const __m128i bin = _mm256_cvttpd_epi32(_mm256_add_pd(_mm256_mul_pd(row_idx, n_az), col_idx));

        const __m128i k = _mm_loadu_si128(reinterpret_cast<const __m128i*>(state.observers + i));
        const __m128i count_idx = _mm_add_epi32(node_stride, bin);
        const __m256d c = _mm256_cvtepi32_pd(_mm_i32gather_epi32(
            reinterpret_cast<const int*>(state.counts + i * tables.n_bins), count_idx, 4));
        const __m256d t1 = _mm256_add_pd(_mm256_cvtepi32_pd(k), one);
        const __m256d expected = _mm256_mul_pd(t1, _mm256_i32gather_pd(tables.uniform_mass, bin, 8));
        const __m256d before = _mm256_andnot_pd(sign, _mm256_sub_pd(c, expected));
        const __m256d after = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_add_pd(c, one), expected));
        const __m256d spread = _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(state.spread_next + i), before), after);
        const __m256d tv_after = _mm256_mul_pd(half, _mm256_div_pd(spread, t1));
        const __m256d gain = _mm256_i32gather_pd(tables.freq_gain, k, 8);
        const __m256d delta = _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(state.tv_now + i), tv_after), gain);
        _mm256_storeu_pd(out + i, _mm256_and_pd(in, delta));
    }
    for (; i < row.count; ++i) {
        out[i] = detail::score_node(planes, row, state, tables, cam, i);
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{Backend::Avx2, &classify_row_avx2, &score_row_avx2};
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &table : nullptr;
}

}  // namespace nbv::simd
