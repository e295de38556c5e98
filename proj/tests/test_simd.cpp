#include <cstring>
#include <random>

#include "doctest.h"
#include "nbv/planner.hpp"
#include "nbv/simd/kernels.hpp"

using namespace nbv;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

CameraPose random_pose(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 2.5), v(0, 1);
    return CameraPose::look_at({u(rng), u(rng), u(rng)}, {v(rng), v(rng), v(rng)});
}

/// Restores the default backend when a test finishes.
struct BackendGuard {
    ~BackendGuard() { simd::set_active_backend(simd::avx2_kernels() ? simd::Backend::Avx2 : simd::Backend::Scalar); }
};

}  // namespace

TEST_CASE("backend selection") {
    CHECK(simd::scalar_kernels().backend == simd::Backend::Scalar);
    BackendGuard guard;
    simd::set_active_backend(simd::Backend::Scalar);
    CHECK(simd::active_kernels().backend == simd::Backend::Scalar);
    if (simd::avx2_kernels()) {
        simd::set_active_backend(simd::Backend::Avx2);
        CHECK(simd::active_kernels().backend == simd::Backend::Avx2);
    } else {
        MESSAGE("AVX2 backend unavailable; equivalence tests only exercise the scalar path");
    }
}

TEST_CASE("classify_row is identical across backends") {
    const simd::KernelTable* wide = simd::avx2_kernels();
    if (!wide) return;
    const simd::KernelTable& ref = simd::scalar_kernels();
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> u(-1.5, 2.5);
    const Intrinsics intr = Intrinsics::make(1.1, 0.9, 0.05, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const simd::PlaneSet planes = simd::PlaneSet::from(build_frustum(random_pose(rng), intr));
        // Odd lengths exercise the scalar tail of the vector loop.
        const std::size_t n = 1 + rng() % 37;
        std::vector<double> xs(n);
        for (auto& x : xs) x = u(rng);
        const simd::RowGeometry row{xs.data(), n, u(rng), u(rng)};
        std::vector<std::uint8_t> a(n, 7), b(n, 9);
        ref.classify_row(planes, row, a.data());
        wide->classify_row(planes, row, b.data());
        CHECK(a == b);
    }
}

TEST_CASE("score_row is identical across backends") {
    const simd::KernelTable* wide = simd::avx2_kernels();
    if (!wide) return;
    const simd::KernelTable& ref = simd::scalar_kernels();
    std::mt19937_64 rng(92);
    const Intrinsics intr = Intrinsics::make(1.1, 0.9, 0.05, 3.0);
    for (bool equal_area : {false, true}) {
        const int res = 9;
        NodeGrid grid(Aabb::make({0, 0, 0}, {1, 1, 1}), res, BinLayout::make(4, 8, equal_area));
        for (int c = 0; c < 6; ++c) grid.apply_camera(random_pose(rng), intr);
        const std::vector<double> table = frequency_table(grid.camera_count() + 1, 0.5);
        std::vector<double> gain(table.size() - 1);
        for (std::size_t k = 0; k + 1 < table.size(); ++k) gain[k] = table[k + 1] - table[k];
        const BinLayout& layout = grid.layout();
        const simd::ScoreTables tables{&layout.thresholds(), layout.uniform_mass().data(), gain.data(),
                                       static_cast<std::uint32_t>(layout.n_bins())};
        const auto xs = grid.axis(0);
        for (int trial = 0; trial < 40; ++trial) {
            const CameraPose cam = random_pose(rng);
            const simd::PlaneSet planes = simd::PlaneSet::from(build_frustum(cam, intr));
            for (int iz = 0; iz < res; ++iz) {
                for (int iy = 0; iy < res; ++iy) {
                    const std::size_t first = grid.index(0, iy, iz);
                    const simd::RowGeometry row{xs.data(), static_cast<std::size_t>(res), grid.axis(1)[iy],
                                                grid.axis(2)[iz]};
                    const simd::RowState state{grid.counts().data() + first * layout.n_bins(),
                                               grid.observers().data() + first, grid.tv_now().data() + first,
                                               grid.spread_next().data() + first};
                    std::vector<double> a(res, -1.0), b(res, -2.0);
                    ref.score_row(planes, row, state, tables, cam.position(), a.data());
                    wide->score_row(planes, row, state, tables, cam.position(), b.data());
                    CHECK(bitwise_equal(a, b));
                }
            }
        }
    }
}

TEST_CASE("scores and plans do not depend on the backend") {
    if (!simd::avx2_kernels()) return;
    BackendGuard guard;
    std::mt19937_64 rng(93);
    const Intrinsics intr = Intrinsics::make(1.1, 0.9, 0.05, 3.0);
    NodeGrid grid(Aabb::make({0, 0, 0}, {1, 1, 1}), 16, BinLayout::make(4, 8, false));
    for (int c = 0; c < 10; ++c) grid.apply_camera(random_pose(rng), intr);
    std::vector<CameraPose> cands;
    for (int c = 0; c < 200; ++c) cands.push_back(random_pose(rng));

    simd::set_active_backend(simd::Backend::Scalar);
    const std::vector<double> s = score_candidates(grid, cands, intr, 0.5, 1);
    simd::set_active_backend(simd::Backend::Avx2);
    const std::vector<double> v = score_candidates(grid, cands, intr, 0.5, 1);
    CHECK(bitwise_equal(s, v));

    PlannerConfig cfg;
    cfg.box = Aabb::make({0, 0, 0}, {2, 1, 2});
    cfg.free_box = Aabb::make({0.8, 0.4, 0.8}, {1.2, 0.6, 1.2});
    cfg.node_resolution = 12;
    cfg.budget = 8;
    cfg.candidates = 80;
    cfg.bootstrap = 2;
    cfg.intrinsics = intr;
    const OccupancyGrid occ(cfg.box, {8, 8, 8});
    simd::set_active_backend(simd::Backend::Scalar);
    const PlanResult a = plan(cfg, occ);
    simd::set_active_backend(simd::Backend::Avx2);
    const PlanResult b = plan(cfg, occ);
    CHECK(a.cameras == b.cameras);
    CHECK(a.energies == b.energies);
}
