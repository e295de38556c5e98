#include "nbv/reconstructability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbv/error.hpp"
#include "nbv/simd/kernels.hpp"

namespace nbv {

double observation_frequency(const ObservationState& state, std::size_t n_cameras) {
    if (n_cameras == 0) {
        throw Error(ErrorCode::NoCameras, "observation frequency is undefined without cameras");
    }
    if (state.observer_count > n_cameras) {
        throw Error(ErrorCode::InvalidArgument, "observer count exceeds camera count");
    }
    return static_cast<double>(state.observer_count) / static_cast<double>(n_cameras);
}

NodeGrid::NodeGrid(const Aabb& box, int resolution, BinLayout layout)
    : box_(Aabb::make(box.min, box.max)), resolution_(resolution), layout_(std::move(layout)) {
    if (resolution < 1) {
        throw Error(ErrorCode::InvalidArgument, "node grid resolution must be at least 1");
    }
    const Vec3 cell = box_.extent() / resolution;
    for (int a = 0; a < 3; ++a) {
        axes_[a].resize(static_cast<std::size_t>(resolution));
        for (int i = 0; i < resolution; ++i) {
            axes_[a][static_cast<std::size_t>(i)] = box_.min[a] + (i + 0.5) * cell[a];
        }
    }
    const std::size_t n = static_cast<std::size_t>(resolution) * resolution * resolution;
    counts_.assign(n * static_cast<std::size_t>(layout_.n_bins()), 0);
    observers_.assign(n, 0);
    tv_now_.assign(n, 1.0);
    spread_next_.resize(n);
    for (std::size_t i = 0; i < n; ++i) refresh(i);
}

Vec3 NodeGrid::position(std::size_t i) const {
    const std::size_t r = static_cast<std::size_t>(resolution_);
    return {axes_[0][i % r], axes_[1][(i / r) % r], axes_[2][i / (r * r)]};
}

ObservationState NodeGrid::state(std::size_t i) const {
    const std::size_t nb = static_cast<std::size_t>(layout_.n_bins());
    return {std::span<const std::uint32_t>(counts_).subspan(i * nb, nb), observers_[i]};
}

void NodeGrid::refresh(std::size_t i) {
    const std::size_t nb = static_cast<std::size_t>(layout_.n_bins());
    const std::span<const std::uint32_t> c = std::span<const std::uint32_t>(counts_).subspan(i * nb, nb);
    const auto mass = layout_.uniform_mass();
    tv_now_[i] = tv_distance(c, observers_[i], layout_);
    const double t1 = static_cast<double>(observers_[i]) + 1.0;
    double spread = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        spread += std::abs(static_cast<double>(c[b]) - t1 * mass[b]);
    }
    spread_next_[i] = spread;
}

void NodeGrid::frustum_rows(const Frustum& frustum, std::vector<RowSpan>& out) const {
    out.clear();
    const int res = resolution_;
    const Vec3 cell = box_.extent() / res;

    // Index range of nodes whose coordinate along `a` may lie in [lo, hi],
    // padded by one node.
    auto index_range = [&](int a, double lo, double hi) {
        const double f_lo = std::ceil((lo - box_.min[a]) / cell[a] - 0.5) - 1.0;
        const double f_hi = std::floor((hi - box_.min[a]) / cell[a] - 0.5) + 1.0;
        const int i_lo = static_cast<int>(std::clamp(f_lo, 0.0, static_cast<double>(res)));
        const int i_hi = static_cast<int>(std::clamp(f_hi, -1.0, static_cast<double>(res - 1)));
        return std::pair<int, int>{i_lo, i_hi};
    };

    // Every (y, z) row is clipped against all six planes; rows the frustum
    // misses come out empty. This costs 6 plane evaluations per row, well below
    // the per-node work inside the frustum.
    const int iy0 = 0, iy1 = res - 1, iz0 = 0, iz1 = res - 1;

    double scale = 1.0;
    for (int a = 0; a < 3; ++a) scale = std::max({scale, std::abs(box_.min[a]), std::abs(box_.max[a])});
    const double tol = 1e-9 * scale;

    const std::span<const double> ys = axes_[1];
    const std::span<const double> zs = axes_[2];
    for (int iz = iz0; iz <= iz1; ++iz) {
        const double z = zs[static_cast<std::size_t>(iz)];
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double y = ys[static_cast<std::size_t>(iy)];
            double x_lo = -std::numeric_limits<double>::infinity();
            double x_hi = std::numeric_limits<double>::infinity();
            bool empty = false;
            for (const Plane& p : frustum.planes) {
                const double a = p.normal.x();
                const double b = (p.normal.y() * y + p.normal.z() * z) + p.offset;
                if (a > 0.0) {
                    x_lo = std::max(x_lo, (-tol - b) / a);
                } else if (a < 0.0) {
                    x_hi = std::min(x_hi, (-tol - b) / a);
                } else if (b < -tol) {
                    empty = true;
                    break;
                }
            }
            if (empty || !(x_lo <= x_hi)) continue;
            const auto [ix0, ix1] = index_range(0, x_lo, x_hi);
            if (ix0 > ix1) continue;
            out.push_back({iy, iz, ix0, ix1 + 1});
        }
    }
}

std::vector<std::size_t> NodeGrid::observed_nodes(const Frustum& frustum) const {
    std::vector<RowSpan> rows;
    frustum_rows(frustum, rows);
    const simd::PlaneSet planes = simd::PlaneSet::from(frustum);
    const simd::KernelTable& kernels = simd::active_kernels();
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(resolution_));
    std::vector<std::size_t> nodes;
    for (const RowSpan& r : rows) {
        const simd::RowGeometry geom{axes_[0].data() + r.ix_begin, static_cast<std::size_t>(r.ix_end - r.ix_begin),
                                     axes_[1][static_cast<std::size_t>(r.iy)], axes_[2][static_cast<std::size_t>(r.iz)]};
        kernels.classify_row(planes, geom, mask.data());
        for (std::size_t j = 0; j < geom.count; ++j) {
            if (mask[j]) nodes.push_back(index(r.ix_begin + static_cast<int>(j), r.iy, r.iz));
        }
    }
    return nodes;
}

std::size_t NodeGrid::apply_camera(const CameraPose& pose, const Intrinsics& intr) {
    const std::vector<std::size_t> nodes = observed_nodes(build_frustum(pose, intr));
    const Vec3& cam = pose.position();
    const std::size_t nb = static_cast<std::size_t>(layout_.n_bins());
    for (std::size_t i : nodes) {
        const Vec3 p = position(i);
        const int bin = bin_of_offset(layout_.thresholds(), cam.x() - p.x(), cam.y() - p.y(), cam.z() - p.z());
        ++counts_[i * nb + static_cast<std::size_t>(bin)];
        ++observers_[i];
        refresh(i);
    }
    ++camera_count_;
    return nodes.size();
}

std::vector<double> frequency_table(std::size_t n_cameras, double gamma) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
    std::vector<double> table(n_cameras + 1, 0.0);
    if (n_cameras == 0) return table;
    const double n = static_cast<double>(n_cameras);
    for (std::size_t k = 0; k <= n_cameras; ++k) {
        table[k] = std::pow(static_cast<double>(k) / n, gamma);
    }
    return table;
}

EnergyBreakdown energy(const NodeGrid& grid, double gamma) {
    const std::vector<double> table = frequency_table(grid.camera_count(), gamma);
    const auto tv = grid.tv_now();
    const auto obs = grid.observers();
    EnergyBreakdown e;
    e.per_node_angular.resize(grid.node_count());
    e.per_node_frequency.resize(grid.node_count());
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        e.per_node_angular[i] = 1.0 - tv[i];
        e.per_node_frequency[i] = table[obs[i]];
        e.angular_term += e.per_node_angular[i];
        e.frequency_term += e.per_node_frequency[i];
    }
    e.total = e.angular_term + e.frequency_term;
    return e;
}

EnergyTotals energy_totals(const NodeGrid& grid, double gamma) {
    const std::vector<double> table = frequency_table(grid.camera_count(), gamma);
    const auto tv = grid.tv_now();
    const auto obs = grid.observers();
    EnergyTotals e;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        e.angular += 1.0 - tv[i];
        e.frequency += table[obs[i]];
    }
    e.total = e.angular + e.frequency;
    return e;
}

DeltaScorer::DeltaScorer(const NodeGrid& grid, double gamma) : grid_(grid) {
    const std::size_t n_after = grid.camera_count() + 1;
    const std::vector<double> table = frequency_table(n_after, gamma);
    gain_.resize(n_after);
    for (std::size_t k = 0; k < n_after; ++k) gain_[k] = table[k + 1] - table[k];
}

double DeltaScorer::operator()(const CameraPose& candidate, const Intrinsics& intr) const {
    thread_local std::vector<RowSpan> rows;
    thread_local std::vector<double> out;

    const Frustum frustum = build_frustum(candidate, intr);
    grid_.frustum_rows(frustum, rows);
    const simd::PlaneSet planes = simd::PlaneSet::from(frustum);
    const simd::KernelTable& kernels = simd::active_kernels();
    const BinLayout& layout = grid_.layout();
    const std::size_t nb = static_cast<std::size_t>(layout.n_bins());
    const simd::ScoreTables tables{&layout.thresholds(), layout.uniform_mass().data(), gain_.data(),
                                   static_cast<std::uint32_t>(nb)};
    out.resize(static_cast<std::size_t>(grid_.resolution()));

    const auto xs = grid_.axis(0);
    const auto ys = grid_.axis(1);
    const auto zs = grid_.axis(2);
    double sum = 0.0;
    for (const RowSpan& r : rows) {
        const std::size_t first = grid_.index(r.ix_begin, r.iy, r.iz);
        const simd::RowGeometry geom{xs.data() + r.ix_begin, static_cast<std::size_t>(r.ix_end - r.ix_begin),
                                     ys[static_cast<std::size_t>(r.iy)], zs[static_cast<std::size_t>(r.iz)]};
        const simd::RowState state{grid_.counts().data() + first * nb, grid_.observers().data() + first,
                                   grid_.tv_now().data() + first, grid_.spread_next().data() + first};
        kernels.score_row(planes, geom, state, tables, candidate.position(), out.data());
        for (std::size_t j = 0; j < geom.count; ++j) sum += out[j];
    }
    return sum;
}

double candidate_delta(const NodeGrid& grid, const CameraPose& candidate, const Intrinsics& intr, double gamma) {
    return DeltaScorer(grid, gamma)(candidate, intr);
}

}  // namespace nbv
