#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nbv/angular.hpp"
#include "nbv/geometry.hpp"

namespace nbv {

/// Statistics of one node: its direction histogram and how many cameras
/// contain it. observer_count always equals the histogram total.
struct ObservationState {
    std::span<const std::uint32_t> counts;
    std::uint32_t observer_count = 0;

    SphericalHistogram histogram() const { return SphericalHistogram({counts.begin(), counts.end()}); }
};

/// Fraction of the `n_cameras` cameras that observe the node. Throws
/// NoCameras when n_cameras is zero.
double observation_frequency(const ObservationState& state, std::size_t n_cameras);

struct EnergyTotals {
    double total = 0.0;
    double angular = 0.0;    // sum of (1 - TV)
    double frequency = 0.0;  // sum of O_f^gamma

    friend bool operator==(const EnergyTotals&, const EnergyTotals&) = default;
};

struct EnergyBreakdown {
    double total = 0.0;
    double angular_term = 0.0;
    double frequency_term = 0.0;
    std::vector<double> per_node_angular;
    std::vector<double> per_node_frequency;

    EnergyTotals totals() const { return {total, angular_term, frequency_term}; }
};

/// A contiguous run of nodes along x.
struct RowSpan {
    int iy = 0;
    int iz = 0;
    int ix_begin = 0;
    int ix_end = 0;  // exclusive
};

/// Regular lattice of evaluation nodes at the cell centres of a
/// resolution^3 partition of `box`, each carrying an ObservationState.
/// Node index = ix + res * (iy + res * iz).
class NodeGrid {
public:
    NodeGrid(const Aabb& box, int resolution, BinLayout layout);

    const Aabb& box() const { return box_; }
    int resolution() const { return resolution_; }
    std::size_t node_count() const { return observers_.size(); }
    const BinLayout& layout() const { return layout_; }
    std::size_t camera_count() const { return camera_count_; }

    std::size_t index(int ix, int iy, int iz) const {
        return static_cast<std::size_t>(ix) +
               static_cast<std::size_t>(resolution_) * (static_cast<std::size_t>(iy) + static_cast<std::size_t>(resolution_) * iz);
    }
    Vec3 position(std::size_t i) const;
    std::span<const double> axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }

    ObservationState state(std::size_t i) const;

    /// Adds a camera: every node inside its frustum gets the bin of its
    /// direction towards the camera incremented. Returns the number of nodes
    /// touched. The camera counts towards camera_count() either way.
    std::size_t apply_camera(const CameraPose& pose, const Intrinsics& intr);

    /// Ascending indices of the nodes inside `frustum`.
    std::vector<std::size_t> observed_nodes(const Frustum& frustum) const;

    /// Conservative row runs covering every node inside `frustum`; the exact
    /// plane test still has to be applied per node. Rows are produced in
    /// ascending node-index order.
    void frustum_rows(const Frustum& frustum, std::vector<RowSpan>& out) const;

    // Cached per-node quantities, refreshed whenever a node's histogram changes.
    std::span<const std::uint32_t> counts() const { return counts_; }
    std::span<const std::uint32_t> observers() const { return observers_; }
    std::span<const double> tv_now() const { return tv_now_; }
    std::span<const double> spread_next() const { return spread_next_; }

private:
    void refresh(std::size_t i);

    Aabb box_;
    int resolution_;
    BinLayout layout_;
    std::size_t camera_count_ = 0;
    std::vector<double> axes_[3];
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> observers_;
    std::vector<double> tv_now_;
    std::vector<double> spread_next_;
};

/// Reconstructability sum over all nodes of (1 - TV) + O_f^gamma. With no
/// cameras the frequency term is 0 and every TV is 1.
EnergyBreakdown energy(const NodeGrid& grid, double gamma);
EnergyTotals energy_totals(const NodeGrid& grid, double gamma);

/// Per-node O_f^gamma for a grid seen by `n_cameras` cameras, tabulated by
/// observer count so every caller evaluates the identical expression.
std::vector<double> frequency_table(std::size_t n_cameras, double gamma);

/// Scores candidate cameras against a frozen grid. The score is the energy
/// gain over the nodes inside the candidate frustum, with the "before" state
/// already using the incremented camera count; the omitted terms are the same
/// for every candidate, so ranking by score ranks by full energy.
///
/// operator() is safe to call concurrently; the result does not depend on
/// the calling thread or the SIMD backend.
class DeltaScorer {
public:
    DeltaScorer(const NodeGrid& grid, double gamma);

    double operator()(const CameraPose& candidate, const Intrinsics& intr) const;

private:
    const NodeGrid& grid_;
    std::vector<double> gain_;
};

double candidate_delta(const NodeGrid& grid, const CameraPose& candidate, const Intrinsics& intr, double gamma);

}  // namespace nbv
