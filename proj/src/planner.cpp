#include "nbv/planner.hpp"

#include <algorithm>
#include <thread>

#include "nbv/error.hpp"

namespace nbv {

void PlannerConfig::validate() const {
    if (candidates < 1) throw Error(ErrorCode::InvalidArgument, "candidates per step must be at least 1");
    if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
    if (node_resolution < 1) throw Error(ErrorCode::InvalidArgument, "node resolution must be at least 1");
    if (!(clearance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "clearance must be nonnegative");
    if (!(tie_epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tie epsilon must be nonnegative");
    Aabb::make(box.min, box.max);
    Aabb::make(free_box.min, free_box.max);
    if (!box.contains(free_box)) throw Error(ErrorCode::InvalidArgument, "free box must lie inside the planning box");
    intrinsics.validate();
    layout();
}

BinLayout PlannerConfig::layout() const { return BinLayout::make(bins_polar, bins_azimuth, equal_area, hemisphere_only); }

Placement check_placement(const OccupancyGrid& grid, const Vec3& position, const Vec3& forward, double d_min) {
    if (!grid.is_free(position)) return Placement::Occupied;
    if (d_min > 0.0 && grid.clearance_along(position, Direction::from_vector(forward), d_min) < d_min) {
        return Placement::TooClose;
    }
    return Placement::Ok;
}

CandidateBatch sample_candidates(std::size_t n, const Aabb& box, const OccupancyGrid& grid, double d_min, Rng& rng) {
    CandidateBatch batch;
    batch.poses.reserve(n);
    batch.stats.batches = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 pos = rng.point_in(box);
        const Vec3 dir = rng.unit_vector();
        ++batch.stats.sampled;
        switch (check_placement(grid, pos, dir, d_min)) {
            case Placement::Occupied: ++batch.stats.rejected_occupied; break;
            case Placement::TooClose: ++batch.stats.rejected_clearance; break;
            case Placement::Ok: batch.poses.push_back(CameraPose::from_forward(pos, dir)); break;
        }
    }
    return batch;
}

std::size_t select_best(std::span<const double> scores, double tie_epsilon) {
    if (scores.empty()) throw Error(ErrorCode::InvalidArgument, "cannot select from an empty score list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best] + tie_epsilon) best = i;
    }
    return best;
}

std::vector<double> score_candidates(const NodeGrid& grid, std::span<const CameraPose> candidates,
                                     const Intrinsics& intr, double gamma, std::size_t workers) {
    const DeltaScorer scorer(grid, gamma);
    std::vector<double> scores(candidates.size());
    const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, candidates.size()));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < candidates.size(); ++i) scores[i] = scorer(candidates[i], intr);
        return scores;
    }
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < candidates.size(); i += n_threads) scores[i] = scorer(candidates[i], intr);
        });
    }
    pool.clear();  // joins
    return scores;
}

namespace {

PlannerConfig validated(PlannerConfig config) {
    config.validate();
    return config;
}

}  // namespace

GreedyPlanner::GreedyPlanner(PlannerConfig config, const OccupancyGrid& occupancy, AcquisitionHook hook)
    : config_(validated(std::move(config))),
      occupancy_(occupancy),
      hook_(std::move(hook)),
      nodes_(config_.box, config_.node_resolution, config_.layout()),
      rng_(config_.seed) {
    if (!occupancy_.region_free(config_.free_box)) {
        throw Error(ErrorCode::FreeBoxNotFree, "free box overlaps occupied voxels or leaves the occupancy grid");
    }
}

const CameraPose& GreedyPlanner::step() {
    if (done()) throw Error(ErrorCode::InvalidArgument, "camera budget already reached");
    const bool bootstrapping = result_.cameras.size() < config_.bootstrap;
    const Aabb& region = bootstrapping ? config_.free_box : config_.box;

    CandidateStats stats;
    CandidateBatch batch;
    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, config_.max_retries); ++attempt) {
        batch = sample_candidates(config_.candidates, region, occupancy_, config_.clearance, rng_);
        stats.sampled += batch.stats.sampled;
        stats.rejected_occupied += batch.stats.rejected_occupied;
        stats.rejected_clearance += batch.stats.rejected_clearance;
        ++stats.batches;
        if (!batch.poses.empty()) break;
    }
    if (batch.poses.empty()) {
        throw Error(ErrorCode::NoValidCandidates,
                    "no candidate survived the occupancy and clearance filters in " + std::to_string(stats.batches) +
                        " batches of " + std::to_string(config_.candidates) +
                        (bootstrapping ? " (sampling the free box)" : " (sampling the planning box)"));
    }

    const std::vector<double> scores =
        score_candidates(nodes_, batch.poses, config_.intrinsics, config_.gamma, config_.workers);
    const CameraPose& chosen = batch.poses[select_best(scores, config_.tie_epsilon)];

    nodes_.apply_camera(chosen, config_.intrinsics);
    result_.cameras.push_back(chosen);
    result_.energies.push_back(energy_totals(nodes_, config_.gamma));
    result_.stats.push_back(stats);
    if (hook_) hook_(result_.cameras.back(), result_.cameras.size() - 1);
    return result_.cameras.back();
}

PlanResult plan(const PlannerConfig& config, const OccupancyGrid& occupancy, AcquisitionHook hook) {
    GreedyPlanner planner(config, occupancy, std::move(hook));
    while (!planner.done()) planner.step();
    return planner.result();
}

PoolSelection select_from_pool(std::span<const CameraPose> pool, std::size_t k, const PlannerConfig& config,
                               NodeGrid& grid) {
    if (k > pool.size()) throw Error(ErrorCode::InvalidArgument, "cannot select more cameras than the pool holds");
    std::vector<std::size_t> remaining(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) remaining[i] = i;

    PoolSelection sel;
    std::vector<CameraPose> candidates;
    for (std::size_t step = 0; step < k; ++step) {
        candidates.clear();
        for (std::size_t i : remaining) candidates.push_back(pool[i]);
        const std::vector<double> scores =
            score_candidates(grid, candidates, config.intrinsics, config.gamma, config.workers);
        const std::size_t pick = select_best(scores, config.tie_epsilon);
        const std::size_t pool_index = remaining[pick];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        grid.apply_camera(pool[pool_index], config.intrinsics);
        sel.order.push_back(pool_index);
        sel.energies.push_back(energy_totals(grid, config.gamma));
    }
    return sel;
}

std::vector<CameraPose> baseline_hemisphere(const Vec3& center, double radius, std::size_t n, Rng& rng) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "hemisphere radius must be positive");
    std::vector<CameraPose> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 pos = center + radius * rng.upper_hemisphere();
        out.push_back(CameraPose::look_at(pos, center));
    }
    return out;
}

std::vector<CameraPose> baseline_random(std::size_t n, const Aabb& box, const OccupancyGrid& grid, double d_min,
                                        Rng& rng, std::size_t attempts_per_camera) {
    std::vector<CameraPose> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < attempts_per_camera && !placed; ++attempt) {
            const Vec3 pos = rng.point_in(box);
            const Vec3 dir = rng.unit_vector();
            if (check_placement(grid, pos, dir, d_min) == Placement::Ok) {
                out.push_back(CameraPose::from_forward(pos, dir));
                placed = true;
            }
        }
        if (!placed) {
            throw Error(ErrorCode::NoValidCandidates, "random baseline could not place camera " + std::to_string(i) +
                                                          " within " + std::to_string(attempts_per_camera) +
                                                          " attempts");
        }
    }
    return out;
}

}  // namespace nbv
