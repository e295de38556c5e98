#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nbv/angular.hpp"
#include "nbv/geometry.hpp"
#include "nbv/occupancy.hpp"
#include "nbv/random.hpp"
#include "nbv/reconstructability.hpp"

namespace nbv {

struct PlannerConfig {
    std::size_t budget = 100;      // cameras to place
    std::size_t candidates = 1000;  // candidates sampled per step
    std::size_t bootstrap = 20;     // first cameras sampled from the free box
    double gamma = 0.5;
    int bins_polar = 4;
    int bins_azimuth = 8;
    bool equal_area = false;
    bool hemisphere_only = false;
    int node_resolution = 32;
    Aabb box;                 // region to reconstruct; cameras stay inside it
    Aabb free_box;            // known-empty region for the bootstrap cameras
    double clearance = 0.0;   // minimum free distance along the view ray
    Intrinsics intrinsics;
    std::uint64_t seed = 1;
    std::size_t max_retries = 16;  // empty candidate batches before giving up
    double tie_epsilon = 1e-9;     // scores within this are ties, lowest index wins
    std::size_t workers = 1;       // scoring threads; never changes the result

    void validate() const;
    BinLayout layout() const;
};

struct CandidateStats {
    std::size_t sampled = 0;
    std::size_t rejected_occupied = 0;
    std::size_t rejected_clearance = 0;
    std::size_t batches = 0;

    friend bool operator==(const CandidateStats&, const CandidateStats&) = default;
};

struct PlanResult {
    std::vector<CameraPose> cameras;
    std::vector<EnergyTotals> energies;  // after each selection
    std::vector<CandidateStats> stats;
};

enum class Placement { Ok, Occupied, TooClose };

/// Centre must be free and the central view ray must stay clear for d_min.
Placement check_placement(const OccupancyGrid& grid, const Vec3& position, const Vec3& forward, double d_min);

struct CandidateBatch {
    std::vector<CameraPose> poses;
    CandidateStats stats;
};

/// Draws n poses uniform in `box` with uniform view directions and discards
/// (does not replace) those failing check_placement. Every draw consumes the
/// same number of random numbers whether or not it is kept.
CandidateBatch sample_candidates(std::size_t n, const Aabb& box, const OccupancyGrid& grid, double d_min, Rng& rng);

/// Index of the maximum score; a later score must exceed the running best by
/// more than `tie_epsilon` to replace it, so near-ties go to the lowest index.
std::size_t select_best(std::span<const double> scores, double tie_epsilon);

/// Scores every candidate with DeltaScorer, fanning out over `workers`
/// threads. Output order matches `candidates`.
std::vector<double> score_candidates(const NodeGrid& grid, std::span<const CameraPose> candidates,
                                     const Intrinsics& intr, double gamma, std::size_t workers);

/// Called after each selected camera, where a live system would capture an
/// image and train its radiance field.
using AcquisitionHook = std::function<void(const CameraPose& pose, std::size_t index)>;

/// Greedy next-best-view planner. Deterministic given the config seed.
class GreedyPlanner {
public:
    GreedyPlanner(PlannerConfig config, const OccupancyGrid& occupancy, AcquisitionHook hook = {});

    /// Selects, applies and records one camera. Throws NoValidCandidates when
    /// max_retries consecutive batches come back empty.
    const CameraPose& step();

    bool done() const { return result_.cameras.size() >= config_.budget; }
    const PlanResult& result() const { return result_; }
    const NodeGrid& nodes() const { return nodes_; }
    const PlannerConfig& config() const { return config_; }

private:
    PlannerConfig config_;
    const OccupancyGrid& occupancy_;
    AcquisitionHook hook_;
    NodeGrid nodes_;
    Rng rng_;
    PlanResult result_;
};

/// Runs the greedy planner to the budget. Throws FreeBoxNotFree if the free
/// box touches occupied voxels.
PlanResult plan(const PlannerConfig& config, const OccupancyGrid& occupancy, AcquisitionHook hook = {});

struct PoolSelection {
    std::vector<std::size_t> order;      // pool indices in selection order
    std::vector<EnergyTotals> energies;  // after each selection
};

/// Greedy subset selection from a fixed pool, applied to `grid`. No occupancy
/// filtering. Uses config.gamma, intrinsics, tie_epsilon and workers.
PoolSelection select_from_pool(std::span<const CameraPose> pool, std::size_t k, const PlannerConfig& config,
                               NodeGrid& grid);

/// n cameras uniform by area on the upper hemisphere of `radius` around
/// `center`, each looking at the centre.
std::vector<CameraPose> baseline_hemisphere(const Vec3& center, double radius, std::size_t n, Rng& rng);

/// n cameras with uniform position in `box` and uniform direction, subject
/// to check_placement; throws NoValidCandidates if a camera cannot be placed
/// within `attempts_per_camera` draws.
std::vector<CameraPose> baseline_random(std::size_t n, const Aabb& box, const OccupancyGrid& grid, double d_min,
                                        Rng& rng, std::size_t attempts_per_camera = 10000);

}  // namespace nbv
