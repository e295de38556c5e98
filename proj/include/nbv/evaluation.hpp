#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nbv/planner.hpp"
#include "nbv/reconstructability.hpp"

namespace nbv {

enum class Term { Angular, Frequency };

const char* to_string(Term term);

/// Per-(x, z) column mean over y of one energy term.
struct FloorplanMap {
    Term term = Term::Angular;
    char reduced_axis = 'y';
    int nx = 0;
    int nz = 0;
    std::vector<double> values;  // values[ix + nx * iz]

    double at(int ix, int iz) const { return values[static_cast<std::size_t>(ix + nx * iz)]; }
    double max_value() const;
};

/// Angular term is 1 - TV, frequency term is O_f^gamma.
FloorplanMap floorplan(const NodeGrid& grid, Term term, double gamma);

struct CurvePoint {
    std::size_t cameras;
    double total;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Energy after each camera of a plan.
std::vector<CurvePoint> coverage_curve(const PlanResult& result);

/// Everything that has to be shared for two camera sets to be comparable.
struct EvaluationSetup {
    Aabb box;
    int resolution = 32;
    BinLayout layout = BinLayout::make(4, 8, false);
    double gamma = 0.5;
    Intrinsics intrinsics;
};

struct StrategyReport {
    std::string name;
    std::size_t cameras = 0;
    EnergyTotals final_energy;
    std::vector<EnergyTotals> curve;
    double produce_seconds = 0.0;
    double seconds_per_camera = 0.0;  // wall clock, not reproducible
};

struct ComparisonReport {
    EvaluationSetup setup;
    std::vector<StrategyReport> rows;
};

/// A named producer of a camera list.
struct Strategy {
    std::string name;
    std::function<std::vector<CameraPose>()> produce;
};

/// Applies `cameras` one by one to a fresh node grid and records the energy
/// after each.
StrategyReport evaluate_cameras(const std::string& name, std::span<const CameraPose> cameras,
                                const EvaluationSetup& setup);

/// Runs every strategy and evaluates it on its own fresh grid.
ComparisonReport compare(std::span<const Strategy> strategies, const EvaluationSetup& setup);

}  // namespace nbv
