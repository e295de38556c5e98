#include "nbv/evaluation.hpp"

#include <algorithm>
#include <chrono>

namespace nbv {

const char* to_string(Term term) { return term == Term::Angular ? "angular" : "frequency"; }

double FloorplanMap::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

FloorplanMap floorplan(const NodeGrid& grid, Term term, double gamma) {
    const int res = grid.resolution();
    const std::vector<double> table = frequency_table(grid.camera_count(), gamma);
    const auto tv = grid.tv_now();
    const auto obs = grid.observers();

    FloorplanMap map;
    map.term = term;
    map.nx = res;
    map.nz = res;
    map.values.assign(static_cast<std::size_t>(res) * res, 0.0);
    for (int iz = 0; iz < res; ++iz) {
        for (int ix = 0; ix < res; ++ix) {
            double sum = 0.0;
            for (int iy = 0; iy < res; ++iy) {
                const std::size_t i = grid.index(ix, iy, iz);
                sum += term == Term::Angular ? 1.0 - tv[i] : table[obs[i]];
            }
            map.values[static_cast<std::size_t>(ix + res * iz)] = sum / res;
        }
    }
    return map;
}

std::vector<CurvePoint> coverage_curve(const PlanResult& result) {
    std::vector<CurvePoint> curve;
    curve.reserve(result.energies.size());
    for (std::size_t i = 0; i < result.energies.size(); ++i) curve.push_back({i + 1, result.energies[i].total});
    return curve;
}

StrategyReport evaluate_cameras(const std::string& name, std::span<const CameraPose> cameras,
                                const EvaluationSetup& setup) {
    using clock = std::chrono::steady_clock;
    StrategyReport report;
    report.name = name;
    report.cameras = cameras.size();
    NodeGrid grid(setup.box, setup.resolution, setup.layout);
    report.final_energy = energy_totals(grid, setup.gamma);
    const auto start = clock::now();
    for (const CameraPose& pose : cameras) {
        grid.apply_camera(pose, setup.intrinsics);
        report.curve.push_back(energy_totals(grid, setup.gamma));
    }
    if (!cameras.empty()) {
        report.final_energy = report.curve.back();
        report.seconds_per_camera =
            std::chrono::duration<double>(clock::now() - start).count() / static_cast<double>(cameras.size());
    }
    return report;
}

ComparisonReport compare(std::span<const Strategy> strategies, const EvaluationSetup& setup) {
    using clock = std::chrono::steady_clock;
    ComparisonReport report;
    report.setup = setup;
    for (const Strategy& s : strategies) {
        const auto start = clock::now();
        const std::vector<CameraPose> cameras = s.produce();
        const double produce_seconds = std::chrono::duration<double>(clock::now() - start).count();
        StrategyReport row = evaluate_cameras(s.name, cameras, setup);
        row.produce_seconds = produce_seconds;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace nbv
