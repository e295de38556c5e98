// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nbv/app.hpp"
#include "nbv/evaluation.hpp"
#include "nbv/io.hpp"
#include "nbv/planner.hpp"
#include "nbv/reconstructability.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace nbv;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

const fs::path kData = NBV_DATA_DIR;
const fs::path kTests = NBV_TEST_DIR;
const std::vector<std::string> kRoomScenes = {"living_room", "office", "kitchen"};

Quat random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Quat q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return q;
}

double uni(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// A camera near the unit box looking at a random point inside it.
CameraPose camera_near_unit_box(std::mt19937_64& rng) {
    while (true) {
        const Vec3 eye(uni(rng, -0.5, 1.5), uni(rng, -0.5, 1.5), uni(rng, -0.5, 1.5));
        const Vec3 target(uni(rng, 0, 1), uni(rng, 0, 1), uni(rng, 0, 1));
        if ((target - eye).norm() > 1e-3) return CameraPose::from_forward(eye, target - eye);
    }
}

PlannerConfig room_config(const io::SceneFile& scene, std::uint64_t seed) {
    PlannerConfig cfg;
    cfg.budget = 50;
    cfg.candidates = 200;
    cfg.box = scene.occupancy.box();
    cfg.free_box = *scene.free_box;
    cfg.clearance = 0.05 * cfg.box.diagonal();
    cfg.intrinsics.far = cfg.box.diagonal();
    cfg.seed = seed;
    return cfg;
}

EvaluationSetup setup_of(const PlannerConfig& cfg) {
    return {cfg.box, cfg.node_resolution, cfg.layout(), cfg.gamma, cfg.intrinsics};
}

Outcome metric_closed_forms() {
    const BinLayout ea = BinLayout::make(4, 8, true);
    SphericalHistogram one(32);
    one.increment(5);
    SphericalHistogram each(32);
    for (int b = 0; b < 32; ++b) each.increment(b);
    const SphericalHistogram empty(32);
    const double tv1 = tv_distance(one, ea);
    const double tv_uniform = tv_distance(each, ea);
    const double tv_empty = tv_distance(empty, ea);

    const std::vector<std::uint32_t> none(32, 0);
    const double of_all = observation_frequency({none, 10}, 10);
    const double of_none = observation_frequency({none, 0}, 10);
    const double of_three = observation_frequency({none, 3}, 10);

    const bool ok = tv1 == 31.0 / 32.0 && tv_uniform == 0.0 && tv_empty == 1.0 && of_all == 1.0 && of_none == 0.0 &&
                    std::abs(of_three - 0.3) <= 1e-12;
    return {ok, format("tv = %.17g, %.17g, %.17g; O_f = %.17g, %.17g, %.17g", tv1, tv_uniform, tv_empty, of_all,
                       of_none, of_three)};
}

Outcome incremental_equivalence() {
    std::mt19937_64 rng(2024);
    int agree = 0;
    const int instances = 100;
    for (int inst = 0; inst < instances; ++inst) {
        oracle::Setup s;
        s.box = Aabb::make({0, 0, 0}, {1, 1, 1});
        s.resolution = 4;
        s.layout.equal_area = inst % 2 == 1;
        s.gamma = inst % 3 == 0 ? 0.5 : uni(rng, 0.2, 2.0);
        const double fov = uni(rng, 0.6, 1.9);
        s.intr = Intrinsics::make(fov, uni(rng, 0.6, 1.9), 0.05, uni(rng, 1.0, 3.0));

        std::vector<CameraPose> existing(std::uniform_int_distribution<int>(0, 10)(rng));
        for (auto& c : existing) c = camera_near_unit_box(rng);
        std::vector<CameraPose> cands(std::uniform_int_distribution<int>(1, 20)(rng));
        for (auto& c : cands) c = camera_near_unit_box(rng);
        if (inst % 10 == 0 && cands.size() > 1) cands[1] = cands[0];  // exact tie

        NodeGrid grid(s.box, s.resolution, BinLayout::make(4, 8, s.layout.equal_area));
        for (const auto& c : existing) grid.apply_camera(c, s.intr);
        std::vector<double> deltas;
        for (const auto& c : cands) deltas.push_back(candidate_delta(grid, c, s.intr, s.gamma));

        std::vector<double> full;
        for (const auto& c : cands) {
            std::vector<CameraPose> with = existing;
            with.push_back(c);
            full.push_back(oracle::energy(s, with));
        }
        if (select_best(deltas, 1e-9) == oracle::argmax(full, 1e-9)) ++agree;
    }
    return {agree == instances, format("%d/%d instances agree", agree, instances)};
}

Outcome frustum_oracle() {
    std::mt19937_64 rng(99);
    int tested = 0, agree = 0, inside = 0;
    while (tested < 10000) {
        const CameraPose pose(Vec3(uni(rng, -5, 5), uni(rng, -5, 5), uni(rng, -5, 5)), random_rotation(rng));
        const double near = uni(rng, 0.01, 1.0);
        const Intrinsics intr =
            Intrinsics::make(uni(rng, 0.2, 2.9), uni(rng, 0.2, 2.9), near, near + uni(rng, 0.5, 20.0));
        const double depth = uni(rng, 0.0, intr.far * 1.2);
        const Vec3 local(uni(rng, -1.5, 1.5) * std::tan(intr.fov_x / 2) * depth,
                         uni(rng, -1.5, 1.5) * std::tan(intr.fov_y / 2) * depth, -depth);
        const Vec3 p = pose.position() + pose.rotation() * local;
        const oracle::FrustumVerdict v = oracle::frustum(pose, intr, p);
        if (v.slack < 1e-6) continue;
        ++tested;
        inside += v.inside ? 1 : 0;
        agree += observes(build_frustum(pose, intr), p) == v.inside ? 1 : 0;
    }
    return {agree == tested, format("%d/%d pairs agree (%d inside)", agree, tested, inside)};
}

Outcome object_centric_reduction() {
    // One node at the origin; the 8 equal-area bins of the upper hemisphere
    // (2 rows x 4 columns) are all reachable from a hemisphere around it.
    PlannerConfig cfg;
    cfg.bins_polar = 2;
    cfg.bins_azimuth = 4;
    cfg.equal_area = true;
    cfg.hemisphere_only = true;
    cfg.node_resolution = 1;
    cfg.box = Aabb::make({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
    cfg.free_box = cfg.box;
    cfg.intrinsics = Intrinsics::make(0.8, 0.8, 0.05, 10.0);
    const BinLayout layout = cfg.layout();
    const Vec3 node(0, 0, 0);

    // Two cameras per bin near its centre plus four extra hemisphere cameras.
    std::vector<CameraPose> pool;
    const double c_mid[2] = {1.0 - 0.25, 1.0 - 0.75};  // equal-area row mid cosines
    for (int rep = 0; rep < 2; ++rep)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) {
                const double theta = std::acos(c_mid[r]) + (rep ? 0.05 : -0.05);
                const double phi = (c + 0.5 + (rep ? 0.2 : -0.2)) * oracle::kPi / 2;
                pool.push_back(CameraPose::look_at(2.0 * Direction::from_angles(theta, phi).v, node));
            }
    Rng rng(5);
    for (const CameraPose& c : baseline_hemisphere(node, 2.0, 4, rng)) pool.push_back(c);
    std::mt19937_64 shuffle(17);
    std::shuffle(pool.begin(), pool.end(), shuffle);

    NodeGrid grid(cfg.box, 1, layout);
    const PoolSelection sel = select_from_pool(pool, 8, cfg, grid);
    std::vector<int> bins;
    for (std::size_t i : sel.order) bins.push_back(layout.bin_of_offset(pool[i].position() - node));
    std::vector<int> sorted = bins;
    std::sort(sorted.begin(), sorted.end());
    const bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();

    // Exhaustive: every 8-subset of the pool, scored by the independent oracle.
    oracle::Setup s;
    s.box = cfg.box;
    s.resolution = 1;
    s.layout = {2, 4, true, true};
    s.intr = cfg.intrinsics;
    const std::size_t n = pool.size();
    double best = -1.0;
    std::size_t subsets = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != 8) continue;
        std::vector<CameraPose> cams;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) cams.push_back(pool[i]);
        best = std::max(best, oracle::energy(s, cams));
        ++subsets;
    }
    std::vector<CameraPose> chosen;
    for (std::size_t i : sel.order) chosen.push_back(pool[i]);
    const double greedy = oracle::energy(s, chosen);
    const bool optimal = greedy == best;
    return {distinct && optimal, format("bins distinct: %s; greedy energy %.17g, exhaustive best %.17g over %zu subsets",
                                        distinct ? "yes" : "no", greedy, best, subsets)};
}

Outcome strategy_dominance() {
    bool ok = true;
    std::string detail;
    double min_margin_r = INFINITY, min_margin_h = INFINITY;
    for (const std::string& name : kRoomScenes) {
        const io::SceneFile scene = io::load_scene(kData / "scenes" / (name + ".json"));
        int beats_random = 0, beats_hemi = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const PlannerConfig cfg = room_config(scene, seed);
            const EvaluationSetup setup = setup_of(cfg);
            const PlanResult greedy = plan(cfg, scene.occupancy);
            Rng rr(seed);
            const auto random = baseline_random(cfg.budget, cfg.box, scene.occupancy, cfg.clearance, rr);
            Rng rh(seed);
            const auto hemi = baseline_hemisphere(*scene.hemisphere_center, *scene.hemisphere_radius, cfg.budget, rh);

            const double eg = evaluate_cameras("greedy", greedy.cameras, setup).final_energy.total;
            const double er = evaluate_cameras("random", random, setup).final_energy.total;
            const double eh = evaluate_cameras("hemisphere", hemi, setup).final_energy.total;
            beats_random += eg > er ? 1 : 0;
            beats_hemi += eg > eh ? 1 : 0;
            min_margin_r = std::min(min_margin_r, eg / er);
            min_margin_h = std::min(min_margin_h, eg / eh);
        }
        ok = ok && beats_random >= 19 && beats_hemi == 20;
        detail += format("%s: vs random %d/20, vs hemisphere %d/20; ", name.c_str(), beats_random, beats_hemi);
    }
    return {ok, detail + format("min ratios %.3f, %.3f", min_margin_r, min_margin_h)};
}

Outcome pool_selection() {
    const io::SceneFile scene = io::load_scene(kData / "scenes" / "living_room.json");
    int wins = 0;
    double min_ratio = INFINITY;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PlannerConfig cfg = room_config(scene, seed);
        Rng pool_rng(1000 + seed);
        const auto pool = baseline_random(500, cfg.box, scene.occupancy, cfg.clearance, pool_rng);
        NodeGrid grid(cfg.box, cfg.node_resolution, cfg.layout());
        const PoolSelection sel = select_from_pool(pool, 50, cfg, grid);
        const double greedy = sel.energies.back().total;

        Rng pick(seed);
        std::vector<std::size_t> idx(pool.size());
        double best_random = -INFINITY;
        for (int trial = 0; trial < 50; ++trial) {
            std::iota(idx.begin(), idx.end(), 0);
            std::vector<CameraPose> subset;
            for (std::size_t j = 0; j < 50; ++j) {
                std::swap(idx[j], idx[j + pick.index(idx.size() - j)]);
                subset.push_back(pool[idx[j]]);
            }
            best_random = std::max(best_random, evaluate_cameras("random", subset, setup_of(cfg)).final_energy.total);
        }
        wins += greedy > best_random ? 1 : 0;
        min_ratio = std::min(min_ratio, greedy / best_random);
    }
    return {wins == 10, format("greedy subset beats the best of 50 random subsets in %d/10 seeds (min ratio %.3f)",
                               wins, min_ratio)};
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"nbvplan"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return app::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nbv_acceptance_" + name);
    fs::remove_all(dir);
    return dir;
}

Outcome determinism() {
    const std::string scene = (kData / "scenes" / "office.json").string();
    const std::vector<std::string> base = {"plan", "--scene", scene, "--budget", "30", "--candidates", "300",
                                           "--seed", "11"};
    std::vector<fs::path> dirs;
    for (const char* workers : {"1", "1", "3"}) {
        const fs::path dir = scratch(std::string("det") + std::to_string(dirs.size()));
        auto args = base;
        args.insert(args.end(), {"--out", dir.string(), "--workers", workers});
        if (run_cli(args) != 0) return {false, "plan command failed"};
        dirs.push_back(dir);
    }
    bool same = true;
    for (const char* file : {"plan.json", "transforms.json"}) {
        const std::string ref = io::read_file(dirs[0] / file);
        for (std::size_t i = 1; i < dirs.size(); ++i) same = same && io::read_file(dirs[i] / file) == ref;
    }
    for (const auto& d : dirs) fs::remove_all(d);
    return {same, same ? "plan.json and transforms.json byte-identical across 3 runs (workers 1, 1, 3)"
                       : "outputs differ"};
}

Outcome export_round_trip() {
    // Round trip on a plan over a bundled scene.
    const fs::path dir = scratch("roundtrip");
    const fs::path pool_dir = scratch("roundtrip_pool");
    const std::string scene = (kData / "scenes" / "kitchen.json").string();
    if (run_cli({"plan", "--scene", scene, "--out", dir.string(), "--budget", "25", "--candidates", "100"}) != 0) {
        return {false, "plan command failed"};
    }
    const io::Json plan = io::Json::parse(io::read_file(dir / "plan.json"));
    std::vector<CameraPose> exported;
    for (const auto& p : plan["cameras"]) exported.push_back(io::pose_from_json(p));
    const io::TransformsFile reread = io::load_transforms(dir / "transforms.json");
    double worst = 0;
    bool sizes = reread.cameras.size() == exported.size();
    for (std::size_t i = 0; sizes && i < exported.size(); ++i) {
        worst = std::max(worst, (reread.cameras[i].matrix() - exported[i].matrix()).cwiseAbs().maxCoeff());
    }
    // Re-import as a pool and select all of it: the same poses come back.
    const bool pool_ok = run_cli({"select-pool", "--scene", scene, "--pool", (dir / "transforms.json").string(),
                                  "--k", "25", "--out", pool_dir.string()}) == 0;
    double worst_pool = pool_ok ? 0.0 : INFINITY;
    if (pool_ok) {
        const io::TransformsFile picked = io::load_transforms(pool_dir / "transforms.json");
        for (const CameraPose& c : picked.cameras) {
            double nearest = INFINITY;
            for (const CameraPose& e : exported)
                nearest = std::min(nearest, (c.matrix() - e.matrix()).cwiseAbs().maxCoeff());
            worst_pool = std::max(worst_pool, nearest);
        }
    }

    // Golden file.
    const fs::path golden_dir = scratch("golden");
    const int rc = run_cli({"plan", "--scene", (kTests / "data" / "tiny_room.json").string(), "--out",
                            golden_dir.string(), "--budget", "6", "--candidates", "40", "--seed", "7"});
    const bool golden = rc == 0 && io::read_file(golden_dir / "transforms.json") ==
                                       io::read_file(kTests / "golden" / "tiny_room_transforms.json");
    fs::remove_all(dir);
    fs::remove_all(pool_dir);
    fs::remove_all(golden_dir);
    const bool ok = sizes && worst <= 1e-9 && worst_pool <= 1e-9 && golden;
    return {ok, format("max pose error %.3g (export), %.3g (pool re-import); golden file %s", worst, worst_pool,
                       golden ? "matches" : "differs")};
}

Outcome floorplan_oracle() {
    std::mt19937_64 rng(31);
    oracle::Setup s;
    s.box = Aabb::make({0, 0, 0}, {1, 1, 1});
    s.resolution = 12;
    s.gamma = 0.5;
    s.intr = Intrinsics::make(1.2, 1.0, 0.05, 2.5);
    std::vector<CameraPose> cams(40);
    for (auto& c : cams) c = camera_near_unit_box(rng);
    NodeGrid grid(s.box, s.resolution, BinLayout::make(4, 8, false));
    for (const auto& c : cams) grid.apply_camera(c, s.intr);
    const oracle::NodeScores ref = oracle::scores(s, cams);

    double worst = 0;
    for (Term term : {Term::Angular, Term::Frequency}) {
        const FloorplanMap map = floorplan(grid, term, s.gamma);
        const auto& per_node = term == Term::Angular ? ref.angular : ref.frequency;
        for (int iz = 0; iz < s.resolution; ++iz)
            for (int ix = 0; ix < s.resolution; ++ix) {
                double sum = 0;
                for (int iy = 0; iy < s.resolution; ++iy)
                    sum += per_node[static_cast<std::size_t>(ix + s.resolution * (iy + s.resolution * iz))];
                worst = std::max(worst, std::abs(map.at(ix, iz) - sum / s.resolution));
            }
    }
    return {worst <= 1e-12, format("max deviation %.3g over both terms", worst)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "metric closed forms", 1.0, metric_closed_forms},
        {2, "incremental scoring equivalence", 10.0, incremental_equivalence},
        {3, "frustum oracle", 5.0, frustum_oracle},
        {4, "single-point object-centric reduction", 1.0, object_centric_reduction},
        {5, "strategy dominance on bundled rooms", 300.0, strategy_dominance},
        {6, "pool selection vs random subsets", 120.0, pool_selection},
        {7, "determinism across runs and workers", 60.0, determinism},
        {8, "export round trip and golden file", 60.0, export_round_trip},
        {9, "floorplan oracle", 10.0, floorplan_oracle},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s  criterion %d: %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
