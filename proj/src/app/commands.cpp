#include "nbv/app.hpp"

#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nbv/error.hpp"
#include "nbv/evaluation.hpp"
#include "nbv/io.hpp"
#include "nbv/planner.hpp"

namespace nbv::app {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr double kClearanceFraction = 0.05;  // of the scene diagonal

double degrees(double deg) { return deg * std::numbers::pi / 180.0; }

Vec3 vec3_of(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

Aabb box_of(const std::vector<double>& v) { return Aabb::make({v[0], v[1], v[2]}, {v[3], v[4], v[5]}); }

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

// Planner parameters shared by every subcommand that builds a node grid.
// Precedence: built-in defaults, then scene-derived defaults for keys still
// unset, then the config file, then flags.
class ConfigFlags {
public:
    explicit ConfigFlags(CLI::App* cmd) {
        cmd->add_option("--config", config_path_, "flat JSON file of planner parameters")->check(CLI::ExistingFile);
        bind(cmd->add_option("--budget", budget_, "number of cameras"), {"budget"},
             [this](PlannerConfig& c) { c.budget = budget_; });
        bind(cmd->add_option("--candidates", candidates_, "candidates sampled per step"), {"candidates"},
             [this](PlannerConfig& c) { c.candidates = candidates_; });
        bind(cmd->add_option("--bootstrap", bootstrap_, "leading cameras sampled from the free box"), {"bootstrap"},
             [this](PlannerConfig& c) { c.bootstrap = bootstrap_; });
        bind(cmd->add_option("--gamma", gamma_, "exponent of the observation frequency term"), {"gamma"},
             [this](PlannerConfig& c) { c.gamma = gamma_; });
        bind(cmd->add_option("--bins-polar", bins_polar_, "histogram rows"), {"bins_polar"},
             [this](PlannerConfig& c) { c.bins_polar = bins_polar_; });
        bind(cmd->add_option("--bins-azimuth", bins_azimuth_, "histogram columns"), {"bins_azimuth"},
             [this](PlannerConfig& c) { c.bins_azimuth = bins_azimuth_; });
        bind(cmd->add_flag("--equal-area", equal_area_, "equal-area histogram rows"), {"equal_area"},
             [this](PlannerConfig& c) { c.equal_area = equal_area_; });
        bind(cmd->add_flag("--hemisphere-only", hemisphere_only_, "bin over the upper hemisphere only"),
             {"hemisphere_only"}, [this](PlannerConfig& c) { c.hemisphere_only = hemisphere_only_; });
        bind(cmd->add_option("--clearance", clearance_, "minimum free distance along the view ray"), {"clearance"},
             [this](PlannerConfig& c) { c.clearance = clearance_; });
        bind(cmd->add_option("--seed", seed_, "random seed"), {"seed"}, [this](PlannerConfig& c) { c.seed = seed_; });
        bind(cmd->add_option("--box", box_, "planning box: xmin ymin zmin xmax ymax zmax")->expected(6), {"box"},
             [this](PlannerConfig& c) { c.box = box_of(box_); });
        bind(cmd->add_option("--free-box", free_box_, "bootstrap box: xmin ymin zmin xmax ymax zmax")->expected(6),
             {"free_box"}, [this](PlannerConfig& c) { c.free_box = box_of(free_box_); });
        bind(cmd->add_option("--fov", fov_, "field of view in degrees: both axes, or x then y")->expected(1, 2),
             {"fov_x", "fov_y"}, [this](PlannerConfig& c) {
                 c.intrinsics.fov_x = degrees(fov_.front());
                 c.intrinsics.fov_y = degrees(fov_.back());
             });
        cmd->add_option("--workers", workers_, "scoring threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
    }

    std::set<std::string> load(PlannerConfig& cfg) const {
        std::set<std::string> keys;
        if (!config_path_.empty()) {
            Json doc;
            try {
                doc = Json::parse(io::read_file(config_path_));
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::Parse, config_path_ + ": " + e.what());
            }
            io::apply_config_json(doc, cfg);
            for (const auto& item : doc.items()) keys.insert(item.key());
        }
        for (const Binding& b : bindings_) {
            if (b.opt->count() == 0) continue;
            b.apply(cfg);
            keys.insert(b.keys.begin(), b.keys.end());
        }
        cfg.workers = workers_;
        return keys;
    }

    /// Fully resolved config. `scene` may be null when the box is given
    /// explicitly; `need_free_box` demands a bootstrap box from somewhere.
    PlannerConfig resolve(const io::SceneFile* scene, bool need_free_box) const {
        PlannerConfig cfg;
        const std::set<std::string> keys = load(cfg);
        const auto given = [&](const char* k) { return keys.count(k) != 0; };
        if (!given("box")) {
            if (!scene) throw Error(ErrorCode::InvalidArgument, "no planning box: pass --box or --scene");
            cfg.box = scene->occupancy.box();
        }
        if (!given("free_box")) {
            if (scene && scene->free_box) {
                cfg.free_box = *scene->free_box;
            } else if (need_free_box) {
                throw Error(ErrorCode::InvalidArgument, "no free box: pass --free-box or add free_box to the scene");
            } else {
                cfg.free_box = cfg.box;
            }
        }
        if (!given("clearance") && scene) cfg.clearance = kClearanceFraction * scene->occupancy.box().diagonal();
        if (!given("far")) cfg.intrinsics.far = cfg.box.diagonal();
        cfg.validate();
        return cfg;
    }

private:
    struct Binding {
        CLI::Option* opt;
        std::vector<std::string> keys;
        std::function<void(PlannerConfig&)> apply;
    };

    void bind(CLI::Option* opt, std::vector<std::string> keys, std::function<void(PlannerConfig&)> apply) {
        bindings_.push_back({opt, std::move(keys), std::move(apply)});
    }

    std::string config_path_;
    std::size_t budget_ = 0;
    std::size_t candidates_ = 0;
    std::size_t bootstrap_ = 0;
    double gamma_ = 0.0;
    int bins_polar_ = 0;
    int bins_azimuth_ = 0;
    bool equal_area_ = false;
    bool hemisphere_only_ = false;
    double clearance_ = 0.0;
    std::uint64_t seed_ = 0;
    std::vector<double> box_;
    std::vector<double> free_box_;
    std::vector<double> fov_;
    std::size_t workers_ = 1;
    std::vector<Binding> bindings_;
};

struct PlanArtifacts {
    std::string strategy;
    PlanResult result;
    Json extra = Json::object();  // strategy parameters echoed into plan.json
};

NodeGrid replay(const PlannerConfig& cfg, const PlanResult& result) {
    NodeGrid grid(cfg.box, cfg.node_resolution, cfg.layout());
    for (const CameraPose& pose : result.cameras) grid.apply_camera(pose, cfg.intrinsics);
    return grid;
}

PlanResult evaluated(const PlannerConfig& cfg, std::vector<CameraPose> cameras) {
    PlanResult result;
    NodeGrid grid(cfg.box, cfg.node_resolution, cfg.layout());
    for (const CameraPose& pose : cameras) {
        grid.apply_camera(pose, cfg.intrinsics);
        result.energies.push_back(energy_totals(grid, cfg.gamma));
    }
    result.cameras = std::move(cameras);
    return result;
}

Json transforms_with_echo(std::span<const CameraPose> cameras, const PlannerConfig& cfg, const std::string& digest,
                          const Json& config) {
    Json doc = io::transforms_document(cameras, cfg.intrinsics);
    doc["scene_digest"] = digest;
    doc["config"] = config;
    return doc;
}

void write_plan_outputs(const fs::path& out, const PlanArtifacts& a, const NodeGrid& grid, const PlannerConfig& cfg,
                        const std::string& digest) {
    const Json config = io::config_to_json(cfg);

    Json plan;
    plan["strategy"] = a.strategy;
    plan["scene_digest"] = digest;
    plan["config"] = config;
    for (const auto& [key, value] : a.extra.items()) plan[key] = value;
    Json cameras = Json::array();
    for (const CameraPose& pose : a.result.cameras) cameras.push_back(io::pose_to_json(pose));
    plan["cameras"] = std::move(cameras);
    Json energies = Json::array();
    for (const EnergyTotals& e : a.result.energies) energies.push_back(io::energy_to_json(e));
    plan["energies"] = std::move(energies);
    Json stats = Json::array();
    for (const CandidateStats& s : a.result.stats) {
        stats.push_back({{"sampled", s.sampled},
                         {"rejected_occupied", s.rejected_occupied},
                         {"rejected_clearance", s.rejected_clearance},
                         {"batches", s.batches}});
    }
    plan["candidate_stats"] = std::move(stats);

    io::write_file(out / "plan.json", dump(plan));
    io::write_file(out / "coverage.csv", io::coverage_csv(a.result, digest, config));
    for (Term term : {Term::Angular, Term::Frequency}) {
        const FloorplanMap map = floorplan(grid, term, cfg.gamma);
        const std::string stem = std::string("floorplan_") + to_string(term);
        io::write_file(out / (stem + ".csv"), io::floorplan_csv(map, digest, config));
        io::write_file(out / (stem + ".pgm"), io::floorplan_pgm(map, digest, config));
    }
    io::write_file(out / "transforms.json", dump(transforms_with_echo(a.result.cameras, cfg, digest, config)));
}

void prepare_out(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + out + ": " + ec.message());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void report(std::ostream& out, const std::string& what, const PlanResult& r, const std::string& dir) {
    out << what << ": " << r.cameras.size() << " cameras";
    if (!r.energies.empty()) out << ", final energy " << fmt(r.energies.back().total);
    out << ", written to " << dir << "\n";
}

// Each subcommand keeps its flag storage alive for the lifetime of run().
struct PlanCmd {
    CLI::App* cmd;
    ConfigFlags flags;
    std::string scene, out;

    explicit PlanCmd(CLI::App& app)
        : cmd(app.add_subcommand("plan", "greedy next-best-view plan")), flags(cmd) {
        cmd->add_option("--scene", scene, "scene JSON or density header")->required();
        cmd->add_option("--out", out, "output directory")->required();
    }

    void exec(std::ostream& os) const {
        const io::SceneFile s = io::load_scene(scene);
        const PlannerConfig cfg = flags.resolve(&s, true);
        prepare_out(out);
        GreedyPlanner planner(cfg, s.occupancy);
        while (!planner.done()) planner.step();
        PlanArtifacts a{"greedy", planner.result(), Json::object()};
        write_plan_outputs(out, a, planner.nodes(), cfg, s.digest);
        report(os, "plan", a.result, out);
    }
};

struct BaselineCmd {
    CLI::App* cmd;
    ConfigFlags flags;
    std::string kind, scene, out;
    std::vector<double> center;
    double radius = 0.0;
    CLI::Option* radius_opt = nullptr;

    explicit BaselineCmd(CLI::App& app)
        : cmd(app.add_subcommand("baseline", "hemisphere or random camera placement")), flags(cmd) {
        cmd->add_option("kind", kind, "hemisphere | random")->required()->check(CLI::IsMember({"hemisphere", "random"}));
        cmd->add_option("--scene", scene, "scene JSON or density header")->required();
        cmd->add_option("--out", out, "output directory")->required();
        cmd->add_option("--center", center, "hemisphere centre: x y z")->expected(3);
        radius_opt = cmd->add_option("--radius", radius, "hemisphere radius");
    }

    void exec(std::ostream& os) const {
        const io::SceneFile s = io::load_scene(scene);
        const PlannerConfig cfg = flags.resolve(&s, false);
        PlanArtifacts a;
        a.strategy = kind;
        Rng rng(cfg.seed);
        if (kind == "hemisphere") {
            const std::optional<Vec3> c = center.empty() ? s.hemisphere_center : std::optional<Vec3>(vec3_of(center));
            const std::optional<double> r = radius_opt->count() ? std::optional<double>(radius) : s.hemisphere_radius;
            if (!c || !r) {
                throw Error(ErrorCode::InvalidArgument,
                            "hemisphere baseline needs --center and --radius (or a hemisphere entry in the scene)");
            }
            a.extra["hemisphere"] = {{"center", io::to_json(*c)}, {"radius", *r}};
            prepare_out(out);
            a.result = evaluated(cfg, baseline_hemisphere(*c, *r, cfg.budget, rng));
        } else {
            prepare_out(out);
            a.result = evaluated(cfg, baseline_random(cfg.budget, cfg.box, s.occupancy, cfg.clearance, rng));
        }
        write_plan_outputs(out, a, replay(cfg, a.result), cfg, s.digest);
        report(os, kind, a.result, out);
    }
};

struct SelectPoolCmd {
    CLI::App* cmd;
    ConfigFlags flags;
    std::string scene, out, pool;
    std::size_t k = 0;

    explicit SelectPoolCmd(CLI::App& app)
        : cmd(app.add_subcommand("select-pool", "greedy subset of a fixed camera pool")), flags(cmd) {
        cmd->add_option("--scene", scene, "scene JSON or density header (defines the default box)");
        cmd->add_option("--out", out, "output directory")->required();
        cmd->add_option("--pool", pool, "pool of cameras in transforms.json format")->required();
        cmd->add_option("--k", k, "number of cameras to select")->required();
    }

    void exec(std::ostream& os) const {
        std::optional<io::SceneFile> s;
        if (!scene.empty()) s = io::load_scene(scene);
        const io::TransformsFile p = io::load_transforms(pool);

        PlannerConfig base;
        const std::set<std::string> keys = flags.load(base);
        PlannerConfig cfg = flags.resolve(s ? &*s : nullptr, false);
        if (!keys.count("fov_x")) {
            cfg.intrinsics.fov_x = p.camera_angle_x;
            cfg.intrinsics.fov_y = p.camera_angle_y.value_or(p.camera_angle_x);
        }
        cfg.validate();
        if (k > p.cameras.size()) {
            throw Error(ErrorCode::InvalidArgument, "--k " + std::to_string(k) + " exceeds the pool size " +
                                                        std::to_string(p.cameras.size()));
        }
        prepare_out(out);

        const std::string digest = s ? s->digest : "none";
        NodeGrid grid(cfg.box, cfg.node_resolution, cfg.layout());
        const PoolSelection sel = select_from_pool(p.cameras, k, cfg, grid);
        std::vector<CameraPose> chosen;
        for (std::size_t i : sel.order) chosen.push_back(p.cameras[i]);

        const Json config = io::config_to_json(cfg);
        io::write_file(fs::path(out) / "transforms.json", dump(transforms_with_echo(chosen, cfg, digest, config)));
        std::string csv = io::csv_preamble(digest, config);
        csv += "step,pool_index,total,angular,frequency\n";
        for (std::size_t i = 0; i < sel.order.size(); ++i) {
            const EnergyTotals& e = sel.energies[i];
            csv += std::to_string(i + 1) + "," + std::to_string(sel.order[i]) + "," + fmt(e.total) + "," +
                   fmt(e.angular) + "," + fmt(e.frequency) + "\n";
        }
        io::write_file(fs::path(out) / "selection.csv", csv);

        os << "select-pool: " << chosen.size() << " of " << p.cameras.size() << " cameras";
        if (!sel.energies.empty()) os << ", final energy " << fmt(sel.energies.back().total);
        os << ", written to " << out << "\n";
    }
};

struct EvaluateCmd {
    CLI::App* cmd;
    std::string scene, out;
    std::vector<std::string> runs;

    explicit EvaluateCmd(CLI::App& app) : cmd(app.add_subcommand("evaluate", "compare plan outputs on one scene")) {
        cmd->add_option("runs", runs, "plan.json files or the directories holding them")->required()->expected(2, -1);
        cmd->add_option("--scene", scene, "scene the runs were planned on")->required();
        cmd->add_option("--out", out, "output directory")->required();
    }

    struct Run {
        std::string source;
        std::string strategy;
        PlannerConfig cfg;
        Json config;
        std::vector<CameraPose> cameras;
    };

    static Run load_run(const std::string& source, const std::string& digest) {
        fs::path path = source;
        if (fs::is_directory(path)) path /= "plan.json";
        if (!fs::exists(path)) throw Error(ErrorCode::Io, "missing plan output " + path.string());
        Json doc;
        try {
            doc = Json::parse(io::read_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
        }
        Run run;
        run.source = source;
        try {
            const std::string run_digest = doc.at("scene_digest").get<std::string>();
            if (run_digest != digest) {
                throw Error(ErrorCode::InvalidArgument, path.string() + ": scene digest " + run_digest +
                                                            " does not match the scene (" + digest + ")");
            }
            run.strategy = doc.at("strategy").get<std::string>();
            run.config = doc.at("config");
            io::apply_config_json(run.config, run.cfg);
            for (const Json& pose : doc.at("cameras")) run.cameras.push_back(io::pose_from_json(pose));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
        }
        return run;
    }

    static bool same_setup(const PlannerConfig& a, const PlannerConfig& b) {
        return a.box == b.box && a.node_resolution == b.node_resolution && a.layout() == b.layout() &&
               a.gamma == b.gamma && a.intrinsics == b.intrinsics;
    }

    void exec(std::ostream& os) const {
        const io::SceneFile s = io::load_scene(scene);
        std::vector<Run> loaded;
        for (const std::string& r : runs) loaded.push_back(load_run(r, s.digest));
        const PlannerConfig& ref = loaded.front().cfg;
        for (const Run& r : loaded) {
            if (!same_setup(ref, r.cfg)) {
                throw Error(ErrorCode::InvalidArgument,
                            r.source + ": box, node grid, histogram layout, gamma or intrinsics differ from " +
                                loaded.front().source);
            }
        }
        prepare_out(out);

        const EvaluationSetup setup{ref.box, ref.node_resolution, ref.layout(), ref.gamma, ref.intrinsics};
        const Json& config = loaded.front().config;
        std::string table = io::csv_preamble(s.digest, config);
        table += "run,strategy,cameras,total,angular,frequency\n";
        std::string curves = io::csv_preamble(s.digest, config);
        curves += "run,strategy,cameras,total,angular,frequency\n";
        for (const Run& r : loaded) {
            const StrategyReport rep = evaluate_cameras(r.strategy, r.cameras, setup);
            const EnergyTotals& e = rep.final_energy;
            table += r.source + "," + r.strategy + "," + std::to_string(rep.cameras) + "," + fmt(e.total) + "," +
                     fmt(e.angular) + "," + fmt(e.frequency) + "\n";
            for (std::size_t i = 0; i < rep.curve.size(); ++i) {
                const EnergyTotals& c = rep.curve[i];
                curves += r.source + "," + r.strategy + "," + std::to_string(i + 1) + "," + fmt(c.total) + "," +
                          fmt(c.angular) + "," + fmt(c.frequency) + "\n";
            }
            os << r.source << " (" << r.strategy << "): " << rep.cameras << " cameras, energy " << fmt(e.total)
               << ", " << rep.seconds_per_camera * 1e3 << " ms per camera\n";
        }
        io::write_file(fs::path(out) / "comparison.csv", table);
        io::write_file(fs::path(out) / "comparison_curves.csv", curves);
    }
};

int exit_code_for(ErrorCode code) {
    return code == ErrorCode::NoValidCandidates || code == ErrorCode::FreeBoxNotFree ? kInfeasible : kUsage;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Next-best-view camera placement for radiance-field capture", "nbvplan"};
    app.require_subcommand(1);
    PlanCmd plan_cmd(app);
    BaselineCmd baseline_cmd(app);
    SelectPoolCmd select_cmd(app);
    EvaluateCmd evaluate_cmd(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
        err << "nbvplan: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*plan_cmd.cmd) plan_cmd.exec(out);
        else if (*baseline_cmd.cmd) baseline_cmd.exec(out);
        else if (*select_cmd.cmd) select_cmd.exec(out);
        else if (*evaluate_cmd.cmd) evaluate_cmd.exec(out);
    } catch (const Error& e) {
        err << "nbvplan: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    return kOk;
}

}  // namespace nbv::app
