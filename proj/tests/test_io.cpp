#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nbv/error.hpp"
#include "nbv/io.hpp"

using namespace nbv;
namespace fs = std::filesystem;

namespace {

/// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("nbv_io_" + tag + "_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an nbv::Error");
    return ErrorCode::InvalidArgument;
}

std::string float_bytes(const std::vector<float>& v) {
    std::string out(v.size() * 4, '\0');
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, &v[i], 4);
        for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    return out;
}

}  // namespace

TEST_CASE("digest") {
    CHECK(io::digest("") == "cbf29ce484222325");
    CHECK(io::digest("a") == "af63dc4c8601ec8c");
    CHECK(io::digest("abc") != io::digest("abd"));
    CHECK(io::digest("abc").size() == 16u);
}

TEST_CASE("primitive scene parsing") {
    const io::Json doc = io::Json::parse(R"({
        "aabb": {"min": [0, 0, 0], "max": [2, 1, 2]},
        "resolution": [8, 4, 8],
        "primitives": [
            {"type": "box", "min": [0, 0, 0], "max": [2, 0.25, 2]},
            {"type": "sphere", "center": [1, 0.5, 1], "radius": 0.3}
        ]})");
    const PrimitiveScene s = io::parse_primitive_scene(doc);
    CHECK(s.resolution == std::array<int, 3>{8, 4, 8});
    CHECK(s.primitives.size() == 2u);
    CHECK(std::holds_alternative<SpherePrimitive>(s.primitives[1]));

    io::Json bad = doc;
    bad["primitives"][0]["type"] = "cone";
    CHECK(code_of([&] { io::parse_primitive_scene(bad); }) == ErrorCode::Parse);
    bad = doc;
    bad["primitives"][1].erase("radius");
    CHECK(code_of([&] { io::parse_primitive_scene(bad); }) == ErrorCode::Parse);
    bad = doc;
    bad["aabb"]["min"] = io::Json::array({0, 0});
    CHECK(code_of([&] { io::parse_primitive_scene(bad); }) == ErrorCode::Parse);

    CHECK(io::parse_aabb(io::Json::array({0, 1, 2, 3, 4, 5})) == Aabb::make({0, 1, 2}, {3, 4, 5}));
}

TEST_CASE("load_scene") {
    TempDir dir("scene");
    const fs::path scene = dir.path / "s.json";
    io::write_file(scene, R"({"aabb": [0, 0, 0, 1, 1, 1], "resolution": 4,
        "primitives": [{"type": "box", "min": [0, 0, 0], "max": [1, 0.5, 1]}],
        "free_box": [0.2, 0.6, 0.2, 0.8, 0.9, 0.8],
        "hemisphere": {"center": [0.5, 0.5, 0.5], "radius": 0.4}})");
    const io::SceneFile s = io::load_scene(scene);
    CHECK(s.occupancy.occupied_count() == 32u);
    CHECK(s.free_box == Aabb::make({0.2, 0.6, 0.2}, {0.8, 0.9, 0.8}));
    CHECK(s.hemisphere_radius == 0.4);
    CHECK(s.digest == io::digest(io::read_file(scene)));

    CHECK(code_of([&] { io::load_scene(dir.path / "missing.json"); }) == ErrorCode::Io);
    io::write_file(dir.path / "broken.json", "{\"aabb\": [0, 0");
    CHECK(code_of([&] { io::load_scene(dir.path / "broken.json"); }) == ErrorCode::Parse);
}

TEST_CASE("density scenes") {
    TempDir dir("density");
    std::vector<float> density(2 * 3 * 4, 0.0f);
    density[0] = 2.0f;              // voxel (0, 0, 0)
    density[1 + 2 * (2 + 3 * 3)] = 0.75f;  // voxel (1, 2, 3)
    density[5] = 0.5f;              // exactly at the threshold: free
    io::write_file(dir.path / "d.raw", float_bytes(density));
    const std::string header = R"({"dims": [2, 3, 4], "aabb": [0, 0, 0, 2, 3, 4], "threshold": 0.5})";
    io::write_file(dir.path / "d.json", header);
    const io::SceneFile s = io::load_scene(dir.path / "d.json");
    CHECK(s.occupancy.occupied_count() == 2u);
    CHECK(s.occupancy.occupied(0, 0, 0));
    CHECK(s.occupancy.occupied(1, 2, 3));
    CHECK(s.digest == io::digest(header + float_bytes(density)));

    // Explicit data path, relative to the header.
    io::write_file(dir.path / "other.bin", float_bytes(density));
    io::write_file(dir.path / "e.json", R"({"dims": [2, 3, 4], "aabb": [0, 0, 0, 2, 3, 4], "threshold": 0.5,
                                            "data": "other.bin"})");
    CHECK(io::load_scene(dir.path / "e.json").occupancy.occupied_count() == 2u);

    io::write_file(dir.path / "d.raw", float_bytes(std::vector<float>(5, 0.0f)));
    CHECK(code_of([&] { io::load_scene(dir.path / "d.json"); }) == ErrorCode::Parse);
    fs::remove(dir.path / "d.raw");
    CHECK(code_of([&] { io::load_scene(dir.path / "d.json"); }) == ErrorCode::Io);
}

TEST_CASE("transforms round trip") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<CameraPose> cams;
    for (int i = 0; i < 50; ++i) cams.push_back(CameraPose::look_at({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}));
    const Intrinsics intr = Intrinsics::make(1.1, 0.8, 0.05, 10.0);
    const io::Json doc = io::transforms_document(cams, intr);
    CHECK(doc["frames"].size() == 50u);
    CHECK(doc["frames"][3]["file_path"] == "frame_0003");
    CHECK(doc["frames"][0]["transform_matrix"][3] == io::Json::array({0.0, 0.0, 0.0, 1.0}));

    // Through text, as a downstream tool would see it.
    const io::TransformsFile back = io::parse_transforms(io::Json::parse(doc.dump()));
    CHECK(back.camera_angle_x == intr.fov_x);
    CHECK(back.camera_angle_y == intr.fov_y);
    REQUIRE(back.cameras.size() == cams.size());
    for (std::size_t i = 0; i < cams.size(); ++i) {
        CHECK((back.cameras[i].position() - cams[i].position()).norm() <= 1e-9);
        CHECK((back.cameras[i].rotation() - cams[i].rotation()).cwiseAbs().maxCoeff() <= 1e-9);
    }

    io::Json bad = doc;
    bad["frames"][1]["transform_matrix"].erase(2);
    CHECK(code_of([&] { io::parse_transforms(bad); }) == ErrorCode::Parse);
    bad = doc;
    bad["frames"][1]["transform_matrix"][0] = io::Json::array({5, 0, 0, 0});
    CHECK(code_of([&] { io::parse_transforms(bad); }) == ErrorCode::Parse);
    CHECK(code_of([&] { io::parse_transforms(io::Json::object()); }) == ErrorCode::Parse);
}

TEST_CASE("config json") {
    PlannerConfig c;
    c.box = Aabb::make({0, 0, 0}, {1, 2, 3});
    c.free_box = Aabb::make({0.1, 0.1, 0.1}, {0.2, 0.2, 0.2});
    c.budget = 17;
    c.gamma = 0.25;
    c.equal_area = true;
    c.seed = 123456789012345ULL;
    const io::Json j = io::config_to_json(c);
    CHECK_FALSE(j.contains("workers"));

    PlannerConfig d;
    io::apply_config_json(j, d);
    CHECK(io::config_to_json(d) == j);
    CHECK(d.box == c.box);
    CHECK(d.seed == c.seed);

    CHECK(code_of([&] { io::apply_config_json(io::Json{{"bugdet", 3}}, d); }) == ErrorCode::Parse);
    CHECK(code_of([&] { io::apply_config_json(io::Json{{"budget", "three"}}, d); }) == ErrorCode::Parse);
    const std::vector<std::string> extra{"scene"};
    io::apply_config_json(io::Json{{"scene", "x.json"}, {"workers", 3}}, d, extra);
    CHECK(d.workers == 3u);
}

TEST_CASE("pose and energy json") {
    const CameraPose p = CameraPose::look_at({1, 2, 3}, {0, 0, 0});
    const CameraPose q = io::pose_from_json(io::Json::parse(io::pose_to_json(p).dump()));
    CHECK((q.position() - p.position()).norm() == 0.0);
    CHECK((q.rotation() - p.rotation()).cwiseAbs().maxCoeff() <= 1e-15);
    const EnergyTotals e{3.5, 1.25, 2.25};
    CHECK(io::energy_from_json(io::Json::parse(io::energy_to_json(e).dump())) == e);
}

TEST_CASE("csv and pgm artifacts") {
    PlanResult r;
    r.energies = {{1.5, 1.0, 0.5}, {2.0, 1.25, 0.75}};
    const io::Json cfg{{"budget", 2}};
    const std::string csv = io::coverage_csv(r, "00ff", cfg);
    CHECK(csv == "# scene_digest=00ff\n# config={\"budget\":2}\ncameras,total,angular,frequency\n"
                 "1,1.5,1,0.5\n2,2,1.25,0.75\n");

    FloorplanMap m;
    m.term = Term::Frequency;
    m.nx = 3;
    m.nz = 2;
    m.values = {0.0, 0.5, 1.0, 0.25, 0.75, 2.0};
    const std::string fcsv = io::floorplan_csv(m, "d", cfg);
    CHECK(fcsv.find("# term=frequency reduced_axis=y\nix,iz,value\n0,0,0\n1,0,0.5\n") != std::string::npos);
    CHECK(fcsv.find("\n2,1,2\n") != std::string::npos);

    const std::string pgm = io::floorplan_pgm(m, "d", cfg);
    std::istringstream in(pgm);
    std::string line, magic;
    std::getline(in, magic);
    CHECK(magic == "P2");
    int comments = 0;
    while (in.peek() == '#') {
        std::getline(in, line);
        ++comments;
        if (line.rfind("# scale:", 0) == 0) CHECK(line == "# scale: value = pixel / 65535 * 2");
    }
    CHECK(comments == 4);
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    CHECK(w == 3);
    CHECK(h == 2);
    CHECK(maxval == 65535);
    std::vector<long> px(6);
    for (auto& p : px) in >> p;
    CHECK(px == std::vector<long>{0, 16384, 32768, 8192, 24576, 65535});

    FloorplanMap zero = m;
    zero.values.assign(6, 0.0);
    CHECK(io::floorplan_pgm(zero, "d", cfg).find("\n0 0 0\n0 0 0\n") != std::string::npos);
}
