#include "nbv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nbv/error.hpp"

namespace nbv::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << contents;
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

std::string digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, what + ": " + e.what());
    }
}

template <class Fn>
auto guarded(const std::string& what, Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, what + ": " + e.what());
    }
}

std::array<int, 3> parse_resolution(const Json& j) {
    if (j.is_number_integer()) {
        const int r = j.get<int>();
        return {r, r, r};
    }
    return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()};
}

}  // namespace

Vec3 parse_vec3(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::Parse, "expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Aabb parse_aabb(const Json& j) {
    if (j.is_array() && j.size() == 6) {
        return Aabb::make({j[0].get<double>(), j[1].get<double>(), j[2].get<double>()},
                          {j[3].get<double>(), j[4].get<double>(), j[5].get<double>()});
    }
    return Aabb::make(parse_vec3(j.at("min")), parse_vec3(j.at("max")));
}

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json to_json(const Aabb& box) {
    Json j;
    j["min"] = to_json(box.min);
    j["max"] = to_json(box.max);
    return j;
}

PrimitiveScene parse_primitive_scene(const Json& doc) {
    return guarded("scene", [&] {
        PrimitiveScene scene;
        scene.box = parse_aabb(doc.at("aabb"));
        if (doc.contains("resolution")) scene.resolution = parse_resolution(doc.at("resolution"));
        for (const Json& p : doc.value("primitives", Json::array())) {
            const std::string type = p.at("type").get<std::string>();
            if (type == "box") {
                scene.primitives.emplace_back(BoxPrimitive{parse_vec3(p.at("min")), parse_vec3(p.at("max"))});
            } else if (type == "sphere") {
                scene.primitives.emplace_back(SpherePrimitive{parse_vec3(p.at("center")), p.at("radius").get<double>()});
            } else {
                throw Error(ErrorCode::Parse, "unknown primitive type '" + type + "'");
            }
        }
        scene.validate();
        return scene;
    });
}

SceneFile load_scene(const fs::path& path) {
    const std::string text = read_file(path);
    const Json doc = parse_json(text, path.string());
    return guarded(path.string(), [&] {
        std::optional<OccupancyGrid> occupancy;
        std::string bytes = text;
        if (doc.contains("dims")) {
            const std::array<int, 3> dims = parse_resolution(doc.at("dims"));
            const Aabb box = parse_aabb(doc.at("aabb"));
            const double threshold = doc.at("threshold").get<double>();
            fs::path raw = path;
            raw.replace_extension(".raw");
            if (doc.contains("data")) raw = path.parent_path() / doc.at("data").get<std::string>();
            const std::string payload = read_file(raw);
            const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
            if (payload.size() != n * sizeof(float)) {
                throw Error(ErrorCode::Parse, raw.string() + ": expected " + std::to_string(n * sizeof(float)) +
                                                  " bytes of float32 density, found " + std::to_string(payload.size()));
            }
            std::vector<float> density(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto* b = reinterpret_cast<const unsigned char*>(payload.data()) + 4 * i;
                const std::uint32_t bits = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                                           (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
                std::memcpy(&density[i], &bits, sizeof bits);
            }
            occupancy.emplace(binarize_density(box, dims, density, threshold));
            bytes += payload;
        } else {
            occupancy.emplace(voxelize(parse_primitive_scene(doc)));
        }
        SceneFile scene{std::move(*occupancy), digest(bytes), std::nullopt, std::nullopt, std::nullopt};
        if (doc.contains("free_box")) scene.free_box = parse_aabb(doc.at("free_box"));
        if (doc.contains("hemisphere")) {
            scene.hemisphere_center = parse_vec3(doc.at("hemisphere").at("center"));
            scene.hemisphere_radius = doc.at("hemisphere").at("radius").get<double>();
        }
        return scene;
    });
}

Json transforms_document(std::span<const CameraPose> cameras, const Intrinsics& intr) {
    Json doc;
    doc["camera_angle_x"] = intr.fov_x;
    doc["camera_angle_y"] = intr.fov_y;
    Json frames = Json::array();
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu", i);
        const Mat4 m = cameras[i].matrix();
        Json rows = Json::array();
        for (int r = 0; r < 4; ++r) rows.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
        Json frame;
        frame["file_path"] = name;
        frame["transform_matrix"] = std::move(rows);
        frames.push_back(std::move(frame));
    }
    doc["frames"] = std::move(frames);
    return doc;
}

TransformsFile parse_transforms(const Json& doc) {
    return guarded("transforms", [&] {
        TransformsFile out;
        out.camera_angle_x = doc.at("camera_angle_x").get<double>();
        if (doc.contains("camera_angle_y")) out.camera_angle_y = doc.at("camera_angle_y").get<double>();
        for (const Json& frame : doc.at("frames")) {
            const Json& rows = frame.at("transform_matrix");
            if (!rows.is_array() || rows.size() != 4) throw Error(ErrorCode::Parse, "transform_matrix must be 4x4");
            Mat4 m;
            for (int r = 0; r < 4; ++r) {
                const Json& row = rows.at(static_cast<std::size_t>(r));
                if (!row.is_array() || row.size() != 4) throw Error(ErrorCode::Parse, "transform_matrix must be 4x4");
                for (int c = 0; c < 4; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
            }
            try {
                out.cameras.push_back(CameraPose::from_matrix(m));
            } catch (const Error& e) {
                throw Error(ErrorCode::Parse, std::string("frame ") + std::to_string(out.cameras.size()) + ": " + e.what());
            }
        }
        return out;
    });
}

TransformsFile load_transforms(const fs::path& path) {
    const Json doc = parse_json(read_file(path), path.string());
    try {
        return parse_transforms(doc);
    } catch (const Error& e) {
        throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
    }
}

Json config_to_json(const PlannerConfig& c) {
    Json j;
    j["budget"] = c.budget;
    j["candidates"] = c.candidates;
    j["bootstrap"] = c.bootstrap;
    j["gamma"] = c.gamma;
    j["bins_polar"] = c.bins_polar;
    j["bins_azimuth"] = c.bins_azimuth;
    j["equal_area"] = c.equal_area;
    j["hemisphere_only"] = c.hemisphere_only;
    j["node_resolution"] = c.node_resolution;
    j["box"] = to_json(c.box);
    j["free_box"] = to_json(c.free_box);
    j["clearance"] = c.clearance;
    j["fov_x"] = c.intrinsics.fov_x;
    j["fov_y"] = c.intrinsics.fov_y;
    j["near"] = c.intrinsics.near;
    j["far"] = c.intrinsics.far;
    j["seed"] = c.seed;
    j["max_retries"] = c.max_retries;
    j["tie_epsilon"] = c.tie_epsilon;
    return j;
}

void apply_config_json(const Json& doc, PlannerConfig& c, std::span<const std::string> extra_keys) {
    if (!doc.is_object()) throw Error(ErrorCode::Parse, "config must be a JSON object");
    guarded("config", [&] {
        for (const auto& [key, v] : doc.items()) {
            if (key == "budget") c.budget = v.get<std::size_t>();
            else if (key == "candidates") c.candidates = v.get<std::size_t>();
            else if (key == "bootstrap") c.bootstrap = v.get<std::size_t>();
            else if (key == "gamma") c.gamma = v.get<double>();
            else if (key == "bins_polar") c.bins_polar = v.get<int>();
            else if (key == "bins_azimuth") c.bins_azimuth = v.get<int>();
            else if (key == "equal_area") c.equal_area = v.get<bool>();
            else if (key == "hemisphere_only") c.hemisphere_only = v.get<bool>();
            else if (key == "node_resolution") c.node_resolution = v.get<int>();
            else if (key == "box") c.box = parse_aabb(v);
            else if (key == "free_box") c.free_box = parse_aabb(v);
            else if (key == "clearance") c.clearance = v.get<double>();
            else if (key == "fov_x") c.intrinsics.fov_x = v.get<double>();
            else if (key == "fov_y") c.intrinsics.fov_y = v.get<double>();
            else if (key == "near") c.intrinsics.near = v.get<double>();
            else if (key == "far") c.intrinsics.far = v.get<double>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "max_retries") c.max_retries = v.get<std::size_t>();
            else if (key == "tie_epsilon") c.tie_epsilon = v.get<double>();
            else if (key == "workers") c.workers = v.get<std::size_t>();
            else if (std::find(extra_keys.begin(), extra_keys.end(), key) == extra_keys.end()) {
                throw Error(ErrorCode::Parse, "unknown config key '" + key + "'");
            }
        }
        return 0;
    });
}

Json energy_to_json(const EnergyTotals& e) {
    Json j;
    j["total"] = e.total;
    j["angular"] = e.angular;
    j["frequency"] = e.frequency;
    return j;
}

EnergyTotals energy_from_json(const Json& j) {
    return {j.at("total").get<double>(), j.at("angular").get<double>(), j.at("frequency").get<double>()};
}

Json pose_to_json(const CameraPose& pose) {
    const Quat& q = pose.orientation();
    Json j;
    j["position"] = to_json(pose.position());
    j["orientation_wxyz"] = Json::array({q.w(), q.x(), q.y(), q.z()});
    return j;
}

CameraPose pose_from_json(const Json& j) {
    const Json& q = j.at("orientation_wxyz");
    return CameraPose(parse_vec3(j.at("position")),
                      Quat(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(), q.at(3).get<double>()));
}

std::string csv_preamble(const std::string& scene_digest, const Json& config) {
    return "# scene_digest=" + scene_digest + "\n# config=" + config.dump() + "\n";
}

std::string coverage_csv(const PlanResult& result, const std::string& scene_digest, const Json& config) {
    std::string out = csv_preamble(scene_digest, config);
    out += "cameras,total,angular,frequency\n";
    for (std::size_t i = 0; i < result.energies.size(); ++i) {
        const EnergyTotals& e = result.energies[i];
        out += std::to_string(i + 1) + "," + fmt_double(e.total) + "," + fmt_double(e.angular) + "," +
               fmt_double(e.frequency) + "\n";
    }
    return out;
}

std::string floorplan_csv(const FloorplanMap& map, const std::string& scene_digest, const Json& config) {
    std::string out = csv_preamble(scene_digest, config);
    out += "# term=" + std::string(to_string(map.term)) + " reduced_axis=" + map.reduced_axis + "\n";
    out += "ix,iz,value\n";
    for (int iz = 0; iz < map.nz; ++iz) {
        for (int ix = 0; ix < map.nx; ++ix) {
            out += std::to_string(ix) + "," + std::to_string(iz) + "," + fmt_double(map.at(ix, iz)) + "\n";
        }
    }
    return out;
}

std::string floorplan_pgm(const FloorplanMap& map, const std::string& scene_digest, const Json& config) {
    const double scale = map.max_value();
    std::string out = "P2\n";
    out += "# scene_digest=" + scene_digest + "\n";
    out += "# config=" + config.dump() + "\n";
    out += "# term=" + std::string(to_string(map.term)) + " reduced_axis=" + map.reduced_axis + " rows=z cols=x\n";
    out += "# scale: value = pixel / 65535 * " + fmt_double(scale) + "\n";
    out += std::to_string(map.nx) + " " + std::to_string(map.nz) + "\n65535\n";
    for (int iz = 0; iz < map.nz; ++iz) {
        for (int ix = 0; ix < map.nx; ++ix) {
            const double v = scale > 0.0 ? map.at(ix, iz) / scale : 0.0;
            const long pixel = std::lround(std::clamp(v, 0.0, 1.0) * 65535.0);
            if (ix) out += ' ';
            out += std::to_string(pixel);
        }
        out += '\n';
    }
    return out;
}

}  // namespace nbv::io
