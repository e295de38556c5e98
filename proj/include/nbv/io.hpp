#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "nbv/evaluation.hpp"
#include "nbv/occupancy.hpp"
#include "nbv/planner.hpp"

namespace nbv::io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// FNV-1a 64 of a byte string, as 16 lowercase hex digits.
std::string digest(std::string_view bytes);

/// A scene on disk: either a primitive scene document
///   {aabb: {min, max}, resolution, primitives: [{type: "box", min, max} |
///    {type: "sphere", center, radius}], free_box?, hemisphere?: {center, radius}}
/// or a density header {dims, aabb, threshold, data?} next to a raw
/// little-endian float32 array (x fastest; `data` defaults to the header
/// path with a .raw extension).
struct SceneFile {
    OccupancyGrid occupancy;
    std::string digest;  // over the header and, for densities, the raw payload
    std::optional<Aabb> free_box;
    std::optional<Vec3> hemisphere_center;
    std::optional<double> hemisphere_radius;
};

PrimitiveScene parse_primitive_scene(const Json& doc);
SceneFile load_scene(const std::filesystem::path& path);

Aabb parse_aabb(const Json& j);
Vec3 parse_vec3(const Json& j);
Json to_json(const Vec3& v);
Json to_json(const Aabb& box);

/// Radiance-field camera file: camera_angle_x plus frames of 4x4
/// camera-to-world matrices (row-major nested arrays, -Z forward, +Y up).
Json transforms_document(std::span<const CameraPose> cameras, const Intrinsics& intr);

struct TransformsFile {
    std::vector<CameraPose> cameras;
    double camera_angle_x = 0.0;
    std::optional<double> camera_angle_y;
};

TransformsFile parse_transforms(const Json& doc);
TransformsFile load_transforms(const std::filesystem::path& path);

/// Flat document of the planner parameters; also the config-file schema.
Json config_to_json(const PlannerConfig& config);
/// Overwrites the fields present in `doc`; unknown keys are an error unless
/// listed in `extra_keys`.
void apply_config_json(const Json& doc, PlannerConfig& config, std::span<const std::string> extra_keys = {});

Json energy_to_json(const EnergyTotals& e);
EnergyTotals energy_from_json(const Json& j);
Json pose_to_json(const CameraPose& pose);
CameraPose pose_from_json(const Json& j);

/// Header comment lines shared by the CSV artifacts.
std::string csv_preamble(const std::string& scene_digest, const Json& config);

std::string coverage_csv(const PlanResult& result, const std::string& scene_digest, const Json& config);
std::string floorplan_csv(const FloorplanMap& map, const std::string& scene_digest, const Json& config);

/// Plain P2 image, maxval 65535, values scaled linearly from [0, max value];
/// the scale factor is recorded in a comment line.
std::string floorplan_pgm(const FloorplanMap& map, const std::string& scene_digest, const Json& config);

}  // namespace nbv::io
