#pragma once

// nlohmann::json bindings for the scene document. Field names are part of the
// external document format and must not change.

#include <nlohmann/json.hpp>

#include "rearrange/scene.hpp"

namespace rearrange {

nlohmann::json workspace_to_json(const Workspace& ws);
Workspace workspace_from_json(const nlohmann::json& j);

nlohmann::json object_to_json(const ObjectRecord& obj);
ObjectRecord object_from_json(const nlohmann::json& j);

nlohmann::json objects_to_json(std::span<const ObjectRecord> objects);
std::vector<ObjectRecord> objects_from_json(const nlohmann::json& j);

nlohmann::json scene_to_json(const Scene& scene);
// Throws ParseError on schema mismatch, ValidationError on invariants.
Scene scene_from_json(const nlohmann::json& j);

nlohmann::json placement_to_json(const Placement& p);

}  // namespace rearrange
