#include "rearrange/scene.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "rearrange/error.hpp"
#include "rearrange/scene_json.hpp"

namespace rearrange {

using nlohmann::json;

namespace {

constexpr double kBoundsEps = 1e-9;

const ObjectRecord* find_in(std::span<const ObjectRecord> objects, std::string_view id) {
    for (const auto& o : objects) {
        if (o.id == id) return &o;
    }
    return nullptr;
}

bool stacked_pair(const ObjectRecord& a, const ObjectRecord& b) {
    return (a.stacked_on && *a.stacked_on == b.id) || (b.stacked_on && *b.stacked_on == a.id);
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double Workspace::diagonal() const {
    return std::hypot(static_cast<double>(width_px), static_cast<double>(height_px));
}

bool box_in_bounds(const Workspace& ws, const OrientedBox& box) {
    for (const auto& p : corners(box)) {
        if (p.x < -kBoundsEps || p.y < -kBoundsEps || p.x > ws.width_px + kBoundsEps ||
            p.y > ws.height_px + kBoundsEps) {
            return false;
        }
    }
    return true;
}

std::optional<Violation> find_violation(const Workspace& ws,
                                        std::span<const ObjectRecord> objects) {
    if (ws.width_px <= 0 || ws.height_px <= 0) {
        return Violation{"workspace dimensions must be positive", {}};
    }
    if (!(ws.calibration.px_per_meter > 0.0)) {
        return Violation{"px_per_meter must be positive", {}};
    }

    std::unordered_set<std::string_view> seen;
    for (const auto& o : objects) {
        if (o.id.empty()) return Violation{"object id must be nonempty", {o.id}};
        if (!seen.insert(o.id).second) {
            return Violation{"duplicate object id '" + o.id + "'", {o.id}};
        }
        if (o.category.empty()) {
            return Violation{"object '" + o.id + "' has an empty category", {o.id}};
        }
        if (!box_in_bounds(ws, o.box)) {
            return Violation{"object '" + o.id + "' lies outside the workspace", {o.id}};
        }
    }

    for (const auto& o : objects) {
        if (!o.stacked_on) continue;
        if (*o.stacked_on == o.id) {
            return Violation{"object '" + o.id + "' is stacked on itself", {o.id}};
        }
        const ObjectRecord* base = find_in(objects, *o.stacked_on);
        if (base == nullptr) {
            return Violation{"object '" + o.id + "' is stacked on unknown object '" +
                                 *o.stacked_on + "'",
                             {o.id}};
        }
        const bool o_smaller = o.box.area() <= base->box.area();
        const ObjectRecord& small = o_smaller ? o : *base;
        const ObjectRecord& large = o_smaller ? *base : o;
        if (!large.box.contains(small.centroid())) {
            return Violation{"stacked object '" + o.id + "' is not supported by '" + base->id + "'",
                             {o.id, base->id}};
        }
    }

    for (std::size_t i = 0; i < objects.size(); ++i) {
        for (std::size_t j = i + 1; j < objects.size(); ++j) {
            const auto& a = objects[i];
            const auto& b = objects[j];
            if (overlaps(a.box, b.box) && !stacked_pair(a, b)) {
                return Violation{"objects '" + a.id + "' and '" + b.id + "' overlap", {a.id, b.id}};
            }
        }
    }
    return std::nullopt;
}

Scene::Scene(Workspace workspace, std::vector<ObjectRecord> objects)
    : workspace_(std::move(workspace)), objects_(std::move(objects)) {
    if (auto v = find_violation(workspace_, objects_)) {
        throw ValidationError(v->message, v->ids);
    }
}

const ObjectRecord* Scene::find(std::string_view id) const noexcept {
    return find_in(objects_, id);
}

const ObjectRecord& Scene::at(std::string_view id) const {
    if (const auto* o = find(id)) return *o;
    throw ValidationError("unknown object id '" + std::string(id) + "'", {std::string(id)});
}

std::vector<ObjectRecord> Scene::moved_objects(const Placement& p) const {
    std::vector<ObjectRecord> out = objects_;
    for (auto& o : out) {
        if (o.id == p.object_id) {
            o.box = o.box.with_pose(p.x, p.y, p.rotation);
            o.stacked_on = p.stacked_on;
        }
    }
    return out;
}

std::optional<Violation> Scene::move_violation(const Placement& p) const {
    const ObjectRecord* obj = find(p.object_id);
    if (obj == nullptr) {
        return Violation{"unknown object id '" + p.object_id + "'", {p.object_id}};
    }
    if (!obj->movable) {
        return Violation{"object '" + p.object_id + "' is not movable", {p.object_id}};
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.rotation)) {
        return Violation{"placement for '" + p.object_id + "' is not finite", {p.object_id}};
    }
    if (p.stacked_on && find(*p.stacked_on) == nullptr) {
        return Violation{"placement for '" + p.object_id + "' is stacked on unknown object '" +
                             *p.stacked_on + "'",
                         {p.object_id}};
    }
    const auto next = moved_objects(p);
    return find_violation(workspace_, next);
}

Scene Scene::apply_move(const Placement& p) const {
    if (auto v = move_violation(p)) throw ValidationError(v->message, v->ids);
    return Scene(workspace_, moved_objects(p));
}

Scene Scene::apply_moves(std::span<const Placement> placements) const {
    std::vector<ObjectRecord> next = objects_;
    for (const auto& p : placements) {
        const ObjectRecord* obj = find(p.object_id);
        if (obj == nullptr) throw ValidationError("unknown object id '" + p.object_id + "'", {p.object_id});
        if (!obj->movable) {
            throw ValidationError("object '" + p.object_id + "' is not movable", {p.object_id});
        }
        for (auto& o : next) {
            if (o.id == p.object_id) {
                o.box = o.box.with_pose(p.x, p.y, p.rotation);
                o.stacked_on = p.stacked_on;
            }
        }
    }
    return Scene(workspace_, std::move(next));
}

std::vector<ObjectRecord> Scene::relevant_objects(std::span<const std::string> categories) const {
    std::vector<std::string> wanted;
    for (const auto& c : categories) {
        auto lc = to_lower(c);
        if (lc != "others") wanted.push_back(std::move(lc));
    }
    std::vector<ObjectRecord> out;
    for (const auto& o : objects_) {
        const auto cat = to_lower(o.category);
        if (std::find(wanted.begin(), wanted.end(), cat) != wanted.end()) out.push_back(o);
    }
    return out;
}

// --- JSON -------------------------------------------------------------------

json workspace_to_json(const Workspace& ws) {
    return json{{"width_px", ws.width_px},
                {"height_px", ws.height_px},
                {"px_per_meter", ws.calibration.px_per_meter},
                {"origin_world", {ws.calibration.origin_world.x, ws.calibration.origin_world.y}},
                {"table_height_m", ws.calibration.table_height}};
}

Workspace workspace_from_json(const json& j) {
    try {
        Workspace ws;
        ws.width_px = j.at("width_px").get<int>();
        ws.height_px = j.at("height_px").get<int>();
        ws.calibration.px_per_meter = j.at("px_per_meter").get<double>();
        const auto& origin = j.at("origin_world");
        if (!origin.is_array() || origin.size() != 2) {
            throw ParseError("origin_world must be a two-element array", j.dump());
        }
        ws.calibration.origin_world = {origin[0].get<double>(), origin[1].get<double>()};
        ws.calibration.table_height = j.at("table_height_m").get<double>();
        return ws;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid workspace: ") + e.what(), j.dump());
    }
}

json object_to_json(const ObjectRecord& o) {
    json j{{"id", o.id},
           {"category", o.category},
           {"box",
            {{"cx", o.box.cx()},
             {"cy", o.box.cy()},
             {"w", o.box.w()},
             {"h", o.box.h()},
             {"theta", o.box.theta()}}},
           {"movable", o.movable}};
    if (o.stacked_on) j["stacked_on"] = *o.stacked_on;
    return j;
}

ObjectRecord object_from_json(const json& j) {
    std::string id = j.is_object() && j.contains("id") && j["id"].is_string()
                         ? j["id"].get<std::string>()
                         : std::string("<unnamed>");
    try {
        const auto& b = j.at("box");
        ObjectRecord o{j.at("id").get<std::string>(),
                       j.at("category").get<std::string>(),
                       OrientedBox(b.at("cx").get<double>(), b.at("cy").get<double>(),
                                   b.at("w").get<double>(), b.at("h").get<double>(),
                                   b.at("theta").get<double>()),
                       j.at("movable").get<bool>(),
                       std::nullopt};
        if (j.contains("stacked_on") && !j["stacked_on"].is_null()) {
            o.stacked_on = j["stacked_on"].get<std::string>();
        }
        return o;
    } catch (const json::exception& e) {
        throw ParseError("invalid object '" + id + "': " + e.what(), j.dump());
    } catch (const std::invalid_argument& e) {
        throw ValidationError("invalid box for object '" + id + "': " + e.what(), {id});
    }
}

json objects_to_json(std::span<const ObjectRecord> objects) {
    json arr = json::array();
    for (const auto& o : objects) arr.push_back(object_to_json(o));
    return arr;
}

std::vector<ObjectRecord> objects_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("objects must be an array", j.dump());
    std::vector<ObjectRecord> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(object_from_json(item));
    return out;
}

json scene_to_json(const Scene& scene) {
    return json{{"workspace", workspace_to_json(scene.workspace())},
                {"objects", objects_to_json(scene.objects())}};
}

Scene scene_from_json(const json& j) {
    if (!j.is_object() || !j.contains("workspace") || !j.contains("objects")) {
        throw ParseError("scene document needs 'workspace' and 'objects'", j.dump());
    }
    return Scene(workspace_from_json(j["workspace"]), objects_from_json(j["objects"]));
}

json placement_to_json(const Placement& p) {
    json j{{"object", p.object_id}, {"x", p.x}, {"y", p.y}, {"rotation", p.rotation}};
    j["stacked_on"] = p.stacked_on ? json(*p.stacked_on) : json(nullptr);
    j["repaired"] = p.repaired;
    return j;
}

Scene load_scene(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed scene document: ") + e.what(), std::string(text));
    }
    return scene_from_json(j);
}

std::string save_scene(const Scene& scene) { return scene_to_json(scene).dump(2) + "\n"; }

Scene load_scene_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open scene file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scene(ss.str());
}

}  // namespace rearrange
