#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/geometry.hpp"

namespace rearrange {

struct Workspace {
    int width_px = 640;
    int height_px = 480;
    Calibration calibration{};

    double diagonal() const;
    friend bool operator==(const Workspace&, const Workspace&) = default;
};

// One grounded object. The centroid and rotation are the box center and
// angle: there are no masks in simulation, so the two coincide.
struct ObjectRecord {
    std::string id;
    std::string category;
    OrientedBox box;
    bool movable = true;
    // Set when the object rests on another object; that pair may overlap.
    std::optional<std::string> stacked_on;

    Point2 centroid() const { return box.center(); }
    double rotation() const { return box.theta(); }

    friend bool operator==(const ObjectRecord&, const ObjectRecord&) = default;
};

// Target pose for one object: center (x, y) in pixels and absolute rotation.
struct Placement {
    std::string object_id;
    double x = 0.0;
    double y = 0.0;
    double rotation = 0.0;
    std::optional<std::string> stacked_on;
    // Set by collision repair when the pose differs from the predicted one.
    bool repaired = false;

    friend bool operator==(const Placement&, const Placement&) = default;
};

struct Violation {
    std::string message;
    std::vector<std::string> ids;
};

// First invariant violation of a candidate object list, if any. Checks unique
// ids, bounds, stacking references and pairwise overlaps.
std::optional<Violation> find_violation(const Workspace& workspace,
                                        std::span<const ObjectRecord> objects);

bool box_in_bounds(const Workspace& workspace, const OrientedBox& box);

// Immutable, validated scene. Mutations return new scenes.
class Scene {
public:
    // Throws ValidationError naming the offending ids.
    Scene(Workspace workspace, std::vector<ObjectRecord> objects);

    const Workspace& workspace() const noexcept { return workspace_; }
    std::span<const ObjectRecord> objects() const noexcept { return objects_; }
    std::size_t size() const noexcept { return objects_.size(); }

    const ObjectRecord* find(std::string_view id) const noexcept;
    // Throws ValidationError for an unknown id.
    const ObjectRecord& at(std::string_view id) const;

    // The scene after moving one object, or the reason it is not allowed.
    std::optional<Violation> move_violation(const Placement& placement) const;
    Scene apply_move(const Placement& placement) const;
    // All placements at once; only the final arrangement is validated.
    Scene apply_moves(std::span<const Placement> placements) const;

    // Objects whose category equals one of `categories` ignoring case, in
    // scene order. "others" never matches.
    std::vector<ObjectRecord> relevant_objects(std::span<const std::string> categories) const;

    friend bool operator==(const Scene&, const Scene&) = default;

private:
    std::vector<ObjectRecord> moved_objects(const Placement& placement) const;

    Workspace workspace_;
    std::vector<ObjectRecord> objects_;
};

// Scene document (UTF-8 JSON). load_scene validates every invariant.
Scene load_scene(std::string_view text);
std::string save_scene(const Scene& scene);

Scene load_scene_file(const std::string& path);

std::string to_lower(std::string_view s);

}  // namespace rearrange
