#include "rearrange/executor.hpp"

#include "rearrange/error.hpp"
#include "rearrange/scene_json.hpp"

namespace rearrange {

using nlohmann::json;

namespace {

Waypoint make_waypoint(std::string label, Point2 pixel, double z, double yaw, const Calibration& c) {
    WorldPoint w = pixel_to_world(pixel, c);
    w.z = c.table_height + z;
    return {std::move(label), w, pixel, yaw};
}

}  // namespace

PickPlan make_pick_plan(const Scene& scene, const Placement& placement) {
    const auto& obj = scene.at(placement.object_id);
    if (!obj.movable) {
        throw ValidationError("object '" + obj.id + "' is not movable", {obj.id});
    }
    const auto& calib = scene.workspace().calibration;
    PickPlan plan;
    plan.object_id = obj.id;
    plan.grasp_point = obj.centroid();
    plan.grasp_yaw = grasp_yaw(obj.box);

    // Yaw at the target keeps the same relative grasp on the rotated object.
    const double place_yaw = normalize_axis(plan.grasp_yaw + (placement.rotation - obj.rotation()));
    const Point2 from = obj.centroid();
    const Point2 to{placement.x, placement.y};
    plan.waypoints = {
        make_waypoint("pick-hover", from, kLiftHeight, plan.grasp_yaw, calib),
        make_waypoint("pick", from, 0.0, plan.grasp_yaw, calib),
        make_waypoint("lift", from, kLiftHeight, plan.grasp_yaw, calib),
        make_waypoint("place-hover", to, kLiftHeight, place_yaw, calib),
        make_waypoint("place", to, 0.0, place_yaw, calib),
    };
    return plan;
}

Scene run_plan(const Scene& scene, const PickPlan& plan, const Placement& placement) {
    if (plan.object_id != placement.object_id) {
        throw ValidationError("plan for '" + plan.object_id + "' does not match placement of '" +
                                  placement.object_id + "'",
                              {plan.object_id, placement.object_id});
    }
    const auto& obj = scene.at(plan.object_id);
    if (!(obj.centroid() == plan.grasp_point)) {
        throw ValidationError("plan for '" + obj.id + "' was made for a different scene", {obj.id});
    }
    return scene.apply_move(placement);
}

MoveRecord execute_move(Scene& scene, const Placement& placement, int step) {
    const auto& obj = scene.at(placement.object_id);
    MoveRecord rec;
    rec.step = step;
    rec.object_id = obj.id;
    rec.from = {obj.box.cx(), obj.box.cy(), obj.rotation()};
    const auto plan = make_pick_plan(scene, placement);
    scene = run_plan(scene, plan, placement);
    const auto& moved = scene.at(placement.object_id);
    rec.to = {moved.box.cx(), moved.box.cy(), moved.rotation()};
    rec.waypoints = plan.waypoints;
    rec.repaired = placement.repaired;
    rec.stacked_on = placement.stacked_on;
    return rec;
}

json pose_to_json(const Pose& p) { return json{{"x", p.x}, {"y", p.y}, {"rotation", p.rotation}}; }

json waypoint_to_json(const Waypoint& w) {
    return json{{"label", w.label},
                {"world", {w.world.x, w.world.y, w.world.z}},
                {"pixel", {w.pixel.x, w.pixel.y}},
                {"yaw", w.yaw}};
}

json move_to_json(const MoveRecord& m) {
    json wps = json::array();
    for (const auto& w : m.waypoints) wps.push_back(waypoint_to_json(w));
    json j{{"step", m.step},
           {"object", m.object_id},
           {"from", pose_to_json(m.from)},
           {"to", pose_to_json(m.to)},
           {"waypoints", wps},
           {"repaired", m.repaired}};
    j["stacked_on"] = m.stacked_on ? json(*m.stacked_on) : json(nullptr);
    return j;
}

json log_to_json(const ExecutionLog& log) {
    json steps = json::array();
    for (const auto& s : log.steps) {
        json moves = json::array();
        for (const auto& m : s.moves) moves.push_back(move_to_json(m));
        steps.push_back(json{{"index", s.index},
                             {"instruction", s.instruction},
                             {"moves", moves},
                             {"scene", scene_to_json(s.scene)}});
    }
    json j{{"instruction", log.instruction}, {"relevant_ids", log.relevant_ids}, {"steps", steps}};
    if (log.reference_id) {
        j["reference"] = json{{"id", *log.reference_id}, {"score", log.reference_score.value_or(0)}};
    } else {
        j["reference"] = nullptr;
    }
    return j;
}

}  // namespace rearrange
