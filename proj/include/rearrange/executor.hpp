#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rearrange/scene.hpp"

namespace rearrange {

// Lift height of the carry waypoints above the table plane, meters.
inline constexpr double kLiftHeight = 0.15;

struct Waypoint {
    std::string label;  // pick-hover, pick, lift, place-hover, place
    WorldPoint world;
    Point2 pixel;       // projection onto the table plane
    double yaw = 0.0;   // gripper jaw axis
};

struct PickPlan {
    std::string object_id;
    Point2 grasp_point;
    double grasp_yaw = 0.0;
    std::vector<Waypoint> waypoints;
};

// Five-waypoint lift, carry, lower trajectory from the object's current pose
// to the placement. Throws ValidationError for an unknown or immovable object.
PickPlan make_pick_plan(const Scene& scene, const Placement& placement);

// scene.apply_move(placement) after checking the plan matches the scene.
// Collisions are only checked at the final pose; the trajectory is a record.
Scene run_plan(const Scene& scene, const PickPlan& plan, const Placement& placement);

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double rotation = 0.0;
};

struct MoveRecord {
    int step = 0;
    std::string object_id;
    Pose from;
    Pose to;
    std::vector<Waypoint> waypoints;
    bool repaired = false;
    std::optional<std::string> stacked_on;
};

struct StepRecord {
    int index = 0;
    std::string instruction;
    std::vector<MoveRecord> moves;
    std::vector<std::string> prompts;  // placement prompts sent for this step
    Scene scene;                       // scene after the step
};

struct ExecutionLog {
    std::string instruction;
    std::vector<std::string> relevant_ids;
    std::optional<std::string> reference_id;
    std::optional<int> reference_score;
    std::vector<StepRecord> steps;

    const Scene* final_scene() const {
        return steps.empty() ? nullptr : &steps.back().scene;
    }
};

nlohmann::json pose_to_json(const Pose& p);
nlohmann::json waypoint_to_json(const Waypoint& w);
// {"step", "object", "from", "to", "waypoints", "repaired"}
nlohmann::json move_to_json(const MoveRecord& m);
nlohmann::json log_to_json(const ExecutionLog& log);

// Plans, runs and records one placement.
MoveRecord execute_move(Scene& scene, const Placement& placement, int step);

}  // namespace rearrange
