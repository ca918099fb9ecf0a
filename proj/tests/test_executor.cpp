#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "rearrange/error.hpp"
#include "rearrange/executor.hpp"

using namespace rearrange;

namespace {

Workspace calibrated() {
    Workspace ws;
    ws.calibration.px_per_meter = 1000.0;
    ws.calibration.origin_world = {0.25, -0.24};
    return ws;
}

Scene bar_scene() {
    return Scene(calibrated(), {ObjectRecord{"bar", "bar", OrientedBox(100, 100, 120, 40), true, {}},
                                ObjectRecord{"plate", "plate", OrientedBox(320, 240, 120, 120), true, {}},
                                ObjectRecord{"wall", "wall", OrientedBox(550, 400, 60, 60), false, {}}});
}

}  // namespace

TEST(PickPlan, GraspAcrossShortSide) {
    const auto scene = bar_scene();
    const auto plan = make_pick_plan(scene, Placement{"bar", 500, 100, 0.0});
    EXPECT_NEAR(plan.grasp_yaw, std::numbers::pi / 2, 1e-12);
    EXPECT_EQ(plan.grasp_point, (Point2{100, 100}));
}

TEST(PickPlan, WaypointSequence) {
    const auto scene = bar_scene();
    const auto plan = make_pick_plan(scene, Placement{"bar", 500, 100, 0.0});
    ASSERT_EQ(plan.waypoints.size(), 5u);
    const char* labels[] = {"pick-hover", "pick", "lift", "place-hover", "place"};
    for (int i = 0; i < 5; ++i) EXPECT_EQ(plan.waypoints[i].label, labels[i]);
    // 1000 px/m with origin (0.25, -0.24): pixel (100, 100) -> (0.35, -0.14).
    EXPECT_NEAR(plan.waypoints[1].world.x, 0.35, 1e-12);
    EXPECT_NEAR(plan.waypoints[1].world.y, -0.14, 1e-12);
    EXPECT_NEAR(plan.waypoints[1].world.z, 0.0, 1e-12);
    EXPECT_NEAR(plan.waypoints[0].world.z, kLiftHeight, 1e-12);
    EXPECT_NEAR(plan.waypoints[4].world.x, 0.75, 1e-12);
    EXPECT_EQ(plan.waypoints[4].pixel, (Point2{500, 100}));
}

TEST(PickPlan, PlaceYawFollowsRotation) {
    const auto scene = bar_scene();
    const auto plan = make_pick_plan(scene, Placement{"bar", 500, 100, std::numbers::pi / 4});
    // pi/2 + pi/4 wraps into (-pi/2, pi/2].
    EXPECT_NEAR(plan.waypoints[4].yaw, -std::numbers::pi / 4, 1e-12);
    EXPECT_NEAR(plan.waypoints[0].yaw, std::numbers::pi / 2, 1e-12);
}

TEST(PickPlan, Rejections) {
    const auto scene = bar_scene();
    EXPECT_THROW(make_pick_plan(scene, Placement{"ghost", 1, 1, 0}), ValidationError);
    EXPECT_THROW(make_pick_plan(scene, Placement{"wall", 100, 400, 0}), ValidationError);
}

TEST(RunPlan, ChecksConsistency) {
    const auto scene = bar_scene();
    const Placement p{"bar", 500, 100, 0.0};
    const auto plan = make_pick_plan(scene, p);
    EXPECT_THROW(run_plan(scene, plan, Placement{"plate", 500, 100, 0.0}), ValidationError);
    const auto moved = scene.apply_move(Placement{"bar", 120, 60, 0.0});
    EXPECT_THROW(run_plan(moved, plan, p), ValidationError);
}

TEST(ExecuteMove, EndsAtTarget) {
    auto scene = bar_scene();
    const auto rec = execute_move(scene, Placement{"bar", 500, 100, 0.3}, 2);
    EXPECT_EQ(rec.step, 2);
    EXPECT_EQ(rec.from.x, 100.0);
    EXPECT_EQ(rec.to.x, 500.0);
    EXPECT_NEAR(rec.to.rotation, 0.3, 1e-12);
    EXPECT_EQ(scene.at("bar").box.center(), (Point2{500, 100}));
    EXPECT_EQ(scene.at("plate").box, bar_scene().at("plate").box);
}

TEST(ExecuteMove, FailureLeavesSceneUntouched) {
    auto scene = bar_scene();
    const auto before = scene;
    EXPECT_THROW(execute_move(scene, Placement{"bar", 320, 240, 0.0}, 0), ValidationError);
    EXPECT_EQ(scene, before);
    EXPECT_THROW(execute_move(scene, Placement{"bar", 700, 240, 0.0}, 0), ValidationError);
    EXPECT_EQ(scene, before);
}

TEST(ExecuteMove, IndependentMovesCommute) {
    auto a = bar_scene(), b = bar_scene();
    const Placement m1{"bar", 500, 100, 0.0}, m2{"plate", 200, 350, 0.5};
    execute_move(a, m1, 0);
    execute_move(a, m2, 0);
    execute_move(b, m2, 0);
    execute_move(b, m1, 0);
    EXPECT_EQ(a, b);
}

TEST(ExecuteMove, RandomMovesNeverBreakInvariants) {
    oracle::Rng rng(5);
    auto scene = bar_scene();
    int applied = 0;
    for (int i = 0; i < 300; ++i) {
        const Placement p{rng.below(2) ? "bar" : "plate", rng.uniform(0, 640), rng.uniform(0, 480),
                          rng.uniform(-1.5, 1.5)};
        try {
            execute_move(scene, p, 0);
            ++applied;
        } catch (const ValidationError&) {
        }
        EXPECT_FALSE(find_violation(scene.workspace(), scene.objects()));
    }
    EXPECT_GT(applied, 10);
}

TEST(LogJson, Shape) {
    auto scene = bar_scene();
    ExecutionLog log;
    log.instruction = "move the bar";
    log.relevant_ids = {"bar"};
    auto rec = execute_move(scene, Placement{"bar", 500, 100, 0.0, std::nullopt, true}, 0);
    log.steps.push_back(StepRecord{0, "move the bar", {rec}, {}, scene});
    const auto j = log_to_json(log);
    EXPECT_EQ(j["reference"], nullptr);
    EXPECT_EQ(j["steps"][0]["moves"][0]["object"], "bar");
    EXPECT_EQ(j["steps"][0]["moves"][0]["repaired"], true);
    EXPECT_EQ(j["steps"][0]["moves"][0]["waypoints"].size(), 5u);
    EXPECT_EQ(j["steps"][0]["moves"][0]["stacked_on"], nullptr);
    ASSERT_NE(log.final_scene(), nullptr);
    EXPECT_EQ(log.final_scene()->at("bar").box.cx(), 500.0);
}
