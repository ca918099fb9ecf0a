#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "rearrange/baselines.hpp"

using namespace rearrange;

namespace {

ObjectRecord obj(std::string id, double cx, double cy, double w, double h, double theta = 0.0) {
    return ObjectRecord{id, id, OrientedBox(cx, cy, w, h, theta), true, {}};
}

Scene three_boxes() {
    return Scene(Workspace{}, {obj("a", 60, 60, 60, 30), obj("b", 560, 60, 80, 30, 0.4), obj("c", 100, 400, 100, 50)});
}

Scene fixture(const std::string& name) {
    return load_scene_file((oracle::data_dir() / "scenes" / (name + ".json")).string());
}

}  // namespace

TEST(Geometric, RowCenteredWithExactGaps) {
    const auto scene = three_boxes();
    const std::vector<std::string> ids{"a", "b", "c"};
    const auto ps = geometric_placement(scene, ids, 40.0);
    ASSERT_EQ(ps.size(), 3u);
    // Row width 60 + 80 + 100 + 2 * 40 = 320, starting at x = 160.
    EXPECT_DOUBLE_EQ(ps[0].x, 320 - 130);
    EXPECT_DOUBLE_EQ(ps[1].x, 320 - 20);
    EXPECT_DOUBLE_EQ(ps[2].x, 320 + 110);
    for (const auto& p : ps) {
        EXPECT_DOUBLE_EQ(p.y, 240.0);
        EXPECT_EQ(p.rotation, 0.0);
    }
}

TEST(Geometric, GapInvariant) {
    const auto scene = three_boxes();
    const std::vector<std::string> ids{"a", "b", "c"};
    for (double gap : {1.0, 10.0, 25.0, 60.0}) {
        const auto after = scene.apply_moves(geometric_placement(scene, ids, gap));
        EXPECT_NEAR(min_gap(after.at("a").box, after.at("b").box), gap, 1e-9);
        EXPECT_NEAR(min_gap(after.at("b").box, after.at("c").box), gap, 1e-9);
    }
}

TEST(Geometric, TooWideIsAnError) {
    const auto scene = three_boxes();
    const std::vector<std::string> ids{"a", "b", "c"};
    // 240 px of objects plus two 200 px gaps fills the 640 px row exactly.
    EXPECT_NO_THROW(geometric_placement(scene, ids, 200.0));
    EXPECT_THROW(geometric_placement(scene, ids, 201.0), Error);
}

TEST(Random, ReproducibleAndVaried) {
    const auto scene = fixture("scene2");
    const std::vector<std::string> ids{"potato-1", "potato-2"};
    EXPECT_EQ(random_placement(scene, ids, 7), random_placement(scene, ids, 7));
    std::set<std::pair<double, double>> firsts;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto ps = random_placement(scene, ids, seed);
        firsts.insert({ps[0].x, ps[0].y});
    }
    EXPECT_GE(firsts.size(), 99u);
}

TEST(Random, NeverViolatesInvariants) {
    const auto scene = fixture("scene3");
    const std::vector<std::string> ids{"carrot", "potato", "eggplant", "pineapple"};
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto after = scene.apply_moves(random_placement(scene, ids, seed));
        ASSERT_FALSE(find_violation(after.workspace(), after.objects())) << "seed " << seed;
        EXPECT_EQ(after.at("carrot").rotation(), scene.at("carrot").rotation());
    }
}

TEST(SplitMix, KnownFirstOutputs) {
    // splitmix64 applied to a counter starting at splitmix64(0).
    SplitMixRng a(0), b(0), c(1);
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform(-2, 3);
        EXPECT_GE(u, -2);
        EXPECT_LT(u, 3);
    }
}

TEST(RunBaseline, GeometricOneStep) {
    const auto scene = fixture("scene1");
    ScriptedBackend llm;
    const auto log = run_baseline(scene, "put the eggplant on the right of the plate", Baseline::geometric, llm);
    ASSERT_EQ(log.steps.size(), 1u);
    EXPECT_EQ(log.relevant_ids, (std::vector<std::string>{"plate", "eggplant"}));
    EXPECT_EQ(log.steps[0].moves.size(), 2u);
    EXPECT_EQ(log.steps[0].moves[0].waypoints.size(), 5u);
}

TEST(RunBaseline, RandomDeterministicPerSeed) {
    const auto scene = fixture("scene3");
    ScriptedBackend llm;
    const std::string instr = "put the eggplant beside the carrot, then far away from the carrot";
    BaselineOptions opt;
    opt.seed = 3;
    const auto a = run_baseline(scene, instr, Baseline::random, llm, opt);
    const auto b = run_baseline(scene, instr, Baseline::random, llm, opt);
    ASSERT_EQ(a.steps.size(), 2u);
    EXPECT_EQ(a.final_scene()->objects()[0].box, b.final_scene()->objects()[0].box);
    EXPECT_EQ(*a.final_scene(), *b.final_scene());
    EXPECT_NE(a.steps[0].scene, a.steps[1].scene);
}

TEST(RunBaseline, GroundingFailureIsPipelineError) {
    const auto scene = fixture("scene1");
    ScriptedBackend llm;
    EXPECT_THROW(run_baseline(scene, "put the banana on the cup", Baseline::random, llm), PipelineError);
}

TEST(ApplyStep, RecordsEveryMove) {
    const auto scene = fixture("scene2");
    const std::vector<Placement> ps{{"potato-1", 500, 100, 0.0}, {"potato-2", 130, 110, 0.0}};
    const auto rec = apply_step(scene, 0, "swap", ps);
    EXPECT_EQ(rec.moves.size(), 2u);
    EXPECT_EQ(rec.scene.at("potato-2").box.cx(), 130.0);
    const std::vector<Placement> clash{{"potato-1", 320, 240, 0.0}};
    EXPECT_THROW(apply_step(scene, 0, "x", clash), ValidationError);
}
