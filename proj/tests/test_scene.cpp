#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rearrange/error.hpp"
#include "rearrange/scene.hpp"
#include "rearrange/scene_json.hpp"

using namespace rearrange;

namespace {

ObjectRecord obj(std::string id, std::string cat, double cx, double cy, double w, double h,
                 double t = 0.0) {
    return ObjectRecord{std::move(id), std::move(cat), OrientedBox(cx, cy, w, h, t), true, std::nullopt};
}

}  // namespace

TEST(Scene, EmptyIsValid) {
    Scene s(Workspace{}, {});
    EXPECT_EQ(s.size(), 0u);
    EXPECT_NEAR(s.workspace().diagonal(), 800.0, 1e-12);
}

TEST(Scene, DisjointObjectsAreValid) {
    EXPECT_NO_THROW(Scene(Workspace{}, {obj("a", "apple", 100, 100, 40, 40), obj("b", "banana", 300, 100, 40, 40)}));
}

TEST(Scene, OverlapNamesBothIds) {
    try {
        Scene(Workspace{}, {obj("a", "apple", 100, 100, 40, 40), obj("b", "banana", 120, 100, 40, 40)});
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.ids(), (std::vector<std::string>{"a", "b"}));
    }
}

TEST(Scene, StackedPairMayOverlap) {
    auto plate = obj("plate", "plate", 320, 240, 120, 120);
    auto apple = obj("apple", "apple", 320, 240, 40, 40);
    apple.stacked_on = "plate";
    EXPECT_NO_THROW(Scene(Workspace{}, {plate, apple}));
    apple.stacked_on = "ghost";
    EXPECT_THROW(Scene(Workspace{}, {plate, apple}), ValidationError);
    apple.stacked_on = "apple";
    EXPECT_THROW(Scene(Workspace{}, {plate, apple}), ValidationError);
}

TEST(Scene, StackedObjectsStillCollideWithOthers) {
    auto plate = obj("plate", "plate", 320, 240, 120, 120);
    auto a = obj("a", "apple", 310, 240, 40, 40);
    auto b = obj("b", "apple", 330, 240, 40, 40);
    a.stacked_on = "plate";
    b.stacked_on = "plate";
    EXPECT_THROW(Scene(Workspace{}, {plate, a, b}), ValidationError);
}

TEST(Scene, RejectsOutOfBoundsAndBadIds) {
    EXPECT_THROW(Scene(Workspace{}, {obj("a", "apple", 10, 10, 40, 40)}), ValidationError);
    EXPECT_THROW(Scene(Workspace{}, {obj("a", "apple", 100, 100, 40, 40), obj("a", "apple", 300, 100, 40, 40)}),
                 ValidationError);
    EXPECT_THROW(Scene(Workspace{}, {obj("", "apple", 100, 100, 40, 40)}), ValidationError);
    EXPECT_THROW(Scene(Workspace{}, {obj("a", "", 100, 100, 40, 40)}), ValidationError);
    Workspace bad;
    bad.width_px = 0;
    EXPECT_THROW(Scene(bad, {}), ValidationError);
}

TEST(Scene, ApplyMoveIdentity) {
    Scene s(Workspace{}, {obj("e", "eggplant", 100, 100, 60, 30, 0.2)});
    const auto& e = s.at("e");
    EXPECT_EQ(s.apply_move({"e", e.box.cx(), e.box.cy(), e.rotation(), std::nullopt, false}), s);
}

TEST(Scene, ApplyMoveChangesOnlyTarget) {
    Scene s(Workspace{}, {obj("e", "eggplant", 100, 100, 60, 30), obj("p", "plate", 400, 300, 100, 100)});
    const Scene t = s.apply_move({"e", 300, 100, 0.0, std::nullopt, false});
    EXPECT_EQ(t.at("p"), s.at("p"));
    EXPECT_EQ(t.at("e").centroid(), (Point2{300, 100}));
    EXPECT_EQ(s.at("e").centroid(), (Point2{100, 100}));  // source untouched
}

TEST(Scene, ApplyMoveRejectsCollisionAndUnknown) {
    Scene s(Workspace{}, {obj("e", "eggplant", 100, 100, 60, 30), obj("p", "plate", 400, 300, 100, 100)});
    EXPECT_THROW(s.apply_move({"e", 400, 300, 0.0, std::nullopt, false}), ValidationError);
    EXPECT_THROW(s.apply_move({"x", 200, 200, 0.0, std::nullopt, false}), ValidationError);
    EXPECT_NO_THROW(s.apply_move({"e", 400, 300, 0.0, std::string("p"), false}));
}

TEST(Scene, ImmovableObjectsStay) {
    auto p = obj("p", "plate", 400, 300, 100, 100);
    p.movable = false;
    Scene s(Workspace{}, {p});
    EXPECT_TRUE(s.move_violation({"p", 300, 300, 0.0, std::nullopt, false}).has_value());
}

TEST(Scene, ApplyMovesValidatesFinalStateOnly) {
    // Swap two objects: sequentially this collides, as a batch it does not.
    Scene s(Workspace{}, {obj("a", "apple", 100, 100, 40, 40), obj("b", "apple", 200, 100, 40, 40)});
    const std::vector<Placement> swap{{"a", 200, 100, 0, std::nullopt, false},
                                      {"b", 100, 100, 0, std::nullopt, false}};
    EXPECT_THROW(s.apply_move(swap[0]), ValidationError);
    const Scene t = s.apply_moves(swap);
    EXPECT_EQ(t.at("a").centroid(), (Point2{200, 100}));
}

TEST(Scene, RelevantObjects) {
    Scene s(Workspace{}, {obj("apple", "Apple", 100, 100, 40, 40), obj("banana", "banana", 200, 100, 40, 40),
                          obj("cup", "cup", 300, 100, 40, 40)});
    const std::vector<std::string> cats{"apple", "banana", "others"};
    const auto r = s.relevant_objects(cats);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].id, "apple");
    EXPECT_EQ(r[1].id, "banana");
    EXPECT_TRUE(s.relevant_objects(std::vector<std::string>{}).empty());
}

TEST(Scene, RelevantObjectsKeepsDuplicatesInOrder) {
    Scene s(Workspace{}, {obj("potato-1", "potato", 100, 100, 40, 40), obj("plate", "plate", 300, 300, 100, 100),
                          obj("potato-2", "potato", 500, 100, 40, 40)});
    const auto r = s.relevant_objects(std::vector<std::string>{"potato"});
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].id, "potato-1");
    EXPECT_EQ(r[1].id, "potato-2");
}

TEST(SceneJson, RoundTripsFixtures) {
    for (const char* name : {"scene1", "scene2", "scene3"}) {
        const auto s = load_scene_file((oracle::data_dir() / "scenes" / (std::string(name) + ".json")).string());
        EXPECT_EQ(load_scene(save_scene(s)), s);
        EXPECT_EQ(save_scene(load_scene(save_scene(s))), save_scene(s));
    }
}

TEST(SceneJson, MalformedDocuments) {
    EXPECT_THROW(load_scene("{"), ParseError);
    EXPECT_THROW(load_scene("[]"), ParseError);
    EXPECT_THROW(load_scene(R"({"workspace": {"width_px": 640, "height_px": 480}, "objects": [{"id": "a"}]})"),
                 ParseError);
}
