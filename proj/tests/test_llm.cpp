#include <gtest/gtest.h>

#include "rearrange/error.hpp"
#include "rearrange/llm.hpp"
#include "rearrange/oracle_backend.hpp"
#include "rearrange/prompts.hpp"
#include "rearrange/reasoner.hpp"
#include "rearrange/scene.hpp"

using namespace rearrange;

TEST(ParseInt, FirstInteger) {
    EXPECT_EQ(parse_int("Score: 85/100"), 85);
    EXPECT_EQ(parse_int("```\n-3\n```"), -3);
    EXPECT_EQ(parse_int("well-42"), 42);
    EXPECT_THROW(parse_int("no digits"), ParseError);
}

TEST(ParseStringList, ToleratesProse) {
    EXPECT_EQ(parse_string_list("Objects: [\"apple\", \"banana\", \"others\"]"),
              (std::vector<std::string>{"apple", "banana", "others"}));
    EXPECT_EQ(parse_string_list("sure: [apple, 'banana']"), (std::vector<std::string>{"apple", "banana"}));
    EXPECT_THROW(parse_string_list("apple, banana"), ParseError);
}

TEST(ParsePlacement, ToleratesProse) {
    const auto r = parse_placement_record("I suggest {\"x\": 420.0, \"y\": 240.0, \"rotation\": 0.0} as the goal.");
    EXPECT_EQ(r.x, 420.0);
    EXPECT_EQ(r.y, 240.0);
    EXPECT_EQ(r.rotation, 0.0);
    EXPECT_FALSE(r.id);
    EXPECT_THROW(parse_placement_record("{\"x\": \"left\"}"), ParseError);
}

TEST(ParsePlacement, IdAliasesAndOptionalFields) {
    const auto rs = parse_placement_records(
        "```json\n[{\"object\": \"a\", \"x\": 1, \"y\": 2}, {\"object_id\": \"b\", \"x\": 3, \"y\": 4, "
        "\"stacked_on\": \"a\"}]\n```");
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs[0].id, "a");
    EXPECT_FALSE(rs[0].rotation);
    EXPECT_EQ(rs[1].id, "b");
    EXPECT_EQ(rs[1].stacked_on, "a");
}

TEST(Render, ParsersInvertWriters) {
    EXPECT_EQ(parse_int(render_int(-17)), -17);
    const std::vector<std::string> list{"apple", "a \"quoted\" name", "others"};
    EXPECT_EQ(parse_string_list(render_string_list(list)), list);
    const PlacementRecord r{std::string("e"), 430.25, 240.0, 0.5, std::string("plate")};
    EXPECT_EQ(parse_placement_record(render_placement_record(r)), r);
    const std::vector<PlacementRecord> rs{r, PlacementRecord{std::nullopt, 1, 2, std::nullopt, std::nullopt}};
    EXPECT_EQ(parse_placement_records(render_placement_records(rs)), rs);
}

TEST(ChatRequest, Validation) {
    ChatRequest req;
    EXPECT_THROW(req.validate(), std::invalid_argument);
    req.messages.push_back({Role::user, "hi"});
    EXPECT_NO_THROW(req.validate());
    req.temperature = -1;
    EXPECT_THROW(req.validate(), std::invalid_argument);
    req.temperature = 0;
    req.max_tokens = 0;
    EXPECT_THROW(req.validate(), std::invalid_argument);
}

TEST(Fingerprint, DependsOnTagAndContent) {
    const auto a = similarity_request("x", "y");
    auto b = a;
    EXPECT_EQ(request_fingerprint(a), request_fingerprint(b));
    b.tag = RequestTag::placement;
    EXPECT_NE(request_fingerprint(a), request_fingerprint(b));
    EXPECT_NE(request_fingerprint(a), request_fingerprint(similarity_request("x", "z")));
    EXPECT_EQ(request_fingerprint(a).size(), 16u);
}

TEST(ScriptedBackend, Similarity) {
    ScriptedBackend llm;
    EXPECT_EQ(llm.complete(similarity_request("put the cup down", "put the cup down")), "100");
    EXPECT_EQ(llm.complete(similarity_request("put the apple on a plate", "stack the red cube")), "11");
}

TEST(ScriptedBackend, Extraction) {
    ScriptedBackend llm;
    EXPECT_EQ(parse_string_list(llm.complete(object_extraction_request("put the apple next to the banana"))),
              (std::vector<std::string>{"apple", "banana", "others"}));
    EXPECT_EQ(parse_string_list(
                  llm.complete(object_extraction_request("put the eggplant on the right of the plate"))),
              (std::vector<std::string>{"eggplant", "plate", "others"}));
}

TEST(ScriptedBackend, StepPlanning) {
    ScriptedBackend llm;
    EXPECT_EQ(parse_string_list(llm.complete(step_planning_request(
                  "put the eggplant beside the carrot, then far away from the carrot"))),
              (std::vector<std::string>{"put the eggplant beside the carrot",
                                        "put the eggplant far away from the carrot"}));
}

TEST(ScriptedBackend, CannedRepliesWin) {
    ScriptedBackend llm({CannedRule{"similarity", {"banana"}, "7"}});
    const auto req = similarity_request("a", "b");
    llm.add_canned(request_fingerprint(req), "canned verbatim");
    EXPECT_EQ(llm.complete(req), "canned verbatim");
    EXPECT_EQ(llm.complete(similarity_request("banana", "split")), "7");
    EXPECT_EQ(llm.complete(similarity_request("kiwi", "kiwi")), "100");
}

TEST(CannedRules, ParseDocument) {
    const auto rules = parse_canned_rules(
        R"([{"tag": "*", "contains": ["apple"], "reply": "[\"apple\"]"}, {"reply": "0"}])");
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_EQ(rules[0].tag, "*");
    EXPECT_EQ(rules[0].contains, (std::vector<std::string>{"apple"}));
    EXPECT_TRUE(rules[1].contains.empty());
    EXPECT_THROW(parse_canned_rules("{"), ParseError);
}

TEST(ScriptedBackend, PlacementEchoesCurrentPoses) {
    const Scene scene(Workspace{}, {ObjectRecord{"e", "eggplant", OrientedBox(100, 100, 60, 30, 0.25), true, {}},
                                    ObjectRecord{"p", "plate", OrientedBox(300, 300, 100, 100), true, {}}});
    ScriptedBackend llm;
    const auto req = build_prompt(scene, "put the eggplant near the plate", std::nullopt,
                                  std::vector<std::string>{"e"})
                         .to_request();
    const auto rs = parse_placement_records(llm.complete(req));
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0].id, "e");
    EXPECT_EQ(rs[0].x, 100.0);
    EXPECT_EQ(rs[0].rotation, 0.25);
}

TEST(OracleBackend, RightOfExample) {
    const Scene scene(Workspace{}, {ObjectRecord{"plate", "plate", OrientedBox(320, 240, 120, 120), true, {}},
                                    ObjectRecord{"eggplant", "eggplant", OrientedBox(160, 380, 60, 30), true, {}}});
    OracleBackend llm;
    const auto req = build_prompt(scene, "put the eggplant on the right of the plate", std::nullopt,
                                  std::vector<std::string>{"plate", "eggplant"})
                         .to_request();
    const auto rs = parse_placement_records(llm.complete(req));
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0].id, "eggplant");
    EXPECT_DOUBLE_EQ(rs[0].x, 430.0);
    EXPECT_DOUBLE_EQ(rs[0].y, 240.0);
}

TEST(OracleBackend, DelegatesOtherTags) {
    OracleBackend llm;
    EXPECT_EQ(llm.complete(similarity_request("same", "same")), "100");
    ChatRequest bare;
    bare.messages.push_back({Role::user, "no trailer here"});
    EXPECT_THROW(llm.complete(bare), BackendError);
}
