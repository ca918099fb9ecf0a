#include <gtest/gtest.h>

#include "rearrange/language.hpp"

using namespace rearrange;

TEST(Tokens, LowercaseAlnumRuns) {
    EXPECT_EQ(word_tokens("Put the Apple, then 2 cups!"),
              (std::vector<std::string>{"put", "the", "apple", "then", "2", "cups"}));
    EXPECT_TRUE(word_tokens("  ,. ").empty());
}

TEST(Jaccard, FrozenValues) {
    EXPECT_EQ(token_jaccard_score("put the apple on a plate", "put the apple on a plate"), 100);
    // {the} / {put,the,apple,on,a,plate,stack,red,cube}
    EXPECT_EQ(token_jaccard_score("put the apple on a plate", "stack the red cube"), 11);
    // {an,a} / 10 words
    EXPECT_EQ(token_jaccard_score("place an apple on a plate", "put an orange in a bowl"), 20);
    EXPECT_EQ(token_jaccard_score("apple", "banana"), 0);
}

TEST(Jaccard, SymmetricAndBounded) {
    const std::vector<std::string> s{"put the eggplant behind the plate", "cup left of plate", "x",
                                     "put the potatoes together", "Put The Eggplant"};
    for (const auto& a : s) {
        for (const auto& b : s) {
            const int v = token_jaccard_score(a, b);
            EXPECT_EQ(v, token_jaccard_score(b, a));
            EXPECT_GE(v, 0);
            EXPECT_LE(v, 100);
        }
    }
}

TEST(SplitSequential, Clauses) {
    EXPECT_EQ(split_sequential("put the eggplant on the plate, then beside the plate"),
              (std::vector<std::string>{"put the eggplant on the plate", "beside the plate"}));
    EXPECT_EQ(split_sequential("put the eggplant behind the plate"),
              (std::vector<std::string>{"put the eggplant behind the plate"}));
    EXPECT_EQ(split_sequential("put the eggplant beside the potato, then put the eggplant on the plate"),
              (std::vector<std::string>{"put the eggplant beside the potato", "put the eggplant on the plate"}));
    EXPECT_EQ(split_sequential("put the cup left of the bowl and then right of the plate."),
              (std::vector<std::string>{"put the cup left of the bowl", "right of the plate"}));
}

TEST(AttachSubject, ReattachesVerbAndSubject) {
    EXPECT_EQ(attach_subject("beside the plate", "put the eggplant on the plate"),
              "put the eggplant beside the plate");
    EXPECT_EQ(attach_subject("far away from the carrot", "put the eggplant beside the carrot"),
              "put the eggplant far away from the carrot");
    EXPECT_EQ(attach_subject("put the eggplant on the plate", "put the eggplant beside the potato"),
              "put the eggplant on the plate");
}

TEST(FindRelation, LongestPhraseAtEarliestPosition) {
    const auto t = word_tokens("put the eggplant on the right of the plate");
    const auto m = find_relation(t);
    ASSERT_TRUE(m);
    EXPECT_EQ(m->kind, RelationKind::right_of);
    EXPECT_EQ(m->begin, 3u);
    EXPECT_EQ(m->end, 7u);

    const auto far = word_tokens("put it far away from the plate");
    ASSERT_TRUE(find_relation(far));
    EXPECT_EQ(find_relation(far)->kind, RelationKind::far_from);
    EXPECT_EQ(find_relation(word_tokens("put the potatoes together"))->kind, RelationKind::together);
    EXPECT_EQ(find_relation(word_tokens("put the cup in front of the bowl"))->kind,
              RelationKind::in_front_of);
    EXPECT_EQ(find_relation(word_tokens("put the cup in the bowl"))->kind, RelationKind::on);
    EXPECT_FALSE(find_relation(word_tokens("wave at the camera")));
}

TEST(RelationKinds, RoundTripNames) {
    for (auto k : {RelationKind::on, RelationKind::left_of, RelationKind::right_of, RelationKind::in_front_of,
                   RelationKind::behind, RelationKind::beside, RelationKind::far_from, RelationKind::together}) {
        EXPECT_EQ(relation_kind_from_string(to_string(k)), k);
    }
    EXPECT_FALSE(relation_kind_from_string("under"));
}

TEST(Lexicon, NounsInOrderSingularized) {
    EXPECT_EQ(lexicon_objects("put the apple next to the banana"),
              (std::vector<std::string>{"apple", "banana"}));
    EXPECT_EQ(lexicon_objects("put the potatoes on the plate"),
              (std::vector<std::string>{"potato", "plate"}));
    EXPECT_EQ(lexicon_objects("put the cherries beside the glasses"),
              (std::vector<std::string>{"cherry", "glass"}));
}

TEST(Plural, Forms) {
    EXPECT_TRUE(is_plural_of("apples", "apple"));
    EXPECT_TRUE(is_plural_of("potatoes", "potato"));
    EXPECT_TRUE(is_plural_of("cherries", "cherry"));
    EXPECT_FALSE(is_plural_of("apple", "apple"));
    EXPECT_FALSE(is_plural_of("plates", "plant"));
}

TEST(Strings, JoinTrim) {
    EXPECT_EQ(join(std::vector<std::string>{"a", "b"}, ", "), "a, b");
    EXPECT_EQ(trim("  x y \n"), "x y");
}
