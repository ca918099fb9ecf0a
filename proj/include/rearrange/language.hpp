#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Small rule-based language helpers shared by the scripted chat backend and
// the relation parser. Nothing here is meant to be a general NLP tool: it
// covers the tabletop instruction vocabulary.

namespace rearrange {

enum class RelationKind { on, left_of, right_of, in_front_of, behind, beside, far_from, together };

std::string_view to_string(RelationKind kind);
std::optional<RelationKind> relation_kind_from_string(std::string_view name);

// Lowercase runs of [a-z0-9].
std::vector<std::string> word_tokens(std::string_view text);

// round(100 * |A ∩ B| / |A ∪ B|) over lowercase word sets.
int token_jaccard_score(std::string_view a, std::string_view b);

// Splits a sequential instruction at ", then" / "then" clause boundaries.
// Clauses are trimmed; a single clause is returned for plain instructions.
std::vector<std::string> split_sequential(std::string_view instruction);

struct RelationMatch {
    RelationKind kind;
    std::size_t begin;  // token index of the first phrase token
    std::size_t end;    // one past the last phrase token
};

// Earliest relation phrase in a token list; at one position the longest
// phrase wins ("on the right of" before "on").
std::optional<RelationMatch> find_relation(std::span<const std::string> tokens);

bool is_action_verb(std::string_view word);
bool is_article(std::string_view word);

// Clause without a leading verb ("beside the plate") gets the subject phrase
// of `previous` re-attached ("put the eggplant beside the plate").
std::string attach_subject(std::string_view clause, std::string_view previous);

// Known kitchen-object nouns in order of first appearance, singularized.
std::vector<std::string> lexicon_objects(std::string_view instruction);

// Singular form of `word` if it is a simple plural of `singular`.
bool is_plural_of(std::string_view word, std::string_view singular);

std::string join(std::span<const std::string> parts, std::string_view sep);
std::string trim(std::string_view s);

}  // namespace rearrange
