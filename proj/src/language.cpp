#include "rearrange/language.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>

namespace rearrange {

namespace {

struct Phrase {
    std::vector<std::string_view> words;
    RelationKind kind;
};

const std::vector<Phrase>& relation_phrases() {
    static const std::vector<Phrase> phrases = [] {
        std::vector<Phrase> p{
            {{"on", "the", "right", "side", "of"}, RelationKind::right_of},
            {{"on", "the", "left", "side", "of"}, RelationKind::left_of},
            {{"on", "the", "right", "of"}, RelationKind::right_of},
            {{"on", "the", "left", "of"}, RelationKind::left_of},
            {{"to", "the", "right", "of"}, RelationKind::right_of},
            {{"to", "the", "left", "of"}, RelationKind::left_of},
            {{"to", "the", "right"}, RelationKind::right_of},
            {{"to", "the", "left"}, RelationKind::left_of},
            {{"right", "of"}, RelationKind::right_of},
            {{"left", "of"}, RelationKind::left_of},
            {{"in", "front", "of"}, RelationKind::in_front_of},
            {{"in", "back", "of"}, RelationKind::behind},
            {{"behind"}, RelationKind::behind},
            {{"next", "to"}, RelationKind::beside},
            {{"close", "to"}, RelationKind::beside},
            {{"beside"}, RelationKind::beside},
            {{"near"}, RelationKind::beside},
            {{"far", "away", "from"}, RelationKind::far_from},
            {{"far", "from"}, RelationKind::far_from},
            {{"away", "from"}, RelationKind::far_from},
            {{"on", "top", "of"}, RelationKind::on},
            {{"onto"}, RelationKind::on},
            {{"into"}, RelationKind::on},
            {{"inside"}, RelationKind::on},
            {{"on"}, RelationKind::on},
            {{"in"}, RelationKind::on},
            {{"together"}, RelationKind::together},
        };
        std::stable_sort(p.begin(), p.end(), [](const Phrase& a, const Phrase& b) {
            return a.words.size() > b.words.size();
        });
        return p;
    }();
    return phrases;
}

constexpr std::array<std::string_view, 8> kVerbs{"put", "place", "move", "set",
                                                 "stack", "bring", "arrange", "keep"};
constexpr std::array<std::string_view, 4> kArticles{"the", "a", "an", "one"};

const std::set<std::string, std::less<>>& object_lexicon() {
    static const std::set<std::string, std::less<>> words{
        "apple",    "banana",  "orange",  "lemon",     "lime",       "pear",     "peach",
        "plum",     "grape",   "kiwi",    "mango",     "avocado",    "cherry",   "strawberry",
        "tomato",   "potato",  "carrot",  "eggplant",  "pineapple",  "cucumber", "pepper",
        "onion",    "garlic",  "broccoli", "corn",     "mushroom",   "lettuce",  "cabbage",
        "zucchini", "watermelon", "bread", "cheese",   "egg",        "plate",    "bowl",
        "cup",      "mug",     "glass",   "bottle",    "fork",       "knife",    "spoon",
        "spatula",  "pan",     "pot",     "lid",       "tray",       "napkin",   "sponge",
        "cube",     "block",   "box",     "can",       "jar",        "basket",   "toy",
    };
    return words;
}

std::optional<std::string> lexicon_singular(std::string_view word) {
    const auto& lex = object_lexicon();
    if (lex.count(word)) return std::string(word);
    for (const auto& entry : lex) {
        if (is_plural_of(word, entry)) return entry;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(RelationKind kind) {
    switch (kind) {
        case RelationKind::on: return "on";
        case RelationKind::left_of: return "left_of";
        case RelationKind::right_of: return "right_of";
        case RelationKind::in_front_of: return "in_front_of";
        case RelationKind::behind: return "behind";
        case RelationKind::beside: return "beside";
        case RelationKind::far_from: return "far_from";
        case RelationKind::together: return "together";
    }
    return "unknown";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view name) {
    for (auto k : {RelationKind::on, RelationKind::left_of, RelationKind::right_of,
                   RelationKind::in_front_of, RelationKind::behind, RelationKind::beside,
                   RelationKind::far_from, RelationKind::together}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

int token_jaccard_score(std::string_view a, std::string_view b) {
    const auto ta = word_tokens(a), tb = word_tokens(b);
    const std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
    std::size_t inter = 0;
    for (const auto& w : sa) inter += sb.count(w);
    const std::size_t uni = sa.size() + sb.size() - inter;
    if (uni == 0) return 0;
    return static_cast<int>(std::lround(100.0 * static_cast<double>(inter) /
                                        static_cast<double>(uni)));
}

std::string trim(std::string_view s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split_sequential(std::string_view instruction) {
    const auto strip = [](std::string_view s) {
        std::string t = trim(s);
        while (!t.empty() && (t.back() == ',' || t.back() == '.' || t.back() == ';')) {
            t.pop_back();
            t = trim(t);
        }
        // "..., and then ..." leaves a dangling conjunction on the left clause.
        if (t.size() >= 4 && t.compare(t.size() - 4, 4, " and") == 0) {
            t = trim(std::string_view(t).substr(0, t.size() - 4));
            while (!t.empty() && t.back() == ',') t.pop_back();
        }
        return trim(t);
    };

    std::vector<std::string> clauses;
    std::size_t start = 0;
    const std::size_t n = instruction.size();
    for (std::size_t i = 0; i + 4 <= n; ++i) {
        const bool word_start = i == 0 || !std::isalnum(static_cast<unsigned char>(instruction[i - 1]));
        const bool word_end = i + 4 == n || !std::isalnum(static_cast<unsigned char>(instruction[i + 4]));
        if (!word_start || !word_end) continue;
        std::string w(instruction.substr(i, 4));
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (w != "then") continue;
        auto left = strip(instruction.substr(start, i - start));
        if (!left.empty()) clauses.push_back(std::move(left));
        start = i + 4;
    }
    auto last = strip(instruction.substr(start));
    if (!last.empty()) clauses.push_back(std::move(last));
    return clauses;
}

std::optional<RelationMatch> find_relation(std::span<const std::string> tokens) {
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        for (const auto& phrase : relation_phrases()) {
            if (pos + phrase.words.size() > tokens.size()) continue;
            bool match = true;
            for (std::size_t k = 0; k < phrase.words.size() && match; ++k) {
                match = tokens[pos + k] == phrase.words[k];
            }
            if (match) return RelationMatch{phrase.kind, pos, pos + phrase.words.size()};
        }
    }
    return std::nullopt;
}

bool is_action_verb(std::string_view word) {
    return std::find(kVerbs.begin(), kVerbs.end(), word) != kVerbs.end();
}

bool is_article(std::string_view word) {
    return std::find(kArticles.begin(), kArticles.end(), word) != kArticles.end();
}

std::string attach_subject(std::string_view clause, std::string_view previous) {
    const auto tokens = word_tokens(clause);
    if (tokens.empty() || is_action_verb(tokens.front())) return trim(clause);
    const auto prev = word_tokens(previous);
    const auto rel = find_relation(prev);
    if (!rel || rel->begin == 0) return trim(clause);
    std::vector<std::string> subject(prev.begin(), prev.begin() + static_cast<long>(rel->begin));
    return join(subject, " ") + " " + trim(clause);
}

std::vector<std::string> lexicon_objects(std::string_view instruction) {
    std::vector<std::string> out;
    for (const auto& w : word_tokens(instruction)) {
        if (auto s = lexicon_singular(w)) {
            if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
        }
    }
    return out;
}

bool is_plural_of(std::string_view word, std::string_view singular) {
    if (singular.empty()) return false;
    const std::string s(singular);
    if (word == s + "s" || word == s + "es") return true;
    return s.back() == 'y' && word == s.substr(0, s.size() - 1) + "ies";
}

}  // namespace rearrange
