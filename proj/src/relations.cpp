#include "rearrange/relations.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rearrange/error.hpp"

namespace rearrange {

namespace {

using Tokens = std::vector<std::string>;

Tokens slice(const Tokens& t, std::size_t b, std::size_t e) {
    return Tokens(t.begin() + static_cast<long>(std::min(b, t.size())),
                  t.begin() + static_cast<long>(std::min(e, t.size())));
}

Tokens strip_articles(Tokens t) {
    while (!t.empty() && is_article(t.front())) t.erase(t.begin());
    return t;
}

struct Binding {
    std::vector<std::string> ids;
    bool plural = false;
};

// Binds a noun phrase to scene objects. Multi-word categories are tried
// before the head noun alone.
std::optional<Binding> bind_phrase(const Tokens& phrase, const Scene& scene) {
    const Tokens words = strip_articles(phrase);
    if (words.empty()) return std::nullopt;
    for (std::size_t start = 0; start < words.size(); ++start) {
        const std::string cand = join(slice(words, start, words.size()), " ");
        Binding singular, plural;
        for (const auto& o : scene.objects()) {
            const auto cat = to_lower(o.category);
            if (cand == cat) singular.ids.push_back(o.id);
            if (is_plural_of(cand, cat)) plural.ids.push_back(o.id);
        }
        if (!singular.ids.empty()) {
            singular.ids.resize(1);
            return singular;
        }
        if (!plural.ids.empty()) {
            plural.plural = true;
            return plural;
        }
    }
    return std::nullopt;
}

// "the apple and the banana" binds both.
std::optional<std::vector<std::string>> bind_subjects(const Tokens& phrase, const Scene& scene) {
    std::vector<std::string> ids;
    Tokens part;
    auto flush = [&]() -> bool {
        if (part.empty()) return true;
        auto b = bind_phrase(part, scene);
        if (!b) return false;
        for (auto& id : b->ids) {
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
        }
        part.clear();
        return true;
    };
    for (const auto& w : phrase) {
        if (w == "and") {
            if (!flush()) return std::nullopt;
        } else {
            part.push_back(w);
        }
    }
    if (!flush() || ids.empty()) return std::nullopt;
    return ids;
}

// Every object of the category named by a singular noun (for "one X ... the other").
std::vector<std::string> all_of_category(const Tokens& phrase, const Scene& scene) {
    const Tokens words = strip_articles(phrase);
    std::vector<std::string> ids;
    if (words.empty()) return ids;
    const auto& noun = words.back();
    for (const auto& o : scene.objects()) {
        const auto cat = to_lower(o.category);
        if (noun == cat || is_plural_of(noun, cat)) ids.push_back(o.id);
    }
    return ids;
}

[[noreturn]] void fail(std::string_view clause, const std::string& why) {
    throw ParseError(why + " in '" + std::string(clause) + "'", std::string(clause));
}

std::vector<std::string> bind_anchor(const Tokens& phrase, const Scene& scene,
                                     std::string_view clause) {
    auto b = bind_subjects(phrase, scene);
    if (!b) fail(clause, "unknown anchor '" + join(phrase, " ") + "'");
    return *b;
}

void ensure_distinct(const RelationSpec& spec, std::string_view clause) {
    for (const auto& s : spec.subject_ids) {
        if (std::find(spec.anchor_ids.begin(), spec.anchor_ids.end(), s) != spec.anchor_ids.end()) {
            fail(clause, "object '" + s + "' is both subject and anchor");
        }
    }
}

}  // namespace

std::string describe(const RelationSpec& spec) {
    std::string out(to_string(spec.kind));
    out += "(" + join(spec.subject_ids, ",");
    if (!spec.anchor_ids.empty()) out += " -> " + join(spec.anchor_ids, ",");
    out += ")@" + std::to_string(spec.step_index);
    return out;
}

nlohmann::json relation_to_json(const RelationSpec& spec) {
    return nlohmann::json{{"kind", std::string(to_string(spec.kind))},
                          {"subjects", spec.subject_ids},
                          {"anchors", spec.anchor_ids},
                          {"step", spec.step_index}};
}

RelationSpec relation_from_json(const nlohmann::json& j) {
    try {
        const auto name = j.at("kind").get<std::string>();
        const auto kind = relation_kind_from_string(name);
        if (!kind) throw ParseError("unknown relation kind '" + name + "'", j.dump());
        RelationSpec spec{*kind, j.at("subjects").get<std::vector<std::string>>(),
                          j.value("anchors", std::vector<std::string>{}), j.value("step", 0)};
        if (spec.subject_ids.empty()) throw ParseError("relation without subjects", j.dump());
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed relation: ") + e.what(), j.dump());
    }
}

std::vector<RelationSpec> parse_clause(std::string_view clause, const Scene& scene, int step_index,
                                       const std::vector<std::string>& inherited_subjects) {
    Tokens tokens = word_tokens(clause);
    while (!tokens.empty() && is_action_verb(tokens.front())) tokens.erase(tokens.begin());
    const auto rel = find_relation(tokens);
    if (!rel) fail(clause, "unrecognized relation phrase");

    const Tokens subject = slice(tokens, 0, rel->begin);
    Tokens anchor = slice(tokens, rel->end, tokens.size());

    // Distributive form: "one X <rel> <anchor> and the other <rel2> [anchor2]".
    if (!subject.empty() && subject.front() == "one") {
        for (std::size_t i = 0; i + 1 < anchor.size(); ++i) {
            if (anchor[i] != "and") continue;
            std::size_t j = i + 1;
            if (anchor[j] == "the") ++j;
            if (j >= anchor.size() || (anchor[j] != "other" && anchor[j] != "another")) continue;
            const Tokens rest = slice(anchor, j + 1, anchor.size());
            const auto rel2 = find_relation(rest);
            if (!rel2) fail(clause, "unrecognized relation phrase after 'the other'");
            const Tokens anchor1 = slice(anchor, 0, i);
            Tokens anchor2 = slice(rest, rel2->end, rest.size());
            if (strip_articles(anchor2).empty()) anchor2 = anchor1;
            const auto ids = all_of_category(subject, scene);
            if (ids.size() < 2) fail(clause, "distributive form needs two matching objects");
            RelationSpec first{rel->kind, {ids[0]}, bind_anchor(anchor1, scene, clause), step_index};
            RelationSpec second{rel2->kind, {ids[1]}, bind_anchor(anchor2, scene, clause), step_index};
            ensure_distinct(first, clause);
            ensure_distinct(second, clause);
            return {first, second};
        }
    }

    RelationSpec spec;
    spec.kind = rel->kind;
    spec.step_index = step_index;
    if (strip_articles(subject).empty()) {
        if (inherited_subjects.empty()) fail(clause, "missing subject");
        spec.subject_ids = inherited_subjects;
    } else {
        auto ids = bind_subjects(subject, scene);
        if (!ids) fail(clause, "unknown object '" + join(subject, " ") + "'");
        spec.subject_ids = *ids;
    }

    if (spec.kind == RelationKind::together) {
        if (spec.subject_ids.size() < 2) fail(clause, "'together' needs at least two objects");
    } else {
        if (strip_articles(anchor).empty()) fail(clause, "missing anchor object");
        spec.anchor_ids = bind_anchor(anchor, scene, clause);
    }
    ensure_distinct(spec, clause);
    return {spec};
}

std::vector<RelationSpec> parse_relation(std::string_view instruction, const Scene& scene) {
    const auto clauses = split_sequential(instruction);
    if (clauses.empty()) throw ParseError("empty instruction", std::string(instruction));
    std::vector<RelationSpec> out;
    std::vector<std::string> previous;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        auto specs = parse_clause(clauses[i], scene, static_cast<int>(i), previous);
        previous.clear();
        for (const auto& s : specs) previous.insert(previous.end(), s.subject_ids.begin(), s.subject_ids.end());
        out.insert(out.end(), specs.begin(), specs.end());
    }
    return out;
}

// --- predicates -------------------------------------------------------------

namespace {

bool pair_holds(RelationKind kind, const ObjectRecord& s, const ObjectRecord& a,
                const Workspace& ws, const PredicateConfig& cfg) {
    const double dx = s.box.cx() - a.box.cx();
    const double dy_raw = s.box.cy() - a.box.cy();
    const double dy = cfg.front_is_positive_y ? dy_raw : -dy_raw;
    const double diag = ws.diagonal();
    switch (kind) {
        case RelationKind::right_of:
            return dx > 0 && !overlaps(s.box, a.box) && std::abs(dy) <= std::abs(dx);
        case RelationKind::left_of:
            return dx < 0 && !overlaps(s.box, a.box) && std::abs(dy) <= std::abs(dx);
        case RelationKind::in_front_of:
            return dy > 0 && !overlaps(s.box, a.box) && std::abs(dx) <= std::abs(dy);
        case RelationKind::behind:
            return dy < 0 && !overlaps(s.box, a.box) && std::abs(dx) <= std::abs(dy);
        case RelationKind::on:
            return a.box.contains(s.centroid()) && s.box.area() < a.box.area() &&
                   s.stacked_on == a.id;
        case RelationKind::beside: {
            if (overlaps(s.box, a.box)) return false;
            const double gap = min_gap(s.box, a.box);
            return gap > 0 && gap <= cfg.beside_ratio * diag;
        }
        case RelationKind::far_from:
            return std::hypot(dx, dy_raw) >= cfg.far_ratio * diag;
        case RelationKind::together: {
            if (overlaps(s.box, a.box)) return false;
            return min_gap(s.box, a.box) <= cfg.beside_ratio * diag;
        }
    }
    return false;
}

}  // namespace

bool check(const Scene& scene, const RelationSpec& spec, const PredicateConfig& cfg) {
    const auto& ws = scene.workspace();
    if (spec.subject_ids.empty()) return false;
    if (spec.kind == RelationKind::together) {
        for (std::size_t i = 0; i < spec.subject_ids.size(); ++i) {
            for (std::size_t j = i + 1; j < spec.subject_ids.size(); ++j) {
                if (!pair_holds(spec.kind, scene.at(spec.subject_ids[i]),
                                scene.at(spec.subject_ids[j]), ws, cfg)) {
                    return false;
                }
            }
        }
        return spec.subject_ids.size() >= 2;
    }
    if (spec.anchor_ids.empty()) return false;
    for (const auto& sid : spec.subject_ids) {
        const auto& s = scene.at(sid);
        for (const auto& aid : spec.anchor_ids) {
            if (!pair_holds(spec.kind, s, scene.at(aid), ws, cfg)) return false;
        }
    }
    return true;
}

// --- solver -----------------------------------------------------------------

namespace {

constexpr double kMargin = 20.0;

std::vector<double> lateral_offsets(double limit, double step) {
    std::vector<double> out{0.0};
    for (double d = step; d <= limit + 1e-9; d += step) {
        out.push_back(d);
        out.push_back(-d);
    }
    return out;
}

struct Direction {
    double ux, uy;
};

double extent_along(const OrientedBox& b, const Direction& d) {
    return d.ux != 0.0 ? b.half_extent_x() : b.half_extent_y();
}

std::vector<Point2> directional_candidates(const OrientedBox& anchor, const OrientedBox& subject,
                                           const Direction& d, const std::vector<double>& gaps,
                                           const std::vector<double>& laterals) {
    std::vector<Point2> out;
    const double base = extent_along(anchor, d) + extent_along(subject, d);
    for (double g : gaps) {
        for (double lat : laterals) {
            out.push_back({anchor.cx() + d.ux * (base + g) - d.uy * lat,
                           anchor.cy() + d.uy * (base + g) + d.ux * lat});
        }
    }
    return out;
}

std::vector<Point2> on_candidates(const OrientedBox& anchor) {
    std::vector<Point2> out;
    const double c = std::cos(anchor.theta()), s = std::sin(anchor.theta());
    const double step = 4.0;
    for (double u = -0.5 * anchor.w(); u <= 0.5 * anchor.w(); u += step) {
        for (double v = -0.5 * anchor.h(); v <= 0.5 * anchor.h(); v += step) {
            out.push_back({anchor.cx() + c * u - s * v, anchor.cy() + s * u + c * v});
        }
    }
    std::stable_sort(out.begin(), out.end(), [&](const Point2& a, const Point2& b) {
        return std::hypot(a.x - anchor.cx(), a.y - anchor.cy()) <
               std::hypot(b.x - anchor.cx(), b.y - anchor.cy());
    });
    return out;
}

std::vector<Point2> far_candidates(const Scene& scene, const std::vector<const ObjectRecord*>& anchors) {
    const auto& ws = scene.workspace();
    std::vector<std::pair<double, Point2>> scored;
    for (double y = 5.0; y < ws.height_px; y += 10.0) {
        for (double x = 5.0; x < ws.width_px; x += 10.0) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto* a : anchors) d = std::min(d, std::hypot(x - a->box.cx(), y - a->box.cy()));
            scored.push_back({d, {x, y}});
        }
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Point2> out;
    out.reserve(scored.size());
    for (const auto& [d, p] : scored) out.push_back(p);
    return out;
}

std::vector<Point2> around(const OrientedBox& anchor, const OrientedBox& subject, double front_sign,
                           const std::vector<double>& gaps, const std::vector<double>& laterals) {
    std::vector<Point2> out;
    for (const Direction d : {Direction{1, 0}, Direction{-1, 0}, Direction{0, front_sign},
                              Direction{0, -front_sign}}) {
        auto c = directional_candidates(anchor, subject, d, gaps, laterals);
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

std::vector<Point2> candidates_for(const Scene& scene, const RelationSpec& spec,
                                   const ObjectRecord& subject,
                                   const std::vector<std::string>& placed,
                                   const PredicateConfig& cfg) {
    const double front = cfg.front_is_positive_y ? 1.0 : -1.0;
    std::vector<const ObjectRecord*> anchors;
    for (const auto& a : spec.anchor_ids) anchors.push_back(&scene.at(a));
    const std::vector<double> gaps{kMargin, 30, 40, 50, 60, 80, 100, 120, 150};
    switch (spec.kind) {
        case RelationKind::right_of:
            return directional_candidates(anchors[0]->box, subject.box, {1, 0}, gaps,
                                          lateral_offsets(80, 10));
        case RelationKind::left_of:
            return directional_candidates(anchors[0]->box, subject.box, {-1, 0}, gaps,
                                          lateral_offsets(80, 10));
        case RelationKind::in_front_of:
            return directional_candidates(anchors[0]->box, subject.box, {0, front}, gaps,
                                          lateral_offsets(80, 10));
        case RelationKind::behind:
            return directional_candidates(anchors[0]->box, subject.box, {0, -front}, gaps,
                                          lateral_offsets(80, 10));
        case RelationKind::beside:
            return around(anchors[0]->box, subject.box, front, {kMargin, 30, 40, 60},
                          lateral_offsets(60, 20));
        case RelationKind::on:
            return on_candidates(anchors[0]->box);
        case RelationKind::far_from:
            return far_candidates(scene, anchors);
        case RelationKind::together: {
            const auto& first = scene.at(placed.front());
            return around(first.box, subject.box, front, {15, kMargin, 30, 40},
                          lateral_offsets(40, 10));
        }
    }
    return {};
}

}  // namespace

std::vector<Placement> solve_relation(const Scene& scene, const RelationSpec& spec,
                                      const PredicateConfig& cfg) {
    if (spec.kind != RelationKind::together && spec.anchor_ids.empty()) {
        throw Error("relation " + describe(spec) + " has no anchor");
    }
    Scene working = scene;
    std::vector<Placement> out;
    std::vector<std::string> placed;

    for (std::size_t k = 0; k < spec.subject_ids.size(); ++k) {
        const auto& sid = spec.subject_ids[k];
        const ObjectRecord subject = working.at(sid);
        RelationSpec single{spec.kind, {sid}, spec.anchor_ids, spec.step_index};
        if (spec.kind == RelationKind::together) {
            if (placed.empty()) {
                placed.push_back(sid);  // the first subject stays where it is
                continue;
            }
            single.subject_ids = placed;
            single.subject_ids.push_back(sid);
        }

        std::optional<Placement> found;
        for (double rot : {subject.rotation(), 0.0, kPi / 2.0}) {
            const OrientedBox rotated = subject.box.with_pose(subject.box.cx(), subject.box.cy(), rot);
            ObjectRecord probe = subject;
            probe.box = rotated;
            for (const auto& c : candidates_for(working, spec, probe, placed, cfg)) {
                Placement p{sid, c.x, c.y, rot, std::nullopt, false};
                if (spec.kind == RelationKind::on) p.stacked_on = spec.anchor_ids.front();
                if (working.move_violation(p)) continue;
                Scene next = working.apply_move(p);
                if (!check(next, single, cfg)) continue;
                found = p;
                working = std::move(next);
                break;
            }
            if (found) break;
        }
        if (!found) throw Error("no pose satisfies " + describe(spec) + " for '" + sid + "'");
        out.push_back(*found);
        placed.push_back(sid);
    }
    return out;
}

}  // namespace rearrange
