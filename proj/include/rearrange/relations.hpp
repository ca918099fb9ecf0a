#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rearrange/language.hpp"
#include "rearrange/scene.hpp"

namespace rearrange {

// One spatial relation of an instruction step. `together` has no anchors.
struct RelationSpec {
    RelationKind kind = RelationKind::beside;
    std::vector<std::string> subject_ids;
    std::vector<std::string> anchor_ids;
    int step_index = 0;

    friend bool operator==(const RelationSpec&, const RelationSpec&) = default;
};

// e.g. "right_of(eggplant -> plate)@0"
std::string describe(const RelationSpec& spec);

// {"kind", "subjects", "anchors", "step"}; from_json throws ParseError.
nlohmann::json relation_to_json(const RelationSpec& spec);
RelationSpec relation_from_json(const nlohmann::json& j);

// Thresholds are fractions of the workspace diagonal.
struct PredicateConfig {
    double beside_ratio = 0.12;
    double far_ratio = 0.4;
    // Camera frame: the front of the table is the bottom of the image (+y).
    bool front_is_positive_y = true;
};

// Rule-based parse of a (possibly sequential) instruction against the scene
// it starts from. One spec per step, two for the distributive form
// ("one potato to the left of the plate and the other to the right").
// Plural nouns bind every object of that category. Throws ParseError naming
// the clause when no relation phrase is recognized or a noun is unknown.
std::vector<RelationSpec> parse_relation(std::string_view instruction, const Scene& scene);

// Parse of a single clause; `inherited_subjects` fills in a subjectless
// clause ("beside the plate").
std::vector<RelationSpec> parse_clause(std::string_view clause, const Scene& scene, int step_index,
                                       const std::vector<std::string>& inherited_subjects = {});

// Geometric predicate. Throws ValidationError for an unknown id.
//   right_of/left_of:    dx > 0 (< 0), disjoint, |dy| <= |dx|
//   in_front_of/behind:  dy > 0 (< 0) in the front frame, disjoint, |dx| <= |dy|
//   on:                  subject center inside anchor, smaller area, stacked_on anchor
//   beside:              disjoint and 0 < gap <= beside_ratio * diagonal
//   far_from:            centroid distance >= far_ratio * diagonal
//   together:            subjects pairwise disjoint, pairwise gap <= beside_ratio * diagonal
// with d the centroid displacement anchor -> subject.
bool check(const Scene& scene, const RelationSpec& spec, const PredicateConfig& config = {});

// Analytic solver: placements (applied in order) that make `spec` hold in a
// valid scene. The first candidate for right_of is the anchor's edge plus the
// subject's half extent plus a 20 px margin, on the anchor's horizontal line.
// Throws Error when no candidate pose satisfies the predicate.
std::vector<Placement> solve_relation(const Scene& scene, const RelationSpec& spec,
                                      const PredicateConfig& config = {});

}  // namespace rearrange
