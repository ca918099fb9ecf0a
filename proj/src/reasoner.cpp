#include "rearrange/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

#include "rearrange/language.hpp"
#include "rearrange/prompts.hpp"
#include "rearrange/scene_json.hpp"

namespace rearrange {

using nlohmann::json;

// --- template -----------------------------------------------------------------

PlacementTemplate parse_placement_template(std::string_view text) {
    std::map<std::string, std::string> sections;
    std::string current;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.front() == '@') {
            current = trim(line.substr(1));
            sections[current];
        } else if (!current.empty()) {
            auto& body = sections[current];
            if (!body.empty()) body += '\n';
            body += line;
        }
        pos = nl + 1;
    }
    PlacementTemplate t;
    auto take = [&](const char* name, std::string& out) {
        auto it = sections.find(name);
        if (it == sections.end()) {
            throw ParseError(std::string("placement template lacks @") + name, std::string(text));
        }
        out = it->second;
        while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
    };
    take("system", t.system);
    take("scene", t.scene);
    take("reference", t.reference);
    take("instruction", t.instruction);
    take("directive", t.directive);
    return t;
}

const PlacementTemplate& placement_template() {
    static const PlacementTemplate t = parse_placement_template(placement_template_text());
    return t;
}

namespace {

std::string substitute(std::string text, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        const std::string token = "{{" + key + "}}";
        for (auto pos = text.find(token); pos != std::string::npos;
             pos = text.find(token, pos + value.size())) {
            text.replace(pos, token.size(), value);
        }
    }
    return text;
}

std::string object_line(const ObjectRecord& o) {
    std::string line = "- id=" + o.id + " category=" + o.category + " centroid=(" +
                       format_decimal(o.box.cx()) + ", " + format_decimal(o.box.cy()) +
                       ") box=(" + format_decimal(o.box.w()) + " x " + format_decimal(o.box.h()) +
                       ") rotation=" + format_decimal(o.rotation()) +
                       " movable=" + (o.movable ? "yes" : "no");
    if (o.stacked_on) line += " stacked_on=" + *o.stacked_on;
    return line;
}

std::string object_lines(std::span<const ObjectRecord> objects) {
    std::string out;
    for (const auto& o : objects) {
        if (!out.empty()) out += '\n';
        out += object_line(o);
    }
    return out;
}

}  // namespace

std::string format_decimal(double value) {
    double r = std::round(value * 10.0) / 10.0;
    if (r == 0.0) r = 0.0;  // drops the sign of -0.0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", r);
    return buf;
}

std::string PromptBundle::user_text() const {
    std::string out = scene_block + "\n\n";
    if (reference_block) out += *reference_block + "\n\n";
    out += instruction_block + "\n\n" + directive + "\n\n" + trailer;
    return out;
}

ChatRequest PromptBundle::to_request() const {
    ChatRequest req;
    req.tag = RequestTag::placement;
    req.temperature = 0.0;
    req.max_tokens = 1024;
    req.messages.push_back({Role::system, system});
    req.messages.push_back({Role::user, user_text()});
    return req;
}

PromptBundle build_prompt(const Scene& scene, std::string_view instruction,
                          const std::optional<Experience>& reference,
                          std::optional<std::vector<std::string>> movable_ids) {
    const auto& t = placement_template();
    std::vector<std::string> movable;
    if (movable_ids) {
        movable = *movable_ids;
    } else {
        for (const auto& o : scene.objects()) {
            if (o.movable) movable.push_back(o.id);
        }
    }

    PromptBundle b;
    b.system = t.system;
    b.scene_block = substitute(t.scene, {{"width", std::to_string(scene.workspace().width_px)},
                                         {"height", std::to_string(scene.workspace().height_px)},
                                         {"objects", object_lines(scene.objects())}});
    if (reference) {
        b.reference_block =
            substitute(t.reference, {{"reference_instruction", reference->instruction},
                                     {"reference_objects", object_lines(reference->objects)}});
    }
    b.instruction_block = substitute(
        t.instruction, {{"instruction", std::string(instruction)},
                        {"movable", movable.empty() ? std::string("none") : join(movable, ", ")}});
    b.directive = t.directive;

    json trailer{{"instruction", std::string(instruction)},
                 {"workspace", workspace_to_json(scene.workspace())},
                 {"objects", objects_to_json(scene.objects())},
                 {"movable_ids", movable}};
    try {
        json rels = json::array();
        for (const auto& spec : parse_relation(instruction, scene)) rels.push_back(relation_to_json(spec));
        trailer["relations"] = rels;
    } catch (const ParseError&) {
        // Free-form instruction outside the relation grammar: no structured hint.
    }
    b.trailer = std::string(kTrailerBegin) + "\n" + trailer.dump() + "\n" + std::string(kTrailerEnd);
    return b;
}

// --- steps --------------------------------------------------------------------

StepPlan plan_steps(std::string_view instruction, ChatBackend& llm) {
    if (trim(instruction).empty()) throw std::invalid_argument("instruction must be nonempty");
    const auto reply = llm.complete(step_planning_request(instruction));
    StepPlan plan;
    for (const auto& s : parse_string_list(reply)) {
        auto t = trim(s);
        if (!t.empty()) plan.steps.push_back(std::move(t));
    }
    if (plan.steps.empty()) throw ParseError("step plan is empty", reply);
    return plan;
}

// --- prediction -----------------------------------------------------------------

namespace {

bool is_empty_list_reply(std::string_view reply) {
    const auto b = reply.find('[');
    if (b == std::string_view::npos) return false;
    const auto e = reply.find(']', b);
    return e != std::string_view::npos && trim(reply.substr(b + 1, e - b - 1)).empty();
}

std::vector<Placement> to_placements(const Scene& scene, std::string_view reply,
                                     const std::vector<std::string>& movable_ids) {
    const auto records = parse_placement_records(reply);
    if (records.empty() && !is_empty_list_reply(reply)) {
        throw ParseError("no placement found in reply", std::string(reply));
    }
    std::map<std::string, Placement> by_id;
    for (const auto& r : records) {
        std::string id;
        if (r.id) {
            id = *r.id;
        } else if (movable_ids.size() == 1) {
            id = movable_ids.front();
        } else {
            throw ParseError("placement without an object id", std::string(reply));
        }
        const auto* obj = scene.find(id);
        if (obj == nullptr) throw ValidationError("placement names unknown object '" + id + "'", {id});
        if (std::find(movable_ids.begin(), movable_ids.end(), id) == movable_ids.end()) {
            throw ValidationError("placement moves '" + id + "', which is not a movable relevant object",
                                  {id});
        }
        if (by_id.count(id)) throw ValidationError("two placements for '" + id + "'", {id});
        const double rot = r.rotation.value_or(obj->rotation());
        if (!std::isfinite(rot)) throw ValidationError("rotation for '" + id + "' is not finite", {id});
        if (r.stacked_on && scene.find(*r.stacked_on) == nullptr) {
            throw ValidationError("'" + id + "' is stacked on unknown object '" + *r.stacked_on + "'",
                                  {id, *r.stacked_on});
        }
        by_id[id] = Placement{id, r.x, r.y, rot, r.stacked_on, false};
    }
    std::vector<Placement> out;
    for (const auto& o : scene.objects()) {
        if (auto it = by_id.find(o.id); it != by_id.end()) out.push_back(it->second);
    }
    return out;
}

std::optional<std::string> out_of_bounds(const Scene& scene, const std::vector<Placement>& ps) {
    for (const auto& p : ps) {
        const auto& obj = scene.at(p.object_id);
        if (!box_in_bounds(scene.workspace(), obj.box.with_pose(p.x, p.y, p.rotation))) {
            return "The placement of " + p.object_id + " at (" + format_decimal(p.x) + ", " +
                   format_decimal(p.y) + ") with rotation " + format_decimal(p.rotation) +
                   " leaves the " + std::to_string(scene.workspace().width_px) + " x " +
                   std::to_string(scene.workspace().height_px) + " px workspace.";
        }
    }
    return std::nullopt;
}

}  // namespace

Prediction predict_placement(const Scene& scene, std::string_view step_instruction,
                             const std::optional<Experience>& reference, ChatBackend& llm,
                             const std::vector<std::string>& movable_ids) {
    for (const auto& id : movable_ids) {
        if (!scene.at(id).movable) throw ValidationError("object '" + id + "' is not movable", {id});
    }
    Prediction pred;
    auto request = build_prompt(scene, step_instruction, reference, movable_ids).to_request();
    pred.prompts.push_back(request.joined_content());
    auto reply = llm.complete(request);
    pred.placements = to_placements(scene, reply, movable_ids);

    if (auto oob = out_of_bounds(scene, pred.placements)) {
        request.messages.push_back({Role::assistant, reply});
        request.messages.push_back(
            {Role::user, *oob + " Reply again with every object fully inside the workspace."});
        pred.prompts.push_back(request.joined_content());
        reply = llm.complete(request);
        pred.placements = to_placements(scene, reply, movable_ids);
        if (auto again = out_of_bounds(scene, pred.placements)) {
            std::vector<std::string> ids;
            for (const auto& p : pred.placements) ids.push_back(p.object_id);
            throw ValidationError("out-of-bounds placement after re-prompt: " + *again, ids);
        }
    }
    return pred;
}

// --- repair -----------------------------------------------------------------------

Placement validate_and_repair(const Scene& scene, const Placement& placement,
                              const RepairSchedule& schedule) {
    if (!std::isfinite(placement.x) || !std::isfinite(placement.y) ||
        !std::isfinite(placement.rotation)) {
        throw std::invalid_argument("placement for '" + placement.object_id + "' is not finite");
    }
    const auto& obj = scene.at(placement.object_id);
    if (!scene.move_violation(placement)) {
        Placement out = placement;
        out.repaired = false;
        return out;
    }
    static constexpr double kDirs[8][2] = {{1, 0},  {1, -1}, {0, -1}, {-1, -1},
                                           {-1, 0}, {-1, 1}, {0, 1},  {1, 1}};
    for (double radius : schedule.radii) {
        const int ndirs = radius == 0.0 ? 1 : 8;
        for (int d = 0; d < ndirs; ++d) {
            const double n = std::hypot(kDirs[d][0], kDirs[d][1]);
            const double x = placement.x + radius * kDirs[d][0] / n;
            const double y = placement.y + radius * kDirs[d][1] / n;
            for (double dr : schedule.rotation_offsets) {
                Placement cand = placement;
                cand.x = x;
                cand.y = y;
                cand.rotation = placement.rotation + dr;
                if (scene.move_violation(cand)) continue;
                cand.repaired = true;
                return cand;
            }
        }
    }
    const OrientedBox target = obj.box.with_pose(placement.x, placement.y, placement.rotation);
    std::vector<std::string> blockers;
    for (const auto& o : scene.objects()) {
        if (o.id == obj.id || (placement.stacked_on && o.id == *placement.stacked_on)) continue;
        if (overlaps(target, o.box)) blockers.push_back(o.id);
    }
    if (!box_in_bounds(scene.workspace(), target)) blockers.push_back("workspace boundary");
    throw Error("no collision-free pose for '" + obj.id + "' near (" + format_decimal(placement.x) +
                ", " + format_decimal(placement.y) + "); blocked by: " +
                (blockers.empty() ? std::string("scene constraints") : join(blockers, ", ")));
}

// --- pipeline -------------------------------------------------------------------

std::string_view to_string(ReasoningMode mode) {
    return mode == ReasoningMode::with_reference ? "with_reference" : "without_reference";
}

std::optional<ReasoningMode> reasoning_mode_from_string(std::string_view name) {
    if (name == "with_reference") return ReasoningMode::with_reference;
    if (name == "without_reference") return ReasoningMode::without_reference;
    return std::nullopt;
}

std::vector<std::string> relevant_object_ids(const Scene& scene, std::string_view instruction,
                                             ChatBackend& llm, const PipelineOptions& options) {
    const ScriptedEmbedder fallback;
    const Embedder& embedder = options.embedder ? *options.embedder : fallback;
    const auto categories = extract_relevant_objects(instruction, llm);
    const auto assigned = ground_objects(scene, categories, embedder, options.min_similarity);
    std::vector<std::string> out;
    for (const auto& o : scene.objects()) {
        if (assigned.at(o.id) != kOthers) out.push_back(o.id);
    }
    return out;
}

ExecutionLog execute_instruction(const Scene& scene, std::string_view instruction,
                                 const ExperienceStore* store, ChatBackend& llm, ReasoningMode mode,
                                 const PipelineOptions& options) {
    ExecutionLog log;
    log.instruction = std::string(instruction);
    std::string stage = "grounding";
    try {
        if (trim(instruction).empty()) throw std::invalid_argument("instruction must be nonempty");
        log.relevant_ids = relevant_object_ids(scene, instruction, llm, options);
        if (log.relevant_ids.empty()) throw Error("no scene object matches the instruction");
        std::vector<std::string> movable;
        for (const auto& id : log.relevant_ids) {
            if (scene.at(id).movable) movable.push_back(id);
        }

        std::optional<Experience> reference;
        if (mode == ReasoningMode::with_reference && store != nullptr && !store->empty()) {
            stage = "retrieval";
            auto r = retrieve_reference(*store, instruction, llm);
            log.reference_id = r.reference.id;
            log.reference_score = r.score;
            reference = std::move(r.reference);
        }

        stage = "planning";
        const auto plan = plan_steps(instruction, llm);

        Scene current = scene;
        for (std::size_t k = 0; k < plan.steps.size(); ++k) {
            const int step = static_cast<int>(k);
            stage = "prediction";
            auto pred = predict_placement(current, plan.steps[k], reference, llm, movable);
            StepRecord rec{step, plan.steps[k], {}, pred.prompts, current};
            try {
                for (const auto& p : pred.placements) {
                    stage = "repair";
                    const auto fixed = validate_and_repair(current, p);
                    stage = "execution";
                    rec.moves.push_back(execute_move(current, fixed, step));
                }
            } catch (...) {
                rec.scene = current;
                log.steps.push_back(std::move(rec));
                throw;
            }
            rec.scene = current;
            log.steps.push_back(std::move(rec));
        }
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what(), std::move(log));
    }
    return log;
}

}  // namespace rearrange
