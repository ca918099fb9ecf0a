#include "rearrange/baselines.hpp"

#include <algorithm>
#include <set>

#include "rearrange/error.hpp"
#include "rearrange/language.hpp"

namespace rearrange {

namespace {

void check_relevant(const Scene& scene, std::span<const std::string> ids) {
    for (const auto& id : ids) {
        if (!scene.at(id).movable) throw ValidationError("object '" + id + "' is not movable", {id});
    }
}

}  // namespace

std::vector<Placement> random_placement(const Scene& scene,
                                        std::span<const std::string> relevant_ids,
                                        std::uint64_t seed) {
    check_relevant(scene, relevant_ids);
    SplitMixRng rng(seed);
    const auto& ws = scene.workspace();
    Scene working = scene;
    std::vector<Placement> out;
    for (const auto& id : relevant_ids) {
        const auto& obj = working.at(id);
        const double m = obj.box.half_diagonal();
        if (2.0 * m > ws.width_px || 2.0 * m > ws.height_px) {
            throw Error("object '" + id + "' does not fit the workspace at any rotation");
        }
        bool placed = false;
        for (int attempt = 0; attempt < kRandomMaxAttempts && !placed; ++attempt) {
            Placement p{id, rng.uniform(m, ws.width_px - m), rng.uniform(m, ws.height_px - m),
                        obj.rotation(), std::nullopt, false};
            if (working.move_violation(p)) continue;
            working = working.apply_move(p);
            out.push_back(p);
            placed = true;
        }
        if (!placed) {
            throw Error("random placement of '" + id + "' failed after " +
                        std::to_string(kRandomMaxAttempts) + " attempts");
        }
    }
    return out;
}

std::vector<Placement> geometric_placement(const Scene& scene,
                                           std::span<const std::string> relevant_ids,
                                           double gap_px) {
    if (relevant_ids.empty()) throw std::invalid_argument("geometric placement needs an object");
    if (!(gap_px >= 0.0)) throw std::invalid_argument("gap must be >= 0");
    check_relevant(scene, relevant_ids);
    const std::set<std::string> wanted(relevant_ids.begin(), relevant_ids.end());
    std::vector<const ObjectRecord*> row;
    for (const auto& o : scene.objects()) {
        if (wanted.count(o.id)) row.push_back(&o);
    }
    const auto& ws = scene.workspace();
    double total = gap_px * static_cast<double>(row.size() - 1);
    for (const auto* o : row) total += o->box.w();
    if (total > ws.width_px) {
        throw Error("geometric row is " + std::to_string(total) + " px wide; workspace is " +
                    std::to_string(ws.width_px));
    }
    const double y = ws.height_px / 2.0;
    double left = ws.width_px / 2.0 - total / 2.0;
    std::vector<Placement> out;
    for (const auto* o : row) {
        if (o->box.h() > ws.height_px) throw Error("object '" + o->id + "' is taller than the workspace");
        out.push_back(Placement{o->id, left + o->box.w() / 2.0, y, 0.0, std::nullopt, false});
        left += o->box.w() + gap_px;
    }
    return out;
}

StepRecord apply_step(const Scene& scene, int index, std::string instruction,
                      const std::vector<Placement>& placements) {
    StepRecord rec{index, std::move(instruction), {}, {}, scene.apply_moves(placements)};
    for (const auto& p : placements) {
        const auto& before = scene.at(p.object_id);
        const auto plan = make_pick_plan(scene, p);
        const auto& after = rec.scene.at(p.object_id);
        rec.moves.push_back(MoveRecord{index,
                                       p.object_id,
                                       {before.box.cx(), before.box.cy(), before.rotation()},
                                       {after.box.cx(), after.box.cy(), after.rotation()},
                                       plan.waypoints,
                                       p.repaired,
                                       p.stacked_on});
    }
    return rec;
}

ExecutionLog run_baseline(const Scene& scene, std::string_view instruction, Baseline baseline,
                          ChatBackend& llm, const BaselineOptions& options) {
    ExecutionLog log;
    log.instruction = std::string(instruction);
    std::string stage = "grounding";
    try {
        if (trim(instruction).empty()) throw std::invalid_argument("instruction must be nonempty");
        log.relevant_ids = relevant_object_ids(scene, instruction, llm, options.pipeline);
        std::vector<std::string> movable;
        for (const auto& id : log.relevant_ids) {
            if (scene.at(id).movable) movable.push_back(id);
        }
        if (movable.empty()) throw Error("no movable object matches the instruction");
        stage = "planning";
        const auto plan = plan_steps(instruction, llm);
        Scene current = scene;
        for (std::size_t k = 0; k < plan.steps.size(); ++k) {
            stage = "prediction";
            const auto placements =
                baseline == Baseline::random
                    ? random_placement(current, movable, options.seed + 0x9e3779b97f4a7c15ULL * k)
                    : geometric_placement(current, movable, options.gap_px);
            stage = "execution";
            log.steps.push_back(apply_step(current, static_cast<int>(k), plan.steps[k], placements));
            current = log.steps.back().scene;
        }
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what(), std::move(log));
    }
    return log;
}

}  // namespace rearrange
