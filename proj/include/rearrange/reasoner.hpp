#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/error.hpp"
#include "rearrange/executor.hpp"
#include "rearrange/experience_store.hpp"
#include "rearrange/grounding.hpp"
#include "rearrange/llm.hpp"
#include "rearrange/relations.hpp"
#include "rearrange/scene.hpp"

namespace rearrange {

// Raw text of prompts/placement.v1.txt, compiled in.
std::string_view placement_template_text();

struct PlacementTemplate {
    std::string system;
    std::string scene;
    std::string reference;
    std::string instruction;
    std::string directive;
};

// Splits the "@section" template. Throws ParseError for a missing section.
PlacementTemplate parse_placement_template(std::string_view text);
const PlacementTemplate& placement_template();

struct StepPlan {
    std::vector<std::string> steps;
};

struct PromptBundle {
    std::string system;
    std::string scene_block;
    std::optional<std::string> reference_block;
    std::string instruction_block;
    std::string directive;
    std::string trailer;

    // Blocks joined with blank lines, trailer last.
    std::string user_text() const;
    ChatRequest to_request() const;
};

// Numbers in the text blocks use one decimal; the JSON trailer repeats the
// scene exactly. `movable_ids` defaults to every movable object.
PromptBundle build_prompt(const Scene& scene, std::string_view instruction,
                          const std::optional<Experience>& reference,
                          std::optional<std::vector<std::string>> movable_ids = std::nullopt);

// "1.0", "-12.5"; never "-0.0".
std::string format_decimal(double value);

StepPlan plan_steps(std::string_view instruction, ChatBackend& llm);

struct Prediction {
    std::vector<Placement> placements;  // scene order
    std::vector<std::string> prompts;   // every request text sent, re-prompts included
};

// One backend call for all movable relevant objects. Missing rotation keeps
// the current one. An out-of-bounds reply gets one corrective re-prompt.
// Throws ParseError for an unreadable reply and ValidationError for unknown,
// immovable or irrelevant ids and for a second out-of-bounds reply.
Prediction predict_placement(const Scene& scene, std::string_view step_instruction,
                             const std::optional<Experience>& reference, ChatBackend& llm,
                             const std::vector<std::string>& movable_ids);

struct RepairSchedule {
    std::vector<double> radii{0.0, 10.0, 20.0, 40.0};
    std::vector<double> rotation_offsets{0.0, kPi / 4.0, -kPi / 4.0, kPi / 2.0};
};

// First valid pose of the schedule: radius (outer), then compass direction
// E, NE, N, NW, W, SW, S, SE (N is -y), then rotation offset (inner). The
// input comes back unchanged when already valid. Throws Error listing the
// blocking objects when the schedule is exhausted.
Placement validate_and_repair(const Scene& scene, const Placement& placement,
                              const RepairSchedule& schedule = {});

enum class ReasoningMode { with_reference, without_reference };

std::string_view to_string(ReasoningMode mode);
std::optional<ReasoningMode> reasoning_mode_from_string(std::string_view name);

struct PipelineOptions {
    const Embedder* embedder = nullptr;  // scripted embedder when null
    double min_similarity = 0.5;
};

// Failure of one pipeline stage; carries everything done before it.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what, ExecutionLog partial)
        : Error(what), stage_(std::move(stage)), log_(std::move(partial)) {}

    const std::string& stage() const noexcept { return stage_; }
    const ExecutionLog& log() const noexcept { return log_; }

private:
    std::string stage_;
    ExecutionLog log_;
};

// Grounded ids of the objects the instruction involves, in scene order.
std::vector<std::string> relevant_object_ids(const Scene& scene, std::string_view instruction,
                                             ChatBackend& llm, const PipelineOptions& options = {});

// extract -> ground -> retrieve (with_reference, non-empty store) -> plan
// steps -> per step: predict, repair, execute. Each step starts from the
// previous step's scene. Throws PipelineError.
ExecutionLog execute_instruction(const Scene& scene, std::string_view instruction,
                                 const ExperienceStore* store, ChatBackend& llm, ReasoningMode mode,
                                 const PipelineOptions& options = {});

}  // namespace rearrange
