#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rearrange/baselines.hpp"
#include "rearrange/experience_store.hpp"
#include "rearrange/grounding.hpp"
#include "rearrange/llm.hpp"
#include "rearrange/relations.hpp"

namespace rearrange {

enum class Method { random, geometric, ours_no_ref, ours_with_ref };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view name);
// Report row label, e.g. "Ours w/o reference".
std::string_view method_label(Method m);

struct BenchmarkInstruction {
    int scenario;  // 1 single object, 2 multiple objects, 3 sequential order
    int number;    // 1-5 within the scenario
    std::string scene;
    std::string text;
};

// The fifteen tabletop instructions, five per scenario.
const std::vector<BenchmarkInstruction>& benchmark_instructions();
std::string_view scenario_label(int scenario);

struct InstructionResult {
    Method method;
    int scenario;
    int number;
    std::string instruction;
    bool satisfied = false;
    std::vector<std::string> detail;  // "right_of(eggplant -> plate)@0: true"
    std::optional<std::string> error;
};

struct EvalReport {
    std::vector<Method> methods;
    std::vector<InstructionResult> results;

    // satisfied / total over the method's results (0 when there are none).
    double success_rate(Method m) const;
    double scenario_rate(Method m, int scenario) const;
};

struct BenchmarkConfig {
    std::vector<Method> methods{Method::random, Method::geometric, Method::ours_no_ref,
                                Method::ours_with_ref};
    std::filesystem::path scenes_dir;
    const ExperienceStore* store = nullptr;
    ChatBackend* llm = nullptr;
    std::uint64_t seed = 0;
    double gap_px = kDefaultGapPx;
    PredicateConfig predicates;
    PipelineOptions pipeline;
};

// Verdict of one instruction given the scene after each executed step:
// every relation holds at the boundary of its step.
InstructionResult judge(const Scene& initial, const std::vector<const Scene*>& step_scenes,
                        std::string_view instruction, const PredicateConfig& predicates);

// Throws StorageError/ValidationError for a missing or invalid fixture and
// std::invalid_argument without a backend. Pipeline errors count as
// unsatisfied.
EvalReport run_benchmark(const BenchmarkConfig& config);

std::string render_table(const EvalReport& report);
std::string render_csv(const EvalReport& report);
nlohmann::json report_to_json(const EvalReport& report);

}  // namespace rearrange
