#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rearrange/llm.hpp"

// Request builders for the auxiliary prompts (object extraction, similarity,
// step planning) and helpers to read fields back out of a prompt.

namespace rearrange {

inline constexpr std::string_view kObjectQuery =
    "List the objects that are directly involved in the interaction described in the "
    "instruction.";
inline constexpr std::string_view kSimilarityQuery =
    "Give a similarity score between two instructions on a scale from 0 to 100.";

inline constexpr std::string_view kInstructionField = "Instruction: ";
inline constexpr std::string_view kFirstInstructionField = "Instruction 1: ";
inline constexpr std::string_view kSecondInstructionField = "Instruction 2: ";

inline constexpr std::string_view kTrailerBegin = "BEGIN_SCENE_JSON";
inline constexpr std::string_view kTrailerEnd = "END_SCENE_JSON";

ChatRequest object_extraction_request(std::string_view instruction);
ChatRequest similarity_request(std::string_view new_instruction, std::string_view past_instruction);
ChatRequest step_planning_request(std::string_view instruction);

// Rest of the line following the first occurrence of `field` in `text`.
std::optional<std::string> extract_field(std::string_view text, std::string_view field);

// JSON between the trailer markers, or nullopt when absent/malformed.
std::optional<nlohmann::json> extract_trailer(std::string_view text);

}  // namespace rearrange
