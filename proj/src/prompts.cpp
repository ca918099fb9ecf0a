#include "rearrange/prompts.hpp"

namespace rearrange {

namespace {

ChatRequest make_request(RequestTag tag, std::string system, std::string user, int max_tokens) {
    ChatRequest req;
    req.tag = tag;
    req.max_tokens = max_tokens;
    req.messages.push_back({Role::system, std::move(system)});
    req.messages.push_back({Role::user, std::move(user)});
    return req;
}

}  // namespace

ChatRequest object_extraction_request(std::string_view instruction) {
    std::string system(kObjectQuery);
    system +=
        " Use short lowercase object names. Add \"others\" as the last entry for every "
        "object that is not involved. Reply with a JSON list of strings only, for example "
        "[\"apple\", \"banana\", \"others\"].";
    return make_request(RequestTag::object_extraction, std::move(system),
                        std::string(kInstructionField) + std::string(instruction), 128);
}

ChatRequest similarity_request(std::string_view new_instruction, std::string_view past_instruction) {
    std::string system(kSimilarityQuery);
    system += " Reply with the integer score only.";
    std::string user = std::string(kFirstInstructionField) + std::string(new_instruction) + "\n" +
                       std::string(kSecondInstructionField) + std::string(past_instruction);
    return make_request(RequestTag::similarity, std::move(system), std::move(user), 16);
}

ChatRequest step_planning_request(std::string_view instruction) {
    std::string system =
        "Split the rearrangement instruction into an ordered list of steps. Each step describes "
        "exactly one spatial relation and names the object that moves, e.g. \"put the cup on "
        "the plate, then beside the plate\" becomes [\"put the cup on the plate\", \"put the cup "
        "beside the plate\"]. An instruction without a sequence is a single step. Reply with a "
        "JSON list of strings only.";
    return make_request(RequestTag::step_planning, std::move(system),
                        std::string(kInstructionField) + std::string(instruction), 256);
}

std::optional<std::string> extract_field(std::string_view text, std::string_view field) {
    const auto pos = text.find(field);
    if (pos == std::string_view::npos) return std::nullopt;
    const auto start = pos + field.size();
    const auto end = text.find('\n', start);
    return std::string(text.substr(start, end == std::string_view::npos ? end : end - start));
}

std::optional<nlohmann::json> extract_trailer(std::string_view text) {
    const auto b = text.rfind(kTrailerBegin);
    if (b == std::string_view::npos) return std::nullopt;
    const auto start = b + kTrailerBegin.size();
    const auto e = text.find(kTrailerEnd, start);
    if (e == std::string_view::npos) return std::nullopt;
    try {
        return nlohmann::json::parse(text.substr(start, e - start));
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

}  // namespace rearrange
