#pragma once

#include <vector>

#include "rearrange/llm.hpp"
#include "rearrange/relations.hpp"

namespace rearrange {

// Answers placement requests with the geometric relation solver: the scene
// and relations come from the prompt's JSON trailer (the relations are parsed
// from the trailer's instruction when absent). Every other request goes to
// the scripted backend.
class OracleBackend : public ChatBackend {
public:
    explicit OracleBackend(PredicateConfig config = {}, std::vector<CannedRule> rules = {});

    std::string complete(const ChatRequest& request) override;

private:
    PredicateConfig config_;
    ScriptedBackend fallback_;
};

}  // namespace rearrange
