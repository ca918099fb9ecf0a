#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rearrange {

enum class Role { system, user, assistant };

// Routing hint for the scripted and oracle backends. Remote backends ignore it.
enum class RequestTag { object_extraction, similarity, placement, step_planning };

std::string_view to_string(Role role);
std::string_view to_string(RequestTag tag);
std::optional<RequestTag> request_tag_from_string(std::string_view name);

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 1024;
    RequestTag tag = RequestTag::placement;

    // Throws std::invalid_argument on empty messages, negative temperature or
    // non-positive max_tokens.
    void validate() const;
    // Message contents joined with '\n', in order.
    std::string joined_content() const;

    friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

// Chat-completion backend. Implementations must tolerate concurrent calls.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Raw assistant text. Throws BackendError on failure.
    virtual std::string complete(const ChatRequest& request) = 0;
};

// Stable hash of (tag, message contents), hex encoded.
std::string request_fingerprint(const ChatRequest& request);

// One entry of a canned-reply file; matched top-down.
struct CannedRule {
    std::string tag;                    // empty or "*" matches any tag
    std::vector<std::string> contains;  // all must occur in the request text
    std::string reply;
};

std::vector<CannedRule> parse_canned_rules(std::string_view document);
std::vector<CannedRule> load_canned_rules(const std::string& path);

// Deterministic rule-based stand-in for an LLM:
//   object_extraction -> lexicon nouns of the instruction plus "others"
//   similarity        -> token-Jaccard score of the two instructions
//   step_planning     -> "then"-clause split with subject re-attachment
//   placement         -> current pose of every listed movable object
// Canned replies (exact fingerprint, then rules) take precedence.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<CannedRule> rules = {});

    void add_canned(const std::string& fingerprint, std::string reply);
    std::string complete(const ChatRequest& request) override;

private:
    std::vector<CannedRule> rules_;
    std::map<std::string, std::string> canned_;
    mutable std::mutex mu_;
};

// --- structured output ------------------------------------------------------

enum class Expected { integer, string_list, placement_record };

struct PlacementRecord {
    std::optional<std::string> id;
    double x = 0.0;
    double y = 0.0;
    std::optional<double> rotation;
    std::optional<std::string> stacked_on;

    friend bool operator==(const PlacementRecord&, const PlacementRecord&) = default;
};

// Each parser extracts the first well-formed candidate and tolerates
// surrounding prose and code fences. Throws ParseError carrying the text.
long long parse_int(std::string_view text);
std::vector<std::string> parse_string_list(std::string_view text);
PlacementRecord parse_placement_record(std::string_view text);
// Every well-formed placement object, in order of appearance.
std::vector<PlacementRecord> parse_placement_records(std::string_view text);

// Canonical writers; the parsers invert them exactly.
std::string render_int(long long value);
std::string render_string_list(const std::vector<std::string>& items);
std::string render_placement_record(const PlacementRecord& record);
std::string render_placement_records(const std::vector<PlacementRecord>& records);

}  // namespace rearrange
