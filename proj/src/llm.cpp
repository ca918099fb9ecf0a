#include "rearrange/llm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rearrange/error.hpp"
#include "rearrange/hash.hpp"
#include "rearrange/language.hpp"
#include "rearrange/prompts.hpp"

namespace rearrange {

using nlohmann::json;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

std::string_view to_string(RequestTag tag) {
    switch (tag) {
        case RequestTag::object_extraction: return "object_extraction";
        case RequestTag::similarity: return "similarity";
        case RequestTag::placement: return "placement";
        case RequestTag::step_planning: return "step_planning";
    }
    return "placement";
}

std::optional<RequestTag> request_tag_from_string(std::string_view name) {
    for (auto t : {RequestTag::object_extraction, RequestTag::similarity, RequestTag::placement,
                   RequestTag::step_planning}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

void ChatRequest::validate() const {
    if (messages.empty()) throw std::invalid_argument("chat request has no messages");
    if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
    if (max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
}

std::string ChatRequest::joined_content() const {
    std::string out;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (i) out += '\n';
        out += messages[i].content;
    }
    return out;
}

std::string request_fingerprint(const ChatRequest& request) {
    std::uint64_t h = fnv1a64(to_string(request.tag));
    h = fnv1a64("\x1f", h);
    for (std::size_t i = 0; i < request.messages.size(); ++i) {
        if (i) h = fnv1a64("\x1e", h);
        h = fnv1a64(request.messages[i].content, h);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<CannedRule> parse_canned_rules(std::string_view document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed canned-reply file: ") + e.what(),
                         std::string(document));
    }
    if (!j.is_array()) throw ParseError("canned-reply file must be a list", std::string(document));
    std::vector<CannedRule> rules;
    try {
        for (const auto& item : j) {
            CannedRule r;
            r.tag = item.value("tag", std::string{});
            if (item.contains("contains")) r.contains = item["contains"].get<std::vector<std::string>>();
            r.reply = item.at("reply").get<std::string>();
            rules.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid canned rule: ") + e.what(), std::string(document));
    }
    return rules;
}

std::vector<CannedRule> load_canned_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open canned-reply file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_canned_rules(ss.str());
}

// --- scripted backend -------------------------------------------------------

namespace {

std::string scripted_extraction(const ChatRequest& req) {
    const auto text = req.joined_content();
    const auto instruction = extract_field(text, kInstructionField).value_or(text);
    auto objects = lexicon_objects(instruction);
    objects.push_back("others");
    return render_string_list(objects);
}

std::string scripted_similarity(const ChatRequest& req) {
    const auto text = req.joined_content();
    const auto a = extract_field(text, kFirstInstructionField);
    const auto b = extract_field(text, kSecondInstructionField);
    if (!a || !b) throw BackendError("scripted similarity: prompt lacks the two instructions");
    return render_int(token_jaccard_score(*a, *b));
}

std::string scripted_steps(const ChatRequest& req) {
    const auto text = req.joined_content();
    const auto instruction = extract_field(text, kInstructionField).value_or(text);
    auto clauses = split_sequential(instruction);
    for (std::size_t i = 1; i < clauses.size(); ++i) {
        clauses[i] = attach_subject(clauses[i], clauses[i - 1]);
    }
    return render_string_list(clauses);
}

std::string scripted_placement(const ChatRequest& req) {
    const auto trailer = extract_trailer(req.joined_content());
    if (!trailer) throw BackendError("scripted placement: prompt lacks the scene trailer");
    std::vector<PlacementRecord> out;
    const auto movable = trailer->value("movable_ids", json::array());
    for (const auto& obj : trailer->value("objects", json::array())) {
        const auto id = obj.value("id", std::string{});
        bool listed = false;
        for (const auto& m : movable) listed = listed || m == id;
        if (!listed) continue;
        const auto& box = obj.at("box");
        std::optional<std::string> stacked;
        if (auto it = obj.find("stacked_on"); it != obj.end() && it->is_string()) {
            stacked = it->get<std::string>();
        }
        out.push_back(PlacementRecord{id, box.at("cx").get<double>(), box.at("cy").get<double>(),
                                      box.at("theta").get<double>(), stacked});
    }
    return render_placement_records(out);
}

bool contains_all(const std::string& text, const std::vector<std::string>& needles) {
    for (const auto& n : needles) {
        if (text.find(n) == std::string::npos) return false;
    }
    return true;
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<CannedRule> rules) : rules_(std::move(rules)) {}

void ScriptedBackend::add_canned(const std::string& fingerprint, std::string reply) {
    std::lock_guard lock(mu_);
    canned_[fingerprint] = std::move(reply);
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
    request.validate();
    {
        std::lock_guard lock(mu_);
        if (auto it = canned_.find(request_fingerprint(request)); it != canned_.end()) {
            return it->second;
        }
    }
    const auto text = request.joined_content();
    const auto tag = to_string(request.tag);
    for (const auto& rule : rules_) {
        if ((rule.tag.empty() || rule.tag == "*" || rule.tag == tag) &&
            contains_all(text, rule.contains)) {
            return rule.reply;
        }
    }
    switch (request.tag) {
        case RequestTag::object_extraction: return scripted_extraction(request);
        case RequestTag::similarity: return scripted_similarity(request);
        case RequestTag::step_planning: return scripted_steps(request);
        case RequestTag::placement: return scripted_placement(request);
    }
    throw BackendError("scripted backend: unsupported request tag");
}

// --- structured output ------------------------------------------------------

namespace {

// Index one past the bracket matching text[open], skipping quoted strings.
std::optional<std::size_t> match_bracket(std::string_view text, std::size_t open) {
    const char o = text[open];
    const char c = o == '[' ? ']' : '}';
    int depth = 0;
    bool in_str = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_str) {
            if (ch == '\\') {
                ++i;
            } else if (ch == '"') {
                in_str = false;
            }
            continue;
        }
        if (ch == '"') {
            in_str = true;
        } else if (ch == o) {
            ++depth;
        } else if (ch == c) {
            if (--depth == 0) return i + 1;
        }
    }
    return std::nullopt;
}

std::optional<std::vector<std::string>> list_from(std::string_view chunk) {
    try {
        const auto j = json::parse(chunk);
        if (!j.is_array()) return std::nullopt;
        std::vector<std::string> out;
        for (const auto& item : j) {
            if (!item.is_string()) return std::nullopt;
            out.push_back(item.get<std::string>());
        }
        return out;
    } catch (const json::exception&) {
    }
    // Unquoted or single-quoted lists: [apple, 'banana', others]
    std::vector<std::string> out;
    std::string inner(chunk.substr(1, chunk.size() - 2));
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = trim(item);
        while (!t.empty() && (t.front() == '"' || t.front() == '\'')) t.erase(t.begin());
        while (!t.empty() && (t.back() == '"' || t.back() == '\'')) t.pop_back();
        t = trim(t);
        if (t.empty() || t.find_first_of("[]{}") != std::string::npos) return std::nullopt;
        out.push_back(t);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::optional<PlacementRecord> record_from(const json& j) {
    if (!j.is_object()) return std::nullopt;
    if (!j.contains("x") || !j.contains("y") || !j["x"].is_number() || !j["y"].is_number()) {
        return std::nullopt;
    }
    PlacementRecord r;
    r.x = j["x"].get<double>();
    r.y = j["y"].get<double>();
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) return std::nullopt;
    if (j.contains("rotation") && !j["rotation"].is_null()) {
        if (!j["rotation"].is_number()) return std::nullopt;
        r.rotation = j["rotation"].get<double>();
    }
    for (const char* key : {"id", "object", "object_id"}) {
        if (j.contains(key) && j[key].is_string()) {
            r.id = j[key].get<std::string>();
            break;
        }
    }
    if (j.contains("stacked_on") && j["stacked_on"].is_string()) {
        r.stacked_on = j["stacked_on"].get<std::string>();
    }
    return r;
}

}  // namespace

long long parse_int(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
        std::size_t b = i;
        if (b > 0 && text[b - 1] == '-' &&
            (b == 1 || !std::isalnum(static_cast<unsigned char>(text[b - 2])))) {
            --b;
        }
        std::size_t e = i;
        while (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) ++e;
        try {
            return std::stoll(std::string(text.substr(b, e - b)));
        } catch (const std::out_of_range&) {
            throw ParseError("integer out of range", std::string(text));
        }
    }
    throw ParseError("no integer found in reply", std::string(text));
}

std::vector<std::string> parse_string_list(std::string_view text) {
    for (std::size_t i = text.find('['); i != std::string_view::npos; i = text.find('[', i + 1)) {
        const auto end = match_bracket(text, i);
        if (!end) break;
        if (auto list = list_from(text.substr(i, *end - i))) return *list;
    }
    throw ParseError("no list found in reply", std::string(text));
}

std::vector<PlacementRecord> parse_placement_records(std::string_view text) {
    std::vector<PlacementRecord> out;
    std::size_t i = text.find('{');
    while (i != std::string_view::npos) {
        const auto end = match_bracket(text, i);
        if (!end) break;
        std::optional<PlacementRecord> rec;
        try {
            rec = record_from(json::parse(text.substr(i, *end - i)));
        } catch (const json::exception&) {
        }
        if (rec) {
            out.push_back(*rec);
            i = text.find('{', *end);
        } else {
            i = text.find('{', i + 1);
        }
    }
    return out;
}

PlacementRecord parse_placement_record(std::string_view text) {
    auto all = parse_placement_records(text);
    if (all.empty()) throw ParseError("no placement record found in reply", std::string(text));
    return all.front();
}

std::string render_int(long long value) { return std::to_string(value); }

std::string render_string_list(const std::vector<std::string>& items) { return json(items).dump(); }

namespace {
json record_json(const PlacementRecord& r) {
    json j = json::object();
    if (r.id) j["id"] = *r.id;
    j["x"] = r.x;
    j["y"] = r.y;
    if (r.rotation) j["rotation"] = *r.rotation;
    if (r.stacked_on) j["stacked_on"] = *r.stacked_on;
    return j;
}
}  // namespace

std::string render_placement_record(const PlacementRecord& record) {
    return record_json(record).dump();
}

std::string render_placement_records(const std::vector<PlacementRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(record_json(r));
    return arr.dump();
}

}  // namespace rearrange
