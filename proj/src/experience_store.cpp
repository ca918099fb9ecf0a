#include "rearrange/experience_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "rearrange/error.hpp"
#include "rearrange/language.hpp"
#include "rearrange/prompts.hpp"
#include "rearrange/scene_json.hpp"

namespace rearrange {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void fsync_path(const fs::path& path, int flags) {
    const int fd = ::open(path.c_str(), flags);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

// Write-to-temp, fsync, rename, fsync directory.
void write_file_durable(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw StorageError("short write to '" + tmp.string() + "'");
    }
    fsync_path(tmp, O_RDONLY);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw StorageError("cannot rename '" + tmp.string() + "': " + ec.message());
    fsync_path(path.parent_path(), O_RDONLY | O_DIRECTORY);
}

fs::path document_path(const fs::path& dir, std::string_view id) {
    return dir / (std::string(id) + std::string(kExperienceExtension));
}

std::string serialize(const Experience& e) { return experience_to_json(e).dump(2) + "\n"; }

}  // namespace

std::string_view to_string(ExperienceSource source) {
    return source == ExperienceSource::human ? "human" : "robot";
}

std::optional<ExperienceSource> experience_source_from_string(std::string_view name) {
    if (name == "human") return ExperienceSource::human;
    if (name == "robot") return ExperienceSource::robot;
    return std::nullopt;
}

std::string utc_timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json experience_to_json(const Experience& e) {
    return json{{"id", e.id},
                {"instruction", e.instruction},
                {"workspace", workspace_to_json(e.workspace)},
                {"objects", objects_to_json(e.objects)},
                {"created_at", e.created_at},
                {"source", std::string(to_string(e.source))}};
}

Experience experience_from_json(const json& j) {
    Experience e;
    try {
        e.id = j.at("id").get<std::string>();
        e.instruction = j.at("instruction").get<std::string>();
        e.workspace = workspace_from_json(j.at("workspace"));
        e.objects = objects_from_json(j.at("objects"));
        e.created_at = j.at("created_at").get<std::string>();
        const auto src = j.at("source").get<std::string>();
        const auto parsed = experience_source_from_string(src);
        if (!parsed) throw ParseError("unknown experience source '" + src + "'", j.dump());
        e.source = *parsed;
    } catch (const json::exception& ex) {
        throw ParseError(std::string("invalid experience document: ") + ex.what(), j.dump());
    }
    if (e.id.empty()) throw ValidationError("experience id must be nonempty");
    if (trim(e.instruction).empty()) {
        throw ValidationError("experience '" + e.id + "' has an empty instruction", {e.id});
    }
    if (auto v = find_violation(e.workspace, e.objects)) {
        throw ValidationError("experience '" + e.id + "': " + v->message, v->ids);
    }
    return e;
}

ExperienceStore::ExperienceStore(fs::path dir, OpenMode mode)
    : dir_(std::move(dir)), mu_(std::make_unique<std::shared_mutex>()) {
    if (!fs::exists(dir_)) {
        if (mode == OpenMode::must_exist) {
            throw StorageError("experience store '" + dir_.string() + "' does not exist");
        }
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw StorageError("cannot create '" + dir_.string() + "': " + ec.message());
    }
    load();
}

void ExperienceStore::load() {
    const fs::path manifest = dir_ / kManifestName;
    items_.clear();
    if (!fs::exists(manifest)) return;
    json order;
    const auto text = read_file(manifest);
    try {
        order = json::parse(text).at("order");
    } catch (const json::exception& e) {
        throw ParseError(std::string("corrupt store manifest: ") + e.what(), text);
    }
    std::set<std::string> seen;
    for (const auto& item : order) {
        const auto id = item.get<std::string>();
        const auto doc_text = read_file(document_path(dir_, id));
        json doc;
        try {
            doc = json::parse(doc_text);
        } catch (const json::parse_error& e) {
            throw ParseError("corrupt experience '" + id + "': " + e.what(), doc_text);
        }
        Experience e = experience_from_json(doc);
        if (!seen.insert(e.id).second) {
            throw ValidationError("duplicate experience id '" + e.id + "'", {e.id});
        }
        if (e.id != id) {
            throw ValidationError("experience file '" + id + "' declares id '" + e.id + "'",
                                  {id, e.id});
        }
        items_.push_back(std::move(e));
    }
}

void ExperienceStore::write_manifest() const {
    json order = json::array();
    for (const auto& e : items_) order.push_back(e.id);
    write_file_durable(dir_ / kManifestName, json{{"order", order}}.dump(2) + "\n");
}

std::size_t ExperienceStore::size() const {
    std::shared_lock lock(*mu_);
    return items_.size();
}

std::vector<Experience> ExperienceStore::experiences() const {
    std::shared_lock lock(*mu_);
    return items_;
}

std::optional<Experience> ExperienceStore::find(std::string_view id) const {
    std::shared_lock lock(*mu_);
    for (const auto& e : items_) {
        if (e.id == id) return e;
    }
    return std::nullopt;
}

Experience ExperienceStore::add(std::string_view instruction, const Workspace& workspace,
                                std::vector<ObjectRecord> objects, ExperienceSource source) {
    if (trim(instruction).empty()) throw ValidationError("experience instruction must be nonempty");
    if (auto v = find_violation(workspace, objects)) throw ValidationError(v->message, v->ids);

    std::unique_lock lock(*mu_);
    Experience e;
    for (std::size_t n = items_.size() + 1;; ++n) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "exp-%04zu", n);
        const bool taken = std::any_of(items_.begin(), items_.end(),
                                       [&](const Experience& x) { return x.id == buf; });
        if (!taken && !fs::exists(document_path(dir_, buf))) {
            e.id = buf;
            break;
        }
    }
    e.instruction = trim(instruction);
    e.workspace = workspace;
    e.objects = std::move(objects);
    e.created_at = utc_timestamp_now();
    e.source = source;

    write_file_durable(document_path(dir_, e.id), serialize(e));
    items_.push_back(e);
    try {
        write_manifest();
    } catch (...) {
        items_.pop_back();
        throw;
    }
    return e;
}

ExperienceStore seed_store(const fs::path& path) {
    ExperienceStore store(path, ExperienceStore::OpenMode::must_exist);
    const auto all = store.experiences();
    const auto pairs = std::count_if(all.begin(), all.end(),
                                     [](const Experience& e) { return e.objects.size() == 2; });
    const auto multi = std::count_if(all.begin(), all.end(),
                                     [](const Experience& e) { return e.objects.size() > 2; });
    if (all.size() != 10 || pairs != 8 || multi != 2) {
        throw ValidationError("seed store must hold 10 arrangements (8 with two objects, 2 with "
                              "more); found " +
                              std::to_string(all.size()));
    }
    return store;
}

void initialize_store_from_seeds(const fs::path& dir, const fs::path& seeds) {
    if (fs::exists(dir / kManifestName)) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StorageError("cannot create '" + dir.string() + "': " + ec.message());
    for (const auto& entry : fs::directory_iterator(seeds)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == kExperienceExtension || name == kManifestName) {
            if (name == kManifestName) continue;
            write_file_durable(dir / name, read_file(entry.path()));
        }
    }
    write_file_durable(dir / kManifestName, read_file(seeds / kManifestName));
}

int score_similarity(std::string_view new_instruction, std::string_view past_instruction,
                     ChatBackend& llm) {
    if (trim(new_instruction).empty() || trim(past_instruction).empty()) {
        throw std::invalid_argument("similarity needs two nonempty instructions");
    }
    const auto reply = llm.complete(similarity_request(new_instruction, past_instruction));
    const auto value = parse_int(reply);
    return static_cast<int>(std::clamp<long long>(value, 0, 100));
}

RetrievalResult retrieve_reference(const ExperienceStore& store, std::string_view instruction,
                                   ChatBackend& llm) {
    const auto all = store.experiences();
    if (all.empty()) throw Error("cannot retrieve a reference from an empty experience store");
    RetrievalResult result{all.front(), -1, {}};
    for (const auto& e : all) {
        const int s = score_similarity(instruction, e.instruction, llm);
        result.scores.emplace_back(e.id, s);
        if (s > result.score) {
            result.score = s;
            result.reference = e;
        }
    }
    return result;
}

}  // namespace rearrange
