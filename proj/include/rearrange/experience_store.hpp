#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rearrange/llm.hpp"
#include "rearrange/scene.hpp"

namespace rearrange {

enum class ExperienceSource { human, robot };

std::string_view to_string(ExperienceSource source);
std::optional<ExperienceSource> experience_source_from_string(std::string_view name);

// An instruction paired with a validated arrangement.
struct Experience {
    std::string id;
    std::string instruction;
    Workspace workspace;
    std::vector<ObjectRecord> objects;
    std::string created_at;  // RFC-3339, UTC
    ExperienceSource source = ExperienceSource::human;

    friend bool operator==(const Experience&, const Experience&) = default;
};

nlohmann::json experience_to_json(const Experience& e);
// Throws ParseError/ValidationError; the objects must form a valid scene.
Experience experience_from_json(const nlohmann::json& j);

// Directory-backed experience collection: one `<id>.experience` document per
// entry plus `manifest.json` holding the insertion order. Reads may run
// concurrently; writes take an exclusive lock and are durable on return.
class ExperienceStore {
public:
    enum class OpenMode { must_exist, create };

    // Throws StorageError for a missing directory (must_exist) or unreadable
    // files, ParseError/ValidationError for corrupt documents or duplicate ids.
    explicit ExperienceStore(std::filesystem::path dir, OpenMode mode = OpenMode::create);

    const std::filesystem::path& directory() const noexcept { return dir_; }
    std::size_t size() const;
    bool empty() const { return size() == 0; }
    std::vector<Experience> experiences() const;
    std::optional<Experience> find(std::string_view id) const;

    // Appends under a fresh id and persists before returning.
    Experience add(std::string_view instruction, const Workspace& workspace,
                   std::vector<ObjectRecord> objects, ExperienceSource source);

private:
    void load();
    void write_manifest() const;

    std::filesystem::path dir_;
    std::vector<Experience> items_;
    std::unique_ptr<std::shared_mutex> mu_;
};

inline constexpr std::string_view kManifestName = "manifest.json";
inline constexpr std::string_view kExperienceExtension = ".experience";

// Opens the bundled seed arrangements and checks their shape: ten entries,
// eight with two objects and two with more.
ExperienceStore seed_store(const std::filesystem::path& path);

// Copies every seed document into `dir` when it holds no manifest yet.
void initialize_store_from_seeds(const std::filesystem::path& dir,
                                 const std::filesystem::path& seeds);

// 0-100 similarity of two instructions as judged by the backend, clamped.
int score_similarity(std::string_view new_instruction, std::string_view past_instruction,
                     ChatBackend& llm);

struct RetrievalResult {
    Experience reference;
    int score = 0;
    // Every experience's score, in store order.
    std::vector<std::pair<std::string, int>> scores;
};

// Scores every experience and returns the best one; ties go to the earliest
// inserted. Throws Error on an empty store.
RetrievalResult retrieve_reference(const ExperienceStore& store, std::string_view instruction,
                                   ChatBackend& llm);

std::string utc_timestamp_now();

}  // namespace rearrange
