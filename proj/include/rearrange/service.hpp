#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rearrange/experience_store.hpp"
#include "rearrange/grounding.hpp"
#include "rearrange/llm.hpp"
#include "rearrange/reasoner.hpp"
#include "rearrange/relations.hpp"
#include "rearrange/remote.hpp"
#include "rearrange/scene.hpp"

namespace rearrange {

// scripted | oracle | remote. Remote needs a base URL and an API key.
// Throws std::invalid_argument for anything else.
std::unique_ptr<ChatBackend> make_backend(std::string_view name, const RemoteConfig& remote,
                                          const PredicateConfig& predicates);

// scripted | remote. Remote posts to `url`. Throws std::invalid_argument.
std::unique_ptr<Embedder> make_embedder(std::string_view name, const std::string& url);

struct ServiceConfig {
    std::filesystem::path scenes_dir;
    std::filesystem::path store_dir;
    std::string initial_scene = "scene1";
    std::string backend = "oracle";
    std::string mode = "with_reference";  // with_reference | without_reference | random | geometric
    double gap_px = 40.0;
    std::uint64_t seed = 0;
    PredicateConfig predicates;
    RemoteConfig remote;
    std::string embedder = "scripted";
    std::string embed_url;
};

struct ServiceResponse {
    int status = 200;
    nlohmann::json body;
};

// Single-session control plane. GETs share a lock; every mutating call is
// serialized. Only /apply moves objects and only /experience/accept writes
// the store.
class Service {
public:
    // Opens (creating if needed) the store and loads the initial fixture.
    explicit Service(ServiceConfig config);
    ~Service();

    ServiceResponse handle(std::string_view method, std::string_view path, std::string_view body);

    Scene scene() const;
    bool has_pending() const;

private:
    struct StepProposal {
        std::string instruction;
        std::vector<Placement> placements;
    };
    struct Proposal {
        std::string instruction;
        std::string mode;
        std::vector<StepProposal> steps;
    };

    ServiceResponse get_scene() const;
    ServiceResponse get_experiences() const;
    ServiceResponse get_config() const;
    ServiceResponse post_instruction(const nlohmann::json& body);
    ServiceResponse post_apply();
    ServiceResponse post_accept(const nlohmann::json& body);
    ServiceResponse post_reject();
    ServiceResponse post_reset(const nlohmann::json& body);
    ServiceResponse patch_config(const nlohmann::json& body);
    nlohmann::json config_json() const;

    ServiceConfig config_;
    ExperienceStore store_;
    std::unique_ptr<ChatBackend> llm_;
    std::unique_ptr<Embedder> embedder_;
    Scene scene_;
    std::optional<Proposal> pending_;
    mutable std::shared_mutex mu_;
};

// Loads `<scenes_dir>/<name>.json`; the name must be a plain fixture name.
// Throws std::invalid_argument for a bad name and StorageError when missing.
Scene load_fixture(const std::filesystem::path& scenes_dir, std::string_view name);

}  // namespace rearrange
