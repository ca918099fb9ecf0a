#include "rearrange/service.hpp"

#include <mutex>

#include "rearrange/baselines.hpp"
#include "rearrange/error.hpp"
#include "rearrange/oracle_backend.hpp"
#include "rearrange/scene_json.hpp"

namespace rearrange {

using nlohmann::json;

std::unique_ptr<ChatBackend> make_backend(std::string_view name, const RemoteConfig& remote,
                                          const PredicateConfig& predicates) {
    if (name == "scripted") return std::make_unique<ScriptedBackend>();
    if (name == "oracle") return std::make_unique<OracleBackend>(predicates);
    if (name == "remote") {
        if (remote.base_url.empty() || remote.api_key.empty()) {
            throw std::invalid_argument("remote backend needs a base URL and an API key");
        }
        return std::make_unique<RemoteBackend>(remote);
    }
    throw std::invalid_argument("unknown backend '" + std::string(name) +
                                "' (expected scripted, oracle or remote)");
}

std::unique_ptr<Embedder> make_embedder(std::string_view name, const std::string& url) {
    if (name == "scripted") return std::make_unique<ScriptedEmbedder>();
    if (name == "remote") {
        if (url.empty()) throw std::invalid_argument("remote embedder needs a URL");
        return std::make_unique<RemoteEmbedder>(url);
    }
    throw std::invalid_argument("unknown embedder '" + std::string(name) + "' (expected scripted or remote)");
}

Scene load_fixture(const std::filesystem::path& scenes_dir, std::string_view name) {
    if (name.empty() || name.find_first_of("/\\") != std::string_view::npos || name.front() == '.') {
        throw std::invalid_argument("bad scene fixture name '" + std::string(name) + "'");
    }
    const auto path = scenes_dir / (std::string(name) + ".json");
    if (!std::filesystem::exists(path)) {
        throw StorageError("unknown scene fixture '" + std::string(name) + "'");
    }
    return load_scene_file(path.string());
}

namespace {

ServiceResponse error_response(int status, const std::string& message,
                               std::optional<std::string> stage = std::nullopt) {
    json body{{"error", message}};
    if (stage) body["stage"] = *stage;
    return {status, body};
}

bool valid_mode(std::string_view mode) {
    return mode == "with_reference" || mode == "without_reference" || mode == "random" ||
           mode == "geometric";
}

json placement_json(const Scene& scene, const Placement& p, int step) {
    json j = placement_to_json(p);
    j["step"] = step;
    json corners_json = json::array();
    for (const auto& c : corners(scene.at(p.object_id).box.with_pose(p.x, p.y, p.rotation))) {
        corners_json.push_back({c.x, c.y});
    }
    j["corners"] = corners_json;
    return j;
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      store_(config_.store_dir, ExperienceStore::OpenMode::create),
      llm_(make_backend(config_.backend, config_.remote, config_.predicates)),
      embedder_(make_embedder(config_.embedder, config_.embed_url)),
      scene_(load_fixture(config_.scenes_dir, config_.initial_scene)) {
    if (!valid_mode(config_.mode)) throw std::invalid_argument("unknown mode '" + config_.mode + "'");
}

Service::~Service() = default;

Scene Service::scene() const {
    std::shared_lock lock(mu_);
    return scene_;
}

bool Service::has_pending() const {
    std::shared_lock lock(mu_);
    return pending_.has_value();
}

ServiceResponse Service::handle(std::string_view method, std::string_view path,
                                std::string_view body) {
    const auto q = path.find('?');
    if (q != std::string_view::npos) path = path.substr(0, q);

    json parsed = json::object();
    if ((method == "POST" || method == "PATCH") && !body.empty()) {
        try {
            parsed = json::parse(body);
        } catch (const json::parse_error& e) {
            return error_response(400, std::string("malformed JSON body: ") + e.what());
        }
        if (!parsed.is_object()) return error_response(400, "request body must be a JSON object");
    }

    struct Route {
        std::string_view path;
        std::string_view method;
    };
    static constexpr Route routes[] = {
        {"/scene", "GET"},      {"/experiences", "GET"},        {"/config", "GET"},
        {"/config", "PATCH"},   {"/instruction", "POST"},      {"/apply", "POST"},
        {"/reject", "POST"},    {"/experience/accept", "POST"}, {"/reset", "POST"},
    };
    bool known_path = false;
    for (const auto& r : routes) known_path = known_path || r.path == path;
    if (!known_path) return error_response(404, "no such endpoint '" + std::string(path) + "'");

    try {
        if (method == "GET") {
            if (path == "/scene") return get_scene();
            if (path == "/experiences") return get_experiences();
            if (path == "/config") return get_config();
        } else if (method == "POST") {
            if (path == "/instruction") return post_instruction(parsed);
            if (path == "/apply") return post_apply();
            if (path == "/reject") return post_reject();
            if (path == "/experience/accept") return post_accept(parsed);
            if (path == "/reset") return post_reset(parsed);
        } else if (method == "PATCH" && path == "/config") {
            return patch_config(parsed);
        }
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
    return error_response(405, std::string(method) + " is not allowed on " + std::string(path));
}

ServiceResponse Service::get_scene() const {
    std::shared_lock lock(mu_);
    json j = scene_to_json(scene_);
    j["pending"] = pending_.has_value();
    return {200, j};
}

ServiceResponse Service::get_experiences() const {
    json list = json::array();
    for (const auto& e : store_.experiences()) {
        list.push_back(json{{"id", e.id},
                            {"instruction", e.instruction},
                            {"created_at", e.created_at},
                            {"source", std::string(to_string(e.source))}});
    }
    return {200, list};
}

json Service::config_json() const {
    return json{{"backend", config_.backend},
                {"embedder", config_.embedder},
                {"mode", config_.mode},
                {"gap_px", config_.gap_px},
                {"seed", config_.seed},
                {"front_axis", config_.predicates.front_is_positive_y ? "+y" : "-y"}};
}

ServiceResponse Service::get_config() const {
    std::shared_lock lock(mu_);
    return {200, config_json()};
}

ServiceResponse Service::patch_config(const json& body) {
    std::unique_lock lock(mu_);
    ServiceConfig next = config_;
    try {
        for (const auto& [key, value] : body.items()) {
            if (key == "backend") {
                next.backend = value.get<std::string>();
            } else if (key == "mode") {
                next.mode = value.get<std::string>();
                if (!valid_mode(next.mode)) return error_response(400, "unknown mode '" + next.mode + "'");
            } else if (key == "gap_px") {
                next.gap_px = value.get<double>();
                if (!(next.gap_px >= 0.0)) return error_response(400, "gap_px must be >= 0");
            } else if (key == "seed") {
                next.seed = value.get<std::uint64_t>();
            } else if (key == "front_axis") {
                const auto axis = value.get<std::string>();
                if (axis != "+y" && axis != "-y") return error_response(400, "front_axis must be +y or -y");
                next.predicates.front_is_positive_y = axis == "+y";
            } else {
                return error_response(400, "unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        return error_response(400, std::string("bad config value: ") + e.what());
    }
    std::unique_ptr<ChatBackend> llm;
    if (next.backend != config_.backend ||
        next.predicates.front_is_positive_y != config_.predicates.front_is_positive_y) {
        try {
            llm = make_backend(next.backend, next.remote, next.predicates);
        } catch (const std::invalid_argument& e) {
            return error_response(400, e.what());
        }
    }
    config_ = next;
    if (llm) llm_ = std::move(llm);
    return {200, config_json()};
}

ServiceResponse Service::post_instruction(const json& body) {
    if (!body.contains("text") || !body["text"].is_string() ||
        trim(body["text"].get<std::string>()).empty()) {
        return error_response(400, "body needs a nonempty \"text\"");
    }
    std::unique_lock lock(mu_);
    std::string mode = config_.mode;
    if (body.contains("mode")) {
        if (!body["mode"].is_string() || !valid_mode(body["mode"].get<std::string>())) {
            return error_response(400, "unknown mode");
        }
        mode = body["mode"].get<std::string>();
    }
    const auto text = body["text"].get<std::string>();

    ExecutionLog log;
    try {
        if (mode == "random" || mode == "geometric") {
            BaselineOptions opts;
            opts.seed = config_.seed;
            opts.gap_px = config_.gap_px;
            opts.pipeline.embedder = embedder_.get();
            log = run_baseline(scene_, text, mode == "random" ? Baseline::random : Baseline::geometric,
                               *llm_, opts);
        } else {
            log = execute_instruction(scene_, text, &store_, *llm_,
                                      mode == "with_reference" ? ReasoningMode::with_reference
                                                               : ReasoningMode::without_reference,
                                      PipelineOptions{embedder_.get()});
        }
    } catch (const PipelineError& e) {
        pending_.reset();
        return error_response(422, e.what(), e.stage());
    }

    Proposal proposal{text, mode, {}};
    json steps = json::array();
    json placements = json::array();
    bool any_repaired = false;
    const Scene* before = &scene_;
    for (const auto& s : log.steps) {
        StepProposal sp{s.instruction, {}};
        for (const auto& m : s.moves) {
            Placement p{m.object_id, m.to.x, m.to.y, m.to.rotation, m.stacked_on, m.repaired};
            placements.push_back(placement_json(*before, p, s.index));
            any_repaired = any_repaired || m.repaired;
            sp.placements.push_back(std::move(p));
        }
        steps.push_back(s.instruction);
        proposal.steps.push_back(std::move(sp));
        before = &s.scene;
    }
    json reference = nullptr;
    if (log.reference_id) {
        const auto ref = store_.find(*log.reference_id);
        reference = json{{"id", *log.reference_id},
                         {"instruction", ref ? ref->instruction : std::string()},
                         {"score", log.reference_score.value_or(0)}};
    }
    pending_ = std::move(proposal);
    return {200, json{{"instruction", text},
                      {"mode", mode},
                      {"steps", steps},
                      {"placements", placements},
                      {"reference", reference},
                      {"repaired", any_repaired}}};
}

ServiceResponse Service::post_apply() {
    std::unique_lock lock(mu_);
    if (!pending_) return error_response(409, "no pending proposal");
    Scene current = scene_;
    json steps = json::array();
    try {
        for (std::size_t k = 0; k < pending_->steps.size(); ++k) {
            const auto& sp = pending_->steps[k];
            auto rec = apply_step(current, static_cast<int>(k), sp.instruction, sp.placements);
            json moves = json::array();
            for (const auto& m : rec.moves) moves.push_back(move_to_json(m));
            steps.push_back(json{{"index", rec.index}, {"instruction", rec.instruction}, {"moves", moves}});
            current = rec.scene;
        }
    } catch (const std::exception& e) {
        pending_.reset();
        return error_response(422, e.what(), "execution");
    }
    scene_ = current;
    pending_.reset();
    return {200, json{{"steps", steps}, {"scene", scene_to_json(scene_)}}};
}

ServiceResponse Service::post_reject() {
    std::unique_lock lock(mu_);
    const bool had = pending_.has_value();
    pending_.reset();
    return {200, json{{"cleared", had}}};
}

ServiceResponse Service::post_accept(const json& body) {
    if (!body.contains("instruction") || !body["instruction"].is_string() ||
        trim(body["instruction"].get<std::string>()).empty()) {
        return error_response(400, "body needs a nonempty \"instruction\"");
    }
    std::unique_lock lock(mu_);
    const auto objects = std::vector<ObjectRecord>(scene_.objects().begin(), scene_.objects().end());
    try {
        const auto e = store_.add(body["instruction"].get<std::string>(), scene_.workspace(), objects,
                                  ExperienceSource::human);
        return {200, json{{"id", e.id}}};
    } catch (const StorageError& e) {
        return error_response(500, e.what(), "storage");
    }
}

ServiceResponse Service::post_reset(const json& body) {
    if (!body.contains("scene_fixture") || !body["scene_fixture"].is_string()) {
        return error_response(400, "body needs \"scene_fixture\"");
    }
    const auto name = body["scene_fixture"].get<std::string>();
    std::unique_lock lock(mu_);
    try {
        scene_ = load_fixture(config_.scenes_dir, name);
    } catch (const std::invalid_argument& e) {
        return error_response(400, e.what());
    } catch (const StorageError& e) {
        return error_response(404, e.what());
    }
    pending_.reset();
    json j = scene_to_json(scene_);
    j["pending"] = false;
    return {200, j};
}

}  // namespace rearrange
