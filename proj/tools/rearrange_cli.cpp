// rearrange: command-line entry points (run, bench, store, serve).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "rearrange/benchmark.hpp"
#include "rearrange/error.hpp"
#include "rearrange/experience_store.hpp"
#include "rearrange/language.hpp"
#include "rearrange/reasoner.hpp"
#include "rearrange/scene_json.hpp"
#include "rearrange/service.hpp"
#include "rearrange/service_http.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rearrange;

namespace {

// Exit codes: 0 ok, 1 relation unsatisfied / pipeline failure, 2 usage or config error.
constexpr int kExitUnsatisfied = 1;
constexpr int kExitConfig = 2;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flag precedence: command line, then the --config file, then REARRANGE_* env.
class Settings {
public:
    void set_cli(const std::string& key, const std::string& value) { cli_[key] = value; }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file '" + path + "'");
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            ++n;
            auto t = trim(line);
            if (t.empty() || t.front() == '#' || t.front() == '[') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
            }
            auto key = trim(t.substr(0, eq));
            auto value = trim(t.substr(eq + 1));
            if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
                value.back() == value.front()) {
                value = value.substr(1, value.size() - 2);
            }
            std::replace(key.begin(), key.end(), '-', '_');
            file_[key] = value;
        }
    }

    std::optional<std::string> get(const std::string& key) const {
        if (auto it = cli_.find(key); it != cli_.end()) return it->second;
        if (auto it = file_.find(key); it != file_.end()) return it->second;
        std::string env = "REARRANGE_" + key;
        for (auto& c : env) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* v = std::getenv(env.c_str()); v != nullptr && *v != '\0') return std::string(v);
        return std::nullopt;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        return get(key).value_or(fallback);
    }

    std::uint64_t seed() const {
        const auto s = get_or("seed", "0");
        try {
            std::size_t used = 0;
            const auto v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("seed must be an unsigned integer, got '" + s + "'");
        }
    }

    double gap_px() const {
        const auto s = get_or("gap_px", "40");
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || !(v >= 0.0)) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("gap-px must be a non-negative number, got '" + s + "'");
        }
    }

    PredicateConfig predicates() const {
        PredicateConfig p;
        const auto axis = get_or("front_axis", "+y");
        if (axis != "+y" && axis != "-y") throw ConfigError("front-axis must be +y or -y");
        p.front_is_positive_y = axis == "+y";
        return p;
    }

    RemoteConfig remote() const {
        RemoteConfig r;
        r.base_url = get_or("base_url", r.base_url);
        r.model = get_or("model", r.model);
        r.api_key = get_or("api_key", "");
        return r;
    }

    fs::path data_dir() const { return get_or("data_dir", REARRANGE_DATA_DIR); }
    fs::path scenes_dir() const { return data_dir() / "scenes"; }
    fs::path seeds_dir() const { return data_dir() / "seed_store"; }

    std::unique_ptr<ChatBackend> backend() const {
        const auto name = get_or("backend", "scripted");
        if (name == "remote") {
            const auto r = remote();
            if (r.api_key.empty()) throw ConfigError("remote backend needs --api-key or REARRANGE_API_KEY");
        }
        try {
            return make_backend(name, remote(), predicates());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    std::unique_ptr<Embedder> embedder() const {
        try {
            return make_embedder(get_or("embedder", "scripted"), get_or("embed_url", ""));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    std::string mode() const {
        const auto m = get_or("mode", "with_reference");
        if (!reasoning_mode_from_string(m)) {
            throw ConfigError("mode must be with_reference or without_reference, got '" + m + "'");
        }
        return m;
    }

    // Store used for reading; the bundled seeds when none is configured.
    fs::path read_store_dir() const {
        if (auto d = get("store_dir")) return writable_store_dir();
        return seeds_dir();
    }

    fs::path writable_store_dir() const {
        const fs::path dir = get_or("store_dir", "rearrange-store");
        initialize_store_from_seeds(dir, seeds_dir());
        return dir;
    }

    Scene scene() const {
        const auto s = get("scene");
        if (!s) throw ConfigError("--scene is required");
        try {
            if (s->find('/') != std::string::npos || s->ends_with(".json")) return load_scene_file(*s);
            return load_fixture(scenes_dir(), *s);
        } catch (const Error& e) {
            throw ConfigError("scene '" + *s + "': " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError("scene '" + *s + "': " + e.what());
        }
    }

private:
    std::map<std::string, std::string> cli_;
    std::map<std::string, std::string> file_;
};

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

int cmd_run(const Settings& s, const std::string& instruction) {
    if (trim(instruction).empty()) throw ConfigError("--instruction is required");
    const Scene scene = s.scene();
    auto llm = s.backend();
    const auto embedder = s.embedder();
    const ExperienceStore store(s.read_store_dir(), ExperienceStore::OpenMode::must_exist);
    const auto mode = *reasoning_mode_from_string(s.mode());

    json out;
    ExecutionLog log;
    bool failed = false;
    try {
        log = execute_instruction(scene, instruction, &store, *llm, mode, PipelineOptions{embedder.get()});
    } catch (const PipelineError& e) {
        std::cerr << "pipeline failed at " << e.stage() << ": " << e.what() << "\n";
        log = e.log();
        failed = true;
    }
    std::vector<const Scene*> scenes;
    for (const auto& st : log.steps) scenes.push_back(&st.scene);
    auto verdict = judge(scene, scenes, instruction, s.predicates());
    if (verdict.error) std::cerr << verdict.error.value() << "\n";
    const bool satisfied = !failed && verdict.satisfied;

    out["log"] = log_to_json(log);
    out["final_scene"] = scene_to_json(log.final_scene() ? *log.final_scene() : scene);
    out["relations"] = verdict.detail;
    out["satisfied"] = satisfied;
    std::cout << out.dump(2) << "\n";
    return satisfied ? 0 : kExitUnsatisfied;
}

int cmd_bench(const Settings& s, const std::string& methods, const std::string& format,
              const std::string& output) {
    BenchmarkConfig cfg;
    cfg.methods.clear();
    std::stringstream ss(methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto m = method_from_string(trim(item));
        if (!m) {
            throw ConfigError("unknown method '" + item +
                              "' (expected random, geometric, ours_no_ref, ours_with_ref)");
        }
        cfg.methods.push_back(*m);
    }
    if (cfg.methods.empty()) throw ConfigError("--methods is empty");
    if (format != "table" && format != "csv" && format != "doc") {
        throw ConfigError("--format must be table, csv or doc");
    }
    auto llm = s.backend();
    const auto embedder = s.embedder();
    const ExperienceStore store(s.read_store_dir(), ExperienceStore::OpenMode::must_exist);
    cfg.pipeline.embedder = embedder.get();
    cfg.scenes_dir = s.scenes_dir();
    cfg.store = &store;
    cfg.llm = llm.get();
    cfg.seed = s.seed();
    cfg.gap_px = s.gap_px();
    cfg.predicates = s.predicates();

    EvalReport report;
    try {
        report = run_benchmark(cfg);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    std::string text;
    if (format == "table") {
        text = render_table(report);
    } else if (format == "csv") {
        text = render_csv(report);
    } else {
        text = report_to_json(report).dump(2) + "\n";
    }
    write_output(text, output);
    return 0;
}

int cmd_store_list(const Settings& s) {
    const ExperienceStore store(s.read_store_dir(), ExperienceStore::OpenMode::must_exist);
    for (const auto& e : store.experiences()) {
        std::cout << e.id << '\t' << to_string(e.source) << '\t' << e.created_at << '\t'
                  << e.instruction << '\n';
    }
    return 0;
}

int cmd_store_add(const Settings& s, const std::string& instruction, const std::string& source) {
    if (trim(instruction).empty()) throw ConfigError("--instruction is required");
    const auto src = experience_source_from_string(source);
    if (!src) throw ConfigError("--source must be human or robot");
    const Scene scene = s.scene();
    ExperienceStore store(s.writable_store_dir());
    const auto e = store.add(instruction, scene.workspace(),
                             {scene.objects().begin(), scene.objects().end()}, *src);
    std::cout << e.id << '\n';
    return 0;
}

int cmd_store_export(const Settings& s, const std::string& output) {
    const ExperienceStore store(s.read_store_dir(), ExperienceStore::OpenMode::must_exist);
    json all = json::array();
    for (const auto& e : store.experiences()) all.push_back(experience_to_json(e));
    write_output(all.dump(2) + "\n", output);
    return 0;
}

int cmd_serve(const Settings& s, const std::string& listen, const std::string& console) {
    const auto [host, port] = [&] {
        try {
            return parse_listen_address(listen);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();
    ServiceConfig cfg;
    cfg.scenes_dir = s.scenes_dir();
    cfg.store_dir = s.writable_store_dir();
    cfg.initial_scene = s.get_or("scene", "scene1");
    cfg.backend = s.get_or("backend", "oracle");
    cfg.mode = s.mode();
    cfg.gap_px = s.gap_px();
    cfg.seed = s.seed();
    cfg.predicates = s.predicates();
    cfg.remote = s.remote();
    cfg.embedder = s.get_or("embedder", "scripted");
    cfg.embed_url = s.get_or("embed_url", "");
    std::unique_ptr<Service> service;
    try {
        service = std::make_unique<Service>(cfg);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    std::optional<fs::path> console_dir;
    if (!console.empty()) console_dir = console;
    HttpServer server(*service, console_dir);
    const int bound = server.bind(host, port);
    std::cerr << "listening on http://" << host << ":" << bound << std::endl;
    server.listen();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Language-conditioned tabletop rearrangement"};
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> flags;
    const std::vector<std::pair<std::string, std::string>> common{
        {"backend", "Chat backend: scripted, oracle or remote"},
        {"model", "Model name for the remote backend"},
        {"base-url", "Base URL of the chat-completions server"},
        {"api-key", "API key for the remote backend"},
        {"seed", "Seed for the random baseline"},
        {"store-dir", "Experience store directory"},
        {"scene", "Scene fixture name (scene1..scene3) or path to a scene file"},
        {"embedder", "Embedder: scripted or remote"},
        {"embed-url", "Endpoint of the remote embedder"},
        {"mode", "with_reference or without_reference"},
        {"gap-px", "Gap of the geometric baseline row, pixels"},
        {"front-axis", "Image axis that points to the table front: +y or -y"},
        {"data-dir", "Directory holding scenes/ and seed_store/"},
    };
    for (const auto& [name, help] : common) app.add_option("--" + name, flags[name], help);
    std::string config_path;
    app.add_option("--config", config_path, "key = value file (flags override it, it overrides env)");

    std::string instruction;
    auto* run = app.add_subcommand("run", "Execute one instruction and check its relations");
    run->add_option("--instruction,-i", instruction, "Instruction text")->required();

    std::string methods = "random,geometric,ours_no_ref,ours_with_ref";
    std::string format = "table";
    std::string output;
    auto* bench = app.add_subcommand("bench", "Run the fifteen-instruction benchmark");
    bench->add_option("--methods", methods, "Comma-separated methods");
    bench->add_option("--format", format, "table, csv or doc");
    bench->add_option("--output,-o", output, "Write the report here instead of stdout");

    auto* store = app.add_subcommand("store", "Experience store management");
    store->require_subcommand(1);
    auto* store_list = store->add_subcommand("list", "One row per experience");
    std::string add_instruction, add_source = "human";
    auto* store_add = store->add_subcommand("add", "Store a scene as a new experience");
    store_add->add_option("--instruction,-i", add_instruction, "Instruction text")->required();
    store_add->add_option("--source", add_source, "human or robot");
    std::string export_output;
    auto* store_export = store->add_subcommand("export", "Dump every experience as JSON");
    store_export->add_option("--output,-o", export_output, "Output file (stdout by default)");

    std::string listen = "127.0.0.1:7788";
    std::string console;
    auto* serve = app.add_subcommand("serve", "Start the HTTP control service");
    serve->add_option("--listen", listen, "host:port");
    serve->add_option("--with-console", console, "Directory of console assets to serve");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        Settings settings;
        if (!config_path.empty()) settings.load_file(config_path);
        for (const auto& [name, value] : flags) {
            if (app.count("--" + name) > 0) {
                std::string key = name;
                std::replace(key.begin(), key.end(), '-', '_');
                settings.set_cli(key, value);
            }
        }
        if (*run) return cmd_run(settings, instruction);
        if (*bench) return cmd_bench(settings, methods, format, output);
        if (*store_list) return cmd_store_list(settings);
        if (*store_add) return cmd_store_add(settings, add_instruction, add_source);
        if (*store_export) return cmd_store_export(settings, export_output);
        if (*serve) return cmd_serve(settings, listen, console);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
