#include "rearrange/benchmark.hpp"

#include <cstdio>
#include <sstream>

#include "rearrange/error.hpp"
#include "rearrange/reasoner.hpp"

namespace rearrange {

using nlohmann::json;

std::string_view to_string(Method m) {
    switch (m) {
        case Method::random: return "random";
        case Method::geometric: return "geometric";
        case Method::ours_no_ref: return "ours_no_ref";
        case Method::ours_with_ref: return "ours_with_ref";
    }
    return "?";
}

std::optional<Method> method_from_string(std::string_view name) {
    for (Method m : {Method::random, Method::geometric, Method::ours_no_ref, Method::ours_with_ref}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

std::string_view method_label(Method m) {
    switch (m) {
        case Method::random: return "Random";
        case Method::geometric: return "Geometric";
        case Method::ours_no_ref: return "Ours w/o reference";
        case Method::ours_with_ref: return "Ours";
    }
    return "?";
}

const std::vector<BenchmarkInstruction>& benchmark_instructions() {
    static const std::vector<BenchmarkInstruction> list{
        {1, 1, "scene1", "put the eggplant on the right of the plate"},
        {1, 2, "scene1", "put the eggplant on the left of the plate"},
        {1, 3, "scene1", "put the eggplant in front of the plate"},
        {1, 4, "scene1", "put the eggplant behind the plate"},
        {1, 5, "scene1", "put the eggplant far away from the plate"},
        {2, 1, "scene2", "put the potatoes on the plate"},
        {2, 2, "scene2", "put the potatoes beside the plate"},
        {2, 3, "scene2", "put one potato to the left of the plate and the other to the right"},
        {2, 4, "scene2", "put the potatoes far away from the plate"},
        {2, 5, "scene2", "put the potatoes together"},
        {3, 1, "scene3", "put the eggplant on the plate, then beside the plate"},
        {3, 2, "scene3", "put eggplant beside the plate, then beside the carrot"},
        {3, 3, "scene3", "put the eggplant beside the potato, then put the eggplant on the plate"},
        {3, 4, "scene3", "put the eggplant beside the carrot, then far away from the carrot"},
        {3, 5, "scene3", "put the eggplant on the right of the potato, then on the left of the pineapple"},
    };
    return list;
}

std::string_view scenario_label(int scenario) {
    switch (scenario) {
        case 1: return "Single object";
        case 2: return "Multiple objects";
        case 3: return "Sequential order";
    }
    return "?";
}

double EvalReport::success_rate(Method m) const {
    int total = 0, ok = 0;
    for (const auto& r : results) {
        if (r.method != m) continue;
        ++total;
        ok += r.satisfied ? 1 : 0;
    }
    return total == 0 ? 0.0 : static_cast<double>(ok) / total;
}

double EvalReport::scenario_rate(Method m, int scenario) const {
    int total = 0, ok = 0;
    for (const auto& r : results) {
        if (r.method != m || r.scenario != scenario) continue;
        ++total;
        ok += r.satisfied ? 1 : 0;
    }
    return total == 0 ? 0.0 : static_cast<double>(ok) / total;
}

InstructionResult judge(const Scene& initial, const std::vector<const Scene*>& step_scenes,
                        std::string_view instruction, const PredicateConfig& predicates) {
    InstructionResult r{};
    r.instruction = std::string(instruction);
    std::vector<RelationSpec> specs;
    try {
        specs = parse_relation(instruction, initial);
    } catch (const std::exception& e) {
        r.error = std::string("relation parse: ") + e.what();
        return r;
    }
    r.satisfied = true;
    for (const auto& spec : specs) {
        bool ok = false;
        const auto k = static_cast<std::size_t>(spec.step_index);
        if (k < step_scenes.size() && step_scenes[k] != nullptr) {
            ok = check(*step_scenes[k], spec, predicates);
        }
        r.detail.push_back(describe(spec) + ": " + (ok ? "true" : "false"));
        r.satisfied = r.satisfied && ok;
    }
    return r;
}

EvalReport run_benchmark(const BenchmarkConfig& config) {
    if (config.llm == nullptr) throw std::invalid_argument("benchmark needs a chat backend");
    EvalReport report;
    report.methods = config.methods;
    for (Method m : config.methods) {
        for (const auto& item : benchmark_instructions()) {
            const auto path = config.scenes_dir / (item.scene + ".json");
            if (!std::filesystem::exists(path)) {
                throw StorageError("scene fixture '" + path.string() + "' is missing");
            }
            const Scene scene = load_scene_file(path.string());

            std::optional<ExecutionLog> log;
            std::optional<std::string> error;
            try {
                switch (m) {
                    case Method::random:
                    case Method::geometric: {
                        BaselineOptions opts{config.seed, config.gap_px, config.pipeline};
                        log = run_baseline(scene, item.text,
                                           m == Method::random ? Baseline::random : Baseline::geometric,
                                           *config.llm, opts);
                        break;
                    }
                    case Method::ours_no_ref:
                    case Method::ours_with_ref:
                        log = execute_instruction(scene, item.text, config.store, *config.llm,
                                                  m == Method::ours_with_ref
                                                      ? ReasoningMode::with_reference
                                                      : ReasoningMode::without_reference,
                                                  config.pipeline);
                        break;
                }
            } catch (const PipelineError& e) {
                error = e.stage() + ": " + e.what();
            }

            std::vector<const Scene*> scenes;
            if (log) {
                for (const auto& s : log->steps) scenes.push_back(&s.scene);
            }
            auto r = judge(scene, scenes, item.text, config.predicates);
            r.method = m;
            r.scenario = item.scenario;
            r.number = item.number;
            if (error) {
                r.satisfied = false;
                r.error = error;
            }
            report.results.push_back(std::move(r));
        }
    }
    return report;
}

namespace {

std::string rate(double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render_table(const EvalReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %16s %18s %18s %8s\n", "Method", "Single object",
                  "Multiple objects", "Sequential order", "Mean");
    out << line;
    for (Method m : report.methods) {
        std::snprintf(line, sizeof line, "%-20s %16s %18s %18s %8s\n",
                      std::string(method_label(m)).c_str(), rate(report.scenario_rate(m, 1)).c_str(),
                      rate(report.scenario_rate(m, 2)).c_str(),
                      rate(report.scenario_rate(m, 3)).c_str(), rate(report.success_rate(m)).c_str());
        out << line;
    }
    return out.str();
}

std::string render_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "method,single_object,multiple_objects,sequential_order,mean\n";
    for (Method m : report.methods) {
        out << to_string(m) << ',' << rate(report.scenario_rate(m, 1)) << ','
            << rate(report.scenario_rate(m, 2)) << ',' << rate(report.scenario_rate(m, 3)) << ','
            << rate(report.success_rate(m)) << '\n';
    }
    return out.str();
}

json report_to_json(const EvalReport& report) {
    json methods = json::array();
    for (Method m : report.methods) {
        json row{{"method", std::string(to_string(m))},
                 {"label", std::string(method_label(m))},
                 {"success_rate", report.success_rate(m)}};
        for (int s = 1; s <= 3; ++s) row["scenarios"][std::string(scenario_label(s))] = report.scenario_rate(m, s);
        methods.push_back(row);
    }
    json results = json::array();
    for (const auto& r : report.results) {
        json j{{"method", std::string(to_string(r.method))},
               {"scenario", r.scenario},
               {"number", r.number},
               {"instruction", r.instruction},
               {"satisfied", r.satisfied},
               {"relations", r.detail}};
        j["error"] = r.error ? json(*r.error) : json(nullptr);
        results.push_back(j);
    }
    return json{{"methods", methods}, {"results", results}};
}

}  // namespace rearrange
