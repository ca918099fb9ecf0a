#include "rearrange/oracle_backend.hpp"

#include "rearrange/error.hpp"
#include "rearrange/prompts.hpp"
#include "rearrange/scene_json.hpp"

namespace rearrange {

using nlohmann::json;

OracleBackend::OracleBackend(PredicateConfig config, std::vector<CannedRule> rules)
    : config_(config), fallback_(std::move(rules)) {}

std::string OracleBackend::complete(const ChatRequest& request) {
    if (request.tag != RequestTag::placement) return fallback_.complete(request);
    request.validate();
    const auto trailer = extract_trailer(request.joined_content());
    if (!trailer) throw BackendError("oracle: prompt lacks the scene trailer");

    try {
        Scene scene = scene_from_json(*trailer);
        std::vector<RelationSpec> specs;
        if (auto it = trailer->find("relations"); it != trailer->end() && it->is_array()) {
            for (const auto& r : *it) specs.push_back(relation_from_json(r));
        } else {
            specs = parse_relation(trailer->at("instruction").get<std::string>(), scene);
        }

        std::vector<PlacementRecord> out;
        for (const auto& spec : specs) {
            for (const auto& p : solve_relation(scene, spec, config_)) {
                scene = scene.apply_move(p);
                std::erase_if(out, [&](const PlacementRecord& r) { return r.id == p.object_id; });
                out.push_back(PlacementRecord{p.object_id, p.x, p.y, p.rotation, p.stacked_on});
            }
        }
        return render_placement_records(out);
    } catch (const BackendError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError(std::string("oracle: ") + e.what());
    }
}

}  // namespace rearrange
