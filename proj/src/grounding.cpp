#include "rearrange/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rearrange/error.hpp"
#include "rearrange/hash.hpp"
#include "rearrange/language.hpp"
#include "rearrange/prompts.hpp"

namespace rearrange {

using nlohmann::json;

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)), norm_(0) {
    if (values_.size() < 2) throw std::invalid_argument("embedding needs at least two components");
    double sum = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("embedding components must be finite");
        sum += v * v;
    }
    norm_ = std::sqrt(sum);
}

EmbeddingVector EmbeddingVector::scaled(double factor) const {
    std::vector<double> out = values_;
    for (auto& v : out) v *= factor;
    return EmbeddingVector(std::move(out));
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim()) {
        throw std::invalid_argument("embedding dimension mismatch: " + std::to_string(u.dim()) +
                                    " vs " + std::to_string(v.dim()));
    }
    if (u.norm() == 0.0 || v.norm() == 0.0) {
        throw std::invalid_argument("cosine similarity of a zero vector");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) dot += u.values()[i] * v.values()[i];
    return std::clamp(dot / (u.norm() * v.norm()), -1.0, 1.0);
}

std::map<std::string, std::string> assign_categories(const NamedEmbeddings& objects,
                                                     const NamedEmbeddings& categories) {
    if (categories.empty()) throw std::invalid_argument("assign_categories needs a category");
    std::map<std::string, std::string> out;
    for (const auto& [id, vec] : objects) {
        std::size_t best = 0;
        double best_sim = cosine_similarity(vec, categories[0].second);
        for (std::size_t c = 1; c < categories.size(); ++c) {
            const double s = cosine_similarity(vec, categories[c].second);
            if (s > best_sim) {
                best_sim = s;
                best = c;
            }
        }
        out[id] = categories[best].first;
    }
    return out;
}

// --- scripted embedder --------------------------------------------------------

ScriptedEmbedder::ScriptedEmbedder(std::size_t dim, double noise) : dim_(dim), noise_(noise) {
    if (dim_ < 2) throw std::invalid_argument("embedding dimension must be at least 2");
    if (!(noise_ >= 0.0)) throw std::invalid_argument("noise amplitude must be >= 0");
}

std::vector<double> ScriptedEmbedder::raw(std::string_view key) const {
    const std::uint64_t seed = fnv1a64(to_lower(key));
    std::vector<double> v(dim_);
    double sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        v[i] = 2.0 * unit_double(splitmix64(seed + i)) - 1.0;
        sum += v[i] * v[i];
    }
    const double n = std::sqrt(sum);
    for (auto& x : v) x /= n;
    return v;
}

EmbeddingVector ScriptedEmbedder::embed_text(std::string_view text) const {
    return EmbeddingVector(raw(text));
}

EmbeddingVector ScriptedEmbedder::embed_object(const ObjectRecord& object) const {
    auto v = raw(object.category);
    if (noise_ > 0.0) {
        const auto n = raw("object-noise:" + object.id);
        for (std::size_t i = 0; i < dim_; ++i) v[i] += noise_ * n[i];
    }
    return EmbeddingVector(std::move(v));
}

// --- remote embedder ----------------------------------------------------------

RemoteEmbedder::RemoteEmbedder(std::string url, std::shared_ptr<HttpTransport> transport,
                               std::chrono::milliseconds timeout)
    : url_(std::move(url)), transport_(std::move(transport)), timeout_(timeout) {
    if (!transport_) throw std::invalid_argument("remote embedder needs a transport");
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
    const auto resp = transport_->post(url_, {{"Content-Type", "application/json"}},
                                       json{{"input", texts}}.dump(), timeout_);
    if (resp.status < 200 || resp.status >= 300) {
        throw BackendError("embedding endpoint returned HTTP " + std::to_string(resp.status),
                           resp.status);
    }
    std::vector<EmbeddingVector> out;
    try {
        const auto j = json::parse(resp.body);
        for (const auto& row : j.at("embeddings")) {
            out.emplace_back(row.get<std::vector<double>>());
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed embedding response: ") + e.what(), resp.body);
    }
    if (out.size() != texts.size()) {
        throw ParseError("embedding response has " + std::to_string(out.size()) +
                             " rows for " + std::to_string(texts.size()) + " inputs",
                         resp.body);
    }
    return out;
}

EmbeddingVector RemoteEmbedder::embed_text(std::string_view text) const {
    return embed_batch({std::string(text)}).front();
}

EmbeddingVector RemoteEmbedder::embed_object(const ObjectRecord& object) const {
    return embed_text(object.category);
}

// --- pipeline helpers ---------------------------------------------------------

std::vector<std::string> extract_relevant_objects(std::string_view instruction, ChatBackend& llm) {
    if (trim(instruction).empty()) throw std::invalid_argument("instruction must be nonempty");
    const auto reply = llm.complete(object_extraction_request(instruction));
    const auto items = parse_string_list(reply);
    std::vector<std::string> out;
    for (const auto& item : items) {
        auto name = to_lower(trim(item));
        if (name.empty() || name == kOthers) continue;
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    }
    out.emplace_back(kOthers);
    return out;
}

std::map<std::string, std::string> ground_objects(const Scene& scene,
                                                  const std::vector<std::string>& categories,
                                                  const Embedder& embedder,
                                                  double min_similarity) {
    NamedEmbeddings cats;
    for (const auto& c : categories) cats.emplace_back(c, embedder.embed_text(c));
    if (cats.empty()) cats.emplace_back(std::string(kOthers), embedder.embed_text(kOthers));

    NamedEmbeddings objs;
    for (const auto& o : scene.objects()) objs.emplace_back(o.id, embedder.embed_object(o));
    auto assigned = assign_categories(objs, cats);

    for (const auto& [id, vec] : objs) {
        double best_named = -1.0;
        for (const auto& [name, cvec] : cats) {
            if (name != kOthers) best_named = std::max(best_named, cosine_similarity(vec, cvec));
        }
        if (best_named < min_similarity) assigned[id] = std::string(kOthers);
    }
    return assigned;
}

}  // namespace rearrange
