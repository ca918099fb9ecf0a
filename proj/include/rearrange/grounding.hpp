#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rearrange/llm.hpp"
#include "rearrange/remote.hpp"
#include "rearrange/scene.hpp"

namespace rearrange {

inline constexpr std::string_view kOthers = "others";

class EmbeddingVector {
public:
    // Throws std::invalid_argument for fewer than two components or
    // non-finite values. Zero vectors are representable but cannot be compared.
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    double norm() const noexcept { return norm_; }

    EmbeddingVector scaled(double factor) const;

private:
    std::vector<double> values_;
    double norm_;
};

using NamedEmbeddings = std::vector<std::pair<std::string, EmbeddingVector>>;

// (u . v) / (|u| |v|). Throws std::invalid_argument on dimension mismatch or
// a zero vector.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// Each object gets the category of highest cosine similarity; ties go to the
// earlier category. Throws std::invalid_argument for an empty category set.
std::map<std::string, std::string> assign_categories(const NamedEmbeddings& objects,
                                                     const NamedEmbeddings& categories);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed_text(std::string_view text) const = 0;
    virtual EmbeddingVector embed_object(const ObjectRecord& object) const = 0;
};

// Hash-seeded unit vectors: the lowercase string seeds a counter-based
// generator, so the same string maps to the same vector on every platform.
// Object embeddings come from the object's true category plus an optional
// id-seeded noise term.
class ScriptedEmbedder : public Embedder {
public:
    explicit ScriptedEmbedder(std::size_t dim = 64, double noise = 0.0);

    EmbeddingVector embed_text(std::string_view text) const override;
    EmbeddingVector embed_object(const ObjectRecord& object) const override;

private:
    std::vector<double> raw(std::string_view key) const;

    std::size_t dim_;
    double noise_;
};

// POSTs {"input": [texts]} and reads {"embeddings": [[...]]}. Objects are
// embedded through their category label (no image patches in simulation).
class RemoteEmbedder : public Embedder {
public:
    RemoteEmbedder(std::string url, std::shared_ptr<HttpTransport> transport = make_http_transport(),
                   std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;
    EmbeddingVector embed_text(std::string_view text) const override;
    EmbeddingVector embed_object(const ObjectRecord& object) const override;

private:
    std::string url_;
    std::shared_ptr<HttpTransport> transport_;
    std::chrono::milliseconds timeout_;
};

// Object categories involved in the instruction, lowercased and
// deduplicated, with "others" appended exactly once at the end.
// Throws std::invalid_argument for an empty instruction and ParseError for an
// unreadable reply.
std::vector<std::string> extract_relevant_objects(std::string_view instruction, ChatBackend& llm);

// Pipeline grounding: assign_categories over `categories`, then objects whose
// best similarity to a named category is below `min_similarity` fall back to
// "others". Returns id -> category for every scene object.
std::map<std::string, std::string> ground_objects(const Scene& scene,
                                                  const std::vector<std::string>& categories,
                                                  const Embedder& embedder,
                                                  double min_similarity = 0.5);

}  // namespace rearrange
