#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/executor.hpp"
#include "rearrange/hash.hpp"
#include "rearrange/llm.hpp"
#include "rearrange/reasoner.hpp"
#include "rearrange/scene.hpp"

namespace rearrange {

// Counter-based generator: value i is splitmix64(splitmix64(seed) + i), so
// neighbouring seeds start far apart in the counter space.
class SplitMixRng {
public:
    explicit SplitMixRng(std::uint64_t seed) : state_(splitmix64(seed)) {}
    std::uint64_t next() noexcept { return splitmix64(state_++); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * unit_double(next()); }

private:
    std::uint64_t state_;
};

inline constexpr int kRandomMaxAttempts = 10000;
inline constexpr double kDefaultGapPx = 40.0;

// Uniform center within the workspace shrunk by each box's half diagonal,
// rotation kept, rejection-sampled against the scene as updated by the
// earlier objects. Throws Error after kRandomMaxAttempts misses.
std::vector<Placement> random_placement(const Scene& scene,
                                        std::span<const std::string> relevant_ids,
                                        std::uint64_t seed);

// Axis-aligned row on y = H/2 in scene order, adjacent extents exactly
// gap_px apart, centered horizontally. Throws Error when the row does not fit.
std::vector<Placement> geometric_placement(const Scene& scene,
                                           std::span<const std::string> relevant_ids,
                                           double gap_px = kDefaultGapPx);

enum class Baseline { random, geometric };

struct BaselineOptions {
    std::uint64_t seed = 0;
    double gap_px = kDefaultGapPx;
    PipelineOptions pipeline;
};

// Runs a baseline once per planned step on the grounded relevant objects,
// recording moves like the reasoning pipeline does. Throws PipelineError.
ExecutionLog run_baseline(const Scene& scene, std::string_view instruction, Baseline baseline,
                          ChatBackend& llm, const BaselineOptions& options = {});

// Applies a batch of placements at once and records one move per placement.
StepRecord apply_step(const Scene& scene, int index, std::string instruction,
                      const std::vector<Placement>& placements);

}  // namespace rearrange
