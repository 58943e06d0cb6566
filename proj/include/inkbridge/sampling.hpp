#pragma once

// Single-step decoding samplers over a logit vector. Randomness comes only
// from an explicitly threaded xoshiro256** stream.

#include "inkbridge/error.hpp"
#include "inkbridge/prng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace inkbridge {

enum class SamplingStrategy { top_k, nucleus, greedy };

std::string_view to_string(SamplingStrategy s) noexcept;
SamplingStrategy parse_strategy(std::string_view text);

/// Inference-time defaults: top-k with k = 12 at temperature 0.6; nucleus p = 0.9.
struct SamplingConfig {
    SamplingStrategy strategy = SamplingStrategy::top_k;
    std::size_t k = 12;
    double temperature = 0.6;
    double p = 0.9;
    std::uint64_t seed = 0;

    void validate() const;
};

/// exp(v / T - m) / sum, m = max(v / T). Requires T > 0 and a non-empty, finite vector.
std::vector<double> softmax_temperature(std::span<const double> logits, double temperature);

/// Indices in descending probability order, ties by lowest index.
std::vector<std::size_t> ranked_indices(std::span<const double> values);

/// Support and renormalized probabilities a sampler draws from, in draw order.
struct SamplingSupport {
    std::vector<std::size_t> indices;
    std::vector<double> probabilities;
};

/// The k highest temperature-scaled logits, renormalized. k above |V| is clamped (with a warning).
SamplingSupport top_k_support(std::span<const double> logits, const SamplingConfig &cfg, Diagnostics *diag = nullptr);

/// Smallest probability-descending prefix whose cumulative mass reaches p, renormalized.
SamplingSupport nucleus_support(std::span<const double> logits, const SamplingConfig &cfg);

/// Inverse-CDF draw over a support using one uniform from rng.
std::size_t draw(const SamplingSupport &support, Xoshiro256 &rng);

std::size_t top_k_sample(std::span<const double> logits, const SamplingConfig &cfg, Xoshiro256 &rng,
                         Diagnostics *diag = nullptr);
std::size_t nucleus_sample(std::span<const double> logits, const SamplingConfig &cfg, Xoshiro256 &rng);
/// Argmax, lowest index on ties. Consumes no randomness.
std::size_t greedy_pick(std::span<const double> logits);

/// Dispatches on cfg.strategy.
std::size_t sample(std::span<const double> logits, const SamplingConfig &cfg, Xoshiro256 &rng,
                   Diagnostics *diag = nullptr);

} // namespace inkbridge
