#include "inkbridge/sampling.hpp"

#include "inkbridge/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace inkbridge {

std::string_view to_string(SamplingStrategy s) noexcept {
    switch (s) {
    case SamplingStrategy::top_k:
        return "top_k";
    case SamplingStrategy::nucleus:
        return "nucleus";
    case SamplingStrategy::greedy:
        return "greedy";
    }
    return "top_k";
}

SamplingStrategy parse_strategy(std::string_view text) {
    if (text == "top_k" || text == "top-k") {
        return SamplingStrategy::top_k;
    }
    if (text == "nucleus" || text == "top_p" || text == "top-p") {
        return SamplingStrategy::nucleus;
    }
    if (text == "greedy") {
        return SamplingStrategy::greedy;
    }
    throw ValidationError("unknown sampling strategy '" + std::string(text) + "'");
}

void SamplingConfig::validate() const {
    if (k < 1) {
        throw ValidationError("sampling k must be at least 1");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ValidationError("sampling temperature must be positive");
    }
    if (!(p > 0.0 && p <= 1.0)) {
        throw ValidationError("nucleus p must lie in (0, 1]");
    }
}

namespace {

void check_logits(std::span<const double> logits) {
    if (logits.empty()) {
        throw ValidationError("empty logit vector");
    }
    for (const double v : logits) {
        if (!std::isfinite(v)) {
            throw ValidationError("non-finite logit");
        }
    }
}

SamplingSupport renormalized(std::vector<std::size_t> indices, std::span<const double> probs) {
    SamplingSupport support;
    support.probabilities.reserve(indices.size());
    const double mass = pairwise_sum_of(indices.size(), [&](std::size_t i) { return probs[indices[i]]; });
    for (const auto idx : indices) {
        support.probabilities.push_back(probs[idx] / mass);
    }
    support.indices = std::move(indices);
    return support;
}

} // namespace

std::vector<double> softmax_temperature(std::span<const double> logits, double temperature) {
    check_logits(logits);
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ValidationError("softmax temperature must be positive");
    }
    std::vector<double> scaled(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        scaled[i] = logits[i] / temperature;
    }
    const double top = *std::max_element(scaled.begin(), scaled.end());
    for (auto &v : scaled) {
        v = std::exp(v - top);
    }
    const double total = pairwise_sum(scaled);
    for (auto &v : scaled) {
        v /= total;
    }
    return scaled;
}

std::vector<std::size_t> ranked_indices(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [values](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    return order;
}

SamplingSupport top_k_support(std::span<const double> logits, const SamplingConfig &cfg, Diagnostics *diag) {
    cfg.validate();
    const auto probs = softmax_temperature(logits, cfg.temperature);
    std::size_t k = cfg.k;
    if (k > logits.size()) {
        warn(diag, "top-k: k = " + std::to_string(k) + " exceeds vocabulary size " + std::to_string(logits.size()) +
                       "; clamped");
        k = logits.size();
    }
    // Rank on the scaled logits themselves so ties at the k-th slot resolve by index, not by rounding in exp.
    auto order = ranked_indices(logits);
    order.resize(k);
    return renormalized(std::move(order), probs);
}

SamplingSupport nucleus_support(std::span<const double> logits, const SamplingConfig &cfg) {
    cfg.validate();
    const auto probs = softmax_temperature(logits, cfg.temperature);
    auto order = ranked_indices(logits);
    std::size_t keep = 0;
    double cumulative = 0.0;
    while (keep < order.size()) {
        cumulative += probs[order[keep]];
        ++keep;
        if (cumulative >= cfg.p) {
            break;
        }
    }
    order.resize(keep);
    return renormalized(std::move(order), probs);
}

std::size_t draw(const SamplingSupport &support, Xoshiro256 &rng) {
    if (support.indices.empty()) {
        throw ValidationError("cannot draw from an empty support");
    }
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < support.indices.size(); ++i) {
        cumulative += support.probabilities[i];
        if (u < cumulative) {
            return support.indices[i];
        }
    }
    return support.indices.back();
}

std::size_t top_k_sample(std::span<const double> logits, const SamplingConfig &cfg, Xoshiro256 &rng,
                         Diagnostics *diag) {
    return draw(top_k_support(logits, cfg, diag), rng);
}

std::size_t nucleus_sample(std::span<const double> logits, const SamplingConfig &cfg, Xoshiro256 &rng) {
    return draw(nucleus_support(logits, cfg), rng);
}

std::size_t greedy_pick(std::span<const double> logits) {
    check_logits(logits);
    return ranked_indices(logits).front();
}

std::size_t sample(std::span<const double> logits, const SamplingConfig &cfg, Xoshiro256 &rng, Diagnostics *diag) {
    switch (cfg.strategy) {
    case SamplingStrategy::top_k:
        return top_k_sample(logits, cfg, rng, diag);
    case SamplingStrategy::nucleus:
        return nucleus_sample(logits, cfg, rng);
    case SamplingStrategy::greedy:
        cfg.validate();
        return greedy_pick(logits);
    }
    return greedy_pick(logits);
}

} // namespace inkbridge
