#pragma once

// Poem-side metrics over externally computed LM log-probabilities (MCE, MTE,
// perplexity) and over candidate/reference character sequences (P/R/F1,
// BLEU, simplified METEOR). Text inputs are token lists from tokenize_chars.

#include "inkbridge/corpus_io.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace inkbridge {

using TokenList = std::u32string;

struct PoemPair {
    TokenList candidate;
    std::vector<TokenList> references;

    /// Non-empty candidate, at least one reference, every reference non-empty.
    void validate() const;
};

/// Candidate poems sharing one conditioning painting.
struct MteGroup {
    std::string group_id;
    std::vector<TokenProbSequence> sequences;
};

/// Per-poem mean negative log-probability per character (natural log).
double cross_entropy_seq(const TokenProbSequence &seq);

/// Macro average of cross_entropy_seq over poems.
double mce(std::span<const TokenProbSequence> corpus);

/// Flat mean of per-poem cross-entropy over every sequence of every group,
/// so each group weighs in proportion to its own K.
double mte(std::span<const MteGroup> groups);

/// Groups sequences by group_id (sequences without one form their own group),
/// groups ordered by id and members by sequence id.
std::vector<MteGroup> group_for_mte(std::span<const TokenProbSequence> corpus);

/// exp of the token-weighted (micro) mean cross-entropy.
double perplexity(std::span<const TokenProbSequence> corpus);

struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Multiset character overlap against the best-F1 reference (first on ties).
PrfScore char_prf(const PoemPair &pair);

/// Smoothing constant substituted for zero n-gram match counts.
inline constexpr double bleu_epsilon = 1e-9;

/// Character BLEU: geometric mean of clipped n-gram precisions up to max_n
/// (zero counts replaced by bleu_epsilon) times exp(min(0, 1 - r / c)), r the
/// closest reference length (shorter on ties).
double bleu(const PoemPair &pair, std::size_t max_n = 4);

struct MeteorAlignment {
    std::size_t matches = 0;
    std::size_t chunks = 0;
    /// False when the chunk search hit its node budget; chunks is then the best found.
    bool exact = true;
};

/// Exact-match unigram alignment of candidate against one reference:
/// maximum matches, then fewest chunks.
MeteorAlignment meteor_align(const TokenList &candidate, const TokenList &reference);

/// Exact-match METEOR core: F_mean = 10PR / (R + 9P), penalty = 0.5 (chunks /
/// matches)^3, score = F_mean (1 - penalty), best over references.
double meteor_simplified(const PoemPair &pair);

} // namespace inkbridge
