#include "inkbridge/metrics_text.hpp"

#include "inkbridge/kernels.hpp"
#include "inkbridge/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace inkbridge {

void PoemPair::validate() const {
    if (candidate.empty()) {
        throw ValidationError("poem pair has an empty candidate");
    }
    if (references.empty()) {
        throw ValidationError("poem pair has no references");
    }
    for (const auto &ref : references) {
        if (ref.empty()) {
            throw ValidationError("poem pair has an empty reference");
        }
    }
}

// --- LM-based metrics ---------------------------------------------------------------

double cross_entropy_seq(const TokenProbSequence &seq) {
    if (seq.logp.empty()) {
        throw ValidationError("sequence '" + seq.id + "' has no log-probabilities");
    }
    const auto &logp = seq.logp;
    const double total = pairwise_sum_of(logp.size(), [&logp](std::size_t t) { return -logp[t]; });
    return total / static_cast<double>(logp.size());
}

namespace {

double mean_cross_entropy(std::vector<const TokenProbSequence *> sequences) {
    // Id order fixes the summation order, so input order never changes the bits.
    std::stable_sort(sequences.begin(), sequences.end(),
                     [](const TokenProbSequence *a, const TokenProbSequence *b) { return a->id < b->id; });
    const auto per_poem = kernels::omp::map_items(sequences.size(),
                                                  [&sequences](std::size_t i) { return cross_entropy_seq(*sequences[i]); });
    return pairwise_sum(per_poem) / static_cast<double>(per_poem.size());
}

} // namespace

double mce(std::span<const TokenProbSequence> corpus) {
    if (corpus.empty()) {
        throw ValidationError("mce of an empty corpus");
    }
    std::vector<const TokenProbSequence *> sequences;
    sequences.reserve(corpus.size());
    for (const auto &seq : corpus) {
        sequences.push_back(&seq);
    }
    return mean_cross_entropy(sequences);
}

double mte(std::span<const MteGroup> groups) {
    if (groups.empty()) {
        throw ValidationError("mte of an empty group list");
    }
    std::vector<const TokenProbSequence *> sequences;
    for (const auto &group : groups) {
        if (group.sequences.empty()) {
            throw ValidationError("mte group '" + group.group_id + "' is empty");
        }
        for (const auto &seq : group.sequences) {
            sequences.push_back(&seq);
        }
    }
    return mean_cross_entropy(sequences);
}

std::vector<MteGroup> group_for_mte(std::span<const TokenProbSequence> corpus) {
    std::map<std::string, std::vector<TokenProbSequence>> by_group;
    for (const auto &seq : corpus) {
        by_group[seq.group_id.value_or(seq.id)].push_back(seq);
    }
    std::vector<MteGroup> groups;
    groups.reserve(by_group.size());
    for (auto &[id, members] : by_group) {
        std::sort(members.begin(), members.end(),
                  [](const TokenProbSequence &a, const TokenProbSequence &b) { return a.id < b.id; });
        groups.push_back({id, std::move(members)});
    }
    return groups;
}

double perplexity(std::span<const TokenProbSequence> corpus) {
    if (corpus.empty()) {
        throw ValidationError("perplexity of an empty corpus");
    }
    std::vector<double> nll;
    for (const auto &seq : corpus) {
        for (const double lp : seq.logp) {
            nll.push_back(-lp);
        }
    }
    if (nll.empty()) {
        throw ValidationError("perplexity of a corpus without characters");
    }
    return std::exp(pairwise_sum(nll) / static_cast<double>(nll.size()));
}

// --- overlap metrics ----------------------------------------------------------------

namespace {

std::map<char32_t, std::size_t> char_counts(const TokenList &tokens) {
    std::map<char32_t, std::size_t> counts;
    for (const char32_t c : tokens) {
        ++counts[c];
    }
    return counts;
}

std::size_t multiset_overlap(const TokenList &a, const TokenList &b) {
    const auto ca = char_counts(a);
    const auto cb = char_counts(b);
    std::size_t overlap = 0;
    for (const auto &[c, count] : ca) {
        const auto it = cb.find(c);
        if (it != cb.end()) {
            overlap += std::min(count, it->second);
        }
    }
    return overlap;
}

double harmonic(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

} // namespace

PrfScore char_prf(const PoemPair &pair) {
    pair.validate();
    PrfScore best;
    bool first = true;
    for (const auto &ref : pair.references) {
        const auto overlap = static_cast<double>(multiset_overlap(pair.candidate, ref));
        PrfScore score;
        score.precision = overlap / static_cast<double>(pair.candidate.size());
        score.recall = overlap / static_cast<double>(ref.size());
        score.f1 = harmonic(score.precision, score.recall);
        if (first || score.f1 > best.f1) {
            best = score;
            first = false;
        }
    }
    return best;
}

double bleu(const PoemPair &pair, std::size_t max_n) {
    pair.validate();
    if (max_n == 0) {
        throw ValidationError("bleu max_n must be at least 1");
    }
    const TokenList &cand = pair.candidate;
    double log_precision_sum = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        std::unordered_map<TokenList, std::size_t> cand_counts;
        for (std::size_t i = 0; i + n <= cand.size(); ++i) {
            ++cand_counts[cand.substr(i, n)];
        }
        std::unordered_map<TokenList, std::size_t> max_ref_counts;
        for (const auto &ref : pair.references) {
            std::unordered_map<TokenList, std::size_t> ref_counts;
            for (std::size_t i = 0; i + n <= ref.size(); ++i) {
                ++ref_counts[ref.substr(i, n)];
            }
            for (const auto &[gram, count] : ref_counts) {
                auto &slot = max_ref_counts[gram];
                slot = std::max(slot, count);
            }
        }
        std::size_t clipped = 0;
        std::size_t total = 0;
        for (const auto &[gram, count] : cand_counts) {
            total += count;
            const auto it = max_ref_counts.find(gram);
            if (it != max_ref_counts.end()) {
                clipped += std::min(count, it->second);
            }
        }
        const double precision =
            (clipped == 0 || total == 0) ? bleu_epsilon : static_cast<double>(clipped) / static_cast<double>(total);
        log_precision_sum += std::log(precision);
    }

    const auto c = static_cast<double>(cand.size());
    std::size_t closest = pair.references.front().size();
    for (const auto &ref : pair.references) {
        const auto diff = [c](std::size_t len) { return std::abs(static_cast<double>(len) - c); };
        if (diff(ref.size()) < diff(closest) || (diff(ref.size()) == diff(closest) && ref.size() < closest)) {
            closest = ref.size();
        }
    }
    const double brevity = std::exp(std::min(0.0, 1.0 - static_cast<double>(closest) / c));
    return brevity * std::exp(log_precision_sum / static_cast<double>(max_n));
}

// --- METEOR -------------------------------------------------------------------------

namespace {

/// Depth-first search over candidate positions for a maximum alignment with
/// the fewest chunks. Branches are ordered so the first leaf extends chunks
/// greedily; later leaves only survive if they beat the best chunk count.
class ChunkSearch {
  public:
    ChunkSearch(const TokenList &cand, const TokenList &ref) : cand_(cand), used_(ref.size(), false) {
        for (std::size_t j = 0; j < ref.size(); ++j) {
            positions_[ref[j]].push_back(j);
        }
        std::map<char32_t, std::size_t> cand_counts;
        for (const char32_t c : cand) {
            ++cand_counts[c];
        }
        for (const auto &[c, count] : cand_counts) {
            const auto it = positions_.find(c);
            const std::size_t available = it == positions_.end() ? 0 : it->second.size();
            const std::size_t aligned = std::min(count, available);
            matches_ += aligned;
            skips_left_[c] = count - aligned;
        }
    }

    MeteorAlignment run() {
        if (matches_ == 0) {
            return {0, 0, true};
        }
        best_chunks_ = matches_ + 1;
        visit(0, none, 0);
        return {matches_, best_chunks_, !exhausted_};
    }

  private:
    static constexpr std::size_t none = static_cast<std::size_t>(-1);
    static constexpr std::size_t node_budget = 2'000'000;

    void visit(std::size_t i, std::size_t prev_ref, std::size_t chunks) {
        if (chunks >= best_chunks_) {
            return;
        }
        if (++nodes_ > node_budget) {
            exhausted_ = true;
            return;
        }
        if (i == cand_.size()) {
            best_chunks_ = chunks;
            return;
        }
        const char32_t c = cand_[i];
        const auto it = positions_.find(c);
        if (it != positions_.end()) {
            // Continue the current chunk first, then open new ones left to right.
            if (prev_ref != none && prev_ref + 1 < used_.size() && !used_[prev_ref + 1]) {
                const std::size_t j = prev_ref + 1;
                if (std::binary_search(it->second.begin(), it->second.end(), j)) {
                    used_[j] = true;
                    visit(i + 1, j, chunks);
                    used_[j] = false;
                }
            }
            for (const std::size_t j : it->second) {
                if (used_[j] || (prev_ref != none && j == prev_ref + 1)) {
                    continue;
                }
                used_[j] = true;
                visit(i + 1, j, chunks + 1);
                used_[j] = false;
                if (exhausted_) {
                    return;
                }
            }
        }
        auto &skips = skips_left_[c];
        if (skips > 0) {
            --skips;
            visit(i + 1, none, chunks);
            ++skips;
        }
    }

    const TokenList &cand_;
    std::vector<bool> used_;
    std::map<char32_t, std::vector<std::size_t>> positions_;
    std::map<char32_t, std::size_t> skips_left_;
    std::size_t matches_ = 0;
    std::size_t best_chunks_ = 0;
    std::size_t nodes_ = 0;
    bool exhausted_ = false;
};

} // namespace

MeteorAlignment meteor_align(const TokenList &candidate, const TokenList &reference) {
    return ChunkSearch(candidate, reference).run();
}

double meteor_simplified(const PoemPair &pair) {
    pair.validate();
    double best = 0.0;
    for (const auto &ref : pair.references) {
        const auto alignment = meteor_align(pair.candidate, ref);
        if (alignment.matches == 0) {
            continue;
        }
        const auto m = static_cast<double>(alignment.matches);
        const double p = m / static_cast<double>(pair.candidate.size());
        const double r = m / static_cast<double>(ref.size());
        const double f_mean = 10.0 * p * r / (r + 9.0 * p);
        const double frag = static_cast<double>(alignment.chunks) / m;
        const double penalty = 0.5 * frag * frag * frag;
        best = std::max(best, f_mean * (1.0 - penalty));
    }
    return best;
}

} // namespace inkbridge
