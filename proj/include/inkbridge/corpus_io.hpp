#pragma once

// On-disk formats, ingestion and validation, the deterministic train/val/test
// split, and the paired:unpaired batch scheduler.

#include "inkbridge/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace inkbridge {

enum class Modality { painting, poem };
enum class Genre { figure, flower_bird, landscape, boundary };
enum class Split { train, val, test };

std::string_view to_string(Modality m) noexcept;
std::string_view to_string(Genre g) noexcept;
std::string_view to_string(Split s) noexcept;
Modality parse_modality(std::string_view text);
Genre parse_genre(std::string_view text);
Split parse_split(std::string_view text);

/// Default cap on poem length in characters.
inline constexpr std::size_t default_max_poem_length = 80;

struct ManifestItem {
    std::string id;
    Modality modality = Modality::painting;
    std::optional<std::string> pair_id;
    std::optional<Genre> genre;
    std::optional<Split> split;

    friend bool operator==(const ManifestItem &, const ManifestItem &) = default;
};

struct CorpusManifest {
    std::vector<ManifestItem> items;

    /// Index of the item with this id, if any. Linear scan; use id_index() for bulk lookups.
    std::optional<std::size_t> find(std::string_view id) const;
    std::map<std::string, std::size_t, std::less<>> id_index() const;
    std::size_t pair_count() const;
};

/// Checks every manifest invariant; throws ValidationError naming the offending id.
void validate_manifest(const CorpusManifest &manifest);

CorpusManifest parse_manifest(std::string_view json_text, std::string_view source = "<manifest>");
CorpusManifest load_manifest(const std::filesystem::path &path);
/// Canonical form: keys in the order id, modality, pair_id, genre, split; two-space indent; LF; trailing newline.
std::string manifest_to_string(const CorpusManifest &manifest);
void save_manifest(const CorpusManifest &manifest, const std::filesystem::path &path);

/// n x d encoder outputs for one modality, one row per item id.
struct FeatureMatrix {
    std::vector<std::string> ids;
    Eigen::MatrixXd data;
    Modality modality = Modality::painting;

    Eigen::Index rows() const noexcept { return data.rows(); }
    Eigen::Index cols() const noexcept { return data.cols(); }

    /// n >= 1, d >= 1, ids match rows, all entries finite.
    void validate() const;
};

FeatureMatrix parse_features(std::istream &in, Modality modality, std::string_view source = "<features>");
FeatureMatrix load_features(const std::filesystem::path &path, Modality modality);
/// Writes the CSV form "id,f0,...,f{d-1}" with shortest round-trip decimals.
void write_features(std::ostream &out, const FeatureMatrix &features);

struct TokenProbSequence {
    std::string id;
    std::u32string chars;
    /// Natural-log probability of each ground-truth character under the external LM.
    std::vector<double> logp;
    std::optional<std::string> group_id;
    /// Optional T x |V| next-character distributions over `vocab`.
    std::optional<Eigen::MatrixXd> dist;
    std::u32string vocab;

    std::size_t length() const noexcept { return chars.size(); }
};

struct TokenProbOptions {
    std::size_t max_length = default_max_poem_length;
    /// Cut over-long sequences to max_length instead of rejecting them.
    bool truncate = false;
};

void validate_sequence(const TokenProbSequence &seq, const TokenProbOptions &options = {});

std::vector<TokenProbSequence> parse_token_probs(std::istream &in, const TokenProbOptions &options = {},
                                                 std::string_view source = "<token-probs>",
                                                 Diagnostics *diag = nullptr);
std::vector<TokenProbSequence> load_token_probs(const std::filesystem::path &path,
                                                const TokenProbOptions &options = {}, Diagnostics *diag = nullptr);

using SplitRatios = std::array<double, 3>;

struct SplitAssignment {
    std::map<std::string, Split> assignment;
    std::uint64_t seed = 0;
    SplitRatios ratios{0.7, 0.15, 0.15};

    std::size_t count(Split s) const;
};

/// Sorts manifest ids, groups each mutual pair into one unit, shuffles the
/// units with Fisher-Yates on xoshiro256** (splitmix64-seeded), and cuts the
/// item sequence at round(r_train * n) and round((r_train + r_val) * n). A unit
/// lands in the split where its first item falls, so pair members always share
/// a split.
SplitAssignment split_dataset(const CorpusManifest &manifest, const SplitRatios &ratios, std::uint64_t seed);

std::string split_to_string(const SplitAssignment &split);
SplitAssignment parse_split_assignment(std::string_view json_text, std::string_view source = "<split>");
SplitAssignment load_split_assignment(const std::filesystem::path &path);

struct PairedIds {
    std::string painting;
    std::string poem;

    friend bool operator==(const PairedIds &, const PairedIds &) = default;
    friend auto operator<=>(const PairedIds &, const PairedIds &) = default;
};

struct Batch {
    std::vector<PairedIds> paired;
    std::vector<std::string> unpaired;
    /// Final batch holding fewer than paired_per_batch pairs.
    bool partial = false;
};

struct BatchPlan {
    std::vector<Batch> batches;
    std::size_t paired_per_batch = 1;
    std::size_t ratio_k = 5;
    /// Times the unpaired pool ran dry and was reshuffled.
    std::size_t unpaired_cycles = 0;
};

/// Plans one epoch over the train split: each batch takes paired_per_batch
/// pairs and ratio_k unpaired items per pair. The epoch length is set by the
/// pairs; the unpaired pool is reshuffled and reused when it runs dry.
BatchPlan schedule_batches(const SplitAssignment &split, const CorpusManifest &manifest,
                           std::size_t paired_per_batch, std::size_t ratio_k, std::uint64_t seed,
                           Diagnostics *diag = nullptr);

std::string batch_plan_to_string(const BatchPlan &plan);

/// One token per Unicode scalar value. Whitespace and ASCII punctuation are
/// always dropped; CJK punctuation is dropped unless keep_cjk_punctuation.
std::u32string tokenize_chars(std::string_view text, bool keep_cjk_punctuation = false);

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_file(const std::filesystem::path &path);

} // namespace inkbridge
