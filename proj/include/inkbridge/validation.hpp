#pragma once

// Metric validation against human ratings: Pearson correlations between
// per-item metric values and per-item mean ratings.

#include "inkbridge/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace inkbridge {

/// Mean rating per item and criterion, each within [1, 5].
struct RatingTable {
    std::vector<std::string> item_ids;
    std::size_t raters = 1;
    std::vector<std::string> criteria;
    /// scores[item][criterion]
    std::vector<std::vector<double>> scores;

    void validate() const;
};

/// CSV "id,criterion1,...,criterionC".
RatingTable parse_ratings(std::istream &in, std::string_view source = "<ratings>", std::size_t raters = 1);
RatingTable load_ratings(const std::filesystem::path &path, std::size_t raters = 1);

/// Product-moment correlation, clamped to [-1, 1]. nullopt when either
/// side has zero variance.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

/// Per-item values of one metric, keyed by item id.
using MetricValues = std::map<std::string, double, std::less<>>;

struct CorrelationMatrix {
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;
    /// nullopt marks an undefined cell (zero variance).
    std::vector<std::vector<std::optional<double>>> values;
    /// Items used per metric after id alignment.
    std::vector<std::size_t> aligned_items;
};

/// Pearson correlation of every metric against every rating criterion over
/// the ids the two share, taken in sorted id order. Unmatched ids are dropped
/// with a warning; fewer than two shared ids is an error.
CorrelationMatrix correlate_metrics(const std::map<std::string, MetricValues> &metric_values,
                                    const RatingTable &ratings, Diagnostics *diag = nullptr);

std::string correlation_to_csv(const CorrelationMatrix &m);
std::string correlation_to_json(const CorrelationMatrix &m);

} // namespace inkbridge
