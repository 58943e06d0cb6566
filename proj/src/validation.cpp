#include "inkbridge/validation.hpp"

#include "inkbridge/numeric.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace inkbridge {

void RatingTable::validate() const {
    if (raters < 1) {
        throw ValidationError("rating table needs at least one rater");
    }
    if (scores.size() != item_ids.size()) {
        throw ValidationError("rating table has " + std::to_string(item_ids.size()) + " ids for " +
                              std::to_string(scores.size()) + " score rows");
    }
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 0; i < item_ids.size(); ++i) {
        if (!seen.insert(item_ids[i]).second) {
            throw ValidationError("duplicate rating id '" + item_ids[i] + "'");
        }
        if (scores[i].size() != criteria.size()) {
            throw ValidationError("rating row '" + item_ids[i] + "' has a missing or extra cell");
        }
        for (const double s : scores[i]) {
            if (!(s >= 1.0 && s <= 5.0)) {
                throw ValidationError("rating for '" + item_ids[i] + "' outside [1, 5]: " + format_double(s));
            }
        }
    }
}

RatingTable parse_ratings(std::istream &in, std::string_view source, std::size_t raters) {
    const std::string src(source);
    RatingTable table;
    table.raters = raters;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) {
            fields.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            fields.emplace_back();
        }
        if (header) {
            header = false;
            if (fields.size() < 2 || fields[0] != "id") {
                throw ValidationError(src + ": header must be \"id,criterion1,...\"");
            }
            table.criteria.assign(fields.begin() + 1, fields.end());
            continue;
        }
        if (fields.size() != table.criteria.size() + 1) {
            throw ValidationError(src + ":" + std::to_string(line_no) + ": row for id '" + fields[0] +
                                  "' has a missing or extra cell");
        }
        std::vector<double> values;
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v)) {
                throw ValidationError(src + ": id '" + fields[0] + "': unparsable rating for criterion '" +
                                      table.criteria[c - 1] + "'");
            }
            values.push_back(v);
        }
        table.item_ids.push_back(fields[0]);
        table.scores.push_back(std::move(values));
    }
    if (header) {
        throw ValidationError(src + ": empty ratings file");
    }
    try {
        table.validate();
    } catch (const ValidationError &e) {
        throw ValidationError(src + ": " + e.what());
    }
    return table;
}

RatingTable load_ratings(const std::filesystem::path &path, std::size_t raters) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_ratings(in, path.string(), raters);
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw ValidationError("pearson: length mismatch (" + std::to_string(xs.size()) + " vs " +
                              std::to_string(ys.size()) + ")");
    }
    if (xs.size() < 2) {
        throw ValidationError("pearson needs at least 2 points");
    }
    const auto n = static_cast<double>(xs.size());
    const double mx = pairwise_sum(xs) / n;
    const double my = pairwise_sum(ys) / n;
    const double sxy = pairwise_sum_of(xs.size(), [&](std::size_t i) { return (xs[i] - mx) * (ys[i] - my); });
    const double sxx = pairwise_sum_of(xs.size(), [&](std::size_t i) { return (xs[i] - mx) * (xs[i] - mx); });
    const double syy = pairwise_sum_of(ys.size(), [&](std::size_t i) { return (ys[i] - my) * (ys[i] - my); });
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        return std::nullopt;
    }
    // sqrt(s * s) == s exactly, so r(x, x) is exactly 1.
    const double product = sxx * syy;
    const double denom = std::isfinite(product) ? std::sqrt(product) : std::sqrt(sxx) * std::sqrt(syy);
    return std::clamp(sxy / denom, -1.0, 1.0);
}

CorrelationMatrix correlate_metrics(const std::map<std::string, MetricValues> &metric_values,
                                    const RatingTable &ratings, Diagnostics *diag) {
    ratings.validate();
    if (metric_values.empty()) {
        throw ValidationError("correlate_metrics needs at least one metric");
    }
    std::map<std::string, std::size_t, std::less<>> rating_row;
    for (std::size_t i = 0; i < ratings.item_ids.size(); ++i) {
        rating_row.emplace(ratings.item_ids[i], i);
    }

    CorrelationMatrix out;
    out.col_names = ratings.criteria;
    for (const auto &[name, values] : metric_values) {
        // MetricValues is an ordered map, so the aligned ids come out sorted.
        std::vector<double> metric;
        std::vector<std::size_t> rows;
        std::size_t dropped = 0;
        for (const auto &[id, value] : values) {
            const auto it = rating_row.find(id);
            if (it == rating_row.end()) {
                ++dropped;
                continue;
            }
            metric.push_back(value);
            rows.push_back(it->second);
        }
        if (dropped > 0) {
            warn(diag, "metric '" + name + "': " + std::to_string(dropped) + " item(s) without ratings dropped");
        }
        if (rows.size() < 2) {
            throw ValidationError("metric '" + name + "' shares fewer than 2 items with the rating table");
        }
        std::vector<std::optional<double>> row_values;
        bool undefined = false;
        for (std::size_t c = 0; c < ratings.criteria.size(); ++c) {
            std::vector<double> criterion;
            criterion.reserve(rows.size());
            for (const auto r : rows) {
                criterion.push_back(ratings.scores[r][c]);
            }
            const auto r = pearson(metric, criterion);
            undefined = undefined || !r;
            row_values.push_back(r);
        }
        if (undefined) {
            warn(diag, "metric '" + name + "': correlation undefined for zero-variance data");
        }
        out.row_names.push_back(name);
        out.values.push_back(std::move(row_values));
        out.aligned_items.push_back(rows.size());
    }
    return out;
}

std::string correlation_to_csv(const CorrelationMatrix &m) {
    std::string out = "metric";
    for (const auto &c : m.col_names) {
        out += "," + c;
    }
    out += "\n";
    for (std::size_t r = 0; r < m.row_names.size(); ++r) {
        out += m.row_names[r];
        for (const auto &v : m.values[r]) {
            out += ",";
            out += v ? format_double(*v) : "NA";
        }
        out += "\n";
    }
    return out;
}

std::string correlation_to_json(const CorrelationMatrix &m) {
    nlohmann::ordered_json doc;
    doc["rows"] = m.row_names;
    doc["cols"] = m.col_names;
    nlohmann::ordered_json values = nlohmann::ordered_json::array();
    for (const auto &row : m.values) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto &v : row) {
            r.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
        }
        values.push_back(std::move(r));
    }
    doc["values"] = std::move(values);
    doc["aligned_items"] = m.aligned_items;
    return doc.dump(2) + "\n";
}

} // namespace inkbridge
