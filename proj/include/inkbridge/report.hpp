#pragma once

// Metric report records and the summary table that combines them.

#include "inkbridge/error.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace inkbridge {

struct MetricReport {
    std::string metric;
    double value = 0.0;
    /// Fields emitted between "value" and "per_item", in insertion order.
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, double>> per_item;
};

nlohmann::ordered_json report_to_json(const MetricReport &report);
/// {"metric","value",extras...,"per_item":[{"id","value"}...]}, two-space indent.
std::string report_to_json_string(const MetricReport &report);
/// Header "id,value", one row per item, then a final "__all__" row with the aggregate.
std::string report_to_csv(const MetricReport &report);

/// A report file holds either one report object or an array of them.
std::vector<MetricReport> parse_reports(std::string_view json_text, std::string_view source = "<report>");
std::vector<MetricReport> load_reports(const std::filesystem::path &path);

/// Fixed column order of the summary table.
const std::vector<std::string> &summary_columns();

/// Summary column for a report metric name ("mce" -> "MCE", "fid" -> "P-FID"); throws on unknown names.
std::string summary_column_for(std::string_view metric);

struct SummaryTable {
    std::string label = "run";
    /// Present columns in summary_columns() order.
    std::vector<std::pair<std::string, double>> entries;
};

/// One row keyed by metric column. Repeated metrics must agree exactly.
SummaryTable summarize(const std::vector<MetricReport> &reports, std::string label = "run");
std::string summary_to_json(const SummaryTable &table);
std::string summary_to_csv(const SummaryTable &table);

} // namespace inkbridge
