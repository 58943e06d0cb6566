#include "inkbridge/report.hpp"

#include "inkbridge/corpus_io.hpp"
#include "inkbridge/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace inkbridge {

using ordered_json = nlohmann::ordered_json;

ordered_json report_to_json(const MetricReport &report) {
    ordered_json doc;
    doc["metric"] = report.metric;
    doc["value"] = report.value;
    for (const auto &[key, value] : report.extras.items()) {
        doc[key] = value;
    }
    ordered_json items = ordered_json::array();
    for (const auto &[id, value] : report.per_item) {
        ordered_json entry;
        entry["id"] = id;
        entry["value"] = value;
        items.push_back(std::move(entry));
    }
    doc["per_item"] = std::move(items);
    return doc;
}

std::string report_to_json_string(const MetricReport &report) { return report_to_json(report).dump(2) + "\n"; }

std::string report_to_csv(const MetricReport &report) {
    std::string out = "id,value\n";
    for (const auto &[id, value] : report.per_item) {
        out += id + "," + format_double(value) + "\n";
    }
    out += "__all__," + format_double(report.value) + "\n";
    return out;
}

namespace {

MetricReport report_from_json(const ordered_json &obj, const std::string &source) {
    if (!obj.is_object() || !obj.contains("metric") || !obj.at("metric").is_string() || !obj.contains("value") ||
        !obj.at("value").is_number()) {
        throw ValidationError(source + ": report needs a string \"metric\" and a numeric \"value\"");
    }
    MetricReport report;
    report.metric = obj.at("metric").get<std::string>();
    report.value = obj.at("value").get<double>();
    for (const auto &[key, value] : obj.items()) {
        if (key == "metric" || key == "value") {
            continue;
        }
        if (key == "per_item") {
            if (!value.is_array()) {
                throw ValidationError(source + ": \"per_item\" must be an array");
            }
            for (const auto &entry : value) {
                if (!entry.is_object() || !entry.contains("id") || !entry.at("id").is_string() ||
                    !entry.contains("value") || !entry.at("value").is_number()) {
                    throw ValidationError(source + ": per_item entries need \"id\" and numeric \"value\"");
                }
                report.per_item.emplace_back(entry.at("id").get<std::string>(), entry.at("value").get<double>());
            }
            continue;
        }
        report.extras[key] = value;
    }
    return report;
}

std::string normalized_metric(std::string_view metric) {
    std::string key;
    for (const char c : metric) {
        key.push_back(c == '-' || c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return key;
}

} // namespace

std::vector<MetricReport> parse_reports(std::string_view json_text, std::string_view source) {
    const std::string src(source);
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const ordered_json::parse_error &e) {
        throw ValidationError(src + ": malformed JSON: " + e.what());
    }
    std::vector<MetricReport> out;
    if (doc.is_array()) {
        for (const auto &entry : doc) {
            out.push_back(report_from_json(entry, src));
        }
    } else {
        out.push_back(report_from_json(doc, src));
    }
    return out;
}

std::vector<MetricReport> load_reports(const std::filesystem::path &path) {
    return parse_reports(read_file(path), path.string());
}

const std::vector<std::string> &summary_columns() {
    static const std::vector<std::string> columns = {"P",   "R",   "F1",  "BLEU",  "METEOR-simplified", "PPL",
                                                     "MCE", "MTE", "P-FID", "P-Acc", "DCE"};
    return columns;
}

std::string summary_column_for(std::string_view metric) {
    static const std::map<std::string, std::string, std::less<>> aliases = {
        {"p", "P"},
        {"precision", "P"},
        {"r", "R"},
        {"recall", "R"},
        {"f1", "F1"},
        {"bleu", "BLEU"},
        {"meteor", "METEOR-simplified"},
        {"meteor_simplified", "METEOR-simplified"},
        {"ppl", "PPL"},
        {"perplexity", "PPL"},
        {"mce", "MCE"},
        {"mte", "MTE"},
        {"fid", "P-FID"},
        {"p_fid", "P-FID"},
        {"genre_acc", "P-Acc"},
        {"p_acc", "P-Acc"},
        {"dce", "DCE"},
    };
    const auto it = aliases.find(normalized_metric(metric));
    if (it == aliases.end()) {
        throw ValidationError("unknown metric '" + std::string(metric) + "' for the summary table");
    }
    return it->second;
}

SummaryTable summarize(const std::vector<MetricReport> &reports, std::string label) {
    if (reports.empty()) {
        throw ValidationError("summary needs at least one report");
    }
    std::map<std::string, double, std::less<>> by_column;
    for (const auto &report : reports) {
        const std::string column = summary_column_for(report.metric);
        const auto [it, inserted] = by_column.emplace(column, report.value);
        if (!inserted && it->second != report.value) {
            throw ValidationError("conflicting values for metric '" + column + "': " + format_double(it->second) +
                                  " vs " + format_double(report.value));
        }
    }
    SummaryTable table;
    table.label = std::move(label);
    for (const auto &column : summary_columns()) {
        const auto it = by_column.find(column);
        if (it != by_column.end()) {
            table.entries.emplace_back(column, it->second);
        }
    }
    return table;
}

std::string summary_to_json(const SummaryTable &table) {
    ordered_json doc;
    doc["label"] = table.label;
    ordered_json metrics = ordered_json::object();
    for (const auto &[column, value] : table.entries) {
        metrics[column] = value;
    }
    doc["metrics"] = std::move(metrics);
    return doc.dump(2) + "\n";
}

std::string summary_to_csv(const SummaryTable &table) {
    std::string header = "label";
    std::string row = table.label;
    for (const auto &[column, value] : table.entries) {
        header += "," + column;
        row += "," + format_double(value);
    }
    return header + "\n" + row + "\n";
}

} // namespace inkbridge
