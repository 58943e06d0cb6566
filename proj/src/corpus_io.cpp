#include "inkbridge/corpus_io.hpp"

#include "inkbridge/numeric.hpp"
#include "inkbridge/prng.hpp"
#include "inkbridge/unicode.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace inkbridge {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Modality m) noexcept { return m == Modality::painting ? "painting" : "poem"; }

std::string_view to_string(Genre g) noexcept {
    switch (g) {
    case Genre::figure:
        return "figure";
    case Genre::flower_bird:
        return "flower_bird";
    case Genre::landscape:
        return "landscape";
    case Genre::boundary:
        return "boundary";
    }
    return "figure";
}

std::string_view to_string(Split s) noexcept {
    switch (s) {
    case Split::train:
        return "train";
    case Split::val:
        return "val";
    case Split::test:
        return "test";
    }
    return "train";
}

Modality parse_modality(std::string_view text) {
    if (text == "painting") {
        return Modality::painting;
    }
    if (text == "poem") {
        return Modality::poem;
    }
    throw ValidationError("unknown modality '" + std::string(text) + "'");
}

Genre parse_genre(std::string_view text) {
    if (text == "figure") {
        return Genre::figure;
    }
    if (text == "flower_bird") {
        return Genre::flower_bird;
    }
    if (text == "landscape") {
        return Genre::landscape;
    }
    if (text == "boundary") {
        return Genre::boundary;
    }
    throw ValidationError("unknown genre '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
    if (text == "train") {
        return Split::train;
    }
    if (text == "val") {
        return Split::val;
    }
    if (text == "test") {
        return Split::test;
    }
    throw ValidationError("unknown split '" + std::string(text) + "'");
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failure on '" + path.string() + "'");
    }
    return buffer.str();
}

namespace {

void write_file(const std::filesystem::path &path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw IoError("write failure on '" + path.string() + "'");
    }
}

json parse_json(std::string_view text, std::string_view source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw ValidationError(std::string(source) + ": malformed JSON: " + e.what());
    }
}

std::string require_string(const json &obj, const char *key, std::string_view context) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ValidationError(std::string(context) + ": missing or non-string \"" + key + "\"");
    }
    return it->get<std::string>();
}

} // namespace

// --- manifest ---------------------------------------------------------------

std::optional<std::size_t> CorpusManifest::find(std::string_view id) const {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::map<std::string, std::size_t, std::less<>> CorpusManifest::id_index() const {
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < items.size(); ++i) {
        index.emplace(items[i].id, i);
    }
    return index;
}

std::size_t CorpusManifest::pair_count() const {
    std::size_t paired = 0;
    for (const auto &item : items) {
        if (item.pair_id && item.modality == Modality::painting) {
            ++paired;
        }
    }
    return paired;
}

void validate_manifest(const CorpusManifest &manifest) {
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < manifest.items.size(); ++i) {
        const auto &item = manifest.items[i];
        if (item.id.empty()) {
            throw ValidationError("manifest item " + std::to_string(i) + " has an empty id");
        }
        if (!index.emplace(item.id, i).second) {
            throw ValidationError("duplicate id '" + item.id + "'");
        }
    }
    for (const auto &item : manifest.items) {
        if (!item.pair_id) {
            continue;
        }
        const auto it = index.find(*item.pair_id);
        if (it == index.end()) {
            throw ValidationError("id '" + item.id + "' has dangling pair_id '" + *item.pair_id + "'");
        }
        const auto &partner = manifest.items[it->second];
        if (partner.modality == item.modality) {
            throw ValidationError("id '" + item.id + "' is paired with '" + partner.id + "' of the same modality");
        }
        if (!partner.pair_id || *partner.pair_id != item.id) {
            throw ValidationError("id '" + item.id + "' pairs with '" + partner.id +
                                  "' but the pairing is not symmetric");
        }
    }
}

CorpusManifest parse_manifest(std::string_view json_text, std::string_view source) {
    const json doc = parse_json(json_text, source);
    if (!doc.is_object() || !doc.contains("items") || !doc.at("items").is_array()) {
        throw ValidationError(std::string(source) + ": expected an object with an \"items\" array");
    }
    static const std::set<std::string, std::less<>> known = {"id", "modality", "pair_id", "genre", "split"};
    CorpusManifest manifest;
    manifest.items.reserve(doc.at("items").size());
    std::size_t position = 0;
    for (const auto &entry : doc.at("items")) {
        const std::string context = std::string(source) + ": item " + std::to_string(position++);
        if (!entry.is_object()) {
            throw ValidationError(context + " is not an object");
        }
        ManifestItem item;
        item.id = require_string(entry, "id", context);
        const std::string where = std::string(source) + ": id '" + item.id + "'";
        for (const auto &[key, value] : entry.items()) {
            if (!known.contains(key)) {
                throw ValidationError(where + ": unknown key \"" + key + "\"");
            }
        }
        try {
            item.modality = parse_modality(require_string(entry, "modality", where));
            if (entry.contains("pair_id")) {
                item.pair_id = require_string(entry, "pair_id", where);
            }
            if (entry.contains("genre")) {
                item.genre = parse_genre(require_string(entry, "genre", where));
            }
            if (entry.contains("split")) {
                item.split = parse_split(require_string(entry, "split", where));
            }
        } catch (const ValidationError &e) {
            throw ValidationError(where + ": " + e.what());
        }
        manifest.items.push_back(std::move(item));
    }
    try {
        validate_manifest(manifest);
    } catch (const ValidationError &e) {
        throw ValidationError(std::string(source) + ": " + e.what());
    }
    return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path &path) {
    return parse_manifest(read_file(path), path.string());
}

std::string manifest_to_string(const CorpusManifest &manifest) {
    ordered_json items = ordered_json::array();
    for (const auto &item : manifest.items) {
        ordered_json entry;
        entry["id"] = item.id;
        entry["modality"] = to_string(item.modality);
        if (item.pair_id) {
            entry["pair_id"] = *item.pair_id;
        }
        if (item.genre) {
            entry["genre"] = to_string(*item.genre);
        }
        if (item.split) {
            entry["split"] = to_string(*item.split);
        }
        items.push_back(std::move(entry));
    }
    ordered_json doc;
    doc["items"] = std::move(items);
    return doc.dump(2) + "\n";
}

void save_manifest(const CorpusManifest &manifest, const std::filesystem::path &path) {
    write_file(path, manifest_to_string(manifest));
}

// --- features ---------------------------------------------------------------

void FeatureMatrix::validate() const {
    if (data.rows() < 1 || data.cols() < 1) {
        throw ValidationError("feature matrix must have at least one row and one column");
    }
    if (static_cast<Eigen::Index>(ids.size()) != data.rows()) {
        throw ValidationError("feature matrix has " + std::to_string(ids.size()) + " ids for " +
                              std::to_string(data.rows()) + " rows");
    }
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        if (!data.row(r).allFinite()) {
            throw ValidationError("non-finite feature value in row id '" + ids[static_cast<std::size_t>(r)] + "'");
        }
    }
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

bool next_nonblank_line(std::istream &in, std::string &line, std::size_t &line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            return true;
        }
    }
    return false;
}

} // namespace

FeatureMatrix parse_features(std::istream &in, Modality modality, std::string_view source) {
    const std::string src(source);
    std::string line;
    std::size_t line_no = 0;
    if (!next_nonblank_line(in, line, line_no)) {
        throw ValidationError(src + ": empty feature file");
    }
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "id") {
        throw ValidationError(src + ": header must be \"id,f0,...,f{d-1}\"");
    }
    const std::size_t d = header.size() - 1;
    for (std::size_t j = 0; j < d; ++j) {
        if (header[j + 1] != "f" + std::to_string(j)) {
            throw ValidationError(src + ": header column " + std::to_string(j + 1) + " should be \"f" +
                                  std::to_string(j) + "\"");
        }
    }
    std::vector<std::string> ids;
    std::vector<double> values;
    while (next_nonblank_line(in, line, line_no)) {
        const auto fields = split_csv_line(line);
        const std::string id(fields[0]);
        if (id.empty()) {
            throw ValidationError(src + ": line " + std::to_string(line_no) + " has an empty id");
        }
        if (fields.size() != d + 1) {
            throw ValidationError(src + ": ragged row for id '" + id + "' (" + std::to_string(fields.size() - 1) +
                                  " values, expected " + std::to_string(d) + ")");
        }
        for (std::size_t j = 0; j < d; ++j) {
            double v = 0.0;
            if (!parse_double(fields[j + 1], v)) {
                throw ValidationError(src + ": unparsable value in column f" + std::to_string(j) + " for id '" + id +
                                      "'");
            }
            if (!std::isfinite(v)) {
                throw ValidationError(src + ": non-finite value in column f" + std::to_string(j) + " for id '" +
                                      id + "'");
            }
            values.push_back(v);
        }
        ids.push_back(id);
    }
    if (ids.empty()) {
        throw ValidationError(src + ": no feature rows");
    }
    FeatureMatrix features;
    features.modality = modality;
    features.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(d));
    features.ids = std::move(ids);
    return features;
}

FeatureMatrix load_features(const std::filesystem::path &path, Modality modality) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_features(in, modality, path.string());
}

void write_features(std::ostream &out, const FeatureMatrix &features) {
    out << "id";
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        out << ",f" << j;
    }
    out << '\n';
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        out << features.ids[static_cast<std::size_t>(r)];
        for (Eigen::Index j = 0; j < features.cols(); ++j) {
            out << ',' << format_double(features.data(r, j));
        }
        out << '\n';
    }
}

// --- token probabilities ------------------------------------------------------

void validate_sequence(const TokenProbSequence &seq, const TokenProbOptions &options) {
    const std::string where = "sequence '" + seq.id + "'";
    if (seq.id.empty()) {
        throw ValidationError("token sequence with empty id");
    }
    if (seq.chars.empty()) {
        throw ValidationError(where + " has length 0");
    }
    if (seq.chars.size() > options.max_length) {
        throw ValidationError(where + " has " + std::to_string(seq.chars.size()) +
                              " characters, above the maximum of " + std::to_string(options.max_length));
    }
    if (seq.logp.size() != seq.chars.size()) {
        throw ValidationError(where + " has " + std::to_string(seq.chars.size()) + " chars but " +
                              std::to_string(seq.logp.size()) + " log-probabilities");
    }
    for (std::size_t t = 0; t < seq.logp.size(); ++t) {
        if (std::isnan(seq.logp[t]) || seq.logp[t] == std::numeric_limits<double>::infinity()) {
            throw ValidationError(where + ": invalid log-probability at position " + std::to_string(t));
        }
        if (seq.logp[t] > 0.0) {
            throw ValidationError(where + ": log-probability > 0 at position " + std::to_string(t));
        }
    }
    if (!seq.dist) {
        return;
    }
    const auto &dist = *seq.dist;
    if (dist.rows() != static_cast<Eigen::Index>(seq.chars.size())) {
        throw ValidationError(where + ": dist has " + std::to_string(dist.rows()) + " rows, expected " +
                              std::to_string(seq.chars.size()));
    }
    if (seq.vocab.empty() || dist.cols() != static_cast<Eigen::Index>(seq.vocab.size())) {
        throw ValidationError(where + ": dist requires a vocab of matching width");
    }
    for (Eigen::Index t = 0; t < dist.rows(); ++t) {
        const auto ts = std::to_string(t);
        for (Eigen::Index v = 0; v < dist.cols(); ++v) {
            const double p = dist(t, v);
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ValidationError(where + ": dist entry outside [0,1] at row " + ts);
            }
        }
        Eigen::VectorXd row = dist.row(t).transpose();
        const double total = pairwise_sum({row.data(), static_cast<std::size_t>(row.size())});
        if (std::abs(total - 1.0) > 1e-6) {
            throw ValidationError(where + ": dist row " + ts + " sums to " + format_double(total));
        }
        const auto pos = seq.vocab.find(seq.chars[static_cast<std::size_t>(t)]);
        if (pos == std::u32string::npos) {
            throw ValidationError(where + ": char at position " + ts + " is not in the vocab");
        }
        const double expected = dist(t, static_cast<Eigen::Index>(pos));
        if (std::abs(std::exp(seq.logp[static_cast<std::size_t>(t)]) - expected) > 1e-6) {
            throw ValidationError(where + ": logp at position " + ts + " disagrees with dist");
        }
    }
}

namespace {

char32_t single_scalar(const json &value, const std::string &where) {
    if (!value.is_string()) {
        throw ValidationError(where + ": chars entries must be strings");
    }
    const auto decoded = unicode::decode_utf8(value.get<std::string>());
    if (decoded.size() != 1) {
        throw ValidationError(where + ": each chars entry must be exactly one Unicode scalar value");
    }
    return decoded[0];
}

TokenProbSequence sequence_from_json(const json &obj, const std::string &context) {
    if (!obj.is_object()) {
        throw ValidationError(context + ": expected a JSON object");
    }
    TokenProbSequence seq;
    seq.id = require_string(obj, "id", context);
    const std::string where = context + ": sequence '" + seq.id + "'";
    if (obj.contains("group_id")) {
        seq.group_id = require_string(obj, "group_id", where);
    }
    if (!obj.contains("chars") || !obj.at("chars").is_array()) {
        throw ValidationError(where + ": missing \"chars\" array");
    }
    for (const auto &c : obj.at("chars")) {
        seq.chars.push_back(single_scalar(c, where));
    }
    if (!obj.contains("logp") || !obj.at("logp").is_array()) {
        throw ValidationError(where + ": missing \"logp\" array");
    }
    for (const auto &v : obj.at("logp")) {
        if (!v.is_number()) {
            throw ValidationError(where + ": logp entries must be numbers");
        }
        seq.logp.push_back(v.get<double>());
    }
    if (obj.contains("vocab")) {
        if (!obj.at("vocab").is_array()) {
            throw ValidationError(where + ": \"vocab\" must be an array");
        }
        for (const auto &c : obj.at("vocab")) {
            seq.vocab.push_back(single_scalar(c, where));
        }
    }
    if (obj.contains("dist")) {
        const auto &rows = obj.at("dist");
        if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
            throw ValidationError(where + ": \"dist\" must be an array of arrays");
        }
        const auto width = rows[0].size();
        Eigen::MatrixXd dist(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
        for (std::size_t t = 0; t < rows.size(); ++t) {
            if (!rows[t].is_array() || rows[t].size() != width) {
                throw ValidationError(where + ": ragged dist row " + std::to_string(t));
            }
            for (std::size_t v = 0; v < width; ++v) {
                if (!rows[t][v].is_number()) {
                    throw ValidationError(where + ": dist entries must be numbers");
                }
                dist(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(v)) = rows[t][v].get<double>();
            }
        }
        seq.dist = std::move(dist);
    }
    return seq;
}

} // namespace

std::vector<TokenProbSequence> parse_token_probs(std::istream &in, const TokenProbOptions &options,
                                                 std::string_view source, Diagnostics *diag) {
    const std::string src(source);
    std::vector<TokenProbSequence> out;
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (next_nonblank_line(in, line, line_no)) {
        const std::string context = src + ":" + std::to_string(line_no);
        TokenProbSequence seq = sequence_from_json(parse_json(line, context), context);
        if (options.truncate && seq.chars.size() > options.max_length) {
            warn(diag, "sequence '" + seq.id + "' truncated from " + std::to_string(seq.chars.size()) + " to " +
                           std::to_string(options.max_length) + " characters");
            seq.chars.resize(options.max_length);
            if (seq.logp.size() > options.max_length) {
                seq.logp.resize(options.max_length);
            }
            if (seq.dist && seq.dist->rows() > static_cast<Eigen::Index>(options.max_length)) {
                seq.dist = Eigen::MatrixXd(seq.dist->topRows(static_cast<Eigen::Index>(options.max_length)));
            }
        }
        try {
            validate_sequence(seq, options);
        } catch (const ValidationError &e) {
            throw ValidationError(context + ": " + e.what());
        }
        if (!seen.insert(seq.id).second) {
            throw ValidationError(context + ": duplicate sequence id '" + seq.id + "'");
        }
        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<TokenProbSequence> load_token_probs(const std::filesystem::path &path, const TokenProbOptions &options,
                                                Diagnostics *diag) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_token_probs(in, options, path.string(), diag);
}

// --- split ------------------------------------------------------------------

std::size_t SplitAssignment::count(Split s) const {
    return static_cast<std::size_t>(
        std::count_if(assignment.begin(), assignment.end(), [s](const auto &kv) { return kv.second == s; }));
}

SplitAssignment split_dataset(const CorpusManifest &manifest, const SplitRatios &ratios, std::uint64_t seed) {
    if (manifest.items.empty()) {
        throw ValidationError("cannot split an empty manifest");
    }
    for (const double r : ratios) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw ValidationError("split ratios must be positive");
        }
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw ValidationError("split ratios must sum to 1");
    }
    validate_manifest(manifest);

    // Units in lexicographic order of their smallest id; a pair is one unit.
    std::vector<std::string> ids;
    ids.reserve(manifest.items.size());
    std::map<std::string, std::optional<std::string>, std::less<>> partner;
    for (const auto &item : manifest.items) {
        ids.push_back(item.id);
        partner.emplace(item.id, item.pair_id);
    }
    std::sort(ids.begin(), ids.end());
    std::vector<std::vector<std::string>> units;
    for (const auto &id : ids) {
        const auto &other = partner.at(id);
        if (other && *other < id) {
            continue;
        }
        if (other) {
            units.push_back({id, *other});
        } else {
            units.push_back({id});
        }
    }

    Xoshiro256 rng(seed);
    fisher_yates(units, rng);

    const auto n = static_cast<double>(ids.size());
    const auto train_end = static_cast<std::size_t>(std::llround(ratios[0] * n));
    const auto val_end = static_cast<std::size_t>(std::llround((ratios[0] + ratios[1]) * n));

    SplitAssignment out;
    out.seed = seed;
    out.ratios = ratios;
    std::size_t offset = 0;
    for (const auto &unit : units) {
        const Split label = offset < train_end ? Split::train : (offset < val_end ? Split::val : Split::test);
        for (const auto &id : unit) {
            out.assignment.emplace(id, label);
        }
        offset += unit.size();
    }
    return out;
}

std::string split_to_string(const SplitAssignment &split) {
    ordered_json doc;
    doc["seed"] = split.seed;
    doc["ratios"] = {split.ratios[0], split.ratios[1], split.ratios[2]};
    ordered_json assignment = ordered_json::object();
    for (const auto &[id, label] : split.assignment) {
        assignment[id] = to_string(label);
    }
    doc["assignment"] = std::move(assignment);
    return doc.dump(2) + "\n";
}

SplitAssignment parse_split_assignment(std::string_view json_text, std::string_view source) {
    const std::string src(source);
    const json doc = parse_json(json_text, source);
    if (!doc.is_object() || !doc.contains("assignment") || !doc.at("assignment").is_object()) {
        throw ValidationError(src + ": expected an object with an \"assignment\" map");
    }
    SplitAssignment out;
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw ValidationError(src + ": \"seed\" must be an unsigned integer");
        }
        out.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("ratios")) {
        const auto &r = doc.at("ratios");
        if (!r.is_array() || r.size() != 3) {
            throw ValidationError(src + ": \"ratios\" must hold three numbers");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            if (!r[i].is_number()) {
                throw ValidationError(src + ": \"ratios\" must hold three numbers");
            }
            out.ratios[i] = r[i].get<double>();
        }
    }
    for (const auto &[id, label] : doc.at("assignment").items()) {
        if (!label.is_string()) {
            throw ValidationError(src + ": split label for id '" + id + "' must be a string");
        }
        try {
            out.assignment.emplace(id, parse_split(label.get<std::string>()));
        } catch (const ValidationError &e) {
            throw ValidationError(src + ": id '" + id + "': " + e.what());
        }
    }
    return out;
}

SplitAssignment load_split_assignment(const std::filesystem::path &path) {
    return parse_split_assignment(read_file(path), path.string());
}

// --- batch scheduling ---------------------------------------------------------

BatchPlan schedule_batches(const SplitAssignment &split, const CorpusManifest &manifest,
                           std::size_t paired_per_batch, std::size_t ratio_k, std::uint64_t seed,
                           Diagnostics *diag) {
    if (paired_per_batch == 0) {
        throw ValidationError("paired_per_batch must be at least 1");
    }
    validate_manifest(manifest);
    const auto index = manifest.id_index();
    const auto in_train = [&split](const std::string &id) {
        const auto it = split.assignment.find(id);
        return it != split.assignment.end() && it->second == Split::train;
    };

    std::vector<PairedIds> pairs;
    std::vector<std::string> unpaired;
    for (const auto &item : manifest.items) {
        if (!split.assignment.contains(item.id)) {
            throw ValidationError("id '" + item.id + "' has no split assignment");
        }
        if (!in_train(item.id)) {
            continue;
        }
        if (!item.pair_id) {
            unpaired.push_back(item.id);
            continue;
        }
        if (!in_train(*item.pair_id)) {
            throw ValidationError("pair '" + item.id + "'/'" + *item.pair_id + "' straddles splits");
        }
        if (item.modality == Modality::painting) {
            pairs.push_back({item.id, *item.pair_id});
        }
    }
    for (const auto &[id, label] : split.assignment) {
        if (!index.contains(id)) {
            throw ValidationError("split assigns id '" + id + "' which is not in the manifest");
        }
    }
    if (pairs.empty()) {
        throw ValidationError("train split has no paired items to anchor batches");
    }
    if (ratio_k > 0 && unpaired.empty()) {
        throw ValidationError("train split has no unpaired items but ratio_k = " + std::to_string(ratio_k));
    }

    std::sort(pairs.begin(), pairs.end());
    std::sort(unpaired.begin(), unpaired.end());
    Xoshiro256 rng(seed);
    fisher_yates(pairs, rng);
    fisher_yates(unpaired, rng);

    BatchPlan plan;
    plan.paired_per_batch = paired_per_batch;
    plan.ratio_k = ratio_k;
    std::size_t cursor = 0;
    for (std::size_t start = 0; start < pairs.size(); start += paired_per_batch) {
        Batch batch;
        const std::size_t stop = std::min(pairs.size(), start + paired_per_batch);
        batch.paired.assign(pairs.begin() + static_cast<std::ptrdiff_t>(start),
                            pairs.begin() + static_cast<std::ptrdiff_t>(stop));
        batch.partial = batch.paired.size() < paired_per_batch;
        const std::size_t demand = ratio_k * batch.paired.size();
        for (std::size_t i = 0; i < demand; ++i) {
            if (cursor == unpaired.size()) {
                fisher_yates(unpaired, rng);
                cursor = 0;
                ++plan.unpaired_cycles;
            }
            batch.unpaired.push_back(unpaired[cursor++]);
        }
        plan.batches.push_back(std::move(batch));
    }
    if (plan.unpaired_cycles > 0) {
        warn(diag, "unpaired pool of " + std::to_string(unpaired.size()) + " items recycled " +
                       std::to_string(plan.unpaired_cycles) + " time(s)");
    }
    if (!plan.batches.empty() && plan.batches.back().partial) {
        warn(diag, "final batch is partial (" + std::to_string(plan.batches.back().paired.size()) + " of " +
                       std::to_string(paired_per_batch) + " pairs)");
    }
    return plan;
}

std::string batch_plan_to_string(const BatchPlan &plan) {
    ordered_json doc;
    doc["ratio"] = {{"paired", 1}, {"unpaired", plan.ratio_k}};
    doc["paired_per_batch"] = plan.paired_per_batch;
    doc["unpaired_cycles"] = plan.unpaired_cycles;
    ordered_json batches = ordered_json::array();
    for (const auto &batch : plan.batches) {
        ordered_json b;
        ordered_json paired = ordered_json::array();
        for (const auto &p : batch.paired) {
            paired.push_back({p.painting, p.poem});
        }
        b["paired_ids"] = std::move(paired);
        b["unpaired_ids"] = batch.unpaired;
        b["partial"] = batch.partial;
        batches.push_back(std::move(b));
    }
    doc["batches"] = std::move(batches);
    return doc.dump(2) + "\n";
}

// --- tokenizer ----------------------------------------------------------------

std::u32string tokenize_chars(std::string_view text, bool keep_cjk_punctuation) {
    const auto decoded = unicode::decode_utf8(text);
    std::u32string tokens;
    tokens.reserve(decoded.size());
    for (const char32_t c : decoded) {
        if (unicode::is_whitespace(c) || unicode::is_ascii_punctuation(c) || (c < 0x20) || c == 0x7F) {
            continue;
        }
        if (!keep_cjk_punctuation && unicode::is_cjk_punctuation(c)) {
            continue;
        }
        tokens.push_back(c);
    }
    return tokens;
}

} // namespace inkbridge
