#include "inkbridge/cli.hpp"

#include "inkbridge/corpus_io.hpp"
#include "inkbridge/kernels.hpp"
#include "inkbridge/linalg.hpp"
#include "inkbridge/losses.hpp"
#include "inkbridge/metrics_text.hpp"
#include "inkbridge/metrics_visual.hpp"
#include "inkbridge/numeric.hpp"
#include "inkbridge/report.hpp"
#include "inkbridge/sampling.hpp"
#include "inkbridge/validation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace inkbridge::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Common {
    std::string format = "json";
    std::string out_path;
    int threads = 0;
};

struct Context {
    const Common &common;
    std::ostream &out;
    std::ostream &err;
    Diagnostics diag;

    void emit(const std::string &text) {
        if (common.out_path.empty()) {
            out << text;
            out.flush();
            return;
        }
        std::ofstream file(common.out_path, std::ios::binary);
        if (!file) {
            throw IoError("cannot open '" + common.out_path + "' for writing");
        }
        file << text;
        if (!file) {
            throw IoError("write failure on '" + common.out_path + "'");
        }
    }

    bool csv() const { return common.format == "csv"; }

    void emit_report(const MetricReport &report) {
        emit(csv() ? report_to_csv(report) : report_to_json_string(report));
    }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag) {
    if (flag) {
        return *flag;
    }
    if (const char *env = std::getenv("INKBRIDGE_SEED"); env != nullptr && *env != '\0') {
        char *end = nullptr;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (end == nullptr || *end != '\0') {
            throw ValidationError(std::string("INKBRIDGE_SEED is not an unsigned integer: '") + env + "'");
        }
        return value;
    }
    return 0;
}

SplitRatios parse_ratios(const std::string &text) {
    SplitRatios ratios{};
    std::stringstream in(text);
    std::string field;
    std::size_t i = 0;
    while (std::getline(in, field, ',')) {
        if (i >= 3 || !parse_double(field, ratios[i])) {
            throw ValidationError("--ratios must be three comma-separated numbers, got '" + text + "'");
        }
        ++i;
    }
    if (i != 3) {
        throw ValidationError("--ratios must be three comma-separated numbers, got '" + text + "'");
    }
    return ratios;
}

// --- poem pair input --------------------------------------------------------------

struct NamedPair {
    std::string id;
    PoemPair pair;
};

std::vector<NamedPair> load_poem_pairs(const std::string &path, bool keep_punct) {
    const std::string text = read_file(path);
    std::stringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<NamedPair> pairs;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::string where = path + ":" + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error &e) {
            throw ValidationError(where + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj.at("id").is_string() || !obj.contains("candidate") ||
            !obj.at("candidate").is_string()) {
            throw ValidationError(where + ": expected {\"id\",\"candidate\",\"references\":[...]}");
        }
        NamedPair named;
        named.id = obj.at("id").get<std::string>();
        named.pair.candidate = tokenize_chars(obj.at("candidate").get<std::string>(), keep_punct);
        std::vector<std::string> refs;
        if (obj.contains("references") && obj.at("references").is_array()) {
            for (const auto &r : obj.at("references")) {
                if (!r.is_string()) {
                    throw ValidationError(where + ": references must be strings");
                }
                refs.push_back(r.get<std::string>());
            }
        } else if (obj.contains("reference") && obj.at("reference").is_string()) {
            refs.push_back(obj.at("reference").get<std::string>());
        }
        for (const auto &r : refs) {
            named.pair.references.push_back(tokenize_chars(r, keep_punct));
        }
        try {
            named.pair.validate();
        } catch (const ValidationError &e) {
            throw ValidationError(where + ": id '" + named.id + "': " + e.what());
        }
        pairs.push_back(std::move(named));
    }
    if (pairs.empty()) {
        throw ValidationError(path + ": no poem pairs");
    }
    return pairs;
}

MetricReport macro_report(const std::string &metric, const std::vector<NamedPair> &pairs,
                          const std::vector<double> &values) {
    MetricReport report;
    report.metric = metric;
    report.value = pairwise_sum(values) / static_cast<double>(values.size());
    report.extras["items"] = values.size();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        report.per_item.emplace_back(pairs[i].id, values[i]);
    }
    return report;
}

// --- loss inputs --------------------------------------------------------------------

std::vector<ReconPair> load_recon_pairs(const std::string &original_path, const std::string &recon_path) {
    const FeatureMatrix original = load_features(original_path, Modality::painting);
    const FeatureMatrix recon = load_features(recon_path, Modality::painting);
    std::map<std::string, Eigen::Index, std::less<>> recon_rows;
    for (std::size_t r = 0; r < recon.ids.size(); ++r) {
        recon_rows.emplace(recon.ids[r], static_cast<Eigen::Index>(r));
    }
    if (recon_rows.size() != original.ids.size()) {
        throw ValidationError(recon_path + ": ids do not match '" + original_path + "'");
    }
    std::vector<ReconPair> pairs;
    for (std::size_t r = 0; r < original.ids.size(); ++r) {
        const auto it = recon_rows.find(original.ids[r]);
        if (it == recon_rows.end()) {
            throw ValidationError(recon_path + ": missing id '" + original.ids[r] + "'");
        }
        if (original.cols() != recon.cols()) {
            throw ValidationError(recon_path + ": width differs from '" + original_path + "'");
        }
        ReconPair pair;
        const auto row = static_cast<Eigen::Index>(r);
        pair.original.assign(original.data.row(row).begin(), original.data.row(row).end());
        pair.reconstruction.assign(recon.data.row(it->second).begin(), recon.data.row(it->second).end());
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<double> load_scalar_scores(const std::string &path) {
    const FeatureMatrix scores = load_features(path, Modality::poem);
    if (scores.cols() != 1) {
        throw ValidationError(path + ": scalar score file must have exactly one value column");
    }
    return {scores.data.data(), scores.data.data() + scores.rows()};
}

std::vector<PatchScoreGrid> load_grids(const std::string &path, const std::string &shape_path) {
    const FeatureMatrix flat = load_features(path, Modality::painting);
    std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> shapes;
    std::stringstream in(read_file(shape_path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
            shapes[obj.at("id").get<std::string>()] = {obj.at("w").get<std::size_t>(), obj.at("h").get<std::size_t>()};
        } catch (const nlohmann::json::exception &e) {
            throw ValidationError(shape_path + ": expected lines {\"id\",\"w\",\"h\"}: " + e.what());
        }
    }
    std::vector<PatchScoreGrid> grids;
    for (std::size_t r = 0; r < flat.ids.size(); ++r) {
        const auto it = shapes.find(flat.ids[r]);
        if (it == shapes.end()) {
            throw ValidationError(shape_path + ": no shape for id '" + flat.ids[r] + "'");
        }
        const auto [w, h] = it->second;
        if (w < 1 || h < 1 || w * h != static_cast<std::size_t>(flat.cols())) {
            throw ValidationError(shape_path + ": shape of id '" + flat.ids[r] + "' does not match its " +
                                  std::to_string(flat.cols()) + " values");
        }
        PatchScoreGrid grid;
        grid.scores.resize(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(h));
        for (std::size_t i = 0; i < w; ++i) {
            for (std::size_t j = 0; j < h; ++j) {
                grid.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    flat.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i * h + j));
            }
        }
        try {
            grid.validate();
        } catch (const ValidationError &e) {
            throw ValidationError(path + ": id '" + flat.ids[r] + "': " + e.what());
        }
        grids.push_back(std::move(grid));
    }
    return grids;
}

/// Either a feature CSV or a cached Gaussian summary (.json).
GaussianSummary load_gaussian_or_fit(const std::string &path, CovEstimator estimator) {
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        return parse_gaussian(read_file(path), path);
    }
    const FeatureMatrix features = load_features(path, Modality::painting);
    if (features.rows() < 2) {
        throw ValidationError(path + ": at least 2 rows are needed to fit a Gaussian");
    }
    return estimator == CovEstimator::sample ? mean_and_cov(features) : ledoit_wolf(features).summary;
}

std::string usage_line() {
    return "usage: inkbridge <split|schedule|mce|mte|ppl|prf|bleu|meteor|fid|dce|genre-acc|losses|sample|"
           "correlate|summary|fit-gaussian> [options]";
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    Common common;
    CLI::App app{"Evaluation metrics, losses and samplers for poem/painting translation", "inkbridge"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "INI/TOML file with option values");
    app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", common.out_path, "Write the report here instead of standard output");
    app.add_option("--threads", common.threads, "OpenMP worker count")->check(CLI::PositiveNumber);

    std::function<void(Context &)> action;
    const auto bind = [&action](CLI::App *sub, std::function<void(Context &)> fn) {
        sub->callback([&action, fn = std::move(fn)] { action = fn; });
    };

    // split
    {
        auto *sub = app.add_subcommand("split", "Deterministic train/val/test split of a manifest");
        auto manifest = std::make_shared<std::string>();
        auto ratios = std::make_shared<std::string>("0.7,0.15,0.15");
        auto seed = std::make_shared<std::optional<std::uint64_t>>();
        sub->add_option("--manifest", *manifest)->required();
        sub->add_option("--ratios", *ratios, "train,val,test");
        sub->add_option("--seed", *seed);
        bind(sub, [=](Context &ctx) {
            const auto split = split_dataset(load_manifest(*manifest), parse_ratios(*ratios), resolve_seed(*seed));
            if (ctx.csv()) {
                std::string text = "id,split\n";
                for (const auto &[id, label] : split.assignment) {
                    text += id + "," + std::string(to_string(label)) + "\n";
                }
                ctx.emit(text);
            } else {
                ctx.emit(split_to_string(split));
            }
        });
    }

    // schedule
    {
        auto *sub = app.add_subcommand("schedule", "Paired:unpaired batch plan over the train split");
        auto manifest = std::make_shared<std::string>();
        auto split_path = std::make_shared<std::string>();
        auto per_batch = std::make_shared<std::size_t>(1);
        auto ratio_k = std::make_shared<std::size_t>(5);
        auto seed = std::make_shared<std::optional<std::uint64_t>>();
        sub->add_option("--manifest", *manifest)->required();
        sub->add_option("--split", *split_path, "SplitAssignment JSON")->required();
        sub->add_option("--paired-per-batch", *per_batch);
        sub->add_option("--ratio-k", *ratio_k, "Unpaired items per paired item");
        sub->add_option("--seed", *seed);
        bind(sub, [=](Context &ctx) {
            const auto plan = schedule_batches(load_split_assignment(*split_path), load_manifest(*manifest), *per_batch,
                                               *ratio_k, resolve_seed(*seed), &ctx.diag);
            ctx.emit(batch_plan_to_string(plan));
        });
    }

    // LM-probability metrics
    for (const std::string name : {"mce", "mte", "ppl"}) {
        auto *sub = app.add_subcommand(name, name == "mce"   ? "Mean per-poem cross-entropy"
                                             : name == "mte" ? "Mean cross-entropy over sampled poems per painting"
                                                             : "Token-weighted perplexity");
        auto probs = std::make_shared<std::string>();
        auto max_length = std::make_shared<std::size_t>(default_max_poem_length);
        auto truncate = std::make_shared<bool>(false);
        sub->add_option("--probs", *probs, "Token-probability JSON-lines file")->required();
        sub->add_option("--max-length", *max_length);
        sub->add_flag("--truncate", *truncate, "Cut sequences above --max-length instead of rejecting them");
        bind(sub, [=](Context &ctx) {
            TokenProbOptions options;
            options.max_length = *max_length;
            options.truncate = *truncate;
            const auto corpus = load_token_probs(*probs, options, &ctx.diag);
            if (corpus.empty()) {
                throw ValidationError(*probs + ": no sequences");
            }
            MetricReport report;
            report.metric = name;
            if (name == "mte") {
                const auto groups = group_for_mte(corpus);
                report.value = mte(groups);
                report.extras["groups"] = groups.size();
                report.extras["sequences"] = corpus.size();
                for (const auto &group : groups) {
                    report.per_item.emplace_back(group.group_id, mce(group.sequences));
                }
            } else {
                const auto per_poem = kernels::omp::map_items(
                    corpus.size(), [&corpus](std::size_t i) { return cross_entropy_seq(corpus[i]); });
                report.value = name == "mce" ? mce(corpus) : perplexity(corpus);
                report.extras["sequences"] = corpus.size();
                for (std::size_t i = 0; i < corpus.size(); ++i) {
                    report.per_item.emplace_back(corpus[i].id,
                                                 name == "mce" ? per_poem[i] : std::exp(per_poem[i]));
                }
            }
            ctx.emit_report(report);
        });
    }

    // overlap metrics
    for (const std::string name : {"prf", "bleu", "meteor"}) {
        auto *sub = app.add_subcommand(name, name == "prf"    ? "Character precision, recall and F1"
                                             : name == "bleu" ? "Character BLEU"
                                                              : "Simplified (exact-match) METEOR");
        auto pairs_path = std::make_shared<std::string>();
        auto keep_punct = std::make_shared<bool>(false);
        auto max_n = std::make_shared<std::size_t>(4);
        sub->add_option("--pairs", *pairs_path, "JSON-lines {\"id\",\"candidate\",\"references\":[...]}")->required();
        sub->add_flag("--keep-punct", *keep_punct, "Keep CJK punctuation as tokens");
        if (name == "bleu") {
            sub->add_option("--max-n", *max_n)->check(CLI::PositiveNumber);
        }
        bind(sub, [=](Context &ctx) {
            const auto pairs = load_poem_pairs(*pairs_path, *keep_punct);
            if (name == "prf") {
                std::vector<PrfScore> scores(pairs.size());
                const auto f1 = kernels::omp::map_items(pairs.size(), [&](std::size_t i) {
                    scores[i] = char_prf(pairs[i].pair);
                    return scores[i].f1;
                });
                std::vector<double> p;
                std::vector<double> r;
                for (const auto &s : scores) {
                    p.push_back(s.precision);
                    r.push_back(s.recall);
                }
                if (ctx.csv()) {
                    std::string text = "id,P,R,F1\n";
                    for (std::size_t i = 0; i < pairs.size(); ++i) {
                        text += pairs[i].id + "," + format_double(p[i]) + "," + format_double(r[i]) + "," +
                                format_double(f1[i]) + "\n";
                    }
                    text += "__all__," + format_double(pairwise_sum(p) / static_cast<double>(p.size())) + "," +
                            format_double(pairwise_sum(r) / static_cast<double>(r.size())) + "," +
                            format_double(pairwise_sum(f1) / static_cast<double>(f1.size())) + "\n";
                    ctx.emit(text);
                    return;
                }
                ordered_json doc = ordered_json::array();
                doc.push_back(report_to_json(macro_report("p", pairs, p)));
                doc.push_back(report_to_json(macro_report("r", pairs, r)));
                doc.push_back(report_to_json(macro_report("f1", pairs, f1)));
                ctx.emit(doc.dump(2) + "\n");
                return;
            }
            const auto values = kernels::omp::map_items(pairs.size(), [&](std::size_t i) {
                return name == "bleu" ? bleu(pairs[i].pair, *max_n) : meteor_simplified(pairs[i].pair);
            });
            auto report = macro_report(name == "bleu" ? "bleu" : "meteor_simplified", pairs, values);
            if (name == "bleu") {
                report.extras["max_n"] = *max_n;
            } else {
                report.extras["variant"] = "exact-match core";
            }
            ctx.emit_report(report);
        });
    }

    // fid
    {
        auto *sub = app.add_subcommand("fid", "Frechet distance between real and generated feature sets");
        auto real = std::make_shared<std::string>();
        auto generated = std::make_shared<std::string>();
        auto estimator = std::make_shared<std::string>("sample");
        sub->add_option("--real", *real, "Feature CSV or cached Gaussian JSON")->required();
        sub->add_option("--generated", *generated, "Feature CSV or cached Gaussian JSON")->required();
        sub->add_option("--estimator", *estimator)->check(CLI::IsMember({"sample", "ledoit_wolf"}));
        bind(sub, [=](Context &ctx) {
            const auto est = parse_estimator(*estimator);
            const auto g_real = load_gaussian_or_fit(*real, est);
            const auto g_gen = load_gaussian_or_fit(*generated, est);
            MetricReport report;
            report.metric = "fid";
            report.value = wasserstein2_gaussian(g_real, g_gen);
            report.extras["dim"] = g_real.dim();
            report.extras["n_real"] = g_real.n;
            report.extras["n_generated"] = g_gen.n;
            report.extras["estimator"] = std::string(to_string(est));
            ctx.emit_report(report);
        });
    }

    // fit-gaussian
    {
        auto *sub = app.add_subcommand("fit-gaussian", "Cache a Gaussian summary of a feature file as JSON");
        auto features = std::make_shared<std::string>();
        auto estimator = std::make_shared<std::string>("sample");
        sub->add_option("--features", *features)->required();
        sub->add_option("--estimator", *estimator)->check(CLI::IsMember({"sample", "ledoit_wolf"}));
        bind(sub, [=](Context &ctx) {
            ctx.emit(gaussian_to_string(load_gaussian_or_fit(*features, parse_estimator(*estimator))));
        });
    }

    // dce
    {
        auto *sub = app.add_subcommand("dce", "Distribution consistency error between painting and poem features");
        auto paintings = std::make_shared<std::string>();
        auto poems = std::make_shared<std::string>();
        auto cfg = std::make_shared<DceConfig>();
        auto estimator = std::make_shared<std::string>("ledoit_wolf");
        auto scope = std::make_shared<std::string>("pooled");
        sub->add_option("--paintings", *paintings)->required();
        sub->add_option("--poems", *poems)->required();
        sub->add_option("--pca-dim", cfg->pca_dim)->check(CLI::PositiveNumber);
        sub->add_option("--estimator", *estimator)->check(CLI::IsMember({"sample", "ledoit_wolf"}));
        sub->add_option("--fit-scope", *scope)->check(CLI::IsMember({"pooled", "per_domain"}));
        sub->add_flag("--standardize", cfg->standardize, "Scale pooled columns to unit variance before PCA");
        bind(sub, [=](Context &ctx) {
            DceConfig config = *cfg;
            config.estimator = parse_estimator(*estimator);
            config.fit_scope = parse_fit_scope(*scope);
            const auto result =
                dce(load_features(*paintings, Modality::painting), load_features(*poems, Modality::poem), config);
            MetricReport report;
            report.metric = "dce";
            report.value = result.value;
            report.extras["pca_dim"] = result.pca_dim;
            report.extras["variance_retained"] = result.variance_retained;
            report.extras["estimator"] = std::string(to_string(result.estimator));
            report.extras["fit_scope"] = std::string(to_string(config.fit_scope));
            report.extras["squared"] = true;
            ctx.emit_report(report);
        });
    }

    // genre-acc
    {
        auto *sub = app.add_subcommand("genre-acc", "Genre classification accuracy of generated paintings");
        auto pred = std::make_shared<std::string>();
        auto truth = std::make_shared<std::string>();
        auto manifest = std::make_shared<std::string>();
        sub->add_option("--pred", *pred, "CSV id,genre")->required();
        auto *truth_opt = sub->add_option("--truth", *truth, "CSV id,genre");
        auto *manifest_opt = sub->add_option("--manifest", *manifest, "Take true genres from a manifest");
        truth_opt->excludes(manifest_opt);
        bind(sub, [=](Context &ctx) {
            if (truth->empty() && manifest->empty()) {
                throw ValidationError("genre-acc needs --truth or --manifest");
            }
            const LabelSet predicted = load_labels(*pred);
            LabelSet expected = truth->empty() ? labels_from_manifest(load_manifest(*manifest)) : load_labels(*truth);
            if (!manifest->empty()) {
                // Restrict manifest genres to the predicted ids; ids missing a genre surface as errors below.
                std::map<std::string, Genre, std::less<>> all;
                for (std::size_t i = 0; i < expected.ids.size(); ++i) {
                    all.emplace(expected.ids[i], expected.labels[i]);
                }
                LabelSet subset;
                for (const auto &id : predicted.ids) {
                    const auto it = all.find(id);
                    if (it == all.end()) {
                        throw ValidationError("genre-acc: id '" + id + "' has no genre in the manifest");
                    }
                    subset.ids.push_back(id);
                    subset.labels.push_back(it->second);
                }
                expected = std::move(subset);
            }
            MetricReport report;
            report.metric = "genre_acc";
            report.value = genre_accuracy(predicted, expected);
            std::map<std::string, Genre, std::less<>> truth_by_id;
            for (std::size_t i = 0; i < expected.ids.size(); ++i) {
                truth_by_id.emplace(expected.ids[i], expected.labels[i]);
            }
            for (std::size_t i = 0; i < predicted.ids.size(); ++i) {
                report.per_item.emplace_back(predicted.ids[i],
                                             truth_by_id.at(predicted.ids[i]) == predicted.labels[i] ? 1.0 : 0.0);
            }
            ctx.emit_report(report);
        });
    }

    // losses
    {
        auto *sub = app.add_subcommand("losses", "Evaluate the cycle, supervised and adversarial objective terms");
        struct LossArgs {
            std::string painting_orig, painting_recon, poem_orig, poem_recon;
            std::string sup_poem_pred, sup_poem_true, sup_painting_pred, sup_painting_true;
            std::string seq_real, seq_fake;
            std::string patch_real, patch_real_shape, patch_fake, patch_fake_shape;
            LossWeights weights;
            bool non_saturating = false;
        };
        auto a = std::make_shared<LossArgs>();
        sub->add_option("--painting-orig", a->painting_orig, "Flattened paintings (feature CSV)");
        sub->add_option("--painting-recon", a->painting_recon, "Cycle reconstructions of the paintings");
        sub->add_option("--poem-orig", a->poem_orig);
        sub->add_option("--poem-recon", a->poem_recon);
        sub->add_option("--sup-poem-pred", a->sup_poem_pred);
        sub->add_option("--sup-poem-true", a->sup_poem_true);
        sub->add_option("--sup-painting-pred", a->sup_painting_pred);
        sub->add_option("--sup-painting-true", a->sup_painting_true);
        sub->add_option("--seq-real", a->seq_real, "Sequence discriminator scores on real poems (id,f0)");
        sub->add_option("--seq-fake", a->seq_fake, "Sequence discriminator scores on generated poems (id,f0)");
        sub->add_option("--patch-real", a->patch_real, "Flattened patch score grids on real paintings");
        sub->add_option("--patch-real-shape", a->patch_real_shape, "JSON-lines {\"id\",\"w\",\"h\"}");
        sub->add_option("--patch-fake", a->patch_fake, "Flattened patch score grids on generated paintings");
        sub->add_option("--patch-fake-shape", a->patch_fake_shape, "JSON-lines {\"id\",\"w\",\"h\"}");
        sub->add_option("--lambda-sup", a->weights.lambda_sup)->check(CLI::NonNegativeNumber);
        sub->add_option("--lambda-adv", a->weights.lambda_adv)->check(CLI::NonNegativeNumber);
        sub->add_flag("--non-saturating", a->non_saturating, "Use -log D(G(x)) for the generator sequence term");
        bind(sub, [=](Context &ctx) {
            const auto both_or_neither = [](const std::string &x, const std::string &y, const char *what) {
                if (x.empty() != y.empty()) {
                    throw ValidationError(std::string("losses: ") + what + " needs both files");
                }
                return !x.empty();
            };
            ordered_json components = ordered_json::object();
            std::optional<double> cyc, sup, adv_seq, adv_patch;

            const bool have_painting_cycle = both_or_neither(a->painting_orig, a->painting_recon, "painting cycle");
            const bool have_poem_cycle = both_or_neither(a->poem_orig, a->poem_recon, "poem cycle");
            if (have_painting_cycle || have_poem_cycle) {
                const auto painting_pairs = have_painting_cycle ? load_recon_pairs(a->painting_orig, a->painting_recon)
                                                                : std::vector<ReconPair>{};
                const auto poem_pairs =
                    have_poem_cycle ? load_recon_pairs(a->poem_orig, a->poem_recon) : std::vector<ReconPair>{};
                cyc = cycle_loss(painting_pairs, poem_pairs, &ctx.diag);
                components["cycle"] = *cyc;
            }
            const bool have_sup_poem = both_or_neither(a->sup_poem_pred, a->sup_poem_true, "supervised poem term");
            const bool have_sup_painting =
                both_or_neither(a->sup_painting_pred, a->sup_painting_true, "supervised painting term");
            if (have_sup_poem != have_sup_painting) {
                throw ValidationError("losses: the supervised loss needs both poem and painting terms");
            }
            if (have_sup_poem) {
                sup = supervised_loss(load_recon_pairs(a->sup_poem_true, a->sup_poem_pred),
                                      load_recon_pairs(a->sup_painting_true, a->sup_painting_pred));
                components["supervised"] = *sup;
            }
            if (!a->seq_fake.empty()) {
                const auto fake = load_scalar_scores(a->seq_fake);
                const auto form = a->non_saturating ? GeneratorForm::non_saturating : GeneratorForm::minimax;
                components["adv_seq_generator"] = adv_generator_seq(fake, form, &ctx.diag);
                if (!a->seq_real.empty()) {
                    const auto real = load_scalar_scores(a->seq_real);
                    adv_seq = adv_discriminator_seq(real, fake, &ctx.diag);
                    components["adv_seq"] = *adv_seq;
                } else {
                    adv_seq = components["adv_seq_generator"].get<double>();
                }
            } else if (!a->seq_real.empty()) {
                throw ValidationError("losses: --seq-real needs --seq-fake");
            }
            const bool have_patch_fake = both_or_neither(a->patch_fake, a->patch_fake_shape, "patch fake scores");
            const bool have_patch_real = both_or_neither(a->patch_real, a->patch_real_shape, "patch real scores");
            if (have_patch_fake) {
                const auto fake = load_grids(a->patch_fake, a->patch_fake_shape);
                adv_patch = patch_generator_loss(fake, &ctx.diag);
                components["adv_patch_generator"] = *adv_patch;
                if (have_patch_real) {
                    const auto real = load_grids(a->patch_real, a->patch_real_shape);
                    components["patch_discriminator"] = patch_discriminator_loss(real, fake, &ctx.diag);
                }
            } else if (have_patch_real) {
                throw ValidationError("losses: --patch-real needs --patch-fake");
            }
            if (components.empty()) {
                throw ValidationError("losses: no loss inputs given");
            }
            ordered_json doc;
            doc["components"] = components;
            doc["weights"] = {{"lambda_sup", a->weights.lambda_sup}, {"lambda_adv", a->weights.lambda_adv}};
            if (cyc && sup && adv_seq && adv_patch) {
                doc["full_objective"] = full_objective(*cyc, *sup, *adv_seq, *adv_patch, a->weights);
            } else {
                doc["full_objective"] = nullptr;
            }
            doc["generator_form"] = a->non_saturating ? "non_saturating" : "minimax";
            if (ctx.csv()) {
                std::string text = "component,value\n";
                for (const auto &[key, value] : components.items()) {
                    text += key + "," + format_double(value.get<double>()) + "\n";
                }
                if (!doc["full_objective"].is_null()) {
                    text += "full_objective," + format_double(doc["full_objective"].get<double>()) + "\n";
                }
                ctx.emit(text);
            } else {
                ctx.emit(doc.dump(2) + "\n");
            }
        });
    }

    // sample
    {
        auto *sub = app.add_subcommand("sample", "Draw token indices from logit rows");
        auto logits = std::make_shared<std::string>();
        auto strategy = std::make_shared<std::string>();
        auto cfg = std::make_shared<SamplingConfig>();
        auto seed = std::make_shared<std::optional<std::uint64_t>>();
        auto draws = std::make_shared<std::size_t>(1);
        sub->add_option("--logits", *logits, "Feature CSV, one logit vector per row")->required();
        sub->add_option("--strategy", *strategy)->required()->check(CLI::IsMember({"top_k", "nucleus", "greedy"}));
        sub->add_option("--k", cfg->k)->check(CLI::PositiveNumber);
        sub->add_option("--temperature", cfg->temperature);
        sub->add_option("--p", cfg->p);
        sub->add_option("--seed", *seed);
        sub->add_option("--draws", *draws, "Tokens drawn per row")->check(CLI::PositiveNumber);
        bind(sub, [=](Context &ctx) {
            SamplingConfig config = *cfg;
            config.strategy = parse_strategy(*strategy);
            config.seed = resolve_seed(*seed);
            config.validate();
            ordered_json echo;
            echo["strategy"] = std::string(to_string(config.strategy));
            echo["k"] = config.k;
            echo["temperature"] = config.temperature;
            echo["p"] = config.p;
            echo["seed"] = config.seed;
            echo["draws"] = *draws;
            ctx.err << "CONFIG " << echo.dump() << "\n";

            const FeatureMatrix rows = load_features(*logits, Modality::poem);
            Xoshiro256 rng(config.seed);
            std::string text;
            for (Eigen::Index r = 0; r < rows.rows(); ++r) {
                const Eigen::VectorXd row = rows.data.row(r).transpose();
                const std::span<const double> view(row.data(), static_cast<std::size_t>(row.size()));
                ordered_json line;
                line["id"] = rows.ids[static_cast<std::size_t>(r)];
                std::vector<std::size_t> tokens;
                for (std::size_t i = 0; i < *draws; ++i) {
                    tokens.push_back(sample(view, config, rng, r == 0 && i == 0 ? &ctx.diag : nullptr));
                }
                line["tokens"] = tokens;
                line["seed"] = config.seed;
                text += line.dump() + "\n";
            }
            ctx.emit(text);
        });
    }

    // correlate
    {
        auto *sub = app.add_subcommand("correlate", "Pearson correlation of metrics against human ratings");
        auto ratings = std::make_shared<std::string>();
        auto reports = std::make_shared<std::vector<std::string>>();
        auto raters = std::make_shared<std::size_t>(1);
        sub->add_option("--ratings", *ratings, "CSV id,criterion1,...")->required();
        sub->add_option("--metrics", *reports, "Metric report files with per_item values")->required();
        sub->add_option("--raters", *raters)->check(CLI::PositiveNumber);
        bind(sub, [=](Context &ctx) {
            std::map<std::string, MetricValues> values;
            for (const auto &path : *reports) {
                for (const auto &report : load_reports(path)) {
                    if (values.contains(report.metric)) {
                        throw ValidationError("correlate: metric '" + report.metric + "' given twice");
                    }
                    auto &slot = values[report.metric];
                    for (const auto &[id, v] : report.per_item) {
                        if (!slot.emplace(id, v).second) {
                            throw ValidationError("correlate: duplicate id '" + id + "' in metric '" + report.metric +
                                                  "'");
                        }
                    }
                }
            }
            const auto matrix = correlate_metrics(values, load_ratings(*ratings, *raters), &ctx.diag);
            ctx.emit(ctx.csv() ? correlation_to_csv(matrix) : correlation_to_json(matrix));
        });
    }

    // summary
    {
        auto *sub = app.add_subcommand("summary", "Combine metric reports into one results table");
        auto reports = std::make_shared<std::vector<std::string>>();
        auto label = std::make_shared<std::string>("run");
        sub->add_option("--reports", *reports)->required();
        sub->add_option("--label", *label);
        bind(sub, [=](Context &ctx) {
            std::vector<MetricReport> all;
            for (const auto &path : *reports) {
                for (auto &report : load_reports(path)) {
                    all.push_back(std::move(report));
                }
            }
            const auto table = summarize(all, *label);
            ctx.emit(ctx.csv() ? summary_to_csv(table) : summary_to_json(table));
        });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "ERROR 1: " << e.what() << "\n" << usage_line() << "\n";
        return 1;
    }
    if (!action) {
        err << "ERROR 1: no subcommand given\n" << usage_line() << "\n";
        return 1;
    }

    Context ctx{common, out, err, {}};
    try {
        if (common.threads > 0) {
            kernels::set_num_threads(common.threads);
        }
        action(ctx);
    } catch (const Error &e) {
        for (const auto &w : ctx.diag.warnings()) {
            err << "WARNING: " << w << "\n";
        }
        err << "ERROR " << e.exit_code() << ": " << e.what() << "\n";
        return e.exit_code();
    } catch (const nlohmann::json::exception &e) {
        err << "ERROR 1: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        err << "ERROR 3: " << e.what() << "\n";
        return 3;
    }
    for (const auto &w : ctx.diag.warnings()) {
        err << "WARNING: " << w << "\n";
    }
    return 0;
}

} // namespace inkbridge::cli
