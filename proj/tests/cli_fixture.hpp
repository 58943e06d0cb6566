#pragma once

// A small synthetic evaluation run on disk, plus in-process CLI invocation.

#include "inkbridge/cli.hpp"
#include "inkbridge/corpus_io.hpp"
#include "inkbridge/numeric.hpp"
#include "inkbridge/unicode.hpp"

#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace inkbridge::test {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult invoke(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    CliResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

inline std::filesystem::path fresh_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("inkbridge_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string feature_csv(Xoshiro256 &rng, const std::string &prefix, int rows, int cols, double shift) {
    std::string text = "id";
    for (int j = 0; j < cols; ++j) {
        text += ",f" + std::to_string(j);
    }
    text += "\n";
    for (int i = 0; i < rows; ++i) {
        text += prefix + std::to_string(i);
        for (int j = 0; j < cols; ++j) {
            text += "," + format_double(normal(rng) * (1.0 + 0.1 * j) + shift);
        }
        text += "\n";
    }
    return text;
}

/// Writes manifest, features, token probabilities, poem pairs, labels and ratings.
inline void write_fixture(const std::filesystem::path &dir) {
    Xoshiro256 rng(20240601);
    static const char *const genres[] = {"figure", "flower_bird", "landscape", "boundary"};
    std::string manifest = R"({"items":[)";
    for (int i = 0; i < 20; ++i) {
        const std::string p = "pa" + std::to_string(i);
        const std::string q = "po" + std::to_string(i);
        manifest += std::string(i ? "," : "") + R"({"id":")" + p + R"(","modality":"painting","pair_id":")" + q +
                    R"(","genre":")" + genres[i % 4] + R"("},{"id":")" + q + R"(","modality":"poem","pair_id":")" +
                    p + R"("})";
    }
    for (int i = 0; i < 60; ++i) {
        manifest += R"(,{"id":"u)" + std::to_string(i) + R"(","modality":")" + (i % 2 ? "poem" : "painting") +
                    R"("})";
    }
    manifest += "]}\n";
    write_text(dir / "manifest.json", manifest);

    write_text(dir / "real.csv", feature_csv(rng, "r", 80, 12, 0.0));
    write_text(dir / "generated.csv", feature_csv(rng, "g", 80, 12, 0.4));
    write_text(dir / "paintings.csv", feature_csv(rng, "pa", 60, 12, 0.0));
    write_text(dir / "poems.csv", feature_csv(rng, "po", 60, 12, 0.2));

    static const char *const lines[] = {"白日依山尽", "黄河入海流", "欲穷千里目", "更上一层楼", "床前明月光",
                                        "疑是地上霜", "举头望明月", "低头思故乡", "春眠不觉晓", "处处闻啼鸟"};
    std::string probs;
    std::string pairs;
    std::string ratings = "id,quality,fluency,coherence,diversity\n";
    std::string pred = "id,genre\n";
    std::string truth = "id,genre\n";
    for (int i = 0; i < 20; ++i) {
        const std::string id = "po" + std::to_string(i);
        const std::string cand = std::string(lines[i % 10]) + "，" + lines[(i + 3) % 10] + "。";
        const std::string ref = std::string(lines[i % 10]) + "，" + lines[(i + 1) % 10] + "。";
        std::string chars;
        std::string logp;
        for (const char32_t c : tokenize_chars(cand)) {
            chars += std::string(chars.empty() ? "" : ",") + "\"" + unicode::encode_utf8(c) + "\"";
            logp += std::string(logp.empty() ? "" : ",") + format_double(-3.0 * rng.uniform01());
        }
        probs += R"({"id":")" + id + R"(","group_id":"pa)" + std::to_string(i / 2) + R"(","chars":[)" + chars +
                 R"(],"logp":[)" + logp + "]}\n";
        pairs += R"({"id":")" + id + R"(","candidate":")" + cand + R"(","references":[")" + ref + "\"]}\n";
        ratings += id;
        for (int c = 0; c < 4; ++c) {
            ratings += "," + format_double(1.0 + std::floor(4.0 * rng.uniform01() * 4.0) / 4.0);
        }
        ratings += "\n";
        const std::string pid = "pa" + std::to_string(i);
        truth += pid + "," + genres[i % 4] + "\n";
        pred += pid + "," + genres[(i % 3 == 0 ? i + 1 : i) % 4] + "\n";
    }
    write_text(dir / "probs.jsonl", probs);
    write_text(dir / "pairs.jsonl", pairs);
    write_text(dir / "ratings.csv", ratings);
    write_text(dir / "pred.csv", pred);
    write_text(dir / "truth.csv", truth);
}

/// Produces every metric report for the fixture and returns the summary
/// output (or the first failure's stderr prefixed with "FAILED").
inline std::string run_fixture(const std::filesystem::path &dir, const std::string &threads,
                               const std::string &format = "json") {
    const auto out_dir = dir / ("reports_" + threads);
    std::filesystem::remove_all(out_dir);
    std::filesystem::create_directories(out_dir);
    const auto p = [&dir](const char *name) { return (dir / name).string(); };
    const std::vector<std::pair<std::string, std::vector<std::string>>> jobs = {
        {"prf", {"prf", "--pairs", p("pairs.jsonl")}},
        {"bleu", {"bleu", "--pairs", p("pairs.jsonl")}},
        {"meteor", {"meteor", "--pairs", p("pairs.jsonl")}},
        {"ppl", {"ppl", "--probs", p("probs.jsonl")}},
        {"mce", {"mce", "--probs", p("probs.jsonl")}},
        {"mte", {"mte", "--probs", p("probs.jsonl")}},
        {"fid", {"fid", "--real", p("real.csv"), "--generated", p("generated.csv")}},
        {"pacc", {"genre-acc", "--pred", p("pred.csv"), "--truth", p("truth.csv")}},
        {"dce", {"dce", "--paintings", p("paintings.csv"), "--poems", p("poems.csv"), "--pca-dim", "6"}},
    };
    std::vector<std::string> summary_args = {"--threads", threads, "--format", format, "summary", "--label",
                                             "fixture", "--reports"};
    for (const auto &[name, args] : jobs) {
        std::vector<std::string> full = {"--threads", threads, "--out", (out_dir / (name + ".json")).string()};
        full.insert(full.end(), args.begin(), args.end());
        const auto r = invoke(full);
        if (r.code != 0) {
            return "FAILED " + name + ": " + r.err;
        }
        summary_args.push_back((out_dir / (name + ".json")).string());
    }
    const auto r = invoke(summary_args);
    return r.code == 0 ? r.out : "FAILED summary: " + r.err;
}

} // namespace inkbridge::test
