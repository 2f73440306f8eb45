// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Everything below talks to the library through the
// C interface only; per-record work can fan out to a small thread pool and
// results are re-emitted in input order.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "timegrain.h"

namespace {

struct ConfigDeleter {
    void operator()(tg_config* c) const { tg_config_free(c); }
};
using ConfigPtr = std::unique_ptr<tg_config, ConfigDeleter>;

struct StringDeleter {
    void operator()(char* s) const { tg_string_free(s); }
};
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Prints the library's diagnostic for a failed call and returns exit code 1.
int fail(tg_status status, const std::string& context) {
    std::cerr << context << ": " << tg_status_name(status) << ": " << tg_last_error() << "\n";
    return 1;
}

int fail_plain(const std::string& message) {
    std::cerr << message << "\n";
    return 1;
}

std::optional<std::vector<std::string>> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

// Applies fn to every non-blank line, preserving line order in the output.
// fn must be thread-safe. Each slot gets either a result or an error.
struct LineOutcome {
    bool ok = false;
    std::string value; // result on success, diagnostic on failure
};

template <typename Fn>
std::vector<std::pair<std::size_t, LineOutcome>>
map_lines(const std::vector<std::string>& lines, unsigned jobs, Fn fn) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!blank(lines[i])) indices.push_back(i);
    }
    std::vector<LineOutcome> outcomes(indices.size());
    const unsigned workers =
        std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(indices.size())));
    if (workers <= 1) {
        for (std::size_t k = 0; k < indices.size(); ++k) outcomes[k] = fn(lines[indices[k]]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < indices.size();
                     k = next.fetch_add(1)) {
                    outcomes[k] = fn(lines[indices[k]]);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }
    std::vector<std::pair<std::size_t, LineOutcome>> out;
    out.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out.emplace_back(indices[k] + 1, std::move(outcomes[k])); // 1-based line numbers
    }
    return out;
}

// Writes to the named file, or to stdout when path is empty.
int emit(const std::string& path, const std::string& content, const char* what) {
    if (path.empty()) {
        std::cout << content;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail_plain(std::string(what) + ": cannot open " + path);
    out << content;
    if (!out.flush()) return fail_plain(std::string(what) + ": write failed for " + path);
    return 0;
}

struct GlobalOptions {
    std::string config_path;
    unsigned jobs = 1;
};

// defaults -> config file -> TIMEGRAIN_SEED -> per-command flags.
int load_config(const GlobalOptions& opts, tg_config* cfg) {
    if (!opts.config_path.empty()) {
        if (const tg_status s = tg_config_load(cfg, opts.config_path.c_str()); s != TG_OK) {
            return fail(s, "config");
        }
    }
    if (const char* env_seed = std::getenv("TIMEGRAIN_SEED")) {
        if (const tg_status s = tg_config_set(cfg, "seed", env_seed); s != TG_OK) {
            return fail(s, "TIMEGRAIN_SEED");
        }
    }
    return 0;
}

int run_codec(const std::vector<double>& encode, const std::vector<std::string>& decode) {
    if (encode.empty() == decode.empty()) {
        return fail_plain("codec: give either --encode values or --decode token strings");
    }
    std::string out;
    for (double v : encode) {
        char* text = nullptr;
        if (const tg_status s = tg_encode_timestamp(v, &text); s != TG_OK) {
            return fail(s, "codec");
        }
        out += StringPtr(text).get();
        out += '\n';
    }
    for (const std::string& tokens : decode) {
        char* text = nullptr;
        if (const tg_status s = tg_decode_timestamp(tokens.c_str(), &text); s != TG_OK) {
            return fail(s, "codec");
        }
        out += StringPtr(text).get();
        out += '\n';
    }
    std::cout << out;
    return 0;
}

int run_format(const GlobalOptions& opts, const std::string& input, const std::string& task,
               const std::string& style, const std::string& instruction,
               const std::string& output) {
    const auto lines = read_lines(input);
    if (!lines) return fail_plain("format: cannot open " + input);

    const auto results = map_lines(*lines, opts.jobs, [&](const std::string& line) {
        char* json = nullptr;
        const tg_status s =
            tg_format_record(line.c_str(), task.c_str(), style.c_str(), instruction.c_str(),
                             &json);
        if (s != TG_OK) {
            return LineOutcome{false, std::string(tg_status_name(s)) + ": " + tg_last_error()};
        }
        return LineOutcome{true, std::string(StringPtr(json).get())};
    });

    // Any bad record suppresses the whole output.
    std::size_t bad = 0;
    for (const auto& [lineno, outcome] : results) {
        if (!outcome.ok) {
            ++bad;
            std::cerr << "format: " << input << ":" << lineno << ": " << outcome.value << "\n";
        }
    }
    if (bad > 0) return fail_plain("format: " + std::to_string(bad) + " invalid record(s)");

    std::string body;
    for (const auto& [lineno, outcome] : results) body += outcome.value + "\n";
    return emit(output, body, "format");
}

int run_parse(const GlobalOptions& opts, const std::string& input, const std::string& task,
              const std::string& output) {
    const auto lines = read_lines(input);
    if (!lines) return fail_plain("parse: cannot open " + input);

    const auto results = map_lines(*lines, opts.jobs, [&](const std::string& line) {
        char* json = nullptr;
        const tg_status s = tg_parse_prediction_line(line.c_str(), task.c_str(), &json);
        if (s != TG_OK) {
            return LineOutcome{false, std::string(tg_status_name(s)) + ": " + tg_last_error()};
        }
        return LineOutcome{true, std::string(StringPtr(json).get())};
    });

    // Malformed lines are skipped, not fatal: the salvager's contract is to
    // digest whatever a model emitted, but a line that is not even a
    // {"id", "raw_text"} object cannot be attributed to a sample.
    std::string body;
    std::size_t skipped = 0;
    for (const auto& [lineno, outcome] : results) {
        if (!outcome.ok) {
            ++skipped;
            std::cerr << "parse: " << input << ":" << lineno << ": skipped: " << outcome.value
                      << "\n";
            continue;
        }
        body += outcome.value + "\n";
    }
    if (skipped > 0) {
        std::cerr << "parse: skipped " << skipped << " malformed line(s)\n";
    }
    return emit(output, body, "parse");
}

int run_evaluate(const GlobalOptions& opts, const std::string& preds, const std::string& refs,
                 const std::string& task, const std::string& report_path) {
    ConfigPtr cfg(tg_config_create());
    if (!cfg) return fail_plain("evaluate: out of memory");
    if (const int rc = load_config(opts, cfg.get()); rc != 0) return rc;

    char* report_json = nullptr;
    char* table = nullptr;
    const tg_status s = tg_evaluate_files(cfg.get(), preds.c_str(), refs.c_str(), task.c_str(),
                                          report_path.empty() ? nullptr : &report_json, &table);
    if (s != TG_OK) return fail(s, "evaluate");
    const StringPtr table_owner(table);
    const StringPtr json_owner(report_json);

    if (!report_path.empty()) {
        if (const int rc = emit(report_path, std::string(json_owner.get()) + "\n", "evaluate");
            rc != 0) {
            return rc;
        }
    }
    std::cout << table_owner.get();
    return 0;
}

int run_merge_demo(const GlobalOptions& opts, std::size_t n_tokens, bool ratio_sweep,
                   const std::string& wav, const std::string& features,
                   const std::string& seed_flag, const std::string& output) {
    ConfigPtr cfg(tg_config_create());
    if (!cfg) return fail_plain("merge-demo: out of memory");
    if (const int rc = load_config(opts, cfg.get()); rc != 0) return rc;
    if (!seed_flag.empty()) {
        if (const tg_status s = tg_config_set(cfg.get(), "seed", seed_flag.c_str()); s != TG_OK) {
            return fail(s, "merge-demo");
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    char* text = nullptr;
    const tg_status s =
        tg_merge_demo(cfg.get(), n_tokens, wav.empty() ? nullptr : wav.c_str(),
                      features.empty() ? nullptr : features.c_str(), ratio_sweep ? 1 : 0, &text);
    if (s != TG_OK) return fail(s, "merge-demo");
    const StringPtr owner(text);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

    if (!ratio_sweep) {
        char* att = nullptr;
        char* ctx = nullptr;
        if (tg_config_get(cfg.get(), "n_attentive", &att) == TG_OK &&
            tg_config_get(cfg.get(), "n_contextual", &ctx) == TG_OK) {
            const double kept = std::stod(att) + std::stod(ctx);
            std::fprintf(stderr, "merge-demo: retained ratio %.6f\n",
                         kept / static_cast<double>(n_tokens));
        }
        tg_string_free(att);
        tg_string_free(ctx);
    }
    std::fprintf(stderr, "merge-demo: wall time %.3f s\n", elapsed.count());
    return emit(output, owner.get(), "merge-demo");
}

int run_config_dump(const GlobalOptions& opts) {
    ConfigPtr cfg(tg_config_create());
    if (!cfg) return fail_plain("config-dump: out of memory");
    if (const int rc = load_config(opts, cfg.get()); rc != 0) return rc;
    char* text = nullptr;
    if (const tg_status s = tg_config_dump(cfg.get(), &text); s != TG_OK) {
        return fail(s, "config-dump");
    }
    std::cout << StringPtr(text).get();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("timegrain ") + tg_version() +
                 " - timestamp codec, segment merge pipeline, and temporal metrics"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "Config file (key = value lines)");
    app.add_option("--jobs", opts.jobs, "Worker threads for per-record commands")
        ->check(CLI::Range(1u, 256u));

    // codec
    auto* codec = app.add_subcommand("codec", "Encode seconds to temporal tokens, or decode");
    std::vector<double> encode_values;
    std::vector<std::string> decode_values;
    codec->add_option("--encode", encode_values, "Seconds values to encode");
    codec->add_option("--decode", decode_values, "Token strings to decode");

    // format
    auto* format = app.add_subcommand("format", "Turn annotation records into training lines");
    std::string fmt_input, fmt_task, fmt_style = "numeric", fmt_instruction, fmt_output;
    format->add_option("input", fmt_input, "Annotations JSONL")->required();
    format->add_option("--task", fmt_task, "dense_caption|grounding|summarization|tqa")
        ->required();
    format->add_option("--style", fmt_style, "numeric|marker");
    format->add_option("--instruction", fmt_instruction, "Prompt text, may be empty");
    format->add_option("-o,--output", fmt_output, "Output file (default stdout)");

    // parse
    auto* parse = app.add_subcommand("parse", "Salvage raw model outputs into predictions");
    std::string parse_input, parse_task, parse_output;
    parse->add_option("input", parse_input, "Raw outputs JSONL ({\"id\", \"raw_text\"})")
        ->required();
    parse->add_option("--task", parse_task, "dense_caption|grounding|summarization|tqa")
        ->required();
    parse->add_option("-o,--output", parse_output, "Output file (default stdout)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against references");
    std::string eval_preds, eval_refs, eval_task, eval_report;
    evaluate->add_option("predictions", eval_preds, "Predictions JSONL")->required();
    evaluate->add_option("references", eval_refs, "References JSONL")->required();
    evaluate->add_option("--task", eval_task, "dense_caption|grounding|summarization")
        ->required();
    evaluate->add_option("-o,--report", eval_report, "Write the JSON report here");

    // merge-demo
    auto* demo = app.add_subcommand("merge-demo", "Run the segment merge pipeline end to end");
    std::size_t demo_tokens = 104;
    bool demo_sweep = false;
    std::string demo_wav, demo_features, demo_seed, demo_output;
    demo->add_option("--n-tokens", demo_tokens, "Tokens per segment before merging");
    demo->add_flag("--ratio-sweep", demo_sweep, "Sweep retained ratios, print a table");
    demo->add_option("--wav", demo_wav, "Ingest this 16-bit PCM mono WAV");
    demo->add_option("--features", demo_features, "Ingest this feature record JSONL");
    demo->add_option("--seed", demo_seed, "Override the config seed");
    demo->add_option("-o,--output", demo_output, "Output file (default stdout)");

    // config-dump
    app.add_subcommand("config-dump", "Print the effective configuration");

    CLI11_PARSE(app, argc, argv);

    if (codec->parsed()) return run_codec(encode_values, decode_values);
    if (format->parsed()) {
        return run_format(opts, fmt_input, fmt_task, fmt_style, fmt_instruction, fmt_output);
    }
    if (parse->parsed()) return run_parse(opts, parse_input, parse_task, parse_output);
    if (evaluate->parsed()) return run_evaluate(opts, eval_preds, eval_refs, eval_task, eval_report);
    if (demo->parsed()) {
        return run_merge_demo(opts, demo_tokens, demo_sweep, demo_wav, demo_features, demo_seed,
                              demo_output);
    }
    return run_config_dump(opts);
}
