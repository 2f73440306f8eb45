// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

// Drives the installed command-line binary end to end through a shell.
// TG_CLI_PATH is injected by the build.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

#include "generators.hpp"
#include "timegrain/config.hpp"
#include "timegrain/pipeline.hpp"
#include "timegrain/task_grammar.hpp"
#include "timegrain/time_encoding.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI through /bin/sh. `prefix` goes before the binary (environment
// assignments), `args` after it; stderr goes to err_path or /dev/null.
RunResult run_cli(const std::string& args, const std::string& prefix = "",
                  const std::string& err_path = "") {
    std::string cmd = prefix.empty() ? std::string() : prefix + " ";
    cmd += "'";
    cmd += TG_CLI_PATH;
    cmd += "' " + args;
    cmd += err_path.empty() ? " 2>/dev/null" : " 2>" + err_path;

    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

const char* const tiny_cfg_text = "window_seconds = 1\n"
                                  "max_segments = 2\n"
                                  "max_duration = 2\n"
                                  "positions = 8\n"
                                  "n_attentive = 6\n"
                                  "n_contextual = 2\n"
                                  "heads = 2\n"
                                  "d = 8\n"
                                  "seed = 5\n";

} // namespace

TEST_CASE("codec encodes and decodes") {
    RunResult r = run_cli("codec --encode 2.5 16.4 120.5");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "<a2><f5>\n<a1><a6><f4>\n<a1><a2><a0><f5>\n");

    r = run_cli("codec --decode '<a2><f5>' '<a0><f0>'");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "2.5\n0.0\n");

    r = run_cli("codec", "", "tcli_err.txt");
    CHECK(r.exit_code == 1);
    CHECK(slurp("tcli_err.txt").find("give either --encode") != std::string::npos);

    r = run_cli("codec --encode 1.0 --decode '<a1><f0>'");
    CHECK(r.exit_code == 1);

    r = run_cli("codec --encode=-3", "", "tcli_err.txt");
    CHECK(r.exit_code == 1);
    CHECK(slurp("tcli_err.txt").find("codec: TG_ERR_ARGUMENT:") != std::string::npos);

    std::remove("tcli_err.txt");
}

TEST_CASE("config-dump layers file and environment") {
    RunResult r = run_cli("config-dump", "env -u TIMEGRAIN_SEED");
    CHECK(r.exit_code == 0);
    CHECK(r.out == timegrain::ToolConfig{}.dump());

    write_file("tcli_seed.cfg", "seed = 5\n");
    r = run_cli("--config tcli_seed.cfg config-dump", "env -u TIMEGRAIN_SEED");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("seed = 5\n") != std::string::npos);

    r = run_cli("--config tcli_seed.cfg config-dump", "TIMEGRAIN_SEED=777");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("seed = 777\n") != std::string::npos);

    r = run_cli("--config tcli_gone.cfg config-dump", "", "tcli_err.txt");
    CHECK(r.exit_code == 1);
    CHECK(slurp("tcli_err.txt").find("config: TG_ERR_IO:") != std::string::npos);

    r = run_cli("config-dump", "TIMEGRAIN_SEED=pony", "tcli_err.txt");
    CHECK(r.exit_code == 1);
    CHECK(slurp("tcli_err.txt").find("TIMEGRAIN_SEED: TG_ERR_CONFIG:") != std::string::npos);

    std::remove("tcli_seed.cfg");
    std::remove("tcli_err.txt");
}

TEST_CASE("format emits one training line per record") {
    testgen::Rng rng(3);
    std::string lines;
    std::vector<timegrain::SampleRecord> records;
    for (int i = 0; i < 3; ++i) {
        records.push_back(testgen::dense_record(rng, "d" + std::to_string(i)));
        lines += timegrain::sample_record_to_json(records.back()) + "\n";
        if (i == 1) lines += "\n"; // blank lines are skipped
    }
    write_file("tcli_fmt.jsonl", lines);

    const RunResult r =
        run_cli("format tcli_fmt.jsonl --task dense_caption --style marker "
                "--instruction 'Describe every event.'");
    CHECK(r.exit_code == 0);
    std::istringstream out(r.out);
    std::string line;
    std::size_t count = 0;
    while (std::getline(out, line)) {
        const nlohmann::json j = nlohmann::json::parse(line);
        CHECK(j.at("id") == records[count].id);
        CHECK(j.at("target") ==
              timegrain::format_target(records[count], timegrain::TimestampStyle::marker));
        CHECK(j.at("text") ==
              timegrain::build_instruction_record(records[count], "Describe every event.",
                                                  timegrain::TimestampStyle::marker));
        ++count;
    }
    CHECK(count == 3);

    // Output lands in a file with -o.
    const RunResult to_file =
        run_cli("format tcli_fmt.jsonl --task dense_caption -o tcli_fmt_out.jsonl");
    CHECK(to_file.exit_code == 0);
    CHECK(to_file.out.empty());
    CHECK_FALSE(slurp("tcli_fmt_out.jsonl").empty());
    std::remove("tcli_fmt_out.jsonl");
    std::remove("tcli_fmt.jsonl");
}

TEST_CASE("format rejects files with any invalid record") {
    testgen::Rng rng(4);
    std::string lines = timegrain::sample_record_to_json(testgen::dense_record(rng, "ok")) + "\n";
    lines += "{\"id\": \"broken\"}\n";
    write_file("tcli_fmt_bad.jsonl", lines);

    const RunResult r =
        run_cli("format tcli_fmt_bad.jsonl --task dense_caption", "", "tcli_err.txt");
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty()); // no partial output
    const std::string err = slurp("tcli_err.txt");
    CHECK(err.find("format: tcli_fmt_bad.jsonl:2: TG_ERR_PARSE:") != std::string::npos);
    CHECK(err.find("format: 1 invalid record(s)") != std::string::npos);

    const RunResult gone = run_cli("format tcli_not_there.jsonl --task dense_caption");
    CHECK(gone.exit_code == 1);

    std::remove("tcli_fmt_bad.jsonl");
    std::remove("tcli_err.txt");
}

TEST_CASE("parse salvages lines and skips unattributable ones") {
    std::string lines = R"({"id": "p0", "raw_text": "1.5 - 2.0, dog barks."})" "\n";
    lines += "not json at all\n";
    lines += R"({"id": "p1", "raw_text": "word salad"})" "\n";
    write_file("tcli_raw.jsonl", lines);

    const RunResult r = run_cli("parse tcli_raw.jsonl --task dense_caption", "", "tcli_err.txt");
    CHECK(r.exit_code == 0);
    std::istringstream out(r.out);
    std::string line;
    std::vector<nlohmann::json> parsed;
    while (std::getline(out, line)) parsed.push_back(nlohmann::json::parse(line));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].at("id") == "p0");
    CHECK(parsed[0].at("raw_text") == "1.5 - 2.0, dog barks.");
    CHECK(parsed[1].at("id") == "p1");
    CHECK_FALSE(parsed[1].at("parse_warnings").empty());

    const std::string err = slurp("tcli_err.txt");
    CHECK(err.find("parse: tcli_raw.jsonl:2: skipped: TG_ERR_PARSE:") != std::string::npos);
    CHECK(err.find("parse: skipped 1 malformed line(s)") != std::string::npos);

    std::remove("tcli_raw.jsonl");
    std::remove("tcli_err.txt");
}

TEST_CASE("parallel jobs preserve output order") {
    testgen::Rng rng(5);
    std::string lines;
    for (int i = 0; i < 8; ++i) {
        lines += timegrain::sample_record_to_json(
                     testgen::grounding_record(rng, "g" + std::to_string(i))) +
                 "\n";
    }
    write_file("tcli_jobs.jsonl", lines);
    const RunResult one = run_cli("--jobs 1 format tcli_jobs.jsonl --task grounding");
    const RunResult four = run_cli("--jobs 4 format tcli_jobs.jsonl --task grounding");
    CHECK(one.exit_code == 0);
    CHECK(four.exit_code == 0);
    CHECK(one.out == four.out);

    CHECK(run_cli("--jobs 0 format tcli_jobs.jsonl --task grounding").exit_code != 0);
    std::remove("tcli_jobs.jsonl");
}

TEST_CASE("evaluate prints the table and writes the report") {
    testgen::Rng rng(6);
    std::string lines;
    for (int i = 0; i < 2; ++i) {
        lines += timegrain::sample_record_to_json(
                     testgen::summary_record(rng, "s" + std::to_string(i))) +
                 "\n";
    }
    write_file("tcli_refs.jsonl", lines);
    write_file("tcli_preds.jsonl", lines);

    const RunResult r = run_cli("evaluate tcli_preds.jsonl tcli_refs.jsonl --task summarization "
                                "-o tcli_report.json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("task: summarization  samples: 2\n", 0) == 0);
    CHECK(r.out.find("rouge1") != std::string::npos);
    CHECK(r.out.find("1.000000") != std::string::npos);

    const nlohmann::json report = nlohmann::json::parse(slurp("tcli_report.json"));
    CHECK(report.at("metrics").at("rouge1") == 1.0);
    CHECK(report.at("metrics").at("timeline_miou") == 1.0);

    const RunResult bad = run_cli("evaluate tcli_preds.jsonl tcli_refs.jsonl --task grounding",
                                  "", "tcli_err.txt");
    CHECK(bad.exit_code == 1);
    CHECK(slurp("tcli_err.txt").find("evaluate: TG_ERR_INPUT:") != std::string::npos);

    std::remove("tcli_refs.jsonl");
    std::remove("tcli_preds.jsonl");
    std::remove("tcli_report.json");
    std::remove("tcli_err.txt");
}

TEST_CASE("merge-demo layers seed sources and reports timing") {
    write_file("tcli_demo.cfg", tiny_cfg_text);

    const std::string base = "--config tcli_demo.cfg merge-demo --n-tokens 16";
    RunResult r = run_cli(base, "env -u TIMEGRAIN_SEED", "tcli_err.txt");
    CHECK(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("seed") == 5);
    CHECK(j.at("n_tokens") == 16);
    const std::string err = slurp("tcli_err.txt");
    CHECK(err.find("merge-demo: retained ratio 0.500000") != std::string::npos);
    CHECK(err.find("merge-demo: wall time ") != std::string::npos);

    // Environment beats the file; the flag beats both.
    r = run_cli(base, "TIMEGRAIN_SEED=777");
    CHECK(nlohmann::json::parse(r.out).at("seed") == 777);
    r = run_cli(base + " --seed 9", "TIMEGRAIN_SEED=777");
    CHECK(nlohmann::json::parse(r.out).at("seed") == 9);

    // Deterministic output for a fixed seed.
    const RunResult a = run_cli(base + " --seed 9", "env -u TIMEGRAIN_SEED");
    const RunResult b = run_cli(base + " --seed 9", "env -u TIMEGRAIN_SEED");
    CHECK(a.out == b.out);

    std::remove("tcli_demo.cfg");
    std::remove("tcli_err.txt");
}

TEST_CASE("merge-demo ingests audio or features and sweeps ratios") {
    write_file("tcli_demo.cfg", tiny_cfg_text);
    timegrain::write_wav(timegrain::synthetic_clip(1.5, 8000, 1), "tcli_clip.wav");

    RunResult r = run_cli("--config tcli_demo.cfg merge-demo --n-tokens 16 --wav tcli_clip.wav");
    CHECK(r.exit_code == 0);
    CHECK(nlohmann::json::parse(r.out).at("sample_rate") == 8000);

    timegrain::FeatureRecord rec;
    rec.id = "r";
    rec.duration = 1.0;
    timegrain::Segment seg;
    seg.features = timegrain::Matrix(6, 3);
    rec.segments.push_back(seg);
    write_file("tcli_features.jsonl", timegrain::feature_record_to_json(rec) + "\n");
    r = run_cli("--config tcli_demo.cfg merge-demo --n-tokens 16 --features tcli_features.jsonl");
    CHECK(r.exit_code == 0);
    CHECK(nlohmann::json::parse(r.out).at("sample_rate") == 0);

    r = run_cli("--config tcli_demo.cfg merge-demo --n-tokens 16 --wav tcli_clip.wav "
                "--features tcli_features.jsonl",
                "", "tcli_err.txt");
    CHECK(r.exit_code == 1);
    CHECK(slurp("tcli_err.txt").find(
              "merge-demo: TG_ERR_ARGUMENT: give a WAV file or a feature file, not both") !=
          std::string::npos);

    r = run_cli("--config tcli_demo.cfg merge-demo --ratio-sweep -o tcli_sweep.txt");
    CHECK(r.exit_code == 0);
    const std::string table = slurp("tcli_sweep.txt");
    CHECK(table.rfind("ratio   kept  attentive  contextual  importance_mass\n", 0) == 0);
    CHECK(table.find("0.25") != std::string::npos);

    std::remove("tcli_demo.cfg");
    std::remove("tcli_clip.wav");
    std::remove("tcli_features.jsonl");
    std::remove("tcli_sweep.txt");
    std::remove("tcli_err.txt");
}

TEST_CASE("bad invocations exit nonzero") {
    CHECK(run_cli("").exit_code != 0); // a subcommand is required
    CHECK(run_cli("fly").exit_code != 0);
    CHECK(run_cli("format --task dense_caption").exit_code != 0); // missing input
    CHECK(run_cli("evaluate a.jsonl b.jsonl").exit_code != 0);    // missing --task
}
