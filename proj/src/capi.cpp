// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "timegrain/config.hpp"
#include "timegrain/errors.hpp"
#include "timegrain/evaluation.hpp"
#include "timegrain/pipeline.hpp"
#include "timegrain/task_grammar.hpp"
#include "timegrain/temporal_codec.hpp"
#include "timegrain/version.hpp"

struct tg_config {
    timegrain::ToolConfig value;
};

namespace {

thread_local std::string t_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void write_out(char** slot, const std::string& s) {
    if (slot != nullptr) *slot = dup_string(s);
}

// Runs f, translating the exception taxonomy to status codes. Exact order
// matters: subclasses before timegrain::Error.
template <typename F>
tg_status guarded(F&& f) noexcept {
    using namespace timegrain;
    try {
        f();
        return TG_OK;
    } catch (const ArgumentError& e) {
        t_last_error = e.what();
        return TG_ERR_ARGUMENT;
    } catch (const ShapeError& e) {
        t_last_error = e.what();
        return TG_ERR_SHAPE;
    } catch (const ParseError& e) {
        t_last_error = e.what();
        return TG_ERR_PARSE;
    } catch (const ConfigError& e) {
        t_last_error = e.what();
        return TG_ERR_CONFIG;
    } catch (const ValidationError& e) {
        t_last_error = e.what();
        return TG_ERR_VALIDATION;
    } catch (const InputError& e) {
        t_last_error = e.what();
        return TG_ERR_INPUT;
    } catch (const IoError& e) {
        t_last_error = e.what();
        return TG_ERR_IO;
    } catch (const ExtractorError& e) {
        t_last_error = e.what();
        return TG_ERR_EXTRACTOR;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return TG_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown failure";
        return TG_ERR_INTERNAL;
    }
}

const char* require(const char* p, const char* name) {
    if (p == nullptr) throw timegrain::ArgumentError(std::string(name) + " is null");
    return p;
}

template <typename T>
T* require_ptr(T* p, const char* name) {
    if (p == nullptr) throw timegrain::ArgumentError(std::string(name) + " is null");
    return p;
}

timegrain::PredictionRecord parse_raw_impl(const std::string& id, const std::string& raw_text,
                                           timegrain::Task task) {
    if (id.empty()) throw timegrain::ValidationError("record id must not be empty");
    timegrain::PredictionRecord rec = timegrain::parse_prediction(raw_text, task);
    rec.id = id;
    return rec;
}

timegrain::FeatureRecord read_single_feature_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw timegrain::IoError("cannot open " + path);
    std::string line, found;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        found = line;
        ++count;
    }
    if (count != 1) {
        throw timegrain::InputError(path + ": expected exactly one feature record, found " +
                                    std::to_string(count));
    }
    return timegrain::feature_record_from_json(found);
}

} // namespace

extern "C" {

const char* tg_version(void) { return timegrain::version_string; }

const char* tg_status_name(tg_status status) {
    switch (status) {
    case TG_OK: return "TG_OK";
    case TG_ERR_ARGUMENT: return "TG_ERR_ARGUMENT";
    case TG_ERR_SHAPE: return "TG_ERR_SHAPE";
    case TG_ERR_PARSE: return "TG_ERR_PARSE";
    case TG_ERR_CONFIG: return "TG_ERR_CONFIG";
    case TG_ERR_VALIDATION: return "TG_ERR_VALIDATION";
    case TG_ERR_INPUT: return "TG_ERR_INPUT";
    case TG_ERR_IO: return "TG_ERR_IO";
    case TG_ERR_EXTRACTOR: return "TG_ERR_EXTRACTOR";
    case TG_ERR_INTERNAL: return "TG_ERR_INTERNAL";
    }
    return "TG_ERR_UNKNOWN";
}

const char* tg_last_error(void) { return t_last_error.c_str(); }

void tg_string_free(char* s) { std::free(s); }

/* ---- configuration ----------------------------------------------------- */

tg_config* tg_config_create(void) { return new (std::nothrow) tg_config{}; }

void tg_config_free(tg_config* cfg) { delete cfg; }

tg_status tg_config_load(tg_config* cfg, const char* path) {
    return guarded([&] {
        require_ptr(cfg, "cfg");
        cfg->value = timegrain::ToolConfig::load(require(path, "path"));
    });
}

tg_status tg_config_set(tg_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        require_ptr(cfg, "cfg");
        cfg->value.set(require(key, "key"), require(value, "value"));
    });
}

tg_status tg_config_get(const tg_config* cfg, const char* key, char** out_value) {
    return guarded([&] {
        require_ptr(cfg, "cfg");
        require_ptr(out_value, "out_value");
        const std::string wanted = require(key, "key");
        std::istringstream dump(cfg->value.dump());
        std::string line;
        while (std::getline(dump, line)) {
            const std::size_t eq = line.find(" = ");
            if (eq != std::string::npos && line.substr(0, eq) == wanted) {
                write_out(out_value, line.substr(eq + 3));
                return;
            }
        }
        throw timegrain::ConfigError("unknown key '" + wanted + "'");
    });
}

tg_status tg_config_dump(const tg_config* cfg, char** out_text) {
    return guarded([&] {
        require_ptr(cfg, "cfg");
        require_ptr(out_text, "out_text");
        write_out(out_text, cfg->value.dump());
    });
}

tg_status tg_config_validate(const tg_config* cfg) {
    return guarded([&] {
        require_ptr(cfg, "cfg");
        cfg->value.validate();
    });
}

/* ---- timestamp codec ---------------------------------------------------- */

tg_status tg_encode_timestamp(double seconds, char** out_tokens) {
    return guarded([&] {
        require_ptr(out_tokens, "out_tokens");
        write_out(out_tokens, timegrain::encode_timestamp_text(timegrain::quantize(seconds)));
    });
}

tg_status tg_decode_timestamp(const char* tokens, char** out_text) {
    return guarded([&] {
        require_ptr(out_text, "out_text");
        const timegrain::TimestampTenths t =
            timegrain::decode_timestamp_text(require(tokens, "tokens"));
        write_out(out_text, timegrain::render_tenths(t));
    });
}

tg_status tg_marker_to_numeric(const char* text, char** out_text) {
    return guarded([&] {
        require_ptr(out_text, "out_text");
        write_out(out_text, timegrain::marker_to_numeric(require(text, "text")));
    });
}

tg_status tg_numeric_to_marker(const char* text, char** out_text) {
    return guarded([&] {
        require_ptr(out_text, "out_text");
        write_out(out_text, timegrain::numeric_to_marker(require(text, "text")));
    });
}

/* ---- task grammar -------------------------------------------------------- */

tg_status tg_format_record(const char* record_json, const char* task, const char* style,
                           const char* instruction, char** out_json) {
    return guarded([&] {
        require_ptr(out_json, "out_json");
        const timegrain::SampleRecord rec =
            timegrain::sample_record_from_json(require(record_json, "record_json"));
        const timegrain::Task wanted = timegrain::task_from_string(require(task, "task"));
        if (rec.task != wanted) {
            throw timegrain::ValidationError(
                "record " + rec.id + " has task " + std::string(task_to_string(rec.task)) +
                ", expected " + std::string(task_to_string(wanted)));
        }
        const timegrain::TimestampStyle st =
            timegrain::style_from_string(require(style, "style"));
        const std::string instr = require(instruction, "instruction");
        nlohmann::json j;
        j["id"] = rec.id;
        j["target"] = timegrain::format_target(rec, st);
        j["text"] = timegrain::build_instruction_record(rec, instr, st);
        write_out(out_json, j.dump());
    });
}

tg_status tg_parse_prediction_line(const char* line_json, const char* task, char** out_json) {
    return guarded([&] {
        require_ptr(out_json, "out_json");
        const timegrain::Task t = timegrain::task_from_string(require(task, "task"));
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(require(line_json, "line_json"));
        } catch (const nlohmann::json::exception& e) {
            throw timegrain::ParseError(e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
            !j.contains("raw_text") || !j["raw_text"].is_string()) {
            throw timegrain::ParseError("expected an object with string id and raw_text");
        }
        const timegrain::PredictionRecord rec =
            parse_raw_impl(j["id"].get<std::string>(), j["raw_text"].get<std::string>(), t);
        write_out(out_json, timegrain::prediction_record_to_json(rec));
    });
}

tg_status tg_parse_raw(const char* id, const char* raw_text, const char* task, char** out_json) {
    return guarded([&] {
        require_ptr(out_json, "out_json");
        const timegrain::Task t = timegrain::task_from_string(require(task, "task"));
        const timegrain::PredictionRecord rec =
            parse_raw_impl(require(id, "id"), require(raw_text, "raw_text"), t);
        write_out(out_json, timegrain::prediction_record_to_json(rec));
    });
}

/* ---- evaluation ---------------------------------------------------------- */

tg_status tg_evaluate_files(const tg_config* cfg, const char* predictions_path,
                            const char* references_path, const char* task,
                            char** out_report_json, char** out_table) {
    return guarded([&] {
        require_ptr(cfg, "cfg");
        cfg->value.validate();
        timegrain::EvalOptions options;
        options.match.onset_collar = cfg->value.onset_collar;
        options.match.offset_tolerance_fraction = cfg->value.offset_tolerance_fraction;
        if (!cfg->value.label_map_path.empty()) {
            options.labels = timegrain::LabelMap::load(cfg->value.label_map_path);
        }
        const timegrain::EvalReport report = timegrain::evaluate_task(
            require(predictions_path, "predictions_path"),
            require(references_path, "references_path"),
            timegrain::task_from_string(require(task, "task")), options);
        write_out(out_report_json, report.to_json());
        write_out(out_table, report.to_table());
    });
}

/* ---- merge demo ---------------------------------------------------------- */

tg_status tg_merge_demo(const tg_config* cfg, size_t n_tokens, const char* wav_path,
                        const char* features_path, int ratio_sweep, char** out_text) {
    return guarded([&] {
        require_ptr(cfg, "cfg");
        require_ptr(out_text, "out_text");
        const timegrain::ToolConfig& c = cfg->value;
        c.validate();
        if (wav_path != nullptr && features_path != nullptr) {
            throw timegrain::ArgumentError("give a WAV file or a feature file, not both");
        }

        const auto run = [&](auto&& input) {
            if (ratio_sweep != 0) {
                const auto rows =
                    timegrain::run_ratio_sweep(input, c, n_tokens, timegrain::default_sweep_ratios);
                write_out(out_text, timegrain::sweep_table(rows));
            } else {
                write_out(out_text, timegrain::run_merge_demo(input, c, n_tokens).to_json() + "\n");
            }
        };

        if (features_path != nullptr) {
            run(read_single_feature_record(features_path));
        } else if (wav_path != nullptr) {
            run(timegrain::read_wav(wav_path));
        } else {
            run(timegrain::synthetic_clip(c.max_duration, timegrain::AudioClip{}.sample_rate,
                                          c.seed));
        }
    });
}

} // extern "C"
