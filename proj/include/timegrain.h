/* Copyright (c) 2026 the timegrain authors */
/* SPDX-License-Identifier: Apache-2.0 */

/* C interface to the timegrain library.
 *
 * Conventions:
 *  - Every fallible call returns tg_status; TG_OK is 0.
 *  - On failure, tg_last_error() returns a thread-local message that stays
 *    valid until the next failing call on the same thread.
 *  - Output strings (char** parameters) are heap-allocated; release them
 *    with tg_string_free. On failure no output is written.
 *  - All strings are UTF-8. All calls are thread-safe as long as a
 *    tg_config is not mutated concurrently with use.
 */

#ifndef TIMEGRAIN_H
#define TIMEGRAIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TG_BUILD)
#define TG_API __declspec(dllexport)
#else
#define TG_API __declspec(dllimport)
#endif
#else
#define TG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tg_status {
    TG_OK = 0,
    TG_ERR_ARGUMENT = 1,   /* invalid argument value */
    TG_ERR_SHAPE = 2,      /* matrix or stream dimensions disagree */
    TG_ERR_PARSE = 3,      /* text or JSON failed to parse */
    TG_ERR_CONFIG = 4,     /* bad configuration key, value, or file */
    TG_ERR_VALIDATION = 5, /* well-formed input violating a record rule */
    TG_ERR_INPUT = 6,      /* bad input data (malformed file, id mismatch) */
    TG_ERR_IO = 7,         /* file system failure */
    TG_ERR_EXTRACTOR = 8,  /* feature extractor broke its contract */
    TG_ERR_INTERNAL = 9    /* unexpected failure; please report */
} tg_status;

/* Library version, e.g. "0.1.0". Static storage; do not free. */
TG_API const char* tg_version(void);

/* Stable name for a status code, e.g. "TG_ERR_PARSE". Static storage. */
TG_API const char* tg_status_name(tg_status status);

/* Message from the last failing call on this thread, or "" if none. */
TG_API const char* tg_last_error(void);

/* Releases any string returned through a char** output. NULL is a no-op. */
TG_API void tg_string_free(char* s);

/* ---- configuration ----------------------------------------------------- */

typedef struct tg_config tg_config;

/* Fresh config with default values. Free with tg_config_free. */
TG_API tg_config* tg_config_create(void);
TG_API void tg_config_free(tg_config* cfg);

/* Replaces cfg with the parsed file ("key = value" lines). */
TG_API tg_status tg_config_load(tg_config* cfg, const char* path);

/* Sets one field, e.g. ("heads", "8"). Value syntax is checked per key;
 * cross-field rules are checked by tg_config_validate. */
TG_API tg_status tg_config_set(tg_config* cfg, const char* key, const char* value);

/* Current value of one field, in the same text form dump uses. */
TG_API tg_status tg_config_get(const tg_config* cfg, const char* key, char** out_value);

/* Full config text, fixed key order; parseable by tg_config_load. */
TG_API tg_status tg_config_dump(const tg_config* cfg, char** out_text);

/* Cross-field validation (positivity, divisibility). */
TG_API tg_status tg_config_validate(const tg_config* cfg);

/* ---- timestamp codec ---------------------------------------------------- */

/* 2.5 -> "<a2><f5>". Seconds are quantized to tenths first. */
TG_API tg_status tg_encode_timestamp(double seconds, char** out_tokens);

/* "<a2><f5>" -> "2.5". The whole input must be one marker run. */
TG_API tg_status tg_decode_timestamp(const char* tokens, char** out_text);

/* Rewrites every marker run in free text to its numeric form. Fails on a
 * malformed run. */
TG_API tg_status tg_marker_to_numeric(const char* text, char** out_text);

/* Rewrites standalone decimal numbers ("2.5") to marker runs. Prose that
 * merely contains digits is left alone. */
TG_API tg_status tg_numeric_to_marker(const char* text, char** out_text);

/* ---- task grammar -------------------------------------------------------- */

/* Formats one annotation record (JSON, one object) into a training line.
 * task: "dense_caption" | "grounding" | "summarization" | "tqa".
 * style: "numeric" | "marker".
 * instruction: prompt text between the audio span and the target; may be "".
 * Output JSON: {"id", "target", "text"} where target is the bare answer and
 * text the full wrapped line. */
TG_API tg_status tg_format_record(const char* record_json, const char* task, const char* style,
                                  const char* instruction, char** out_json);

/* Salvages a raw model output line ({"id", "raw_text"} JSON) into a
 * prediction record (JSON) for the given task. Never fails on messy text;
 * warnings are embedded in the record. */
TG_API tg_status tg_parse_prediction_line(const char* line_json, const char* task,
                                          char** out_json);

/* Same, from a bare id + text pair. */
TG_API tg_status tg_parse_raw(const char* id, const char* raw_text, const char* task,
                              char** out_json);

/* ---- evaluation ---------------------------------------------------------- */

/* Scores a predictions JSONL file against a references JSONL file.
 * task: "dense_caption" | "grounding" | "summarization".
 * Either output may be NULL if not wanted. */
TG_API tg_status tg_evaluate_files(const tg_config* cfg, const char* predictions_path,
                                   const char* references_path, const char* task,
                                   char** out_report_json, char** out_table);

/* ---- merge demo ---------------------------------------------------------- */

/* Runs segmentation, feature extraction, time encoding, and token merging
 * over one clip and reports the result.
 *   wav_path:      16-bit PCM mono WAV to ingest, or NULL.
 *   features_path: JSONL feature record to ingest instead of audio, or NULL.
 *   (both NULL: a seeded synthetic clip of max_duration seconds is used;
 *    both set: error.)
 *   ratio_sweep: when nonzero, runs the retained-ratio sweep and returns a
 *   text table; otherwise returns the merge report as JSON. */
TG_API tg_status tg_merge_demo(const tg_config* cfg, size_t n_tokens, const char* wav_path,
                               const char* features_path, int ratio_sweep, char** out_text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TIMEGRAIN_H */
