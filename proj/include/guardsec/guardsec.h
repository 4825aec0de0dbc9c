#ifndef GUARDSEC_GUARDSEC_H
#define GUARDSEC_GUARDSEC_H

/*
 * C interface to the GuardSec verification engine.
 *
 * Every call returns a gs_status. On success, string outputs are JSON
 * documents owned by the caller and released with gs_string_free(). On
 * failure the output pointer is set to NULL and gs_last_error() describes
 * the problem for the calling thread.
 */

#include <stddef.h>

#if defined(GUARDSEC_BUILDING_LIBRARY)
#define GS_API __attribute__((visibility("default")))
#else
#define GS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_INVALID_ARGUMENT = 1,
  GS_EMPTY_INPUT = 2,
  GS_INPUT_TOO_LONG = 3,
  GS_MALFORMED_URL = 4,
  GS_MALFORMED_EMAIL = 5,
  GS_MALFORMED_PHONE = 6,
  GS_MALFORMED_DOMAIN = 7,
  GS_EMPTY_AFTER_NORMALIZATION = 8,
  GS_MALFORMED_ENTITY = 9,
  GS_UNKNOWN_PROVIDER = 10,
  GS_INAPPLICABLE_KIND = 11,
  GS_PARSE_ERROR = 12,
  GS_DUPLICATE_KEY = 13,
  GS_SCHEMA_VIOLATION = 14,
  GS_NON_POSITIVE_COST = 15,
  GS_MISSING_WEIGHT_TABLE = 16,
  GS_UNKNOWN_LOCALE = 17,
  GS_MISSING_SOURCE_ADDRESS = 18,
  GS_DUPLICATE_WITHIN_WINDOW = 19,
  GS_DESCRIPTION_TOO_LONG = 20,
  GS_STORE_UNAVAILABLE = 21,
  GS_SINGLE_CLASS_INPUT = 22,
  GS_LENGTH_MISMATCH = 23,
  GS_DEGENERATE_MARGINALS = 24,
  GS_JOIN_MISMATCH = 25,
  GS_BIND_FAILURE = 26,
  GS_RATE_LIMITED = 27,
  GS_NOT_FOUND = 28,
  GS_INTERNAL = 29,} gs_status;

typedef struct gs_engine gs_engine;

GS_API const char* gs_version(void);
GS_API const char* gs_status_name(gs_status status);
/* Message for the last failed call on this thread, "" if none. */
GS_API const char* gs_last_error(void);
GS_API void gs_string_free(char* s);

/* config_path NULL loads the bundled defaults. GUARDSEC_PORT and
 * GUARDSEC_STORE override the file in both cases. */
GS_API gs_status gs_engine_open(const char* config_path, gs_engine** out);
/* base_dir anchors relative paths inside the document; NULL means the cwd. */
GS_API gs_status gs_engine_open_json(const char* config_json, const char* base_dir, gs_engine** out);
GS_API void gs_engine_close(gs_engine* engine);

/* kind and locale may be NULL (auto-detect, default locale). */
GS_API gs_status gs_verify(gs_engine* engine, const char* value, const char* kind, const char* locale,
                           char** out_json);
/* headers_json: object of header name to value; "remote-addr" carries the peer
 * address. hints_json may be NULL. */
GS_API gs_status gs_audit(gs_engine* engine, const char* headers_json, const char* hints_json, char** out_json);
GS_API gs_status gs_report(gs_engine* engine, const char* value, const char* kind, const char* description,
                           const char* headers_json, char** out_json);
/* session may be NULL for a stateless turn. */
GS_API gs_status gs_chat(gs_engine* engine, const char* session, const char* text, const char* locale,
                         char** out_json);
/* Timestamps as "YYYY-MM-DDTHH:MM:SSZ" or "YYYY-MM-DD". */
GS_API gs_status gs_stats(gs_engine* engine, const char* from, const char* to, char** out_json);
/* Every stored record, one JSON object per line. */
GS_API gs_status gs_export(gs_engine* engine, char** out_jsonl);

GS_API gs_status gs_eval(const char* labels_path, const char* scores_path, double threshold, char** out_json);
/* Scores the labeled entities through the engine at its configured threshold. */
GS_API gs_status gs_eval_live(gs_engine* engine, const char* labels_path, char** out_json);

/* Runs one request through the HTTP handler without a socket. */
GS_API gs_status gs_handle(gs_engine* engine, const char* method, const char* path, const char* headers_json,
                           const char* body, int* http_status, char** out_json);
/* Blocks serving HTTP until gs_serve_stop(). host NULL and port 0 use the config. */
GS_API gs_status gs_serve(gs_engine* engine, const char* host, int port);
GS_API void gs_serve_stop(gs_engine* engine);

#ifdef __cplusplus
}
#endif

#endif
