// Copyright 2026 The shapeprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the shapeprobe engine. All handles are opaque and owned by
 * the caller once returned; release them with the matching *_free function.
 * On failure a function returns a non-zero sp_status and sp_last_error()
 * describes the problem. Error state is thread-local. */

#ifndef SHAPEPROBE_H
#define SHAPEPROBE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SP_API __declspec(dllexport)
#else
#define SP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sp_status {
    SP_OK = 0,
    SP_ERR_PARSE = 1,            /* malformed JSON, unreadable file */
    SP_ERR_SCHEMA = 2,           /* JSON does not match the program schema */
    SP_ERR_GRAPH = 3,            /* cycle, dangling input, arity, bad attributes */
    SP_ERR_INVALID_ARGUMENT = 4, /* null pointer or out-of-range option */
    SP_ERR_INTERNAL = 5
} sp_status;

typedef enum sp_format { SP_FORMAT_TEXT = 0, SP_FORMAT_JSON = 1 } sp_format;

typedef struct sp_program sp_program;
typedef struct sp_report sp_report;

typedef struct sp_check_options {
    sp_format format;
    int trace;              /* non-zero: record every node's shape per iteration */
    int64_t max_iterations; /* <= 0 means no cap */
} sp_check_options;

SP_API const char* sp_version(void);
SP_API const char* sp_status_name(sp_status status);

/* Message and JSON path (possibly empty) of the last failure on this thread. */
SP_API const char* sp_last_error(void);
SP_API const char* sp_last_error_path(void);

SP_API sp_status sp_program_parse(const char* text, size_t length, sp_program** out);
SP_API sp_status sp_program_load(const char* path, sp_program** out);
SP_API void sp_program_free(sp_program* program);
SP_API size_t sp_program_graph_count(const sp_program* program);
SP_API size_t sp_program_run_count(const sp_program* program);
/* Canonical JSON; free with sp_string_free. */
SP_API sp_status sp_program_serialize(const sp_program* program, char** out);
SP_API void sp_string_free(char* s);

/* Abstract shape check of every run in the program. */
SP_API sp_status sp_check(const sp_program* program, const sp_check_options* options, sp_report** out);
/* Buggy/fixed corpus in a directory. */
SP_API sp_status sp_corpus_run(const char* dir, sp_format format, sp_report** out);
/* Concrete reference execution on zero-filled tensors. */
SP_API sp_status sp_oracle_run(const sp_program* program, uint64_t seed, sp_format format, sp_report** out);

/* 0 clean, 1 shape error (or corpus failure). */
SP_API int sp_report_exit_code(const sp_report* report);
SP_API const char* sp_report_stdout(const sp_report* report);
SP_API const char* sp_report_stderr(const sp_report* report);
SP_API size_t sp_report_diagnostic_count(const sp_report* report);
SP_API const char* sp_report_diagnostic_node(const sp_report* report, size_t index);
SP_API const char* sp_report_diagnostic_kind(const sp_report* report, size_t index);
SP_API int64_t sp_report_diagnostic_iteration(const sp_report* report, size_t index);
SP_API void sp_report_free(sp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SHAPEPROBE_H */
