/* Copyright 2026 The Reconf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libreconf.
 *
 * Every call returns a reconf_status. On failure the message is available
 * from reconf_last_error() on the calling thread until its next call.
 * Strings handed out through char** parameters belong to the caller and are
 * released with reconf_string_free(). Handles are released with their
 * matching *_free function; passing NULL to a free function is a no-op.
 */

#ifndef RECONF_RECONF_H_
#define RECONF_RECONF_H_

#include <stdint.h>

#if defined(RECONF_BUILDING_LIBRARY)
#define RECONF_API __attribute__((visibility("default")))
#else
#define RECONF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum reconf_status {
  RECONF_OK = 0,
  RECONF_ERR_INPUT = 1,    /* malformed graph, request, spec or log */
  RECONF_ERR_ENGINE = 2,   /* failure inside an execution */
  RECONF_ERR_BUSY = 3,     /* a reconfiguration is already active */
  RECONF_ERR_INTERNAL = 4, /* anything else, including NULL arguments */
} reconf_status;

typedef struct reconf_graph reconf_graph;
typedef struct reconf_log reconf_log;

RECONF_API const char* reconf_version(void);
RECONF_API const char* reconf_last_error(void);
RECONF_API void reconf_string_free(char* s);

/* Graphs. */
RECONF_API reconf_status reconf_graph_load_file(const char* path, reconf_graph** out);
RECONF_API reconf_status reconf_graph_from_json(const char* text, reconf_graph** out);
/* `workers` applies to the operators the workflow marks as parallel. */
RECONF_API reconf_status reconf_graph_from_catalog(const char* name, int workers,
                                                   reconf_graph** out);
RECONF_API void reconf_graph_free(reconf_graph* g);
RECONF_API reconf_status reconf_graph_json(const reconf_graph* g, char** out_json);

/* Plans a request document ({"scheduler", "options", "updates"}) against a
 * graph. The result holds the logical component analysis and the
 * worker-level plan. */
RECONF_API reconf_status reconf_plan_json(const reconf_graph* g, const char* request_json,
                                          char** out_json);

/* Schedule logs in line-delimited JSON. */
RECONF_API reconf_status reconf_log_load_file(const char* path, reconf_log** out);
RECONF_API reconf_status reconf_log_from_text(const char* text, reconf_log** out);
RECONF_API void reconf_log_free(reconf_log* log);
/* *ok is 1 when the log is conflict-serializable and, if it carries
 * applied-version records, version-consistent. */
RECONF_API reconf_status reconf_check_json(const reconf_log* log, int* ok, char** out_json);

/* Runs an experiment spec. `overrides_json` may be NULL; its fields replace
 * those of the spec. */
RECONF_API reconf_status reconf_run_experiment(const char* spec_json,
                                               const char* overrides_json,
                                               char** out_json, char** out_csv);

/* Fuzzing campaign; *failures receives the failing run count. */
RECONF_API reconf_status reconf_fuzz(const char* options_json, uint64_t* failures,
                                     char** out_json);

/* Delay sweep ("rate", "cost", "workers", "components") or the
 * invalid-tuple comparison ("invalid"), as CSV. */
RECONF_API reconf_status reconf_bench(const char* sweep, int reps, uint64_t seed,
                                      char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* RECONF_RECONF_H_ */
