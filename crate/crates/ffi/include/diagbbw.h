#ifndef DIAGBBW_H
#define DIAGBBW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BbwStatus {
  BBW_STATUS_OK = 0,
  BBW_STATUS_NULL_POINTER = 1,
  BBW_STATUS_INVALID_UTF8 = 2,
  BBW_STATUS_PARSE = 3,
  BBW_STATUS_VALIDATION = 4,
  BBW_STATUS_PRECONDITION = 5,
  BBW_STATUS_DOMAIN = 6,
  BBW_STATUS_LEVEL_OUT_OF_RANGE = 7,
  BBW_STATUS_CONSTRUCTION = 8,
  BBW_STATUS_SEARCH_LIMIT = 9,
  BBW_STATUS_INTERNAL = 10,
  BBW_STATUS_PANIC = 11,
} BbwStatus;

typedef enum BbwVerdict {
  BBW_VERDICT_ACYCLIC = 0,
  BBW_VERDICT_NONVANISHING = 1,
  BBW_VERDICT_UNDETERMINED = 2,
} BbwVerdict;

// The result of `bbw_analyze`.
typedef struct BbwAnalysis BbwAnalysis;

// A loaded and validated scenario.
typedef struct BbwScenario BbwScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *bbw_version(void);

// Message for the last failed call on this thread, or NULL after a
// successful one. Valid until the next call into the library.
const char *bbw_last_error(void);

// Load a scenario file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum BbwStatus bbw_scenario_load(const char *path, struct BbwScenario **out);

// Parse a scenario from TOML text.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` a valid pointer.
enum BbwStatus bbw_scenario_parse(const char *toml, struct BbwScenario **out);

// # Safety
// `scenario` must come from `bbw_scenario_load` or `bbw_scenario_parse`
// and not have been freed. NULL is ignored.
void bbw_scenario_free(struct BbwScenario *scenario);

// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum BbwStatus bbw_scenario_num_levels(const struct BbwScenario *scenario, size_t *out);

// Rank of the group at `level` (1-based).
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum BbwStatus bbw_scenario_rank(const struct BbwScenario *scenario, size_t level, size_t *out);

// Analyze the scenario's weight. A zero `horizon` or `window` takes the
// scenario's value, or the library default.
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum BbwStatus bbw_analyze(const struct BbwScenario *scenario,
                           size_t horizon,
                           size_t window,
                           struct BbwAnalysis **out);

// # Safety
// `analysis` must come from `bbw_analyze` and not have been freed.
// NULL is ignored.
void bbw_analysis_free(struct BbwAnalysis *analysis);

// # Safety
// `analysis` must be a live handle and `out` a valid pointer.
enum BbwStatus bbw_analysis_verdict(const struct BbwAnalysis *analysis, enum BbwVerdict *out);

// The cohomological degree; fails with `PRECONDITION` unless the verdict
// is nonvanishing.
//
// # Safety
// `analysis` must be a live handle and `out` a valid pointer.
enum BbwStatus bbw_analysis_degree(const struct BbwAnalysis *analysis, size_t *out);

// The full analysis as JSON. Free the result with `bbw_string_free`.
//
// # Safety
// `analysis` must be a live handle and `out` a valid pointer.
enum BbwStatus bbw_analysis_to_json(const struct BbwAnalysis *analysis, char **out);

// # Safety
// `s` must come from this library and not have been freed. NULL is ignored.
void bbw_string_free(char *s);

// Straighten one weight. `family` is one of `'A'`..`'D'`; `order` holds
// the 1-based signed order entries and `twice` the doubled ε-coordinates,
// both of length `rank + 1` for A and `rank` otherwise. On a regular
// weight `*regular` is set, `*degree` receives the length and
// `dominant_twice` the doubled dominant weight; on a singular one only
// `*regular` is written.
//
// # Safety
// The arrays must hold the stated number of elements and the output
// pointers must be valid.
enum BbwStatus bbw_straighten(char family,
                              size_t rank,
                              const int64_t *order,
                              const int64_t *twice,
                              bool *regular,
                              size_t *degree,
                              int64_t *dominant_twice);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIAGBBW_H */
