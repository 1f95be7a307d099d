#ifndef COREKIT_H
#define COREKIT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CkEngine {
  CK_ENGINE_THREADED = 0,
  CK_ENGINE_EVENT = 1,
} CkEngine;

typedef enum CkLatencyKind {
  CK_LATENCY_KIND_ZERO = 0,
  /**
   * Constant delay `a`.
   */
  CK_LATENCY_KIND_FIXED = 1,
  /**
   * Uniform in `[a, b]`.
   */
  CK_LATENCY_KIND_UNIFORM = 2,
} CkLatencyKind;

/**
 * Result of every fallible call.
 */
typedef enum CkStatus {
  CK_STATUS_OK = 0,
  CK_STATUS_NULL_POINTER = 1,
  CK_STATUS_INVALID_ARGUMENT = 2,
  CK_STATUS_PARSE = 3,
  CK_STATUS_CONTRACT = 4,
  CK_STATUS_ENGINE = 5,
  CK_STATUS_IO = 6,
  CK_STATUS_INVALID_UTF8 = 7,
  CK_STATUS_OUT_OF_RANGE = 8,
  CK_STATUS_PANIC = 9,
} CkStatus;

typedef struct CkCoreMap CkCoreMap;

typedef struct CkGraph CkGraph;

typedef struct CkSimResult CkSimResult;

/**
 * Simulation parameters; fill with [`ck_sim_config_default`] and adjust.
 */
typedef struct CkSimConfig {
  enum CkEngine engine;
  /**
   * Milliseconds (threaded) or ticks (event).
   */
  uint64_t heartbeat_period;
  uint64_t watchdog_quiet_period;
  uint32_t bins;
  enum CkLatencyKind latency_kind;
  uint64_t latency_a;
  uint64_t latency_b;
  uint64_t seed;
  /**
   * Worker threads for the threaded engine; 0 picks the default.
   */
  uint32_t threads;
} CkSimConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next `ck_*` call on the same thread.
 */
const char *ck_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void ck_string_free(char *s);

/**
 * Parses an adjacency JSON document (`{"0":[1,2],...}`).
 */
enum CkStatus ck_graph_from_adjacency_json(const char *json, struct CkGraph **out);

/**
 * Parses a whitespace-separated edge list with `#` comments.
 */
enum CkStatus ck_graph_from_edge_list(const char *edges, struct CkGraph **out);

enum CkStatus ck_graph_cycle(size_t n, struct CkGraph **out);

enum CkStatus ck_graph_path(size_t n, struct CkGraph **out);

enum CkStatus ck_graph_complete(size_t n, struct CkGraph **out);

/**
 * RMAT graph with the default quadrant weights.
 */
enum CkStatus ck_graph_rmat(size_t n, size_t edge_factor, uint64_t seed, struct CkGraph **out);

/**
 * Number of vertices; 0 for null.
 */
size_t ck_graph_vertex_count(const struct CkGraph *g);

/**
 * Number of undirected edges; 0 for null.
 */
size_t ck_graph_edge_count(const struct CkGraph *g);

/**
 * Dense index of the vertex with external id `label`.
 */
enum CkStatus ck_graph_find(const struct CkGraph *g, const char *label, uint32_t *out);

enum CkStatus ck_graph_to_adjacency_json(const struct CkGraph *g, char **out);

void ck_graph_free(struct CkGraph *g);

/**
 * Sequential decomposition.
 */
enum CkStatus ck_decompose(const struct CkGraph *g, struct CkCoreMap **out);

size_t ck_core_map_len(const struct CkCoreMap *map);

uint32_t ck_core_map_max(const struct CkCoreMap *map);

enum CkStatus ck_core_map_get(const struct CkCoreMap *map, uint32_t vertex, uint32_t *out);

/**
 * Counts vertices whose core number breaks the locality conditions.
 */
enum CkStatus ck_verify_locality(const struct CkGraph *g,
                                 const struct CkCoreMap *map,
                                 size_t *violations);

void ck_core_map_free(struct CkCoreMap *map);

/**
 * Default parameters for `engine`.
 */
enum CkStatus ck_sim_config_default(enum CkEngine engine, struct CkSimConfig *out);

/**
 * Runs the distributed decomposition to quiescence.
 */
enum CkStatus ck_simulate(const struct CkGraph *g,
                          const struct CkSimConfig *config,
                          struct CkSimResult **out);

uint64_t ck_sim_result_total_messages(const struct CkSimResult *r);

uint64_t ck_sim_result_total_heartbeats(const struct CkSimResult *r);

/**
 * Microseconds (threaded) or ticks (event).
 */
uint64_t ck_sim_result_duration(const struct CkSimResult *r);

uint64_t ck_sim_result_final_active(const struct CkSimResult *r);

/**
 * Non-zero if the watchdog fired with messages still undelivered.
 */
bool ck_sim_result_early_fire(const struct CkSimResult *r);

size_t ck_sim_result_bins(const struct CkSimResult *r);

enum CkStatus ck_sim_result_bin(const struct CkSimResult *r,
                                size_t bin,
                                uint64_t *messages,
                                uint64_t *active);

/**
 * Copy of the final core numbers.
 */
enum CkStatus ck_sim_result_cores(const struct CkSimResult *r, struct CkCoreMap **out);

/**
 * Structured metrics report for a run on `g`.
 */
enum CkStatus ck_sim_result_report_json(const struct CkGraph *g,
                                        const struct CkSimResult *r,
                                        const char *name,
                                        char **out);

void ck_sim_result_free(struct CkSimResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COREKIT_H */
