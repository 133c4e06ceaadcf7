/*
 * tdmasim — deterministic simulator for self-stabilizing TDMA slot
 * allocation and alignment over a shared radio medium.
 *
 * C interface of the shared library. All functions return a status code;
 * tdmasim_last_error() gives detail for the most recent failure on the
 * calling thread. Handles are opaque and freed with their _free function.
 */
#ifndef TDMASIM_H
#define TDMASIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tdmasim_status {
    TDMASIM_OK = 0,
    TDMASIM_ERR_INVALID_ARGUMENT = 1,
    TDMASIM_ERR_CONFIG = 2,
    TDMASIM_ERR_PARSE = 3,
    TDMASIM_ERR_IO = 4,
    TDMASIM_ERR_NOT_FOUND = 5,    /* queried quantity absent (e.g. no convergence) */
    TDMASIM_ERR_CHECK_FAILED = 6, /* one or more self checks failed */
    TDMASIM_ERR_INTERNAL = 7
} tdmasim_status;

const char* tdmasim_version(void);

/* Thread-local message describing the last failure on this thread. */
const char* tdmasim_last_error(void);

typedef struct tdmasim_config tdmasim_config;
typedef struct tdmasim_trace tdmasim_trace;

/* ------------------------------------------------------------------ */
/* Simulation configuration                                           */

tdmasim_config* tdmasim_config_new(void);
void tdmasim_config_free(tdmasim_config* cfg);

/* "grid:4x4" | "star:5" | "unit_disk:n=16,r=1.5,side=4" | "file:PATH".
 * unit_disk placements draw from the config's current seed, so set the seed
 * before the topology when both matter. */
tdmasim_status tdmasim_config_set_topology(tdmasim_config* cfg, const char* spec);
tdmasim_status tdmasim_config_set_slots(tdmasim_config* cfg, uint64_t xi, uint64_t tau);
/* 0 keeps the default xi * tau^2 * 1024. */
tdmasim_status tdmasim_config_set_clock_modulus(tdmasim_config* cfg, uint64_t modulus);
/* 0 keeps the default 3 * xi * tau. */
tdmasim_status tdmasim_config_set_time_out(tdmasim_config* cfg, uint64_t ticks);
tdmasim_status tdmasim_config_set_seed(tdmasim_config* cfg, uint64_t seed);
tdmasim_status tdmasim_config_set_max_frames(tdmasim_config* cfg, uint64_t frames);
/* "arbitrary" | "random_clocks" | "synchronized_clocks" | "lemma1_blocker" | "safe" */
tdmasim_status tdmasim_config_set_initial_condition(tdmasim_config* cfg, const char* name);
/* Emission start delayed by a uniform draw in [0, max_ticks]; 0 disables. */
tdmasim_status tdmasim_config_set_jitter(tdmasim_config* cfg, uint64_t max_ticks);
/* "none" | "random:0.2" | "targeted:1,2" | "always_when_concurrent" */
tdmasim_status tdmasim_config_set_omission(tdmasim_config* cfg, const char* policy);
/* Corrupt node state at the given frame; scope "all" | "node:3" | "nodes:4". */
tdmasim_status tdmasim_config_set_fault(tdmasim_config* cfg, uint64_t frame, const char* scope);
tdmasim_status tdmasim_config_set_record_events(tdmasim_config* cfg, int enabled);

/* ------------------------------------------------------------------ */
/* Running and inspecting traces                                      */

tdmasim_status tdmasim_run(const tdmasim_config* cfg, tdmasim_trace** out_trace);
void tdmasim_trace_free(tdmasim_trace* trace);

/* TDMASIM_ERR_NOT_FOUND when the run never reached a safe configuration. */
tdmasim_status tdmasim_trace_convergence_frame(const tdmasim_trace* trace, uint64_t* out_frame);
tdmasim_status tdmasim_trace_collision_count(const tdmasim_trace* trace, uint64_t frame_lo,
                                             uint64_t frame_hi, uint64_t* out_count);
/* Number of recorded per-frame snapshots (max_frames + 1). */
tdmasim_status tdmasim_trace_snapshot_count(const tdmasim_trace* trace, uint64_t* out_count);
tdmasim_status tdmasim_trace_is_safe(const tdmasim_trace* trace, uint64_t frame, int* out);
tdmasim_status tdmasim_trace_is_legal(const tdmasim_trace* trace, uint64_t frame, int* out);
/* 16 hex characters plus NUL; buflen must be at least 17. */
tdmasim_status tdmasim_trace_digest(const tdmasim_trace* trace, char* buf, size_t buflen);
/* Newline-delimited JSON records (see docs/trace-schema.md). */
tdmasim_status tdmasim_trace_save(const tdmasim_trace* trace, const char* path);

/* ------------------------------------------------------------------ */
/* Experiment harness                                                 */

/* Runs a TOML experiment spec and writes the CSV. out_all_expected is 1
 * when every run matched its entry's convergence expectation. */
tdmasim_status tdmasim_experiment_run(const char* spec_path, const char* csv_path,
                                      uint64_t* out_runs, uint64_t* out_converged,
                                      int* out_all_expected);

/* Convergence-versus-size sweep; family "grid" (sizes "2x2,3x3") or
 * "unit_disk" (sizes "8,16"). tau 0 picks the family default. */
tdmasim_status tdmasim_sweep(const char* family, const char* sizes, uint64_t seed_count,
                             uint64_t tau, const char* csv_path);

/* Runtime property suite; one line per check is passed to the callback. */
typedef void (*tdmasim_report_fn)(const char* line, void* user);
tdmasim_status tdmasim_self_check(tdmasim_report_fn report, void* user);

#ifdef __cplusplus
}
#endif

#endif /* TDMASIM_H */
