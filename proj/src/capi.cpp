#include "tdmasim.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "tdmasim/analysis.hpp"
#include "tdmasim/engine.hpp"
#include "tdmasim/experiment.hpp"

namespace {

thread_local std::string g_last_error;

tdmasim_status fail(tdmasim_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
tdmasim_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const tdma::ParseError& ex) {
        return fail(TDMASIM_ERR_PARSE, ex.what());
    } catch (const tdma::ConfigError& ex) {
        return fail(TDMASIM_ERR_CONFIG, ex.what());
    } catch (const std::exception& ex) {
        return fail(TDMASIM_ERR_INTERNAL, ex.what());
    }
}

} // namespace

struct tdmasim_config {
    tdma::SimConfig cfg;
};

struct tdmasim_trace {
    tdma::Trace trace;
    tdma::Topology topology;
};

extern "C" {

const char* tdmasim_version(void) { return "0.1.0"; }

const char* tdmasim_last_error(void) { return g_last_error.c_str(); }

tdmasim_config* tdmasim_config_new(void) {
    auto* h = new (std::nothrow) tdmasim_config;
    if (h) {
        h->cfg.topology = tdma::Topology::grid(2, 2);
        h->cfg.topology_name = "grid:2x2";
    }
    return h;
}

void tdmasim_config_free(tdmasim_config* cfg) { delete cfg; }

tdmasim_status tdmasim_config_set_topology(tdmasim_config* cfg, const char* spec) {
    if (!cfg || !spec) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        cfg->cfg.topology = tdma::make_topology(spec, cfg->cfg.seed);
        cfg->cfg.topology_name = spec;
        return TDMASIM_OK;
    });
}

tdmasim_status tdmasim_config_set_slots(tdmasim_config* cfg, uint64_t xi, uint64_t tau) {
    if (!cfg) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null config");
    if (xi < 1 || tau < 1) return fail(TDMASIM_ERR_CONFIG, "xi and tau must be positive");
    cfg->cfg.slots = {xi, tau};
    return TDMASIM_OK;
}

tdmasim_status tdmasim_config_set_clock_modulus(tdmasim_config* cfg, uint64_t modulus) {
    if (!cfg) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.clock_modulus = modulus;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_config_set_time_out(tdmasim_config* cfg, uint64_t ticks) {
    if (!cfg) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.time_out = ticks;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_config_set_seed(tdmasim_config* cfg, uint64_t seed) {
    if (!cfg) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.seed = seed;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_config_set_max_frames(tdmasim_config* cfg, uint64_t frames) {
    if (!cfg) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.max_frames = frames;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_config_set_initial_condition(tdmasim_config* cfg, const char* name) {
    if (!cfg || !name) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        cfg->cfg.initial = tdma::parse_initial_condition(name);
        return TDMASIM_OK;
    });
}

tdmasim_status tdmasim_config_set_jitter(tdmasim_config* cfg, uint64_t max_ticks) {
    if (!cfg) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.jitter = max_ticks;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_config_set_omission(tdmasim_config* cfg, const char* policy) {
    if (!cfg || !policy) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        cfg->cfg.omission = tdma::OmissionPolicy::parse(policy);
        return TDMASIM_OK;
    });
}

tdmasim_status tdmasim_config_set_fault(tdmasim_config* cfg, uint64_t frame, const char* scope) {
    if (!cfg || !scope) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        cfg->cfg.fault = tdma::FaultSpec::parse_scope(frame, scope);
        return TDMASIM_OK;
    });
}

tdmasim_status tdmasim_config_set_record_events(tdmasim_config* cfg, int enabled) {
    if (!cfg) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.record_events = enabled != 0;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_run(const tdmasim_config* cfg, tdmasim_trace** out_trace) {
    if (!cfg || !out_trace) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto* h = new tdmasim_trace{tdma::run(cfg->cfg), cfg->cfg.topology};
        *out_trace = h;
        return TDMASIM_OK;
    });
}

void tdmasim_trace_free(tdmasim_trace* trace) { delete trace; }

tdmasim_status tdmasim_trace_convergence_frame(const tdmasim_trace* trace, uint64_t* out_frame) {
    if (!trace || !out_frame) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto conv = tdma::analysis::convergence_frame(trace->trace, trace->topology);
        if (!conv) return fail(TDMASIM_ERR_NOT_FOUND, "the run never reached a safe configuration");
        *out_frame = *conv;
        return TDMASIM_OK;
    });
}

tdmasim_status tdmasim_trace_collision_count(const tdmasim_trace* trace, uint64_t frame_lo,
                                             uint64_t frame_hi, uint64_t* out_count) {
    if (!trace || !out_count) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    *out_count = tdma::analysis::collision_count(trace->trace, frame_lo, frame_hi);
    return TDMASIM_OK;
}

tdmasim_status tdmasim_trace_snapshot_count(const tdmasim_trace* trace, uint64_t* out_count) {
    if (!trace || !out_count) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    *out_count = trace->trace.snapshots.size();
    return TDMASIM_OK;
}

tdmasim_status tdmasim_trace_is_safe(const tdmasim_trace* trace, uint64_t frame, int* out) {
    if (!trace || !out) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    if (frame >= trace->trace.snapshots.size())
        return fail(TDMASIM_ERR_INVALID_ARGUMENT, "frame index out of range");
    *out = tdma::analysis::is_safe(trace->trace.snapshots[frame], trace->topology) ? 1 : 0;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_trace_is_legal(const tdmasim_trace* trace, uint64_t frame, int* out) {
    if (!trace || !out) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    if (frame >= trace->trace.snapshots.size())
        return fail(TDMASIM_ERR_INVALID_ARGUMENT, "frame index out of range");
    *out = tdma::analysis::is_legal(trace->trace.snapshots[frame], trace->topology) ? 1 : 0;
    return TDMASIM_OK;
}

tdmasim_status tdmasim_trace_digest(const tdmasim_trace* trace, char* buf, size_t buflen) {
    if (!trace || !buf) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    if (buflen < 17) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "buffer too small (need 17 bytes)");
    std::snprintf(buf, buflen, "%016llx",
                  static_cast<unsigned long long>(trace->trace.digest()));
    return TDMASIM_OK;
}

tdmasim_status tdmasim_trace_save(const tdmasim_trace* trace, const char* path) {
    if (!trace || !path) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    std::ofstream out(path);
    if (!out) return fail(TDMASIM_ERR_IO, std::string("cannot open '") + path + "' for writing");
    trace->trace.save_jsonl(out);
    return out ? TDMASIM_OK : fail(TDMASIM_ERR_IO, "write failed");
}

tdmasim_status tdmasim_experiment_run(const char* spec_path, const char* csv_path,
                                      uint64_t* out_runs, uint64_t* out_converged,
                                      int* out_all_expected) {
    if (!spec_path || !csv_path) return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto spec = tdma::parse_spec_file(spec_path);
        const auto report = tdma::run_experiment(spec);
        std::ofstream out(csv_path);
        if (!out) return fail(TDMASIM_ERR_IO, std::string("cannot open '") + csv_path + "'");
        out << report.csv;
        if (!out) return fail(TDMASIM_ERR_IO, "write failed");
        if (out_runs) *out_runs = report.runs.size();
        if (out_converged) {
            uint64_t converged = 0;
            for (const auto& r : report.runs)
                if (r.converged) ++converged;
            *out_converged = converged;
        }
        if (out_all_expected) *out_all_expected = report.all_expected ? 1 : 0;
        return TDMASIM_OK;
    });
}

tdmasim_status tdmasim_sweep(const char* family, const char* sizes, uint64_t seed_count,
                             uint64_t tau, const char* csv_path) {
    if (!family || !sizes || !csv_path)
        return fail(TDMASIM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto report = tdma::sweep(family, sizes, seed_count, tau);
        std::ofstream out(csv_path);
        if (!out) return fail(TDMASIM_ERR_IO, std::string("cannot open '") + csv_path + "'");
        out << report.csv;
        if (!out) return fail(TDMASIM_ERR_IO, "write failed");
        return TDMASIM_OK;
    });
}

tdmasim_status tdmasim_self_check(tdmasim_report_fn report, void* user) {
    return guarded([&] {
        const auto results = tdma::self_check();
        bool all = true;
        for (const auto& r : results) {
            if (report) {
                std::string line = "check " + r.name + ": " + (r.passed ? "ok" : "FAIL");
                if (!r.detail.empty()) line += " (" + r.detail + ")";
                report(line.c_str(), user);
            }
            all = all && r.passed;
        }
        if (!all) return fail(TDMASIM_ERR_CHECK_FAILED, "one or more checks failed");
        return TDMASIM_OK;
    });
}

} // extern "C"
