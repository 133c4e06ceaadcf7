#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdmasim/engine.hpp"

namespace tdma {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Build a topology from a textual spec:
//   "grid:WxH" | "star:LEAVES" | "unit_disk:n=16,r=1.5,side=4" | "file:PATH"
// unit_disk placement is drawn from the given seed.
Topology make_topology(const std::string& spec, std::uint64_t seed);

// One experiment entry of a spec file.
struct ExperimentEntry {
    std::string name;
    std::string topology{"grid:2x2"};
    SlotParams slots{20, 16};
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t max_frames{600};
    InitialCondition initial{InitialCondition::RandomClocks};
    Tick jitter{0};
    std::string omission{"none"};
    Tick clock_modulus{0};
    Tick time_out{0};
    bool expect_nonconvergence{false};
    std::optional<std::uint64_t> fault_frame;
    std::string fault_scope{"all"};

    SimConfig to_config(std::uint64_t seed) const;
};

struct ExperimentSpec {
    std::string output;   // default CSV path; may be overridden by the caller
    std::vector<ExperimentEntry> entries;
};

// Minimal TOML-compatible reader for experiment specs: top-level key/value
// pairs plus [[experiment]] tables with integer, float, boolean, string and
// integer-array values.
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec parse_spec_file(const std::string& path);

struct RunResult {
    std::string name;
    std::string topology;
    std::uint32_t nodes{};
    SlotParams slots{};
    std::uint64_t seed{};
    std::uint64_t max_frames{};
    bool converged{};
    std::uint64_t convergence_frame{};
    std::uint64_t collisions_total{};
    std::uint64_t collisions_post{};
    bool expected{};   // outcome matches the entry's expectation
};

struct ExperimentReport {
    std::vector<RunResult> runs;
    std::string csv;          // per-run rows plus one summary row per entry
    bool all_expected{true};
    std::vector<std::string> warnings;
};

// Runs every (entry, seed) pair; independent runs execute in parallel, the
// TDMASIM_JOBS environment variable caps the worker count.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Convergence-versus-size sweep for a topology family ("grid" accepts sizes
// like "2x2,3x3"; "unit_disk" node counts like "8,16"). tau = 0 picks the
// family default (16 for grid, 64 for unit_disk). Seeds are 1..seed_count.
ExperimentReport sweep(const std::string& family, const std::string& sizes,
                       std::uint64_t seed_count, std::uint64_t tau);

struct CheckResult {
    std::string name;
    bool passed{};
    std::string detail;
};

// The runtime property suite: clock algebra, the coverage bound, the
// used-slot oracle, closure from a safe configuration, the blocking star,
// fault recovery, and replay determinism.
std::vector<CheckResult> self_check();

} // namespace tdma
