// Experiment runner for the tdmasim shared library. Talks to the simulator
// exclusively through the C API in tdmasim.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tdmasim.h"

namespace {

int report_error(const char* what, tdmasim_status status) {
    std::fprintf(stderr, "tdmasim: %s failed: %s\n", what, tdmasim_last_error());
    return status == TDMASIM_ERR_PARSE || status == TDMASIM_ERR_CONFIG ||
                   status == TDMASIM_ERR_INVALID_ARGUMENT
               ? 2
               : 1;
}

void print_check_line(const char* line, void*) {
    std::printf("%s\n", line);
}

int cmd_run(const std::string& spec_path, const std::string& out_csv) {
    uint64_t runs = 0, converged = 0;
    int all_expected = 0;
    const auto status =
        tdmasim_experiment_run(spec_path.c_str(), out_csv.c_str(), &runs, &converged,
                               &all_expected);
    if (status != TDMASIM_OK) return report_error("run", status);
    std::printf("ran %llu simulations, %llu converged, results in %s\n",
                static_cast<unsigned long long>(runs),
                static_cast<unsigned long long>(converged), out_csv.c_str());
    if (!all_expected) {
        std::fprintf(stderr, "tdmasim: some runs did not match their expected outcome\n");
        return 1;
    }
    return 0;
}

int cmd_sweep(const std::string& family, const std::string& sizes, uint64_t seeds,
              uint64_t tau, const std::string& out_csv) {
    const auto status = tdmasim_sweep(family.c_str(), sizes.c_str(), seeds, tau,
                                      out_csv.c_str());
    if (status != TDMASIM_OK) return report_error("sweep", status);
    std::printf("sweep complete, results in %s\n", out_csv.c_str());
    return 0;
}

int cmd_check() {
    const auto status = tdmasim_self_check(print_check_line, nullptr);
    if (status == TDMASIM_OK) return 0;
    if (status == TDMASIM_ERR_CHECK_FAILED) {
        std::fprintf(stderr, "tdmasim: self check failed\n");
        return 1;
    }
    return report_error("check", status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator for self-stabilizing TDMA slot allocation"};
    app.set_version_flag("--version", tdmasim_version());
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_csv = "out.csv";
    auto* run = app.add_subcommand("run", "Run the experiments in a TOML spec file");
    run->add_option("spec", spec_path, "Experiment spec file")->required();
    run->add_option("-o,--output", out_csv, "Output CSV path");

    std::string family = "grid";
    std::string sizes;
    uint64_t seeds = 16;
    uint64_t tau = 0;
    std::string sweep_csv = "sweep.csv";
    auto* sweep = app.add_subcommand("sweep", "Convergence-versus-size sweep");
    sweep->add_option("--family", family, "Topology family: grid or unit_disk")
        ->check(CLI::IsMember({"grid", "unit_disk"}));
    sweep->add_option("--sizes", sizes, "Comma-separated sizes (grid: 2x2,3x3; unit_disk: 8,16)")
        ->required();
    sweep->add_option("--seeds", seeds, "Number of seeds per size (1..N)");
    sweep->add_option("--tau", tau, "Frame size; 0 picks the family default");
    sweep->add_option("-o,--output", sweep_csv, "Output CSV path");

    auto* check = app.add_subcommand("check", "Run the built-in property suite");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(spec_path, out_csv);
    if (sweep->parsed()) return cmd_sweep(family, sizes, seeds, tau, sweep_csv);
    if (check->parsed()) return cmd_check();
    return 2;
}
