#pragma once

#include <string>
#include <vector>

#include "migsim/trace_io.hpp"

namespace migsim {

struct SynthSpec {
    std::string kind; // "lb" or "energy"; empty when a scenario file is used
    int multiplier = 1;
    int hosts = 32;
    int vms = 80;
    double horizon_s = 7200;
};

// Scenario from either a file or a synthetic generator (file wins when set).
Scenario resolve_scenario(const std::string& scenario_path, const SynthSpec& synth,
                          uint64_t seed, const std::string& selector_override);

// Subcommand bodies; each returns a process exit code (0 ok, 1 runtime
// failure, 2 usage/config error).
int cmd_topo(int k, int64_t link_bw_bps, const std::string& out_path);
int cmd_plan(const std::string& scenario_path, const SynthSpec& synth, uint64_t seed,
             const std::string& selector, const std::string& out_dir);
int cmd_run(const std::string& scenario_path, const SynthSpec& synth, uint64_t seed,
            const std::string& selector, const std::string& out_dir,
            const std::vector<std::string>& formats);
int cmd_compare(const std::string& scenario_path, const SynthSpec& synth,
                const std::vector<std::string>& selectors, int seeds, uint64_t base_seed,
                const std::string& out_dir);
int cmd_oracle(const std::string& instance_path, const std::string& out_path);
int cmd_validate(const std::string& scenario_path, const SynthSpec& synth, uint64_t seed,
                 const std::string& out_dir);

} // namespace migsim
