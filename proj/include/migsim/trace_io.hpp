#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "migsim/camig.hpp"
#include "migsim/energy.hpp"
#include "migsim/placement.hpp"
#include "migsim/policies.hpp"

namespace migsim {

struct UtilizationTrace {
    std::vector<double> samples; // fractions in [0,1]
    double interval_s = 300;
};

// One integer percentage per line (PlanetLab layout: 288 lines per day at a
// 300 s cadence). Values outside [0,100] or non-numeric lines are errors.
UtilizationTrace parse_trace(const std::string& path);

struct ScenarioVm {
    VmSpec spec;
    NodeId host;
    std::string trace_file;           // resolved relative to the scenario file
    std::vector<double> trace_values; // inline alternative
};

struct Scenario {
    uint64_t seed = 0;
    double horizon_s = 300;
    double interval_s = 300;
    int fat_tree_k = 4;
    int64_t link_bw_bps = 1'000'000'000;
    HostSpec host_spec;
    std::vector<NodeId> managed_hosts;
    std::vector<ScenarioVm> vms; // sorted by id
    MigrationConfig migration;
    PolicyConfig policy;
    CamigConfig camig;
    std::string selector = "camig";
    EnergyModel energy;
    int timeout_patience_intervals = 1;
    double timeout_penalty_factor = 10.0;

    nlohmann::json to_json() const;
    static Scenario from_json(const nlohmann::json& j);

    DataCenter build_data_center() const;
    Placement initial_placement() const;
    // Per-VM traces; file references load relative to base_dir. VMs without
    // a trace run at constant full demand.
    std::map<std::string, UtilizationTrace> traces(const std::string& base_dir) const;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

// Load-balancing scenario: the 8-host reference mapping (38 VMs, host
// utilizations 10-90%, VM cpu 4-20%, memory 2-16 GB) replicated `multiplier`
// times and permuted over the first 8*multiplier slots of a k-8 fat tree.
Scenario synth_lb_scenario(uint64_t seed, int multiplier);

// Energy scenario: `host_count` managed hosts in the smallest fitting fat
// tree, VMs cycling through the four flavors, seeded random-walk traces.
Scenario synth_energy_scenario(uint64_t seed, int host_count, int vm_count, double horizon_s);

} // namespace migsim
