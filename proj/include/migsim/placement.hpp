#pragma once

#include <map>
#include <string>
#include <vector>

#include "migsim/mig_cost.hpp"
#include "migsim/topology.hpp"

namespace migsim {

// Immutable world shared by planners and the simulator. managed_hosts is the
// subset of topology hosts the resource manager may use.
struct DataCenter {
    Topology topo;
    std::map<std::string, VmSpec> vms;
    std::vector<NodeId> managed_hosts; // sorted
    MigrationConfig migration;

    const VmSpec& vm(const std::string& id) const;
    const PathSet& paths(const NodeId& src, const NodeId& dst) const;

private:
    mutable std::map<std::pair<NodeId, NodeId>, PathSet> path_cache_;
};

struct Placement {
    std::map<std::string, NodeId> vm_to_host;

    const NodeId& host_of(const std::string& vm) const;
    Placement with_move(const std::string& vm, const NodeId& dst) const;
};

// VMs on a host, sorted by id.
std::vector<std::string> vms_on(const DataCenter& dc, const Placement& p, const NodeId& host);

double host_cpu_util(const DataCenter& dc, const Placement& p, const NodeId& host);
double host_mem_util(const DataCenter& dc, const Placement& p, const NodeId& host);
double host_net_util(const DataCenter& dc, const Placement& p, const NodeId& host);

// Eq.-style workload capacity check: can dst take the VM's CPU demand.
bool can_place(const DataCenter& dc, const Placement& p, const std::string& vm,
               const NodeId& dst);

// Full-placement feasibility (every VM placed once, all capacities hold).
bool placement_feasible(const DataCenter& dc, const Placement& p);

// Population standard deviation of CPU utilization across managed hosts.
double cpu_util_stddev(const DataCenter& dc, const Placement& p);

} // namespace migsim
