#include "migsim/placement.hpp"

#include <cmath>
#include <stdexcept>

namespace migsim {

const VmSpec& DataCenter::vm(const std::string& id) const {
    auto it = vms.find(id);
    if (it == vms.end()) throw std::invalid_argument("unknown vm: " + id);
    return it->second;
}

const PathSet& DataCenter::paths(const NodeId& src, const NodeId& dst) const {
    auto key = std::make_pair(src, dst);
    auto it = path_cache_.find(key);
    if (it == path_cache_.end()) it = path_cache_.emplace(key, paths_between(topo, src, dst)).first;
    return it->second;
}

const NodeId& Placement::host_of(const std::string& vm) const {
    auto it = vm_to_host.find(vm);
    if (it == vm_to_host.end()) throw std::invalid_argument("vm not placed: " + vm);
    return it->second;
}

Placement Placement::with_move(const std::string& vm, const NodeId& dst) const {
    Placement p = *this;
    p.vm_to_host.at(vm) = dst;
    return p;
}

std::vector<std::string> vms_on(const DataCenter& dc, const Placement& p, const NodeId& host) {
    (void)dc;
    std::vector<std::string> out;
    for (const auto& [vm, h] : p.vm_to_host)
        if (h == host) out.push_back(vm);
    return out;
}

double host_cpu_util(const DataCenter& dc, const Placement& p, const NodeId& host) {
    double demand = 0;
    for (const auto& [vm, h] : p.vm_to_host)
        if (h == host) demand += dc.vm(vm).cpu_demand_mips;
    return demand / dc.topo.host(host).cpu_total_mips;
}

double host_mem_util(const DataCenter& dc, const Placement& p, const NodeId& host) {
    double used = 0;
    for (const auto& [vm, h] : p.vm_to_host)
        if (h == host) used += static_cast<double>(dc.vm(vm).memory_bytes);
    return used / static_cast<double>(dc.topo.host(host).memory_bytes);
}

double host_net_util(const DataCenter& dc, const Placement& p, const NodeId& host) {
    double used = 0;
    for (const auto& [vm, h] : p.vm_to_host)
        if (h == host) used += static_cast<double>(dc.vm(vm).virt_bandwidth_bps);
    return used / static_cast<double>(dc.topo.host(host).nic_bandwidth_bps);
}

bool can_place(const DataCenter& dc, const Placement& p, const std::string& vm,
               const NodeId& dst) {
    double demand = dc.vm(vm).cpu_demand_mips;
    for (const auto& [other, h] : p.vm_to_host)
        if (h == dst && other != vm) demand += dc.vm(other).cpu_demand_mips;
    return demand <= dc.topo.host(dst).cpu_total_mips;
}

bool placement_feasible(const DataCenter& dc, const Placement& p) {
    std::map<NodeId, double> demand;
    for (const auto& [vm, h] : p.vm_to_host) {
        if (!dc.topo.has_host(h)) return false;
        demand[h] += dc.vm(vm).cpu_demand_mips;
    }
    for (const auto& [h, d] : demand)
        if (d > dc.topo.host(h).cpu_total_mips) return false;
    return true;
}

double cpu_util_stddev(const DataCenter& dc, const Placement& p) {
    if (dc.managed_hosts.empty()) return 0;
    double mean = 0;
    std::vector<double> utils;
    for (const auto& h : dc.managed_hosts) {
        utils.push_back(host_cpu_util(dc, p, h));
        mean += utils.back();
    }
    mean /= static_cast<double>(utils.size());
    double var = 0;
    for (double u : utils) var += (u - mean) * (u - mean);
    return std::sqrt(var / static_cast<double>(utils.size()));
}

} // namespace migsim
