#include "migsim/energy.hpp"

namespace migsim {

double placement_host_power(const DataCenter& dc, const Placement& p, const EnergyModel& m) {
    double total = 0;
    for (const auto& h : dc.managed_hosts) {
        bool on = false;
        double demand = 0;
        for (const auto& [vm, host] : p.vm_to_host) {
            if (host != h) continue;
            on = true;
            demand += dc.vm(vm).cpu_demand_mips;
        }
        if (on) total += m.host_power(demand / dc.topo.host(h).cpu_total_mips);
    }
    return total;
}

double host_power_increase(const DataCenter& dc, const Placement& p, const EnergyModel& m,
                           const std::string& vm, const NodeId& dst) {
    double util = host_cpu_util(dc, p, dst);
    double add = dc.vm(vm).cpu_demand_mips / dc.topo.host(dst).cpu_total_mips;
    bool was_on = !vms_on(dc, p, dst).empty();
    double before = was_on ? m.host_power(util) : 0.0;
    return m.host_power(util + add) - before;
}

} // namespace migsim
