#pragma once

#include "migsim/placement.hpp"

namespace migsim {

// Affine host power in CPU utilization; hosts with no VMs are switched off.
// Switches draw base power plus one port share per migration-active port.
struct EnergyModel {
    double host_idle_w = 86.0;
    double host_peak_w = 145.0;
    double switch_base_w = 30.0;
    double switch_port_w = 1.0;

    double host_power(double cpu_util) const {
        return host_idle_w + (host_peak_w - host_idle_w) * cpu_util;
    }
};

// Total host power draw of a placement, in watts (off hosts excluded).
double placement_host_power(const DataCenter& dc, const Placement& p, const EnergyModel& m);

// Power increase from adding one VM to a host (covers the switch-on step).
double host_power_increase(const DataCenter& dc, const Placement& p, const EnergyModel& m,
                           const std::string& vm, const NodeId& dst);

} // namespace migsim
