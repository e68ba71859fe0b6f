#pragma once

// The four-host, one-switch consolidation setup: two VM pairs communicate
// across hosts and either endpoint may move to the other's host. Candidate
// combinations M1..M4 are objective-equivalent; their scheduled total times
// differ through resource dependencies and single-migration costs.

#include <set>

#include "migsim/camig.hpp"
#include "migsim/placement.hpp"

namespace migsim::testing {

struct ConsolidationCase {
    DataCenter dc;
    Placement initial;
    // Pair groups: selecting one direction excludes the other.
    std::map<std::string, std::string> groups{{"vmA", "g1"},
                                              {"vmA2", "g1"},
                                              {"vmB", "g2"},
                                              {"vmB2", "g2"}};
};

inline ConsolidationCase make_consolidation_case() {
    ConsolidationCase c;
    HostSpec spec;
    spec.cpu_total_mips = 100000;
    spec.cores = 16;
    spec.memory_bytes = 64LL * 1'000'000'000;
    spec.storage_bytes = 1000LL * 1'000'000'000;
    spec.nic_bandwidth_bps = 1'000'000'000;
    std::map<NodeId, HostSpec> hosts;
    std::set<NodeId> switches{"sw"};
    std::vector<Link> links;
    for (const char* h : {"H1", "H2", "H3", "H4"}) {
        hosts[h] = spec;
        links.push_back({h, "sw", 1'000'000'000});
    }
    c.dc.topo = Topology(std::move(hosts), std::move(switches), std::move(links));
    c.dc.managed_hosts = {"H1", "H2", "H3", "H4"};
    c.dc.migration.max_rounds = 30;
    c.dc.migration.downtime_threshold_s = 0.5;

    auto add = [&](const std::string& id, double mem_gb, const NodeId& host) {
        VmSpec v;
        v.id = id;
        v.memory_bytes = static_cast<int64_t>(mem_gb * 1'000'000'000);
        v.dirty_rate_factor = 0.001;
        v.compression = 0.8;
        v.cpu_demand_mips = 10000;
        c.dc.vms[id] = v;
        c.initial.vm_to_host[id] = host;
    };
    // Memory sizes picked so the four direction choices have distinct
    // execution times: A: H1->H3 fastest, B2: H4->H1 second, A2: H3->H1,
    // B: H1->H4 slowest.
    add("vmA", 1.0, "H1");
    add("vmA2", 2.4, "H3");
    add("vmB", 4.5, "H1");
    add("vmB2", 2.0, "H4");
    return c;
}

// The directional move each group member represents.
inline CandidateMove move_of(const ConsolidationCase& c, const std::string& vm) {
    const NodeId& src = c.initial.host_of(vm);
    NodeId dst;
    if (vm == "vmA") dst = "H3";
    if (vm == "vmA2") dst = "H1";
    if (vm == "vmB") dst = "H4";
    if (vm == "vmB2") dst = "H1";
    return {vm, src, dst};
}

// Number of still-split pairs; zero means fully consolidated.
class ConsolidationWorld : public CamigWorld {
public:
    explicit ConsolidationWorld(const ConsolidationCase& c) : c_(c) {}

    PolicyCandidates candidates(const Placement& p) const override {
        PolicyCandidates out;
        std::set<NodeId> sources;
        for (const auto& [vm, group] : c_.groups) {
            (void)group;
            if (consolidated(p, vm)) continue;
            CandidateMove m = move_of(c_, vm);
            sources.insert(m.src);
            out.vms_per_source[m.src].push_back(vm);
            out.dsts_per_vm[vm] = {m.dst};
        }
        out.sources.assign(sources.begin(), sources.end());
        return out;
    }

    double objective(const Placement& p) const override {
        double split = 0;
        if (!consolidated(p, "vmA")) split += 1;
        if (!consolidated(p, "vmB")) split += 1;
        return split;
    }

    bool achieved(const Placement& p) const override { return objective(p) == 0; }

    bool feasible_move(const Placement& p, const std::string& vm,
                       const NodeId& dst) const override {
        return dst != p.host_of(vm);
    }

    double exec_time(const std::string& vm, const NodeId& src, const NodeId& dst) const override {
        int64_t bw = available_bandwidth(c_.dc.topo, c_.dc.paths(src, dst), {});
        return estimate_total(c_.dc.vm(vm), static_cast<double>(bw), c_.dc.migration).t_total_s;
    }

    MigrationEstimate estimate(const std::string& vm, const NodeId& src,
                               const NodeId& dst) const override {
        int64_t bw = available_bandwidth(c_.dc.topo, c_.dc.paths(src, dst), {});
        return estimate_total(c_.dc.vm(vm), static_cast<double>(bw), c_.dc.migration);
    }

    void commit(const std::string&, const NodeId&, const NodeId&) override {}

    DepGraph build_graph(const std::vector<MigrationCandidate>& universe) const override {
        return build_dep_graph(universe, c_.dc.topo);
    }

    std::string group_of(const std::string& vm) const override { return c_.groups.at(vm); }

private:
    bool consolidated(const Placement& p, const std::string& vm) const {
        const std::string partner = (vm == "vmA")    ? "vmA2"
                                    : (vm == "vmA2") ? "vmA"
                                    : (vm == "vmB")  ? "vmB2"
                                                     : "vmB";
        return p.host_of(vm) == p.host_of(partner);
    }

    const ConsolidationCase& c_;
};

} // namespace migsim::testing
