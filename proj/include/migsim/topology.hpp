#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace migsim {

using NodeId = std::string;

struct HostSpec {
    double cpu_total_mips = 0;
    int cores = 0;
    int64_t memory_bytes = 0;
    int64_t storage_bytes = 0;
    int64_t nic_bandwidth_bps = 0;

    void validate() const; // throws std::invalid_argument on non-positive fields
};

// Undirected physical link. Internally expanded into two directed arcs so
// that full-duplex traffic in opposite directions never contends.
struct Link {
    NodeId a;
    NodeId b;
    int64_t capacity_bps = 0;
};

struct Arc {
    NodeId from;
    NodeId to;
    int64_t capacity_bps = 0;
};

// Reservations are keyed by arc index into Topology::arcs.
using Reservations = std::map<int, int64_t>;

class Topology {
public:
    Topology() = default;
    Topology(std::map<NodeId, HostSpec> hosts, std::set<NodeId> switches,
             std::vector<Link> links);

    const std::map<NodeId, HostSpec>& hosts() const { return hosts_; }
    const std::set<NodeId>& switches() const { return switches_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<Arc>& arcs() const { return arcs_; }

    bool has_host(const NodeId& id) const { return hosts_.count(id) > 0; }
    const HostSpec& host(const NodeId& id) const;

    // Arc index for a directed hop, -1 if absent.
    int arc_index(const NodeId& from, const NodeId& to) const;
    const std::vector<int>& out_arcs(const NodeId& node) const;

    // Switch a host hangs off (fat-tree hosts have exactly one access link).
    const NodeId& access_switch(const NodeId& host) const;

    nlohmann::json to_json() const;
    static Topology from_json(const nlohmann::json& j);

private:
    std::map<NodeId, HostSpec> hosts_;
    std::set<NodeId> switches_;
    std::vector<Link> links_;
    std::vector<Arc> arcs_;
    std::map<NodeId, std::vector<int>> out_arcs_;
    std::map<NodeId, NodeId> access_;
    static const std::vector<int> kNoArcs;
};

struct PathSet {
    NodeId src;
    NodeId dst;
    std::vector<std::vector<int>> paths; // arc-index sequences, src access -> dst access
    int64_t aggregate_bandwidth_bps = 0; // max concurrent flow over the union of path arcs
};

// k-ary fat tree: k^3/4 hosts, 5k^2/4 switches. Hosts are "h0".."hN-1",
// edge/aggregation/core switches "e<p>_<i>", "a<p>_<i>", "c<g>_<j>".
// Access links carry host_spec.nic_bandwidth_bps, fabric links link_bw_bps.
Topology build_fat_tree(int k, int64_t link_bw_bps, const HostSpec& host_spec);

// All equal-cost shortest paths between two distinct hosts.
PathSet paths_between(const Topology& t, const NodeId& src, const NodeId& dst);

// Single-flow available bandwidth: max over member paths of the minimum
// residual capacity along the path, capped by both endpoint NIC rates.
int64_t available_bandwidth(const Topology& t, const PathSet& p,
                            const Reservations& reservations);

// Max concurrent flow src->dst restricted to the given arc set.
// lift_access makes host-incident arcs unconstrained; with no constraining
// fabric arc the result is +infinity (the NIC terms cap it elsewhere).
double arc_set_max_flow(const Topology& t, const NodeId& src, const NodeId& dst,
                        const std::set<int>& arc_set, bool lift_access);

// Available bandwidth of the switch fabric portion of a path set (access
// links lifted); +infinity when the paths never leave the access layer.
double fabric_bandwidth(const Topology& t, const PathSet& p);

} // namespace migsim
