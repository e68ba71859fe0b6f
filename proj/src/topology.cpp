#include "migsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace migsim {

const std::vector<int> Topology::kNoArcs;

void HostSpec::validate() const {
    if (cpu_total_mips <= 0 || cores <= 0 || memory_bytes <= 0 || storage_bytes <= 0 ||
        nic_bandwidth_bps <= 0) {
        throw std::invalid_argument("HostSpec fields must be strictly positive");
    }
}

Topology::Topology(std::map<NodeId, HostSpec> hosts, std::set<NodeId> switches,
                   std::vector<Link> links)
    : hosts_(std::move(hosts)), switches_(std::move(switches)), links_(std::move(links)) {
    for (const auto& [id, spec] : hosts_) {
        (void)id;
        spec.validate();
    }
    // Canonical link order keeps arc indices reproducible across loads.
    for (auto& l : links_) {
        if (l.b < l.a) std::swap(l.a, l.b);
        if (l.capacity_bps <= 0) throw std::invalid_argument("link capacity must be positive");
    }
    std::sort(links_.begin(), links_.end(), [](const Link& x, const Link& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    auto known = [&](const NodeId& n) { return hosts_.count(n) || switches_.count(n); };
    for (const auto& l : links_) {
        if (!known(l.a) || !known(l.b))
            throw std::invalid_argument("link endpoint not a host or switch: " + l.a + "-" + l.b);
        arcs_.push_back({l.a, l.b, l.capacity_bps});
        arcs_.push_back({l.b, l.a, l.capacity_bps});
    }
    for (int i = 0; i < static_cast<int>(arcs_.size()); ++i)
        out_arcs_[arcs_[i].from].push_back(i);
    for (const auto& [h, spec] : hosts_) {
        (void)spec;
        auto it = out_arcs_.find(h);
        if (it != out_arcs_.end() && !it->second.empty())
            access_[h] = arcs_[it->second.front()].to;
    }
}

const HostSpec& Topology::host(const NodeId& id) const {
    auto it = hosts_.find(id);
    if (it == hosts_.end()) throw std::invalid_argument("unknown host: " + id);
    return it->second;
}

int Topology::arc_index(const NodeId& from, const NodeId& to) const {
    auto it = out_arcs_.find(from);
    if (it == out_arcs_.end()) return -1;
    for (int a : it->second)
        if (arcs_[a].to == to) return a;
    return -1;
}

const std::vector<int>& Topology::out_arcs(const NodeId& node) const {
    auto it = out_arcs_.find(node);
    return it == out_arcs_.end() ? kNoArcs : it->second;
}

const NodeId& Topology::access_switch(const NodeId& host) const {
    auto it = access_.find(host);
    if (it == access_.end()) throw std::invalid_argument("host has no access link: " + host);
    return it->second;
}

nlohmann::json Topology::to_json() const {
    nlohmann::json j;
    j["hosts"] = nlohmann::json::array();
    for (const auto& [id, s] : hosts_) {
        j["hosts"].push_back({{"id", id},
                              {"cpu_total_mips", s.cpu_total_mips},
                              {"cores", s.cores},
                              {"memory_bytes", s.memory_bytes},
                              {"storage_bytes", s.storage_bytes},
                              {"nic_bandwidth_bps", s.nic_bandwidth_bps}});
    }
    j["switches"] = switches_;
    j["links"] = nlohmann::json::array();
    for (const auto& l : links_) j["links"].push_back({l.a, l.b, l.capacity_bps});
    return j;
}

Topology Topology::from_json(const nlohmann::json& j) {
    std::map<NodeId, HostSpec> hosts;
    for (const auto& h : j.at("hosts")) {
        HostSpec s;
        s.cpu_total_mips = h.at("cpu_total_mips").get<double>();
        s.cores = h.at("cores").get<int>();
        s.memory_bytes = h.at("memory_bytes").get<int64_t>();
        s.storage_bytes = h.at("storage_bytes").get<int64_t>();
        s.nic_bandwidth_bps = h.at("nic_bandwidth_bps").get<int64_t>();
        hosts[h.at("id").get<NodeId>()] = s;
    }
    std::set<NodeId> switches = j.at("switches").get<std::set<NodeId>>();
    std::vector<Link> links;
    for (const auto& l : j.at("links"))
        links.push_back({l.at(0).get<NodeId>(), l.at(1).get<NodeId>(), l.at(2).get<int64_t>()});
    return Topology(std::move(hosts), std::move(switches), std::move(links));
}

Topology build_fat_tree(int k, int64_t link_bw_bps, const HostSpec& host_spec) {
    if (k < 4 || k % 2 != 0) throw std::invalid_argument("fat-tree k must be even and >= 4");
    if (link_bw_bps <= 0) throw std::invalid_argument("link bandwidth must be positive");
    host_spec.validate();

    const int half = k / 2;
    std::map<NodeId, HostSpec> hosts;
    std::set<NodeId> switches;
    std::vector<Link> links;

    auto edge_name = [&](int pod, int i) { return "e" + std::to_string(pod) + "_" + std::to_string(i); };
    auto agg_name = [&](int pod, int i) { return "a" + std::to_string(pod) + "_" + std::to_string(i); };
    auto core_name = [&](int g, int j) { return "c" + std::to_string(g) + "_" + std::to_string(j); };

    for (int g = 0; g < half; ++g)
        for (int j = 0; j < half; ++j) switches.insert(core_name(g, j));

    int host_idx = 0;
    for (int pod = 0; pod < k; ++pod) {
        for (int i = 0; i < half; ++i) {
            switches.insert(edge_name(pod, i));
            switches.insert(agg_name(pod, i));
        }
        for (int e = 0; e < half; ++e) {
            for (int h = 0; h < half; ++h) {
                NodeId hid = "h" + std::to_string(host_idx++);
                hosts[hid] = host_spec;
                links.push_back({hid, edge_name(pod, e), host_spec.nic_bandwidth_bps});
            }
            for (int a = 0; a < half; ++a)
                links.push_back({edge_name(pod, e), agg_name(pod, a), link_bw_bps});
        }
        for (int a = 0; a < half; ++a)
            for (int j = 0; j < half; ++j)
                links.push_back({agg_name(pod, a), core_name(a, j), link_bw_bps});
    }
    return Topology(std::move(hosts), std::move(switches), std::move(links));
}

namespace {

// Enumerate all shortest paths by DFS over the BFS distance layering.
void collect_paths(const Topology& t, const NodeId& at, const NodeId& dst,
                   const std::map<NodeId, int>& dist, std::vector<int>& arc_stack,
                   std::vector<std::vector<int>>& out) {
    if (at == dst) {
        out.push_back(arc_stack);
        return;
    }
    if (!arc_stack.empty() && t.has_host(at)) return; // hosts do not forward
    for (int a : t.out_arcs(at)) {
        const NodeId& nxt = t.arcs()[a].to;
        auto it = dist.find(nxt);
        if (it == dist.end() || it->second != dist.at(at) + 1) continue;
        arc_stack.push_back(a);
        collect_paths(t, nxt, dst, dist, arc_stack, out);
        arc_stack.pop_back();
    }
}

} // namespace

PathSet paths_between(const Topology& t, const NodeId& src, const NodeId& dst) {
    if (src == dst) throw std::invalid_argument("src and dst must differ");
    t.host(src);
    t.host(dst);

    // BFS distances from src, restricted to shortest-path reachability.
    std::map<NodeId, int> dist;
    dist[src] = 0;
    std::deque<NodeId> q{src};
    while (!q.empty()) {
        NodeId n = q.front();
        q.pop_front();
        if (n == dst) continue;
        // Other hosts never relay traffic.
        if (n != src && t.has_host(n)) continue;
        for (int a : t.out_arcs(n)) {
            const NodeId& nxt = t.arcs()[a].to;
            if (!dist.count(nxt)) {
                dist[nxt] = dist[n] + 1;
                q.push_back(nxt);
            }
        }
    }
    if (!dist.count(dst)) throw std::invalid_argument("no path between " + src + " and " + dst);

    PathSet ps;
    ps.src = src;
    ps.dst = dst;
    std::vector<int> stack;
    collect_paths(t, src, dst, dist, stack, ps.paths);
    std::sort(ps.paths.begin(), ps.paths.end());

    std::set<int> arc_union;
    for (const auto& p : ps.paths) arc_union.insert(p.begin(), p.end());
    double flow = arc_set_max_flow(t, src, dst, arc_union, /*lift_access=*/false);
    ps.aggregate_bandwidth_bps = static_cast<int64_t>(flow);
    return ps;
}

int64_t available_bandwidth(const Topology& t, const PathSet& p,
                            const Reservations& reservations) {
    for (const auto& [arc, res] : reservations) {
        if (arc < 0 || arc >= static_cast<int>(t.arcs().size()))
            throw std::invalid_argument("reservation on unknown arc");
        if (res < 0) throw std::invalid_argument("negative reservation");
        if (res > t.arcs()[arc].capacity_bps)
            throw std::invalid_argument("reservation exceeds arc capacity");
    }
    int64_t best = 0;
    for (const auto& path : p.paths) {
        int64_t bottleneck = std::numeric_limits<int64_t>::max();
        for (int a : path) {
            int64_t reserved = 0;
            auto it = reservations.find(a);
            if (it != reservations.end()) reserved = it->second;
            bottleneck = std::min(bottleneck, t.arcs()[a].capacity_bps - reserved);
        }
        best = std::max(best, bottleneck);
    }
    int64_t nic_cap = std::min(t.host(p.src).nic_bandwidth_bps, t.host(p.dst).nic_bandwidth_bps);
    return std::max<int64_t>(0, std::min(best, nic_cap));
}

double arc_set_max_flow(const Topology& t, const NodeId& src, const NodeId& dst,
                        const std::set<int>& arc_set, bool lift_access) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    struct Edge {
        int to;
        double cap;
        int rev;
    };
    std::map<NodeId, int> index;
    auto idx = [&](const NodeId& n) {
        auto [it, inserted] = index.emplace(n, static_cast<int>(index.size()));
        (void)inserted;
        return it->second;
    };
    std::vector<std::vector<Edge>> adj;
    auto ensure = [&](int i) {
        if (static_cast<int>(adj.size()) <= i) adj.resize(i + 1);
    };
    bool any_constrained = false;
    for (int a : arc_set) {
        const Arc& arc = t.arcs().at(a);
        bool access = t.has_host(arc.from) || t.has_host(arc.to);
        double cap = (lift_access && access) ? kInf : static_cast<double>(arc.capacity_bps);
        if (cap != kInf) any_constrained = true;
        int u = idx(arc.from), v = idx(arc.to);
        ensure(std::max(u, v));
        adj[u].push_back({v, cap, static_cast<int>(adj[v].size())});
        adj[v].push_back({u, 0.0, static_cast<int>(adj[u].size()) - 1});
    }
    if (!index.count(src) || !index.count(dst)) return 0.0;
    if (lift_access && !any_constrained) return kInf;

    int s = index[src], d = index[dst];
    double total = 0.0;
    while (true) {
        // BFS for an augmenting path.
        std::vector<std::pair<int, int>> parent(adj.size(), {-1, -1}); // (node, edge idx)
        std::deque<int> q{s};
        parent[s] = {s, -1};
        while (!q.empty() && parent[d].first == -1) {
            int u = q.front();
            q.pop_front();
            for (int e = 0; e < static_cast<int>(adj[u].size()); ++e) {
                const Edge& ed = adj[u][e];
                if (ed.cap > 0 && parent[ed.to].first == -1) {
                    parent[ed.to] = {u, e};
                    q.push_back(ed.to);
                }
            }
        }
        if (parent[d].first == -1) break;
        double push = kInf;
        for (int v = d; v != s;) {
            auto [u, e] = parent[v];
            push = std::min(push, adj[u][e].cap);
            v = u;
        }
        if (push == kInf) return kInf; // unconstrained augmenting path
        for (int v = d; v != s;) {
            auto [u, e] = parent[v];
            adj[u][e].cap -= push;
            adj[adj[u][e].to][adj[u][e].rev].cap += push;
            v = u;
        }
        total += push;
    }
    return total;
}

double fabric_bandwidth(const Topology& t, const PathSet& p) {
    std::set<int> arc_union;
    for (const auto& path : p.paths) arc_union.insert(path.begin(), path.end());
    return arc_set_max_flow(t, p.src, p.dst, arc_union, /*lift_access=*/true);
}

} // namespace migsim
