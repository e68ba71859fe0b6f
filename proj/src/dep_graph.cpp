#include "migsim/dep_graph.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace migsim {

int DepGraph::edge_count() const {
    int m = 0;
    for (const auto& n : nbrs_) m += static_cast<int>(n.size());
    return m / 2;
}

int DepGraph::index_of(const NodeId& src, const NodeId& dst) const {
    return index_of_key(src + "->" + dst);
}

int DepGraph::index_of_key(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

const std::string& DepGraph::vm_of(const std::string& candidate_id) const {
    auto it = cand_vm_.find(candidate_id);
    if (it == cand_vm_.end()) throw std::invalid_argument("unknown candidate: " + candidate_id);
    return it->second;
}

int DepGraph::node_of_candidate(const std::string& candidate_id) const {
    auto it = cand_node_.find(candidate_id);
    if (it == cand_node_.end()) throw std::invalid_argument("unknown candidate: " + candidate_id);
    return it->second;
}

void DepGraph::finish() {
    nbrs_.assign(nodes_.size(), {});
    index_.clear();
    cand_node_.clear();
    for (int i = 0; i < node_count(); ++i) {
        index_[nodes_[i].key()] = i;
        for (int j = 0; j < node_count(); ++j)
            if (adj_[i][j]) nbrs_[i].push_back(j);
        for (const auto& m : migs_[i]) cand_node_[m] = i;
    }
}

nlohmann::json DepGraph::to_json() const {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (int i = 0; i < node_count(); ++i)
        j["nodes"].push_back({{"src", nodes_[i].src},
                              {"dst", nodes_[i].dst},
                              {"migrations", migs_[i]}});
    j["edges"] = nlohmann::json::array();
    for (int i = 0; i < node_count(); ++i)
        for (int k : nbrs_[i])
            if (i < k) j["edges"].push_back({nodes_[i].key(), nodes_[k].key()});
    return j;
}

std::vector<std::vector<std::string>> CliqueSet::keyed(const DepGraph& g) const {
    std::vector<std::vector<std::string>> out;
    for (const auto& c : cliques) {
        std::vector<std::string> keys;
        for (int v : c) keys.push_back(g.node(v).key());
        std::sort(keys.begin(), keys.end());
        out.push_back(std::move(keys));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_dependent(const SrcDstNode& u, const SrcDstNode& v, const Topology& t) {
    if (u.src == v.src || u.dst == v.dst) return true;
    // A pair and its exact reverse contend at both endpoint NICs.
    if (u.src == v.dst && u.dst == v.src) return true;
    // Directed arc usage keeps full-duplex flows (H1->H3 vs H4->H1) apart.
    std::set<int> arcs_u, arcs_v;
    for (const auto& p : u.path_set.paths) arcs_u.insert(p.begin(), p.end());
    for (const auto& p : v.path_set.paths) arcs_v.insert(p.begin(), p.end());
    std::vector<int> shared;
    std::set_intersection(arcs_u.begin(), arcs_u.end(), arcs_v.begin(), arcs_v.end(),
                          std::back_inserter(shared));
    if (shared.empty()) return false;

    int64_t shared_cap = 0;
    for (int a : shared) shared_cap += t.arcs()[a].capacity_bps;

    auto usable = [&](const SrcDstNode& n, double fabric) {
        return std::min(fabric, static_cast<double>(std::min(
                                    t.host(n.src).nic_bandwidth_bps,
                                    t.host(n.dst).nic_bandwidth_bps)));
    };
    double fab_u = fabric_bandwidth(t, u.path_set);
    double fab_v = fabric_bandwidth(t, v.path_set);
    double rate_u = usable(u, fab_u);
    double rate_v = usable(v, fab_v);
    // Residual-bandwidth statement: each side keeps its achievable rate after
    // the other's traffic crosses the shared links.
    double loss_u = std::min(rate_v, static_cast<double>(shared_cap));
    double loss_v = std::min(rate_u, static_cast<double>(shared_cap));
    bool independent = (fab_u - loss_u >= rate_u) && (fab_v - loss_v >= rate_v);
    return !independent;
}

DepGraph build_dep_graph(
    const std::vector<MigrationCandidate>& candidates,
    const std::function<bool(const SrcDstNode&, const SrcDstNode&)>& dependent) {
    std::map<std::pair<NodeId, NodeId>, std::vector<std::string>> groups;
    std::map<std::string, std::string> vm_of;
    for (const auto& c : candidates) {
        if (c.src == c.dst)
            throw std::invalid_argument("candidate " + c.id + " has src == dst");
        if (vm_of.count(c.id)) throw std::invalid_argument("duplicate candidate id: " + c.id);
        groups[{c.src, c.dst}].push_back(c.id);
        vm_of[c.id] = c.vm;
    }
    DepGraph g;
    for (const auto& [pair, migs] : groups) {
        SrcDstNode n;
        n.src = pair.first;
        n.dst = pair.second;
        g.nodes_.push_back(std::move(n));
        g.migs_.push_back(migs);
    }
    g.cand_vm_ = std::move(vm_of);
    int n = g.node_count();
    g.adj_.assign(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dependent(g.nodes_[i], g.nodes_[j])) g.adj_[i][j] = g.adj_[j][i] = 1;
    g.finish();
    return g;
}

DepGraph build_dep_graph(const std::vector<MigrationCandidate>& candidates, const Topology& t) {
    // Resolve path sets once per distinct pair, then defer to the pairwise test.
    std::map<std::pair<NodeId, NodeId>, PathSet> cache;
    for (const auto& c : candidates) {
        if (!t.has_host(c.src) || !t.has_host(c.dst))
            throw std::invalid_argument("candidate " + c.id + " references unknown host");
        auto key = std::make_pair(c.src, c.dst);
        if (!cache.count(key)) cache[key] = paths_between(t, c.src, c.dst);
    }
    auto g = build_dep_graph(candidates, [&](const SrcDstNode& a, const SrcDstNode& b) {
        SrcDstNode au = a, bu = b;
        au.path_set = cache.at({a.src, a.dst});
        bu.path_set = cache.at({b.src, b.dst});
        return is_dependent(au, bu, t);
    });
    // Keep the resolved path sets on the nodes for later bandwidth queries.
    for (auto& node : g.nodes_) node.path_set = cache.at({node.src, node.dst});
    return g;
}

std::pair<std::vector<int>, int> degeneracy_order(const DepGraph& g) {
    int n = g.node_count();
    std::vector<int> deg(n), order;
    std::vector<char> removed(n, 0);
    for (int i = 0; i < n; ++i) deg[i] = g.degree(i);
    int degeneracy = 0;
    for (int step = 0; step < n; ++step) {
        int best = -1;
        for (int i = 0; i < n; ++i)
            if (!removed[i] && (best == -1 || deg[i] < deg[best])) best = i;
        degeneracy = std::max(degeneracy, deg[best]);
        removed[best] = 1;
        order.push_back(best);
        for (int j : g.neighbors(best))
            if (!removed[j]) --deg[j];
    }
    return {order, degeneracy};
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Classic pivoted recursion; pivot maximizes |P intersect N(pivot)|,
// ties to the lowest index. adj/nbrs describe the graph being searched.
void bk_pivot(const std::vector<std::vector<char>>& adj,
              const std::vector<std::vector<int>>& nbrs, std::vector<int>& r,
              std::vector<int> p, std::vector<int> x,
              std::vector<std::vector<int>>& out) {
    if (p.empty() && x.empty()) {
        out.push_back(r);
        return;
    }
    int pivot = -1, best = -1;
    for (const auto* side : {&p, &x}) {
        for (int u : *side) {
            int cnt = 0;
            for (int w : p)
                if (adj[u][w]) ++cnt;
            if (cnt > best) {
                best = cnt;
                pivot = u;
            }
        }
    }
    std::vector<int> ext;
    for (int v : p)
        if (!adj[pivot][v]) ext.push_back(v);
    for (int v : ext) {
        r.push_back(v);
        bk_pivot(adj, nbrs, r, intersect(p, nbrs[v]), intersect(x, nbrs[v]), out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.insert(std::lower_bound(x.begin(), x.end(), v), v);
    }
}

void canonicalize(std::vector<std::vector<int>>& cliques) {
    for (auto& c : cliques) std::sort(c.begin(), c.end());
    std::sort(cliques.begin(), cliques.end());
    cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());
}

} // namespace

CliqueSet all_maximal_cliques(const DepGraph& g) {
    int n = g.node_count();
    CliqueSet cs;
    if (n == 0) return cs;
    auto [order, d] = degeneracy_order(g);
    (void)d;
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;

    std::vector<std::vector<int>> nbrs(n);
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
        nbrs[i] = g.neighbors(i);
        for (int j : nbrs[i]) adj[i][j] = 1;
    }
    for (int v : order) {
        std::vector<int> p, x;
        for (int u : nbrs[v]) (pos[u] > pos[v] ? p : x).push_back(u);
        std::vector<int> r{v};
        bk_pivot(adj, nbrs, r, std::move(p), std::move(x), cs.cliques);
    }
    canonicalize(cs.cliques);
    return cs;
}

CliqueSet node_cliques(const DepGraph& g, const CliqueSet& cs, int v) {
    if (v < 0 || v >= g.node_count()) throw std::invalid_argument("node not in graph");
    CliqueSet out;
    for (const auto& c : cs.cliques)
        if (std::binary_search(c.begin(), c.end(), v)) out.cliques.push_back(c);
    return out;
}

std::vector<std::vector<int>> node_maximal_independent_sets(const DepGraph& g, int v) {
    if (v < 0 || v >= g.node_count()) throw std::invalid_argument("node not in graph");
    // Candidates: everything outside N[v].
    std::vector<int> allowed;
    for (int i = 0; i < g.node_count(); ++i)
        if (i != v && !g.adjacent(v, i)) allowed.push_back(i);

    std::vector<std::vector<int>> out;
    if (allowed.empty()) {
        out.push_back({v});
        return out;
    }
    // Complement of the remainder; its maximal cliques are the MISs.
    int m = static_cast<int>(allowed.size());
    std::vector<std::vector<char>> cadj(m, std::vector<char>(m, 0));
    std::vector<std::vector<int>> cnbrs(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (!g.adjacent(allowed[i], allowed[j])) {
                cadj[i][j] = cadj[j][i] = 1;
                cnbrs[i].push_back(j);
                cnbrs[j].push_back(i);
            }
    std::vector<int> p(m), r;
    for (int i = 0; i < m; ++i) p[i] = i;
    std::vector<std::vector<int>> local;
    bk_pivot(cadj, cnbrs, r, std::move(p), {}, local);
    for (auto& mis : local) {
        std::vector<int> full{v};
        for (int i : mis) full.push_back(allowed[i]);
        std::sort(full.begin(), full.end());
        out.push_back(std::move(full));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<DepGraph, CliqueSet> update_dep_graph(const DepGraph& g, const CliqueSet& cs,
                                                const std::string& selected, int node_index) {
    if (node_index < 0 || node_index >= g.node_count())
        throw std::invalid_argument("node not in graph");
    const auto& migs = g.migrations_of(node_index);
    if (std::find(migs.begin(), migs.end(), selected) == migs.end())
        throw std::invalid_argument("selected migration not listed under the given node");
    const std::string vm = g.vm_of(selected);

    // Drop the selected candidate and every other candidate of the same vm.
    std::vector<char> keep(g.node_count(), 0);
    std::vector<std::vector<std::string>> new_migs(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
        for (const auto& id : g.migrations_of(i))
            if (g.vm_of(id) != vm) new_migs[i].push_back(id);
        keep[i] = !new_migs[i].empty();
    }

    DepGraph out;
    std::vector<int> remap(g.node_count(), -1);
    for (int i = 0; i < g.node_count(); ++i) {
        if (!keep[i]) continue;
        remap[i] = out.node_count();
        out.nodes_.push_back(g.node(i));
        out.migs_.push_back(new_migs[i]);
        for (const auto& id : new_migs[i]) out.cand_vm_[id] = g.vm_of(id);
    }
    int n = out.node_count();
    out.adj_.assign(n, std::vector<char>(n, 0));
    for (int i = 0; i < g.node_count(); ++i) {
        if (!keep[i]) continue;
        for (int j : g.neighbors(i))
            if (keep[j]) out.adj_[remap[i]][remap[j]] = 1;
    }
    out.finish();

    // Reduce the clique set instead of re-running the enumeration.
    std::vector<std::vector<int>> reduced;
    for (const auto& c : cs.cliques) {
        std::vector<int> rc;
        for (int v : c)
            if (keep[v]) rc.push_back(remap[v]);
        if (!rc.empty()) reduced.push_back(std::move(rc));
    }
    canonicalize(reduced);
    // Subsumption: remnants that sit inside another remnant are not maximal.
    CliqueSet out_cs;
    for (size_t i = 0; i < reduced.size(); ++i) {
        bool subsumed = false;
        for (size_t j = 0; j < reduced.size() && !subsumed; ++j) {
            if (i == j || reduced[j].size() <= reduced[i].size()) continue;
            subsumed = std::includes(reduced[j].begin(), reduced[j].end(), reduced[i].begin(),
                                     reduced[i].end());
        }
        if (!subsumed) out_cs.cliques.push_back(reduced[i]);
    }
    return {std::move(out), std::move(out_cs)};
}

nlohmann::json cliques_to_json(const DepGraph& g, const CliqueSet& cs) {
    nlohmann::json j;
    j["cliques"] = cs.keyed(g);
    return j;
}

} // namespace migsim
