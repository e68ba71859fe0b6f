#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "migsim/topology.hpp"

namespace migsim {

// One potential migration. Candidates sharing a vm are mutually exclusive:
// selecting one invalidates the others (a VM moves at most once per plan).
struct MigrationCandidate {
    std::string id;
    std::string vm;
    NodeId src;
    NodeId dst;
};

struct SrcDstNode {
    NodeId src;
    NodeId dst;
    PathSet path_set; // empty for abstract graphs

    std::string key() const { return src + "->" + dst; }
};

// Undirected resource-dependency graph over src-dst pair nodes. Nodes are
// kept sorted by (src, dst) so enumeration order is reproducible.
class DepGraph {
public:
    DepGraph() = default;

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const SrcDstNode& node(int i) const { return nodes_.at(i); }
    const std::vector<SrcDstNode>& nodes() const { return nodes_; }
    bool adjacent(int i, int j) const { return adj_.at(i).at(j) != 0; }
    const std::vector<int>& neighbors(int i) const { return nbrs_.at(i); }
    int degree(int i) const { return static_cast<int>(nbrs_.at(i).size()); }
    int edge_count() const;

    // -1 when no node carries that (src, dst) pair.
    int index_of(const NodeId& src, const NodeId& dst) const;
    int index_of_key(const std::string& key) const;

    const std::vector<std::string>& migrations_of(int i) const { return migs_.at(i); }
    const std::string& vm_of(const std::string& candidate_id) const;
    int node_of_candidate(const std::string& candidate_id) const;

    nlohmann::json to_json() const;

    friend DepGraph build_dep_graph(
        const std::vector<MigrationCandidate>& candidates,
        const std::function<bool(const SrcDstNode&, const SrcDstNode&)>& dependent);
    friend DepGraph build_dep_graph(const std::vector<MigrationCandidate>& candidates,
                                    const Topology& t);
    friend std::pair<DepGraph, struct CliqueSet> update_dep_graph(
        const DepGraph& g, const struct CliqueSet& cs, const std::string& selected,
        int node_index);

private:
    std::vector<SrcDstNode> nodes_;
    std::vector<std::vector<char>> adj_;
    std::vector<std::vector<int>> nbrs_;
    std::vector<std::vector<std::string>> migs_;
    std::map<std::string, int> index_;
    std::map<std::string, std::string> cand_vm_;
    std::map<std::string, int> cand_node_;

    void finish(); // derive nbrs_/index_ after nodes_/adj_/migs_ are set
};

struct CliqueSet {
    std::vector<std::vector<int>> cliques; // each sorted; list sorted lexicographically

    // Canonical pair-key form, independent of node indexing.
    std::vector<std::vector<std::string>> keyed(const DepGraph& g) const;
};

// Resource dependency between two src-dst pairs: shared source interface,
// shared destination interface, or insufficient residual path bandwidth for
// either side once the other's achievable rate crosses their shared links.
bool is_dependent(const SrcDstNode& u, const SrcDstNode& v, const Topology& t);

// Dependency-graph build from candidate migrations; pairs are grouped into
// one node per (src, dst) and edges added by pairwise dependency test.
DepGraph build_dep_graph(const std::vector<MigrationCandidate>& candidates, const Topology& t);

// Same, with an injected dependency predicate (abstract graphs, tests).
DepGraph build_dep_graph(
    const std::vector<MigrationCandidate>& candidates,
    const std::function<bool(const SrcDstNode&, const SrcDstNode&)>& dependent);

// Removal order by repeated minimum degree (ties to the smallest node id);
// second member is the degeneracy: the max degree seen at removal time.
std::pair<std::vector<int>, int> degeneracy_order(const DepGraph& g);

// Bron-Kerbosch over the degeneracy ordering with pivoting inside.
CliqueSet all_maximal_cliques(const DepGraph& g);

// Subset of cs containing node v.
CliqueSet node_cliques(const DepGraph& g, const CliqueSet& cs, int v);

// All maximal independent sets containing v: drop N[v], then enumerate the
// maximal cliques of the complement of the remainder (max-degree pivot).
std::vector<std::vector<int>> node_maximal_independent_sets(const DepGraph& g, int v);

// Applies a selection: the chosen candidate and every other candidate of the
// same vm disappear; nodes with empty migration lists leave the graph and the
// clique set is reduced in place (per-clique vertex removal + subsumption),
// which yields exactly the maximal cliques of the reduced graph.
std::pair<DepGraph, CliqueSet> update_dep_graph(const DepGraph& g, const CliqueSet& cs,
                                                const std::string& selected, int node_index);

nlohmann::json cliques_to_json(const DepGraph& g, const CliqueSet& cs);

} // namespace migsim
