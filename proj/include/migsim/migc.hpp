#pragma once

#include <string>
#include <vector>

#include "migsim/dep_graph.hpp"

namespace migsim {

struct MigcConfig {
    double kappa = 1.0;     // first-round normalization coefficient
    double kappa_mig = 1.0; // single-overhead normalization coefficient
};

// Migrations selected so far, in order. Node keys stay in the state even
// after update_dep_graph removes the pair from the graph; incidence against
// later cliques/MISs is tested by pair identity.
struct SelectionState {
    std::vector<std::string> migration_ids;
    std::vector<std::string> node_keys;

    bool empty() const { return migration_ids.empty(); }
    size_t size() const { return migration_ids.size(); }
    void push(const std::string& mig, const std::string& node_key) {
        migration_ids.push_back(mig);
        node_keys.push_back(node_key);
    }
};

// First-round concurrency score: kappa * max|C^v| / max|I^v|.
double migc_initial(const CliqueSet& cliques_of_v,
                    const std::vector<std::vector<int>>& mis_of_v, const MigcConfig& cfg);

// Fraction of (selected node, MIS of v) memberships, in [0,1].
double migind(const DepGraph& g, const SelectionState& state,
              const std::vector<std::vector<int>>& mis_of_v);

// Fraction of (selected node, maximal clique of v) memberships, in [0,1].
double migcliq(const DepGraph& g, const SelectionState& state, const CliqueSet& cliques_of_v);

// MIGC = MIGCliq + 1/MIGInd; an empty state falls back to migc_initial and a
// zero MIGInd is charged (1 / running_min_migind) + 1 instead of dividing,
// where running_min_migind is the round's smallest nonzero MIGInd seen so far
// (1 when none has been seen yet).
double migc_score(const DepGraph& g, const SelectionState& state, const CliqueSet& cliques_of_v,
                  const std::vector<std::vector<int>>& mis_of_v, double running_min_migind,
                  const MigcConfig& cfg);

// Combined per-candidate interference: kappa_mig * exec * (1 + migc).
double interference(double normalized_exec, double migc, const MigcConfig& cfg);

} // namespace migsim
