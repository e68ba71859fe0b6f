#include "migsim/migc.hpp"

#include <algorithm>
#include <stdexcept>

namespace migsim {

namespace {

// Membership count of the state's node keys across a family of node sets.
int incidence(const DepGraph& g, const SelectionState& state,
              const std::vector<std::vector<int>>& sets) {
    int hits = 0;
    for (const auto& key : state.node_keys) {
        int idx = g.index_of_key(key);
        if (idx < 0) continue; // pair already deleted from the graph
        for (const auto& s : sets)
            if (std::binary_search(s.begin(), s.end(), idx)) ++hits;
    }
    return hits;
}

} // namespace

double migc_initial(const CliqueSet& cliques_of_v,
                    const std::vector<std::vector<int>>& mis_of_v, const MigcConfig& cfg) {
    if (cliques_of_v.cliques.empty() || mis_of_v.empty())
        throw std::invalid_argument("migc_initial needs non-empty clique and MIS families");
    size_t max_c = 0, max_i = 0;
    for (const auto& c : cliques_of_v.cliques) max_c = std::max(max_c, c.size());
    for (const auto& s : mis_of_v) max_i = std::max(max_i, s.size());
    return cfg.kappa * static_cast<double>(max_c) / static_cast<double>(max_i);
}

double migind(const DepGraph& g, const SelectionState& state,
              const std::vector<std::vector<int>>& mis_of_v) {
    if (state.empty()) throw std::invalid_argument("migind needs a non-empty selection state");
    if (mis_of_v.empty()) throw std::invalid_argument("migind needs at least one MIS");
    int hits = incidence(g, state, mis_of_v);
    return static_cast<double>(hits) /
           (static_cast<double>(mis_of_v.size()) * static_cast<double>(state.size()));
}

double migcliq(const DepGraph& g, const SelectionState& state, const CliqueSet& cliques_of_v) {
    if (state.empty()) throw std::invalid_argument("migcliq needs a non-empty selection state");
    if (cliques_of_v.cliques.empty())
        throw std::invalid_argument("migcliq needs at least one clique");
    int hits = incidence(g, state, cliques_of_v.cliques);
    return static_cast<double>(hits) /
           (static_cast<double>(cliques_of_v.cliques.size()) * static_cast<double>(state.size()));
}

double migc_score(const DepGraph& g, const SelectionState& state, const CliqueSet& cliques_of_v,
                  const std::vector<std::vector<int>>& mis_of_v, double running_min_migind,
                  const MigcConfig& cfg) {
    if (state.empty()) return migc_initial(cliques_of_v, mis_of_v, cfg);
    double ind = migind(g, state, mis_of_v);
    double cliq = migcliq(g, state, cliques_of_v);
    if (ind == 0) {
        double fallback = running_min_migind > 0 ? running_min_migind : 1.0;
        return cliq + (1.0 / fallback) + 1.0;
    }
    return cliq + 1.0 / ind;
}

double interference(double normalized_exec, double migc, const MigcConfig& cfg) {
    return cfg.kappa_mig * normalized_exec * (1.0 + migc);
}

} // namespace migsim
