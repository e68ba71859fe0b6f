#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "migsim/topology.hpp"

namespace migsim {

struct MipVm {
    std::string id;
    NodeId initial_host;
    double weight = 0;            // load contribution
    std::vector<NodeId> allowed;  // permitted final hosts (includes staying put)
};

struct MipObjective {
    enum class Form { pairwise_band, score_band };
    Form form = Form::pairwise_band;
    double target = 0;  // score_band: |score - target| <= epsilon
    double epsilon = 0; // pairwise_band: max pairwise load gap
};

// Desk-scale instance of the placement selection model: final placements are
// scored by the sum of single-migration times plus, for each dependent pair
// of moved VMs, the sum of both times again.
struct MipInstance {
    std::vector<MipVm> vms;
    std::map<NodeId, double> host_capacity;
    std::map<NodeId, double> base_load; // load that never moves
    std::map<std::pair<std::string, NodeId>, double> exec_time;
    std::function<bool(const std::pair<NodeId, NodeId>&, const std::pair<NodeId, NodeId>&)>
        dependent;
    MipObjective objective;

    double exec(const std::string& vm, const NodeId& dst) const;
    std::map<NodeId, double> loads(const std::map<std::string, NodeId>& assignment) const;
    nlohmann::json to_json() const; // dependencies exported as explicit pair list
    static MipInstance from_json(const nlohmann::json& j);
};

using Assignment = std::map<std::string, NodeId>;

// Band score for the configured objective form (pairwise: max load gap).
double band_score(const MipInstance& inst, const Assignment& a);

bool feasible(const MipInstance& inst, const Assignment& a);

// Inter_single + Inter_multi of a feasible assignment.
double objective_value(const MipInstance& inst, const Assignment& a);

// Count of dependent moved pairs (the Inter_multi incidence structure).
int dependent_pair_count(const MipInstance& inst, const Assignment& a);

struct MipSolution {
    bool found = false;
    Assignment assignment;
    double value = 0;
};

// Global optimum by exhaustive search with capacity pruning. The search
// space guard rejects instances with more than ~1e7 assignments.
MipSolution solve_exhaustive(const MipInstance& inst);

} // namespace migsim
