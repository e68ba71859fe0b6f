#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "migsim/dep_graph.hpp"
#include "migsim/migc.hpp"
#include "migsim/placement.hpp"
#include "migsim/policies.hpp"

namespace migsim {

struct CamigConfig {
    MigcConfig migc;
    double delta = 0.0;                  // objective tolerance when gathering a round's candidates
    bool reserve_during_planning = true; // earlier selections reduce later bandwidth estimates
};

struct PlannedMigration {
    std::string vm;
    NodeId src;
    NodeId dst;
    MigrationEstimate estimate;
};

struct RoundCandidate {
    std::string vm;
    NodeId src;
    NodeId dst;
    double post_objective = 0;
    double normalized_exec = 0;
    double migc = 0;
    double interference = 0;
};

struct SelectionRound {
    int round_index = 0;
    double best_objective = 0;
    std::vector<RoundCandidate> candidates;
    std::string chosen_vm;
    NodeId chosen_src;
    NodeId chosen_dst;
};

struct MigrationPlan {
    std::vector<PlannedMigration> migrations;
    Placement final_placement;
    double achieved_score = 0;
    std::vector<SelectionRound> rounds;

    nlohmann::json to_json() const;
};

// Everything the selection loop needs from its surroundings. The topology
// implementation is the production path; tests plug in synthetic worlds.
class CamigWorld {
public:
    virtual ~CamigWorld() = default;
    virtual PolicyCandidates candidates(const Placement& p) const = 0;
    virtual double objective(const Placement& p) const = 0;
    virtual bool achieved(const Placement& p) const = 0;
    virtual bool feasible_move(const Placement& p, const std::string& vm,
                               const NodeId& dst) const = 0;
    virtual double exec_time(const std::string& vm, const NodeId& src, const NodeId& dst) const = 0;
    virtual MigrationEstimate estimate(const std::string& vm, const NodeId& src,
                                       const NodeId& dst) const = 0;
    virtual void commit(const std::string& vm, const NodeId& src, const NodeId& dst) = 0;
    virtual DepGraph build_graph(const std::vector<MigrationCandidate>& universe) const = 0;
    // Candidates of the same group exclude each other once one is selected.
    virtual std::string group_of(const std::string& vm) const { return vm; }
};

// Policy-backed world over a physical topology.
class TopoWorld : public CamigWorld {
public:
    TopoWorld(const DataCenter& dc, const PolicyConfig& policy, const UtilHistory& history,
              const CamigConfig& cfg);

    PolicyCandidates candidates(const Placement& p) const override;
    double objective(const Placement& p) const override;
    bool achieved(const Placement& p) const override;
    bool feasible_move(const Placement& p, const std::string& vm, const NodeId& dst) const override;
    double exec_time(const std::string& vm, const NodeId& src, const NodeId& dst) const override;
    MigrationEstimate estimate(const std::string& vm, const NodeId& src,
                               const NodeId& dst) const override;
    void commit(const std::string& vm, const NodeId& src, const NodeId& dst) override;
    DepGraph build_graph(const std::vector<MigrationCandidate>& universe) const override;

    const Reservations& reservations() const { return reservations_; }

private:
    const DataCenter& dc_;
    const PolicyConfig& policy_;
    const UtilHistory& history_;
    CamigConfig cfg_;
    Reservations reservations_;
};

// One scored round: best objective over all feasible moves, and every move
// whose post-move objective sits within delta of it.
std::pair<double, std::vector<CandidateMove>> get_mig_candidates(
    const Placement& p, const CamigWorld& world, const std::vector<CandidateMove>& moves,
    double delta);

// Fresh execution-time estimates under current reservations, min-max
// normalized across the round. Moves with no usable bandwidth are dropped.
std::map<CandidateKey, double> refresh_single_interference(const CamigWorld& world,
                                                           std::vector<CandidateMove>& moves);

// Algorithm core: iterative concurrency-aware selection with the three stop
// conditions (objective reached, no improvement, round cap at the number of
// distinct candidate VMs).
MigrationPlan run_camig_core(const Placement& initial, CamigWorld& world,
                             const CamigConfig& cfg);

// Production entry point: plugs the policy's candidate surface and objective
// into the selection loop over the data-center topology.
MigrationPlan run_camig(const Placement& initial, const DataCenter& dc,
                        const PolicyConfig& policy, const UtilHistory& history,
                        const CamigConfig& cfg);

} // namespace migsim
