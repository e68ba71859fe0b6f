#pragma once

#include <map>
#include <string>
#include <vector>

#include "migsim/energy.hpp"
#include "migsim/placement.hpp"

namespace migsim {

enum class ObjectiveKind { load_balance, energy };

struct PolicyObjective {
    ObjectiveKind kind = ObjectiveKind::load_balance;
    double target = 0.5;    // target per-host utilization
    double band_low = 0.45; // accepted utilization range
    double band_high = 0.55;
    double epsilon = 0.0; // extra tolerance on the score itself
    EnergyModel energy;
};

struct PolicyConfig {
    std::string name = "sandpiper"; // sandpiper|ffd|iaware|lrmmt
    PolicyObjective objective;
    double underload_threshold = 0.0; // evacuate hosts below this (energy runs)
    double volume_clamp = 0.99;
    double iaware_w_exec = 0.5;
    double iaware_w_coloc = 0.5;
    int lr_window = 10;
    double lr_safety = 1.2;
};

// Per-host utilization samples, oldest first.
using UtilHistory = std::map<NodeId, std::vector<double>>;

struct CandidateMove {
    std::string vm;
    NodeId src;
    NodeId dst;
};

// The selection surface every policy exposes: ordered source hosts, ordered
// VM choices per source, and permitted destinations per VM.
struct PolicyCandidates {
    std::vector<NodeId> sources;
    std::map<NodeId, std::vector<std::string>> vms_per_source;
    std::map<std::string, std::vector<NodeId>> dsts_per_vm;

    bool empty() const;
    std::vector<CandidateMove> all_moves(const Placement& p) const;
};

// Sandpiper volume indicator; each dimension is clamped below 1.
double volume(double cpu, double net, double mem, double clamp = 0.99);

// Lower score is better for both objective kinds.
double objective_score(const DataCenter& dc, const Placement& p, const PolicyObjective& obj);

// True when the placement satisfies the management target (load balance:
// every managed host inside the band; energy: no such closed form, false).
bool objective_achieved(const DataCenter& dc, const Placement& p, const PolicyObjective& obj);

PolicyCandidates sandpiper_candidates(const DataCenter& dc, const Placement& p,
                                      const PolicyConfig& cfg);
PolicyCandidates ffd_candidate_view(const DataCenter& dc, const Placement& p,
                                    const PolicyConfig& cfg);
PolicyCandidates iaware_candidate_view(const DataCenter& dc, const Placement& p,
                                       const PolicyConfig& cfg);
PolicyCandidates lrmmt_candidate_view(const DataCenter& dc, const Placement& p,
                                      const UtilHistory& history, const PolicyConfig& cfg);

std::vector<CandidateMove> sandpiper_native_plan(const DataCenter& dc, Placement p,
                                                 const PolicyConfig& cfg);
std::vector<CandidateMove> ffd_candidates(const DataCenter& dc, Placement p,
                                          const PolicyConfig& cfg);
std::vector<CandidateMove> iaware_candidates(const DataCenter& dc, Placement p,
                                             const PolicyConfig& cfg);
std::vector<CandidateMove> lrmmt_candidates(const DataCenter& dc, Placement p,
                                            const UtilHistory& history, const PolicyConfig& cfg);

// Least-hit destination choice; ties to the lexicographically first host.
// The chosen host's counter is incremented.
NodeId hosthits_select(const std::vector<NodeId>& equivalent_destinations,
                       std::map<NodeId, int>& hit_counts);

// Least-squares extrapolation of the next sample over the trailing window;
// returns false when fewer than `window` samples exist.
bool lr_predict(const std::vector<double>& series, int window, double& predicted);

// Uniform dispatch used by the experiment driver.
PolicyCandidates policy_candidates(const DataCenter& dc, const Placement& p,
                                   const UtilHistory& history, const PolicyConfig& cfg);
std::vector<CandidateMove> policy_native_plan(const DataCenter& dc, const Placement& p,
                                              const UtilHistory& history,
                                              const PolicyConfig& cfg);

} // namespace migsim
