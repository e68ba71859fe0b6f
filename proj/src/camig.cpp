#include "migsim/camig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "migsim/log.hpp"

namespace migsim {

namespace {

std::string candidate_id(const std::string& vm, const NodeId& src, const NodeId& dst) {
    return vm + ":" + src + "->" + dst;
}

} // namespace

nlohmann::json MigrationPlan::to_json() const {
    nlohmann::json j;
    j["migrations"] = nlohmann::json::array();
    for (const auto& m : migrations) {
        j["migrations"].push_back({{"vm", m.vm},
                                   {"src", m.src},
                                   {"dst", m.dst},
                                   {"t_total_s", m.estimate.t_total_s},
                                   {"t_mem_s", m.estimate.t_mem_s},
                                   {"rounds", m.estimate.rounds},
                                   {"downtime_s", m.estimate.downtime_s},
                                   {"transferred_bits", m.estimate.transferred_bits}});
    }
    j["achieved_score"] = achieved_score;
    j["final_placement"] = final_placement.vm_to_host;
    j["rounds"] = nlohmann::json::array();
    for (const auto& r : rounds) {
        nlohmann::json cj = nlohmann::json::array();
        for (const auto& c : r.candidates) {
            cj.push_back({{"vm", c.vm},
                          {"src", c.src},
                          {"dst", c.dst},
                          {"post_objective", c.post_objective},
                          {"normalized_exec", c.normalized_exec},
                          {"migc", c.migc},
                          {"interference", c.interference}});
        }
        j["rounds"].push_back({{"round", r.round_index},
                               {"best_objective", r.best_objective},
                               {"candidates", cj},
                               {"chosen_vm", r.chosen_vm},
                               {"chosen_src", r.chosen_src},
                               {"chosen_dst", r.chosen_dst}});
    }
    return j;
}

TopoWorld::TopoWorld(const DataCenter& dc, const PolicyConfig& policy, const UtilHistory& history,
                     const CamigConfig& cfg)
    : dc_(dc), policy_(policy), history_(history), cfg_(cfg) {}

PolicyCandidates TopoWorld::candidates(const Placement& p) const {
    return policy_candidates(dc_, p, history_, policy_);
}

double TopoWorld::objective(const Placement& p) const {
    return objective_score(dc_, p, policy_.objective);
}

bool TopoWorld::achieved(const Placement& p) const {
    return objective_achieved(dc_, p, policy_.objective);
}

bool TopoWorld::feasible_move(const Placement& p, const std::string& vm,
                              const NodeId& dst) const {
    return dst != p.host_of(vm) && can_place(dc_, p, vm, dst);
}

double TopoWorld::exec_time(const std::string& vm, const NodeId& src, const NodeId& dst) const {
    int64_t bw = available_bandwidth(dc_.topo, dc_.paths(src, dst), reservations_);
    if (bw <= 0) return std::numeric_limits<double>::infinity();
    return estimate_total(dc_.vm(vm), static_cast<double>(bw), dc_.migration).t_total_s;
}

MigrationEstimate TopoWorld::estimate(const std::string& vm, const NodeId& src,
                                      const NodeId& dst) const {
    int64_t bw = available_bandwidth(dc_.topo, dc_.paths(src, dst), reservations_);
    if (bw <= 0) throw std::runtime_error("no bandwidth available for " + vm);
    return estimate_total(dc_.vm(vm), static_cast<double>(bw), dc_.migration);
}

void TopoWorld::commit(const std::string& vm, const NodeId& src, const NodeId& dst) {
    (void)vm;
    if (!cfg_.reserve_during_planning) return;
    // Exclusive use of the best remaining path, mirroring the scheduler.
    const PathSet& ps = dc_.paths(src, dst);
    int64_t best = -1;
    const std::vector<int>* chosen = nullptr;
    for (const auto& path : ps.paths) {
        int64_t bottleneck = std::numeric_limits<int64_t>::max();
        for (int a : path) {
            int64_t cap = dc_.topo.arcs()[a].capacity_bps;
            auto it = reservations_.find(a);
            if (it != reservations_.end()) cap -= it->second;
            bottleneck = std::min(bottleneck, cap);
        }
        if (bottleneck > best) {
            best = bottleneck;
            chosen = &path;
        }
    }
    if (!chosen || best <= 0) return;
    for (int a : *chosen) reservations_[a] = dc_.topo.arcs()[a].capacity_bps;
}

DepGraph TopoWorld::build_graph(const std::vector<MigrationCandidate>& universe) const {
    return build_dep_graph(universe, dc_.topo);
}

std::map<CandidateKey, double> refresh_single_interference(const CamigWorld& world,
                                                           std::vector<CandidateMove>& moves) {
    std::map<CandidateKey, double> raw;
    std::vector<CandidateMove> kept;
    for (const auto& m : moves) {
        double t = world.exec_time(m.vm, m.src, m.dst);
        if (!std::isfinite(t)) {
            log_warn("dropping candidate " + candidate_id(m.vm, m.src, m.dst) +
                     ": no bandwidth available");
            continue;
        }
        raw[{m.vm, m.src, m.dst}] = t;
        kept.push_back(m);
    }
    moves = std::move(kept);
    if (raw.empty()) return {};
    return normalize_exec_times(raw);
}

std::pair<double, std::vector<CandidateMove>> get_mig_candidates(
    const Placement& p, const CamigWorld& world, const std::vector<CandidateMove>& moves,
    double delta) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, CandidateMove>> scored;
    for (const auto& m : moves) {
        double s = world.objective(p.with_move(m.vm, m.dst));
        scored.push_back({s, m});
        best = std::min(best, s);
    }
    std::vector<CandidateMove> within;
    for (const auto& [s, m] : scored)
        if (s <= best + delta) within.push_back(m);
    return {best, within};
}

MigrationPlan run_camig_core(const Placement& initial, CamigWorld& world,
                             const CamigConfig& cfg) {
    MigrationPlan plan;
    plan.final_placement = initial;
    plan.achieved_score = world.objective(initial);
    if (world.achieved(initial)) return plan; // stop (1) before any round

    // Step 1: dependency graph over every potential migration, cliques once.
    PolicyCandidates first = world.candidates(initial);
    std::vector<MigrationCandidate> universe;
    std::set<std::string> groups;
    for (const auto& m : first.all_moves(initial)) {
        universe.push_back({candidate_id(m.vm, m.src, m.dst), world.group_of(m.vm), m.src, m.dst});
        groups.insert(world.group_of(m.vm));
    }
    if (universe.empty()) return plan;
    DepGraph g = world.build_graph(universe);
    CliqueSet cliques = all_maximal_cliques(g);
    const int round_cap = static_cast<int>(groups.size());

    Placement current = initial;
    SelectionState state;
    std::set<std::string> moved_groups;
    double prev_score = plan.achieved_score;

    for (int x = 0; x < round_cap; ++x) { // stop (3)
        // Step 2: refresh interference, collect this round's best moves.
        std::vector<CandidateMove> moves;
        for (const auto& m : world.candidates(current).all_moves(current)) {
            if (moved_groups.count(world.group_of(m.vm))) continue;
            if (g.index_of(m.src, m.dst) < 0) continue; // pair pruned from the graph
            bool alive = false;
            for (const auto& id : g.migrations_of(g.index_of(m.src, m.dst)))
                if (id == candidate_id(m.vm, m.src, m.dst)) alive = true;
            if (!alive) continue;
            if (!world.feasible_move(current, m.vm, m.dst)) continue;
            moves.push_back(m);
        }
        auto norm_exec = refresh_single_interference(world, moves);
        if (moves.empty()) break;

        auto [best_score, round_moves] = get_mig_candidates(current, world, moves, cfg.delta);
        if (!(best_score < prev_score)) break; // stop (2): no improvement available

        // Step 3: score distinct nodes with MIGC, then pick the minimum
        // combined interference.
        std::map<int, CliqueSet> cliques_of;
        std::map<int, std::vector<std::vector<int>>> mis_of;
        std::map<int, double> migind_of;
        double running_min = 0;
        for (const auto& m : round_moves) {
            int v = g.index_of(m.src, m.dst);
            if (cliques_of.count(v)) continue;
            cliques_of[v] = node_cliques(g, cliques, v);
            mis_of[v] = node_maximal_independent_sets(g, v);
            if (!state.empty()) {
                double ind = migind(g, state, mis_of[v]);
                migind_of[v] = ind;
                if (ind > 0) running_min = running_min > 0 ? std::min(running_min, ind) : ind;
            }
        }
        std::map<int, double> migc_of;
        for (const auto& [v, cs] : cliques_of)
            migc_of[v] = migc_score(g, state, cs, mis_of[v], running_min, cfg.migc);

        SelectionRound round;
        round.round_index = x;
        round.best_objective = best_score;
        int chosen = -1;
        for (size_t i = 0; i < round_moves.size(); ++i) {
            const auto& m = round_moves[i];
            int v = g.index_of(m.src, m.dst);
            RoundCandidate rc;
            rc.vm = m.vm;
            rc.src = m.src;
            rc.dst = m.dst;
            rc.post_objective = world.objective(current.with_move(m.vm, m.dst));
            rc.normalized_exec = norm_exec.at({m.vm, m.src, m.dst});
            rc.migc = migc_of.at(v);
            rc.interference = interference(rc.normalized_exec, rc.migc, cfg.migc);
            round.candidates.push_back(rc);
            if (chosen < 0) {
                chosen = static_cast<int>(i);
                continue;
            }
            const auto& cb = round.candidates[chosen];
            const auto& cc = round.candidates[i];
            if (std::tie(cc.interference, cc.normalized_exec, cc.vm, cc.dst) <
                std::tie(cb.interference, cb.normalized_exec, cb.vm, cb.dst))
                chosen = static_cast<int>(i);
        }
        const CandidateMove& pick = round_moves[chosen];
        round.chosen_vm = pick.vm;
        round.chosen_src = pick.src;
        round.chosen_dst = pick.dst;
        plan.rounds.push_back(round);

        PlannedMigration pm{pick.vm, pick.src, pick.dst,
                            world.estimate(pick.vm, pick.src, pick.dst)};
        plan.migrations.push_back(pm);
        world.commit(pick.vm, pick.src, pick.dst);

        int node = g.index_of(pick.src, pick.dst);
        state.push(candidate_id(pick.vm, pick.src, pick.dst), g.node(node).key());
        std::tie(g, cliques) =
            update_dep_graph(g, cliques, candidate_id(pick.vm, pick.src, pick.dst), node);

        current = current.with_move(pick.vm, pick.dst);
        moved_groups.insert(world.group_of(pick.vm));
        prev_score = world.objective(current);
        if (world.achieved(current)) break; // stop (1)
    }

    plan.final_placement = current;
    plan.achieved_score = world.objective(current);
    return plan;
}

MigrationPlan run_camig(const Placement& initial, const DataCenter& dc,
                        const PolicyConfig& policy, const UtilHistory& history,
                        const CamigConfig& cfg) {
    TopoWorld world(dc, policy, history, cfg);
    return run_camig_core(initial, world, cfg);
}

} // namespace migsim
