#include <doctest.h>

#include <nlohmann/json.hpp>

#include "migsim/camig.hpp"
#include "migsim/rng.hpp"
#include "support/consolidation_case.hpp"
#include "support/instance_world.hpp"

using namespace migsim;
using namespace migsim::testing;

namespace {

// Small load-balancing instance with uniform VM weights: greedy single-move
// descent always reaches the band when it is reachable at all.
MipInstance uniform_lb_instance(SplitMix64& rng, int hosts, int vms) {
    MipInstance inst;
    std::vector<NodeId> ids;
    for (int h = 0; h < hosts; ++h) {
        ids.push_back("H" + std::to_string(h));
        inst.host_capacity[ids.back()] = 10.0;
    }
    double w = rng.next_double(0.08, 0.2);
    for (int v = 0; v < vms; ++v) {
        MipVm vm;
        vm.id = "v" + std::to_string(v);
        vm.initial_host = ids[rng.next_below(static_cast<uint64_t>(hosts / 2 + 1))];
        vm.weight = w;
        vm.allowed = ids;
        for (const auto& h : ids) inst.exec_time[{vm.id, h}] = rng.next_double(0.05, 1.0);
        inst.vms.push_back(vm);
    }
    inst.objective.form = MipObjective::Form::pairwise_band;
    inst.objective.epsilon = w + 1e-9;
    uint64_t salt = rng.next_u64();
    inst.dependent = [salt](const std::pair<NodeId, NodeId>& a,
                            const std::pair<NodeId, NodeId>& b) {
        if (a.first == b.first || a.second == b.second) return true;
        if (a.first == b.second && a.second == b.first) return true;
        std::hash<std::string> h;
        return ((h(std::min(a, b).first + std::min(a, b).second + std::max(a, b).first +
                   std::max(a, b).second) ^
                 salt) &
                7) == 0;
    };
    return inst;
}

} // namespace

TEST_CASE("camig selects the dependency-free consolidation (M2)") {
    ConsolidationCase c = make_consolidation_case();
    ConsolidationWorld world(c);
    CamigConfig cfg;
    MigrationPlan plan = run_camig_core(c.initial, world, cfg);
    REQUIRE(plan.migrations.size() == 2);
    CHECK(plan.migrations[0].vm == "vmA");
    CHECK(plan.migrations[0].dst == "H3");
    CHECK(plan.migrations[1].vm == "vmB2");
    CHECK(plan.migrations[1].dst == "H1");
    CHECK(plan.achieved_score == 0);
    CHECK(plan.rounds.size() == 2);
}

TEST_CASE("single candidate per round degenerates to the native selection") {
    SplitMix64 rng(5);
    MipInstance inst;
    inst.host_capacity = {{"A", 10.0}, {"B", 10.0}};
    inst.vms.push_back({"v0", "A", 0.5, {"B"}});
    inst.exec_time[{"v0", "B"}] = 0.4;
    inst.objective.form = MipObjective::Form::pairwise_band;
    inst.objective.epsilon = 0.55;
    inst.dependent = [](const auto&, const auto&) { return false; };
    (void)rng;
    InstanceWorld world(inst);
    CamigConfig cfg;
    Placement init = InstanceWorld::initial_placement(inst);
    MigrationPlan plan = run_camig_core(init, world, cfg);
    REQUIRE(plan.migrations.size() == 1);
    CHECK(plan.migrations[0].vm == "v0");
    CHECK(plan.migrations[0].dst == "B");
}

TEST_CASE("objective already achieved yields an empty plan") {
    MipInstance inst;
    inst.host_capacity = {{"A", 10.0}, {"B", 10.0}};
    inst.vms.push_back({"v0", "A", 0.5, {"A", "B"}});
    inst.vms.push_back({"v1", "B", 0.5, {"A", "B"}});
    for (const auto& h : {"A", "B"}) {
        inst.exec_time[{"v0", h}] = 0.2;
        inst.exec_time[{"v1", h}] = 0.2;
    }
    inst.objective.form = MipObjective::Form::pairwise_band;
    inst.objective.epsilon = 0.1;
    inst.dependent = [](const auto&, const auto&) { return false; };
    InstanceWorld world(inst);
    CamigConfig cfg;
    MigrationPlan plan = run_camig_core(InstanceWorld::initial_placement(inst), world, cfg);
    CHECK(plan.migrations.empty());
    CHECK(plan.achieved_score == doctest::Approx(0.0));
}

TEST_CASE("get_mig_candidates honors the tolerance") {
    MipInstance inst;
    inst.host_capacity = {{"A", 10.0}, {"B", 10.0}, {"C", 10.0}};
    inst.vms.push_back({"v0", "A", 0.6, {"A", "B", "C"}});
    for (const auto& h : {"A", "B", "C"}) inst.exec_time[{"v0", h}] = 0.5;
    inst.objective.form = MipObjective::Form::pairwise_band;
    inst.objective.epsilon = 0.1;
    inst.dependent = [](const auto&, const auto&) { return false; };
    InstanceWorld world(inst);
    Placement p = InstanceWorld::initial_placement(inst);

    std::vector<CandidateMove> moves{{"v0", "A", "B"}, {"v0", "A", "C"}};
    auto [best, within0] = get_mig_candidates(p, world, moves, 0.0);
    CHECK(best == doctest::Approx(0.6)); // the moved VM makes one host 0.6
    CHECK(within0.size() == 2);          // both moves score identically

    auto [b2, all] = get_mig_candidates(p, world, moves, 1e9);
    (void)b2;
    CHECK(all.size() == 2);
}

TEST_CASE("plan feasibility, round cap, and determinism on random instances") {
    SplitMix64 rng(2025);
    for (int trial = 0; trial < 25; ++trial) {
        int hosts = 3 + static_cast<int>(rng.next_below(4));
        int vms = 4 + static_cast<int>(rng.next_below(5));
        MipInstance inst = uniform_lb_instance(rng, hosts, vms);
        InstanceWorld world(inst);
        CamigConfig cfg;
        Placement init = InstanceWorld::initial_placement(inst);
        MigrationPlan plan = run_camig_core(init, world, cfg);

        // Stop condition (3): never more rounds than candidate VMs.
        CHECK(plan.migrations.size() <= inst.vms.size());

        // No VM appears twice; every prefix stays capacity-feasible.
        std::set<std::string> seen;
        Placement cur = init;
        for (const auto& m : plan.migrations) {
            CHECK(seen.insert(m.vm).second);
            auto loads = inst.loads(cur.with_move(m.vm, m.dst).vm_to_host);
            for (const auto& [h, l] : loads) CHECK(l <= inst.host_capacity.at(h) + 1e-9);
            cur = cur.with_move(m.vm, m.dst);
        }
        CHECK(cur.vm_to_host == plan.final_placement.vm_to_host);

        // Determinism: identical inputs give identical plans.
        InstanceWorld world2(inst);
        MigrationPlan plan2 = run_camig_core(init, world2, cfg);
        REQUIRE(plan.migrations.size() == plan2.migrations.size());
        for (size_t i = 0; i < plan.migrations.size(); ++i) {
            CHECK(plan.migrations[i].vm == plan2.migrations[i].vm);
            CHECK(plan.migrations[i].dst == plan2.migrations[i].dst);
        }
    }
}

TEST_CASE("equal-cost candidates never lose to a larger MIGC") {
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 15; ++trial) {
        MipInstance inst = uniform_lb_instance(rng, 4, 6);
        InstanceWorld world(inst);
        CamigConfig cfg;
        MigrationPlan plan = run_camig_core(InstanceWorld::initial_placement(inst), world, cfg);
        for (const auto& round : plan.rounds) {
            const RoundCandidate* chosen = nullptr;
            for (const auto& c : round.candidates)
                if (c.vm == round.chosen_vm && c.dst == round.chosen_dst) chosen = &c;
            REQUIRE(chosen != nullptr);
            for (const auto& c : round.candidates) {
                if (c.normalized_exec == chosen->normalized_exec)
                    CHECK(chosen->migc <= c.migc + 1e-12);
                CHECK(chosen->interference <= c.interference + 1e-12);
            }
        }
    }
}

TEST_CASE("improving objective each round (stop condition 2 as stated)") {
    SplitMix64 rng(909);
    for (int trial = 0; trial < 10; ++trial) {
        MipInstance inst = uniform_lb_instance(rng, 4, 7);
        InstanceWorld world(inst);
        CamigConfig cfg;
        Placement init = InstanceWorld::initial_placement(inst);
        MigrationPlan plan = run_camig_core(init, world, cfg);
        double prev = world.objective(init);
        Placement cur = init;
        for (const auto& m : plan.migrations) {
            cur = cur.with_move(m.vm, m.dst);
            double now = world.objective(cur);
            CHECK(now < prev + 1e-12);
            prev = now;
        }
    }
}

TEST_CASE("plan JSON carries the per-round trace") {
    ConsolidationCase c = make_consolidation_case();
    ConsolidationWorld world(c);
    CamigConfig cfg;
    MigrationPlan plan = run_camig_core(c.initial, world, cfg);
    auto j = plan.to_json();
    CHECK(j.contains("rounds"));
    CHECK(j["rounds"].size() == 2);
    CHECK(j["migrations"].size() == 2);
    CHECK(j["rounds"][0].contains("candidates"));
    CHECK(j["rounds"][0]["candidates"].size() >= 1);
}
