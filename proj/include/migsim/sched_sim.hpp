#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "migsim/camig.hpp"
#include "migsim/dep_graph.hpp"
#include "migsim/energy.hpp"
#include "migsim/placement.hpp"
#include "migsim/policies.hpp"
#include "migsim/trace_io.hpp"

namespace migsim {

enum class ScheduleMode { one_by_one, concurrent_groups };

struct ScheduleEntry {
    std::string vm;
    NodeId src;
    NodeId dst;
    double start_s = 0;
    double end_s = 0;
    MigrationEstimate estimate;
    std::vector<int> reserved_path; // arcs held exclusively while running
};

struct Schedule {
    ScheduleMode mode = ScheduleMode::concurrent_groups;
    std::vector<ScheduleEntry> entries;
    std::vector<std::pair<int, int>> dependent_pairs; // entry indices
};

struct ScheduleReport {
    double total_migration_time_s = 0; // first start to last end
    double sum_exec_time_s = 0;
    double total_downtime_s = 0;
    double total_transferred_bits = 0;
    std::vector<MigrationEstimate> per_migration;
};

// Greedy independent-set batching: larger migrations start first, every
// completion admits newly independent pending migrations, and each running
// migration holds one network path exclusively.
Schedule plan_schedule(const std::vector<PlannedMigration>& plan, const DepGraph& g,
                       const DataCenter& dc, ScheduleMode mode);

// Replays a schedule, enforcing that dependent entries never overlap.
ScheduleReport run_schedule(const Schedule& s, const Topology& t);

struct IntervalRow {
    double time_s = 0;
    int migrations_started = 0;
    double total_migration_time_s = 0;
    double sum_exec_time_s = 0;
    double downtime_s = 0;
    double transferred_bits = 0;
    double energy_host_wh = 0;
    double energy_switch_wh = 0;
    int workloads = 0;
    int timeouts = 0;
    double serve_time_incl_s = 0;
    double serve_time_excl_s = 0;
    double objective = 0;
};

struct ExperimentReport {
    std::vector<IntervalRow> intervals;
    int total_migrations = 0;
    double sum_total_migration_time_s = 0;
    double sum_exec_time_s = 0;
    double total_downtime_s = 0;
    double total_transferred_bits = 0;
    double energy_host_wh = 0;
    double energy_switch_wh = 0;
    double energy_total_wh = 0;
    int total_workloads = 0;
    int total_timeouts = 0;
    double serve_time_incl_s = 0;
    double serve_time_excl_s = 0;
    double final_objective = 0;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

// Plan under a selector: nomig (empty), native / one-by-one (the policy's own
// selection), native+sch (same selection, concurrent schedule), hosthits
// (least-hit destination among objective-equivalent ones), camig.
MigrationPlan plan_with_selector(const DataCenter& dc, const Placement& p,
                                 const UtilHistory& history, const std::string& selector,
                                 const PolicyConfig& policy, const CamigConfig& camig,
                                 std::map<NodeId, int>& hit_counts);

ScheduleMode selector_schedule_mode(const std::string& selector);

// Trace-driven monitoring loop: per interval, refresh demands, invoke the
// policy + selector, schedule the plan, and account migration cost, energy,
// workload serve time, and timeouts.
ExperimentReport run_experiment(const Scenario& sc);

} // namespace migsim
