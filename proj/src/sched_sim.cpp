#include "migsim/sched_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "migsim/log.hpp"

namespace migsim {

namespace {

// Best remaining path under current reservations: (bandwidth, arcs).
std::pair<int64_t, std::vector<int>> best_path(const DataCenter& dc, const PathSet& ps,
                                               const Reservations& res) {
    int64_t best = -1;
    std::vector<int> chosen;
    for (const auto& path : ps.paths) {
        int64_t bottleneck = std::numeric_limits<int64_t>::max();
        for (int a : path) {
            int64_t cap = dc.topo.arcs()[a].capacity_bps;
            auto it = res.find(a);
            if (it != res.end()) cap -= it->second;
            bottleneck = std::min(bottleneck, cap);
        }
        if (bottleneck > best) {
            best = bottleneck;
            chosen = path;
        }
    }
    int64_t nic = std::min(dc.topo.host(ps.src).nic_bandwidth_bps,
                           dc.topo.host(ps.dst).nic_bandwidth_bps);
    return {std::max<int64_t>(0, std::min(best, nic)), chosen};
}

} // namespace

Schedule plan_schedule(const std::vector<PlannedMigration>& plan, const DepGraph& g,
                       const DataCenter& dc, ScheduleMode mode) {
    Schedule s;
    s.mode = mode;
    if (plan.empty()) return s;

    std::vector<int> node_of(plan.size());
    for (size_t i = 0; i < plan.size(); ++i) {
        node_of[i] = g.index_of(plan[i].src, plan[i].dst);
        if (node_of[i] < 0)
            throw std::invalid_argument("migration " + plan[i].vm +
                                        " has no node in the dependency graph");
    }
    s.entries.resize(plan.size());

    if (mode == ScheduleMode::one_by_one) {
        double t = 0;
        for (size_t i = 0; i < plan.size(); ++i) {
            const auto& m = plan[i];
            auto [bw, path] = best_path(dc, dc.paths(m.src, m.dst), {});
            MigrationEstimate est = estimate_total(dc.vm(m.vm), static_cast<double>(bw),
                                                   dc.migration);
            s.entries[i] = {m.vm, m.src, m.dst, t, t + est.t_total_s, est, path};
            t += est.t_total_s;
        }
    } else {
        // Longest-first admission of pairwise-independent migrations; every
        // running migration holds its chosen path exclusively.
        std::vector<size_t> pending(plan.size());
        for (size_t i = 0; i < plan.size(); ++i) pending[i] = i;
        std::stable_sort(pending.begin(), pending.end(), [&](size_t a, size_t b) {
            double ta = plan[a].estimate.t_total_s, tb = plan[b].estimate.t_total_s;
            return ta != tb ? ta > tb : a < b;
        });
        std::vector<size_t> running;
        Reservations res;
        double now = 0;
        while (!pending.empty() || !running.empty()) {
            std::vector<size_t> still_pending;
            for (size_t idx : pending) {
                bool blocked = false;
                for (size_t r : running)
                    if (g.adjacent(node_of[idx], node_of[r]) || node_of[idx] == node_of[r])
                        blocked = true;
                if (!blocked) {
                    const auto& m = plan[idx];
                    auto [bw, path] = best_path(dc, dc.paths(m.src, m.dst), res);
                    if (bw > 0) {
                        MigrationEstimate est = estimate_total(dc.vm(m.vm),
                                                               static_cast<double>(bw),
                                                               dc.migration);
                        s.entries[idx] = {m.vm, m.src, m.dst, now, now + est.t_total_s, est, path};
                        for (int a : path) res[a] = dc.topo.arcs()[a].capacity_bps;
                        running.push_back(idx);
                        continue;
                    }
                }
                still_pending.push_back(idx);
            }
            pending = std::move(still_pending);
            if (running.empty()) {
                if (!pending.empty())
                    throw std::runtime_error("scheduler stalled with pending migrations");
                break;
            }
            double next = std::numeric_limits<double>::infinity();
            for (size_t r : running) next = std::min(next, s.entries[r].end_s);
            now = next;
            std::vector<size_t> still_running;
            for (size_t r : running) {
                if (s.entries[r].end_s <= now + 1e-12) {
                    for (int a : s.entries[r].reserved_path) res.erase(a);
                } else {
                    still_running.push_back(r);
                }
            }
            running = std::move(still_running);
        }
    }

    for (size_t i = 0; i < plan.size(); ++i)
        for (size_t j = i + 1; j < plan.size(); ++j)
            if (node_of[i] == node_of[j] || g.adjacent(node_of[i], node_of[j]))
                s.dependent_pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    return s;
}

ScheduleReport run_schedule(const Schedule& s, const Topology& t) {
    (void)t;
    ScheduleReport r;
    if (s.entries.empty()) return r;
    for (const auto& [i, j] : s.dependent_pairs) {
        const auto& a = s.entries[i];
        const auto& b = s.entries[j];
        if (a.start_s < b.end_s - 1e-9 && b.start_s < a.end_s - 1e-9)
            throw std::runtime_error("dependent migrations " + a.vm + " and " + b.vm +
                                     " overlap in time");
    }
    double first = std::numeric_limits<double>::infinity(), last = 0;
    for (const auto& e : s.entries) {
        first = std::min(first, e.start_s);
        last = std::max(last, e.end_s);
        r.sum_exec_time_s += e.estimate.t_total_s;
        r.total_downtime_s += e.estimate.downtime_s;
        r.total_transferred_bits += e.estimate.transferred_bits;
        r.per_migration.push_back(e.estimate);
    }
    r.total_migration_time_s = last - first;
    return r;
}

ScheduleMode selector_schedule_mode(const std::string& selector) {
    if (selector == "native" || selector == "one-by-one" || selector == "nomig")
        return ScheduleMode::one_by_one;
    if (selector == "native+sch" || selector == "hosthits" || selector == "camig")
        return ScheduleMode::concurrent_groups;
    throw std::invalid_argument(
        "unknown selector: " + selector +
        " (expected nomig|native|one-by-one|native+sch|hosthits|camig)");
}

namespace {

MigrationPlan wrap_native(const DataCenter& dc, const Placement& p,
                          const std::vector<CandidateMove>& moves) {
    MigrationPlan plan;
    Placement cur = p;
    for (const auto& m : moves) {
        int64_t bw = available_bandwidth(dc.topo, dc.paths(m.src, m.dst), {});
        if (bw <= 0) {
            log_warn("dropping native move " + m.vm + ": no bandwidth");
            continue;
        }
        MigrationEstimate est = estimate_total(dc.vm(m.vm), static_cast<double>(bw), dc.migration);
        plan.migrations.push_back({m.vm, m.src, m.dst, est});
        cur = cur.with_move(m.vm, m.dst);
    }
    plan.final_placement = cur;
    return plan;
}

// The policy's native loop with the destination decision replaced by the
// least-hit choice among objective-equivalent candidates.
MigrationPlan hosthits_plan(const DataCenter& dc, const Placement& initial,
                            const UtilHistory& history, const PolicyConfig& pcfg,
                            std::map<NodeId, int>& hit_counts) {
    Placement p = initial;
    std::vector<CandidateMove> moves;
    std::set<std::string> moved;
    for (size_t guard = 0; guard <= dc.vms.size(); ++guard) {
        PolicyCandidates view = policy_candidates(dc, p, history, pcfg);
        bool progressed = false;
        for (const auto& src : view.sources) {
            for (const auto& vm : view.vms_per_source[src]) {
                if (moved.count(vm)) continue;
                const auto& dsts = view.dsts_per_vm[vm];
                if (dsts.empty()) continue;
                double best = std::numeric_limits<double>::infinity();
                std::map<NodeId, double> score;
                for (const auto& d : dsts) {
                    double v = objective_score(dc, p.with_move(vm, d), pcfg.objective);
                    score[d] = v;
                    best = std::min(best, v);
                }
                std::vector<NodeId> equivalent;
                for (const auto& d : dsts)
                    if (score[d] <= best + 1e-12) equivalent.push_back(d);
                NodeId dst = hosthits_select(equivalent, hit_counts);
                moves.push_back({vm, src, dst});
                p = p.with_move(vm, dst);
                moved.insert(vm);
                progressed = true;
                break;
            }
            if (progressed) break;
        }
        if (!progressed) break;
    }
    return wrap_native(dc, initial, moves);
}

} // namespace

MigrationPlan plan_with_selector(const DataCenter& dc, const Placement& p,
                                 const UtilHistory& history, const std::string& selector,
                                 const PolicyConfig& policy, const CamigConfig& camig,
                                 std::map<NodeId, int>& hit_counts) {
    if (selector == "nomig") {
        MigrationPlan plan;
        plan.final_placement = p;
        plan.achieved_score = objective_score(dc, p, policy.objective);
        return plan;
    }
    if (selector == "native" || selector == "one-by-one" || selector == "native+sch") {
        MigrationPlan plan = wrap_native(dc, p, policy_native_plan(dc, p, history, policy));
        plan.achieved_score = objective_score(dc, plan.final_placement, policy.objective);
        return plan;
    }
    if (selector == "hosthits") {
        MigrationPlan plan = hosthits_plan(dc, p, history, policy, hit_counts);
        plan.achieved_score = objective_score(dc, plan.final_placement, policy.objective);
        return plan;
    }
    if (selector == "camig") return run_camig(p, dc, policy, history, camig);
    throw std::invalid_argument(
        "unknown selector: " + selector +
        " (expected nomig|native|one-by-one|native+sch|hosthits|camig)");
}

namespace {

// Switch energy accrues only while migrations transit: per-port wattage for
// each switch port on a reserved path plus the base draw whenever at least
// one migration crosses the switch.
double switch_energy_wh(const DataCenter& dc, const Schedule& s, const EnergyModel& em) {
    double port_seconds = 0;
    std::map<NodeId, std::vector<std::pair<double, double>>> busy;
    for (const auto& e : s.entries) {
        double dur = e.end_s - e.start_s;
        std::set<NodeId> touched;
        for (int a : e.reserved_path) {
            const Arc& arc = dc.topo.arcs()[a];
            if (dc.topo.switches().count(arc.from)) {
                port_seconds += dur;
                touched.insert(arc.from);
            }
            if (dc.topo.switches().count(arc.to)) {
                port_seconds += dur;
                touched.insert(arc.to);
            }
        }
        for (const auto& sw : touched) busy[sw].push_back({e.start_s, e.end_s});
    }
    double base_seconds = 0;
    for (auto& [sw, spans] : busy) {
        (void)sw;
        std::sort(spans.begin(), spans.end());
        double cur_start = spans[0].first, cur_end = spans[0].second;
        for (const auto& [b, e] : spans) {
            if (b > cur_end) {
                base_seconds += cur_end - cur_start;
                cur_start = b;
                cur_end = e;
            } else {
                cur_end = std::max(cur_end, e);
            }
        }
        base_seconds += cur_end - cur_start;
    }
    return (em.switch_port_w * port_seconds + em.switch_base_w * base_seconds) / 3600.0;
}

} // namespace

ExperimentReport run_experiment(const Scenario& sc) {
    DataCenter dc = sc.build_data_center();
    Placement placement = sc.initial_placement();
    auto traces = sc.traces(".");
    const int intervals = static_cast<int>(sc.horizon_s / sc.interval_s);
    if (intervals <= 0) throw std::invalid_argument("horizon shorter than one interval");

    ExperimentReport rep;
    UtilHistory history;
    std::map<NodeId, int> hit_counts;
    std::map<NodeId, int> oversub_streak;

    DataCenter now = dc; // per-interval demand view
    for (int k = 0; k < intervals; ++k) {
        // Demands for this interval.
        for (auto& [id, spec] : now.vms) {
            auto it = traces.find(id);
            if (it == traces.end()) continue;
            if (k >= static_cast<int>(it->second.samples.size()))
                throw std::runtime_error("trace underrun for vm " + id + " at interval " +
                                         std::to_string(k));
            spec.cpu_demand_mips = dc.vm(id).cpu_demand_mips * it->second.samples[k];
        }
        // Observe utilization before acting.
        for (const auto& h : now.managed_hosts)
            history[h].push_back(host_cpu_util(now, placement, h));

        MigrationPlan plan = plan_with_selector(now, placement, history, sc.selector, sc.policy,
                                                sc.camig, hit_counts);
        IntervalRow row;
        row.time_s = k * sc.interval_s;
        if (!plan.migrations.empty()) {
            std::vector<MigrationCandidate> cands;
            for (const auto& m : plan.migrations)
                cands.push_back({m.vm + ":" + m.src + "->" + m.dst, m.vm, m.src, m.dst});
            DepGraph g = build_dep_graph(cands, now.topo);
            Schedule sched = plan_schedule(plan.migrations, g, now,
                                           selector_schedule_mode(sc.selector));
            ScheduleReport sr = run_schedule(sched, now.topo);
            row.migrations_started = static_cast<int>(plan.migrations.size());
            row.total_migration_time_s = sr.total_migration_time_s;
            row.sum_exec_time_s = sr.sum_exec_time_s;
            row.downtime_s = sr.total_downtime_s;
            row.transferred_bits = sr.total_transferred_bits;
            row.energy_switch_wh = switch_energy_wh(now, sched, sc.energy);
            for (const auto& m : plan.migrations) placement = placement.with_move(m.vm, m.dst);
        }

        // Host energy over the interval with the post-migration placement.
        for (const auto& h : now.managed_hosts) {
            if (vms_on(now, placement, h).empty()) continue; // consolidated off
            double u = std::min(1.0, host_cpu_util(now, placement, h));
            row.energy_host_wh += sc.energy.host_power(u) * sc.interval_s / 3600.0;
        }

        // Workload accounting: one unit per VM per interval; oversubscribed
        // hosts stretch their tenants, and hosts oversubscribed for longer
        // than the patience window time their tenants out.
        for (const auto& h : now.managed_hosts) {
            auto tenants = vms_on(now, placement, h);
            if (tenants.empty()) continue;
            double util = host_cpu_util(now, placement, h);
            if (util > 1.0)
                oversub_streak[h] += 1;
            else
                oversub_streak[h] = 0;
            bool timed_out = oversub_streak[h] >= sc.timeout_patience_intervals;
            double stretch = std::max(1.0, util);
            for (size_t i = 0; i < tenants.size(); ++i) {
                row.workloads += 1;
                if (timed_out) {
                    row.timeouts += 1;
                    row.serve_time_incl_s += sc.interval_s * sc.timeout_penalty_factor;
                } else {
                    row.serve_time_incl_s += sc.interval_s * stretch;
                    row.serve_time_excl_s += sc.interval_s * stretch;
                }
            }
        }
        row.objective = objective_score(now, placement, sc.policy.objective);
        rep.intervals.push_back(row);

        rep.total_migrations += row.migrations_started;
        rep.sum_total_migration_time_s += row.total_migration_time_s;
        rep.sum_exec_time_s += row.sum_exec_time_s;
        rep.total_downtime_s += row.downtime_s;
        rep.total_transferred_bits += row.transferred_bits;
        rep.energy_host_wh += row.energy_host_wh;
        rep.energy_switch_wh += row.energy_switch_wh;
        rep.total_workloads += row.workloads;
        rep.total_timeouts += row.timeouts;
        rep.serve_time_incl_s += row.serve_time_incl_s;
        rep.serve_time_excl_s += row.serve_time_excl_s;
        rep.final_objective = row.objective;
    }
    rep.energy_total_wh = rep.energy_host_wh + rep.energy_switch_wh;
    return rep;
}

namespace {

// Fixed 9-significant-digit doubles keep report diffs reproducible.
double round9(double v) {
    if (v == 0 || !std::isfinite(v)) return v;
    std::ostringstream os;
    os.precision(9);
    os << v;
    return std::stod(os.str());
}

} // namespace

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["totals"] = {{"migrations", total_migrations},
                   {"sum_total_migration_time_s", round9(sum_total_migration_time_s)},
                   {"sum_exec_time_s", round9(sum_exec_time_s)},
                   {"downtime_s", round9(total_downtime_s)},
                   {"transferred_bits", round9(total_transferred_bits)},
                   {"energy_host_wh", round9(energy_host_wh)},
                   {"energy_switch_wh", round9(energy_switch_wh)},
                   {"energy_total_wh", round9(energy_total_wh)},
                   {"workloads", total_workloads},
                   {"timeouts", total_timeouts},
                   {"serve_time_incl_s", round9(serve_time_incl_s)},
                   {"serve_time_excl_s", round9(serve_time_excl_s)},
                   {"final_objective", round9(final_objective)}};
    j["intervals"] = nlohmann::json::array();
    for (const auto& r : intervals) {
        j["intervals"].push_back({{"time_s", round9(r.time_s)},
                                  {"migrations_started", r.migrations_started},
                                  {"total_migration_time_s", round9(r.total_migration_time_s)},
                                  {"sum_exec_time_s", round9(r.sum_exec_time_s)},
                                  {"downtime_s", round9(r.downtime_s)},
                                  {"transferred_bits", round9(r.transferred_bits)},
                                  {"energy_host_wh", round9(r.energy_host_wh)},
                                  {"energy_switch_wh", round9(r.energy_switch_wh)},
                                  {"workloads", r.workloads},
                                  {"timeouts", r.timeouts},
                                  {"serve_time_incl_s", round9(r.serve_time_incl_s)},
                                  {"serve_time_excl_s", round9(r.serve_time_excl_s)},
                                  {"objective", round9(r.objective)}});
    }
    return j;
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os.precision(9);
    os << "#schema=v1,time_s,migrations_started,total_migration_time_s,sum_exec_time_s,"
          "downtime_s,transferred_bits,energy_host_wh,energy_switch_wh,workloads,timeouts,"
          "serve_time_incl_s,serve_time_excl_s,objective\n";
    for (const auto& r : intervals) {
        os << r.time_s << "," << r.migrations_started << "," << r.total_migration_time_s << ","
           << r.sum_exec_time_s << "," << r.downtime_s << "," << r.transferred_bits << ","
           << r.energy_host_wh << "," << r.energy_switch_wh << "," << r.workloads << ","
           << r.timeouts << "," << r.serve_time_incl_s << "," << r.serve_time_excl_s << ","
           << r.objective << "\n";
    }
    return os.str();
}

} // namespace migsim
