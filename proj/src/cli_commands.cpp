#include "migsim/cli_commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "migsim/camig.hpp"
#include "migsim/log.hpp"
#include "migsim/mip_oracle.hpp"
#include "migsim/sched_sim.hpp"

namespace migsim {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

DataCenter demand_view(const DataCenter& dc,
                       const std::map<std::string, UtilizationTrace>& traces, int k) {
    DataCenter now = dc;
    for (auto& [id, spec] : now.vms) {
        auto it = traces.find(id);
        if (it == traces.end()) continue;
        if (k >= static_cast<int>(it->second.samples.size()))
            throw std::runtime_error("trace underrun for vm " + id);
        spec.cpu_demand_mips = dc.vm(id).cpu_demand_mips * it->second.samples[k];
    }
    return now;
}

} // namespace

Scenario resolve_scenario(const std::string& scenario_path, const SynthSpec& synth,
                          uint64_t seed, const std::string& selector_override) {
    Scenario sc;
    if (!scenario_path.empty()) {
        sc = load_scenario(scenario_path);
    } else if (synth.kind == "lb") {
        sc = synth_lb_scenario(seed, synth.multiplier);
    } else if (synth.kind == "energy") {
        sc = synth_energy_scenario(seed, synth.hosts, synth.vms, synth.horizon_s);
    } else {
        throw std::invalid_argument("no scenario: pass --scenario FILE or --synth lb|energy");
    }
    if (!selector_override.empty()) sc.selector = selector_override;
    selector_schedule_mode(sc.selector); // validates the name early
    return sc;
}

int cmd_topo(int k, int64_t link_bw_bps, const std::string& out_path) {
    Topology t;
    try {
        HostSpec spec;
        spec.cpu_total_mips = 160000;
        spec.cores = 16;
        spec.memory_bytes = 64LL * 1'000'000'000;
        spec.storage_bytes = 1000LL * 1'000'000'000;
        spec.nic_bandwidth_bps = link_bw_bps;
        t = build_fat_tree(k, link_bw_bps, spec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::string body = t.to_json().dump(2) + "\n";
    if (out_path.empty())
        std::cout << body;
    else
        write_file(out_path, body);
    return 0;
}

int cmd_plan(const std::string& scenario_path, const SynthSpec& synth, uint64_t seed,
             const std::string& selector, const std::string& out_dir) {
    Scenario sc;
    DataCenter dc;
    Placement initial;
    std::map<std::string, UtilizationTrace> traces;
    try {
        sc = resolve_scenario(scenario_path, synth, seed, selector);
        dc = sc.build_data_center();
        initial = sc.initial_placement();
        traces = sc.traces(".");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        DataCenter now = demand_view(dc, traces, 0);
        UtilHistory history;
        for (const auto& h : now.managed_hosts)
            history[h].push_back(host_cpu_util(now, initial, h));
        std::map<NodeId, int> hits;
        MigrationPlan plan =
            plan_with_selector(now, initial, history, sc.selector, sc.policy, sc.camig, hits);
        std::string body = plan.to_json().dump(2) + "\n";
        if (out_dir.empty())
            std::cout << body;
        else
            write_file(out_dir + "/plan.json", body);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_run(const std::string& scenario_path, const SynthSpec& synth, uint64_t seed,
            const std::string& selector, const std::string& out_dir,
            const std::vector<std::string>& formats) {
    Scenario sc;
    try {
        sc = resolve_scenario(scenario_path, synth, seed, selector);
        for (const auto& f : formats)
            if (f != "json" && f != "csv")
                throw std::invalid_argument("unknown format: " + f + " (expected json|csv)");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        ExperimentReport rep = run_experiment(sc);
        bool want_json = formats.empty() ||
                         std::find(formats.begin(), formats.end(), "json") != formats.end();
        bool want_csv = formats.empty() ||
                        std::find(formats.begin(), formats.end(), "csv") != formats.end();
        if (out_dir.empty()) {
            if (want_json) std::cout << rep.to_json().dump(2) << "\n";
            if (want_csv) std::cout << rep.to_csv();
        } else {
            if (want_json) write_file(out_dir + "/report.json", rep.to_json().dump(2) + "\n");
            if (want_csv) write_file(out_dir + "/report.csv", rep.to_csv());
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_compare(const std::string& scenario_path, const SynthSpec& synth,
                const std::vector<std::string>& selectors, int seeds, uint64_t base_seed,
                const std::string& out_dir) {
    try {
        if (seeds <= 0) throw std::invalid_argument("--seeds must be positive");
        if (selectors.empty()) throw std::invalid_argument("--selectors must not be empty");
        for (const auto& s : selectors) selector_schedule_mode(s);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::ostringstream csv;
        csv.precision(9);
        csv << "#schema=v1,selector,seed,migrations,total_migration_time_s,sum_exec_time_s,"
               "downtime_s,final_objective\n";
        for (const auto& sel : selectors) {
            double sum_tmt = 0, sum_dt = 0, sum_obj = 0;
            for (int i = 0; i < seeds; ++i) {
                Scenario sc = resolve_scenario(scenario_path, synth, base_seed + i, sel);
                ExperimentReport rep = run_experiment(sc);
                csv << sel << "," << (base_seed + i) << "," << rep.total_migrations << ","
                    << rep.sum_total_migration_time_s << "," << rep.sum_exec_time_s << ","
                    << rep.total_downtime_s << "," << rep.final_objective << "\n";
                sum_tmt += rep.sum_total_migration_time_s;
                sum_dt += rep.total_downtime_s;
                sum_obj += rep.final_objective;
            }
            csv << sel << ",mean," << "-" << "," << sum_tmt / seeds << "," << "-" << ","
                << sum_dt / seeds << "," << sum_obj / seeds << "\n";
        }
        if (out_dir.empty())
            std::cout << csv.str();
        else
            write_file(out_dir + "/comparison.csv", csv.str());
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_oracle(const std::string& instance_path, const std::string& out_path) {
    MipInstance inst;
    try {
        std::ifstream in(instance_path);
        if (!in) throw std::invalid_argument("cannot open instance file: " + instance_path);
        nlohmann::json j;
        in >> j;
        inst = MipInstance::from_json(j);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        MipSolution sol = solve_exhaustive(inst);
        nlohmann::json j;
        j["found"] = sol.found;
        if (sol.found) {
            j["assignment"] = sol.assignment;
            j["value"] = sol.value;
            j["dependent_pairs"] = dependent_pair_count(inst, sol.assignment);
        }
        std::string body = j.dump(2) + "\n";
        if (out_path.empty())
            std::cout << body;
        else
            write_file(out_path, body);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_validate(const std::string& scenario_path, const SynthSpec& synth, uint64_t seed,
                 const std::string& out_dir) {
    Scenario sc;
    DataCenter dc;
    Placement initial;
    try {
        sc = resolve_scenario(scenario_path, synth, seed, "");
        dc = sc.build_data_center();
        initial = sc.initial_placement();
        sc.traces(".");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        nlohmann::json j;
        j["hosts"] = dc.topo.hosts().size();
        j["switches"] = dc.topo.switches().size();
        j["links"] = dc.topo.links().size();
        j["managed_hosts"] = dc.managed_hosts.size();
        j["vms"] = dc.vms.size();
        j["placement_feasible"] = placement_feasible(dc, initial);

        // Dependency graph over every pairwise (managed src, managed dst).
        UtilHistory history;
        for (const auto& h : dc.managed_hosts)
            history[h].push_back(host_cpu_util(dc, initial, h));
        PolicyCandidates cands = policy_candidates(dc, initial, history, sc.policy);
        std::vector<MigrationCandidate> universe;
        for (const auto& m : cands.all_moves(initial))
            universe.push_back({m.vm + ":" + m.src + "->" + m.dst, m.vm, m.src, m.dst});
        DepGraph g = build_dep_graph(universe, dc.topo);
        CliqueSet cs = all_maximal_cliques(g);
        j["dep_graph"] = g.to_json();
        j["dep_graph"]["cliques"] = cs.keyed(g);
        std::string body = j.dump(2) + "\n";
        if (out_dir.empty())
            std::cout << body;
        else
            write_file(out_dir + "/validate.json", body);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace migsim
