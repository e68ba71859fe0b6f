#include "migsim/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "migsim/rng.hpp"

namespace migsim {

UtilizationTrace parse_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    UtilizationTrace t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Trim trailing CR and surrounding spaces.
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        size_t start = line.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        line = line.substr(start);
        size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(line, &pos);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-numeric line");
        }
        if (pos != line.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-numeric line");
        if (value < 0 || value > 100)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": value outside [0, 100]");
        t.samples.push_back(value / 100.0);
    }
    if (t.samples.empty()) throw std::runtime_error("empty trace file: " + path);
    return t;
}

namespace {

nlohmann::json host_spec_json(const HostSpec& s) {
    return {{"cpu_total_mips", s.cpu_total_mips},
            {"cores", s.cores},
            {"memory_bytes", s.memory_bytes},
            {"storage_bytes", s.storage_bytes},
            {"nic_bandwidth_bps", s.nic_bandwidth_bps}};
}

HostSpec host_spec_from(const nlohmann::json& j) {
    HostSpec s;
    s.cpu_total_mips = j.at("cpu_total_mips").get<double>();
    s.cores = j.at("cores").get<int>();
    s.memory_bytes = j.at("memory_bytes").get<int64_t>();
    s.storage_bytes = j.at("storage_bytes").get<int64_t>();
    s.nic_bandwidth_bps = j.at("nic_bandwidth_bps").get<int64_t>();
    return s;
}

} // namespace

nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["horizon_s"] = horizon_s;
    j["interval_s"] = interval_s;
    j["topology"] = {{"fat_tree_k", fat_tree_k}, {"link_bw_bps", link_bw_bps}};
    j["host_spec"] = host_spec_json(host_spec);
    j["managed_hosts"] = managed_hosts;
    j["migration"] = {{"max_rounds", migration.max_rounds},
                      {"downtime_threshold_s", migration.downtime_threshold_s},
                      {"pre_overhead_s", migration.pre_overhead_s},
                      {"post_overhead_s", migration.post_overhead_s}};
    j["policy"] = {{"name", policy.name},
                   {"objective",
                    policy.objective.kind == ObjectiveKind::load_balance ? "load_balance"
                                                                         : "energy"},
                   {"target", policy.objective.target},
                   {"band_low", policy.objective.band_low},
                   {"band_high", policy.objective.band_high},
                   {"epsilon", policy.objective.epsilon},
                   {"underload_threshold", policy.underload_threshold},
                   {"volume_clamp", policy.volume_clamp},
                   {"iaware_w_exec", policy.iaware_w_exec},
                   {"iaware_w_coloc", policy.iaware_w_coloc},
                   {"lr_window", policy.lr_window},
                   {"lr_safety", policy.lr_safety}};
    j["camig"] = {{"kappa", camig.migc.kappa},
                  {"kappa_mig", camig.migc.kappa_mig},
                  {"delta", camig.delta},
                  {"reserve_during_planning", camig.reserve_during_planning}};
    j["selector"] = selector;
    j["energy"] = {{"host_idle_w", energy.host_idle_w},
                   {"host_peak_w", energy.host_peak_w},
                   {"switch_base_w", energy.switch_base_w},
                   {"switch_port_w", energy.switch_port_w}};
    j["timeout_patience_intervals"] = timeout_patience_intervals;
    j["timeout_penalty_factor"] = timeout_penalty_factor;
    j["vms"] = nlohmann::json::array();
    for (const auto& v : vms) {
        nlohmann::json vj = {{"id", v.spec.id},
                             {"host", v.host},
                             {"memory_bytes", v.spec.memory_bytes},
                             {"dirty_rate_bps", v.spec.dirty_rate_bps},
                             {"dirty_rate_factor", v.spec.dirty_rate_factor},
                             {"compression", v.spec.compression},
                             {"cpu_demand_mips", v.spec.cpu_demand_mips},
                             {"vcpus", v.spec.vcpus},
                             {"virt_bandwidth_bps", v.spec.virt_bandwidth_bps},
                             {"disk_bytes", v.spec.disk_bytes}};
        if (!v.trace_file.empty()) vj["trace"] = v.trace_file;
        if (!v.trace_values.empty()) vj["trace_values"] = v.trace_values;
        j["vms"].push_back(vj);
    }
    return j;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
    Scenario sc;
    sc.seed = j.at("seed").get<uint64_t>();
    sc.horizon_s = j.at("horizon_s").get<double>();
    sc.interval_s = j.at("interval_s").get<double>();
    sc.fat_tree_k = j.at("topology").at("fat_tree_k").get<int>();
    sc.link_bw_bps = j.at("topology").at("link_bw_bps").get<int64_t>();
    sc.host_spec = host_spec_from(j.at("host_spec"));
    sc.managed_hosts = j.at("managed_hosts").get<std::vector<NodeId>>();
    const auto& m = j.at("migration");
    sc.migration.max_rounds = m.at("max_rounds").get<int>();
    sc.migration.downtime_threshold_s = m.at("downtime_threshold_s").get<double>();
    sc.migration.pre_overhead_s = m.at("pre_overhead_s").get<double>();
    sc.migration.post_overhead_s = m.at("post_overhead_s").get<double>();
    const auto& p = j.at("policy");
    sc.policy.name = p.at("name").get<std::string>();
    sc.policy.objective.kind = p.at("objective").get<std::string>() == "energy"
                                   ? ObjectiveKind::energy
                                   : ObjectiveKind::load_balance;
    sc.policy.objective.target = p.at("target").get<double>();
    sc.policy.objective.band_low = p.at("band_low").get<double>();
    sc.policy.objective.band_high = p.at("band_high").get<double>();
    sc.policy.objective.epsilon = p.at("epsilon").get<double>();
    sc.policy.underload_threshold = p.at("underload_threshold").get<double>();
    sc.policy.volume_clamp = p.at("volume_clamp").get<double>();
    sc.policy.iaware_w_exec = p.at("iaware_w_exec").get<double>();
    sc.policy.iaware_w_coloc = p.at("iaware_w_coloc").get<double>();
    sc.policy.lr_window = p.at("lr_window").get<int>();
    sc.policy.lr_safety = p.at("lr_safety").get<double>();
    const auto& c = j.at("camig");
    sc.camig.migc.kappa = c.at("kappa").get<double>();
    sc.camig.migc.kappa_mig = c.at("kappa_mig").get<double>();
    sc.camig.delta = c.at("delta").get<double>();
    sc.camig.reserve_during_planning = c.at("reserve_during_planning").get<bool>();
    sc.selector = j.at("selector").get<std::string>();
    const auto& e = j.at("energy");
    sc.energy.host_idle_w = e.at("host_idle_w").get<double>();
    sc.energy.host_peak_w = e.at("host_peak_w").get<double>();
    sc.energy.switch_base_w = e.at("switch_base_w").get<double>();
    sc.energy.switch_port_w = e.at("switch_port_w").get<double>();
    sc.timeout_patience_intervals = j.at("timeout_patience_intervals").get<int>();
    sc.timeout_penalty_factor = j.at("timeout_penalty_factor").get<double>();
    for (const auto& vj : j.at("vms")) {
        ScenarioVm v;
        v.spec.id = vj.at("id").get<std::string>();
        v.host = vj.at("host").get<NodeId>();
        v.spec.memory_bytes = vj.at("memory_bytes").get<int64_t>();
        v.spec.dirty_rate_bps = vj.at("dirty_rate_bps").get<double>();
        v.spec.dirty_rate_factor = vj.at("dirty_rate_factor").get<double>();
        v.spec.compression = vj.at("compression").get<double>();
        v.spec.cpu_demand_mips = vj.at("cpu_demand_mips").get<double>();
        v.spec.vcpus = vj.at("vcpus").get<int>();
        v.spec.virt_bandwidth_bps = vj.at("virt_bandwidth_bps").get<int64_t>();
        v.spec.disk_bytes = vj.at("disk_bytes").get<int64_t>();
        if (vj.contains("trace")) v.trace_file = vj.at("trace").get<std::string>();
        if (vj.contains("trace_values"))
            v.trace_values = vj.at("trace_values").get<std::vector<double>>();
        sc.vms.push_back(std::move(v));
    }
    std::sort(sc.vms.begin(), sc.vms.end(),
              [](const ScenarioVm& a, const ScenarioVm& b) { return a.spec.id < b.spec.id; });
    return sc;
}

DataCenter Scenario::build_data_center() const {
    DataCenter dc;
    dc.topo = build_fat_tree(fat_tree_k, link_bw_bps, host_spec);
    for (const auto& h : managed_hosts)
        if (!dc.topo.has_host(h))
            throw std::invalid_argument("managed host not in topology: " + h);
    dc.managed_hosts = managed_hosts;
    std::sort(dc.managed_hosts.begin(), dc.managed_hosts.end());
    for (const auto& v : vms) dc.vms[v.spec.id] = v.spec;
    dc.migration = migration;
    return dc;
}

Placement Scenario::initial_placement() const {
    Placement p;
    for (const auto& v : vms) {
        if (std::find(managed_hosts.begin(), managed_hosts.end(), v.host) == managed_hosts.end())
            throw std::invalid_argument("vm " + v.spec.id + " placed on unmanaged host " + v.host);
        p.vm_to_host[v.spec.id] = v.host;
    }
    return p;
}

std::map<std::string, UtilizationTrace> Scenario::traces(const std::string& base_dir) const {
    std::map<std::string, UtilizationTrace> out;
    for (const auto& v : vms) {
        if (!v.trace_values.empty()) {
            UtilizationTrace t;
            t.samples = v.trace_values;
            t.interval_s = interval_s;
            for (double s : t.samples)
                if (s < 0 || s > 1)
                    throw std::invalid_argument("inline trace sample outside [0,1] for " +
                                                v.spec.id);
            out[v.spec.id] = std::move(t);
        } else if (!v.trace_file.empty()) {
            std::string path = v.trace_file;
            if (!base_dir.empty() && path.front() != '/') path = base_dir + "/" + path;
            out[v.spec.id] = parse_trace(path);
        }
    }
    return out;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    nlohmann::json j;
    in >> j;
    return Scenario::from_json(j);
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << sc.to_json().dump(2) << "\n";
}

namespace {

struct BaseVm {
    double cpu_pct;
    double mem_gb;
};

// Reference 8-host mapping: 38 VMs, host CPU utilizations 10-90%, VM cpu
// 4-20% of the host, memory mixed over 2-16 GB. The published mapping is not
// machine-readable, so this reconstruction keeps its stated ranges.
const std::vector<std::vector<BaseVm>> kBaseMapping = {
    {{20, 16}, {20, 4}, {15, 8}, {15, 2}, {12, 4}, {8, 8}},  // 90%
    {{20, 8}, {16, 16}, {12, 4}, {12, 2}, {12, 8}, {8, 4}},  // 80%
    {{16, 4}, {14, 8}, {12, 16}, {10, 2}, {10, 4}, {8, 2}},  // 70%
    {{15, 16}, {12, 2}, {10, 8}, {10, 4}, {8, 2}},           // 55%
    {{12, 8}, {10, 4}, {9, 2}, {8, 16}, {6, 4}},             // 45%
    {{12, 4}, {9, 16}, {8, 2}, {6, 8}},                      // 35%
    {{8, 2}, {4, 4}, {4, 8}, {4, 16}},                       // 20%
    {{6, 8}, {4, 2}},                                        // 10%
};

constexpr int64_t kGB = 1'000'000'000;

} // namespace

Scenario synth_lb_scenario(uint64_t seed, int multiplier) {
    if (multiplier < 1 || multiplier > 4)
        throw std::invalid_argument("multiplier must be in 1..4");
    Scenario sc;
    sc.seed = seed;
    sc.horizon_s = 300;
    sc.interval_s = 300;
    sc.fat_tree_k = 8;
    sc.link_bw_bps = 1'000'000'000;
    sc.host_spec.cpu_total_mips = 160000; // 16 cpus x 10000 MIPS
    sc.host_spec.cores = 16;
    sc.host_spec.memory_bytes = 64 * kGB;
    sc.host_spec.storage_bytes = 1000 * kGB;
    sc.host_spec.nic_bandwidth_bps = 1'000'000'000;
    sc.migration.max_rounds = 30;
    sc.migration.downtime_threshold_s = 0.5;
    sc.policy.name = "sandpiper";
    sc.policy.objective.kind = ObjectiveKind::load_balance;
    sc.policy.objective.target = 0.5;
    sc.policy.objective.band_low = 0.45;
    sc.policy.objective.band_high = 0.55;
    sc.selector = "camig";

    const int n = 8 * multiplier;
    // The managed hosts sit in the first n fat-tree slots; which utilization
    // profile lands on which slot is the seeded random part.
    SplitMix64 rng(seed);
    std::vector<int> profile(n);
    for (int i = 0; i < n; ++i) profile[i] = i % 8;
    for (int i = n - 1; i > 0; --i)
        std::swap(profile[i], profile[rng.next_below(static_cast<uint64_t>(i + 1))]);

    int vm_idx = 0;
    for (int slot = 0; slot < n; ++slot) {
        NodeId host = "h" + std::to_string(slot);
        sc.managed_hosts.push_back(host);
        for (const auto& base : kBaseMapping[profile[slot]]) {
            ScenarioVm v;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "vm%03d", vm_idx++);
            v.spec.id = buf;
            v.spec.memory_bytes = static_cast<int64_t>(base.mem_gb * kGB);
            v.spec.dirty_rate_factor = 0.001;
            v.spec.compression = 0.8;
            v.spec.cpu_demand_mips = base.cpu_pct / 100.0 * sc.host_spec.cpu_total_mips;
            v.spec.vcpus = 1;
            v.spec.virt_bandwidth_bps = 0;
            v.spec.disk_bytes = 4 * kGB;
            v.host = host;
            sc.vms.push_back(std::move(v));
        }
    }
    return sc;
}

Scenario synth_energy_scenario(uint64_t seed, int host_count, int vm_count, double horizon_s) {
    Scenario sc;
    sc.seed = seed;
    sc.horizon_s = horizon_s;
    sc.interval_s = 300;
    int k = 4;
    while (k * k * k / 4 < host_count) k += 2;
    sc.fat_tree_k = k;
    sc.link_bw_bps = 1'000'000'000;
    sc.host_spec.cpu_total_mips = 32000; // 8 cpus x 4000 MIPS
    sc.host_spec.cores = 8;
    sc.host_spec.memory_bytes = 1024 * kGB;
    sc.host_spec.storage_bytes = 1000 * kGB;
    sc.host_spec.nic_bandwidth_bps = 1'000'000'000;
    sc.migration.max_rounds = 30;
    sc.migration.downtime_threshold_s = 0.5;
    sc.policy.name = "lrmmt";
    sc.policy.objective.kind = ObjectiveKind::energy;
    sc.policy.underload_threshold = 0.2;
    sc.selector = "camig";

    for (int i = 0; i < host_count; ++i) sc.managed_hosts.push_back("h" + std::to_string(i));

    static const double kFlavorMips[4] = {2500, 2000, 1000, 1000};
    static const double kFlavorMemGb[4] = {2, 4, 4, 2};
    const int intervals = static_cast<int>(horizon_s / sc.interval_s);
    SplitMix64 rng(seed);

    std::vector<ScenarioVm> vms;
    for (int i = 0; i < vm_count; ++i) {
        ScenarioVm v;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "vm%04d", i);
        int f = i % 4;
        v.spec.id = buf;
        v.spec.memory_bytes = static_cast<int64_t>(kFlavorMemGb[f] * kGB);
        v.spec.dirty_rate_factor = 0.001;
        v.spec.compression = 0.8;
        v.spec.cpu_demand_mips = kFlavorMips[f];
        v.spec.vcpus = 2;
        v.spec.virt_bandwidth_bps = 100'000'000;
        v.spec.disk_bytes = 4 * kGB;
        // Random walk in [0,1], one sample per monitoring interval.
        double u = rng.next_double(0.2, 0.8);
        for (int t = 0; t < intervals; ++t) {
            v.trace_values.push_back(std::round(u * 100) / 100.0);
            u += rng.next_double(-0.15, 0.15);
            u = std::min(1.0, std::max(0.0, u));
        }
        vms.push_back(std::move(v));
    }

    // First-fit by demand at t=0, filling hosts to at most 80%.
    std::map<NodeId, double> demand;
    for (auto& v : vms) {
        bool placed = false;
        for (const auto& h : sc.managed_hosts) {
            double d0 = v.trace_values.empty() ? v.spec.cpu_demand_mips
                                               : v.trace_values[0] * v.spec.cpu_demand_mips;
            if (demand[h] + d0 <= 0.8 * sc.host_spec.cpu_total_mips) {
                v.host = h;
                demand[h] += d0;
                placed = true;
                break;
            }
        }
        if (!placed) v.host = sc.managed_hosts.back();
        sc.vms.push_back(v);
    }
    return sc;
}

} // namespace migsim
