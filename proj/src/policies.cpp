#include "migsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace migsim {

namespace {

double vm_exec_time(const DataCenter& dc, const std::string& vm, const NodeId& src,
                    const NodeId& dst) {
    int64_t bw = available_bandwidth(dc.topo, dc.paths(src, dst), {});
    if (bw <= 0) return std::numeric_limits<double>::infinity();
    return estimate_total(dc.vm(vm), static_cast<double>(bw), dc.migration).t_total_s;
}

std::vector<NodeId> overloaded_hosts(const DataCenter& dc, const Placement& p,
                                     const PolicyConfig& cfg) {
    std::vector<NodeId> out;
    for (const auto& h : dc.managed_hosts)
        if (host_cpu_util(dc, p, h) > cfg.objective.band_high) out.push_back(h);
    return out;
}

double host_volume(const DataCenter& dc, const Placement& p, const NodeId& h,
                   const PolicyConfig& cfg) {
    return volume(host_cpu_util(dc, p, h), host_net_util(dc, p, h), host_mem_util(dc, p, h),
                  cfg.volume_clamp);
}

double vm_volume_per_memory(const DataCenter& dc, const std::string& vm, const NodeId& host,
                            const PolicyConfig& cfg) {
    const VmSpec& spec = dc.vm(vm);
    const HostSpec& hs = dc.topo.host(host);
    double cpu = spec.cpu_demand_mips / hs.cpu_total_mips;
    double net = static_cast<double>(spec.virt_bandwidth_bps) / hs.nic_bandwidth_bps;
    double mem = static_cast<double>(spec.memory_bytes) / static_cast<double>(hs.memory_bytes);
    return volume(cpu, net, mem, cfg.volume_clamp) / static_cast<double>(spec.memory_bytes);
}

// Destinations a VM may take without breaching the utilization ceiling.
std::vector<NodeId> absorbing_hosts(const DataCenter& dc, const Placement& p,
                                    const std::string& vm, const PolicyConfig& cfg) {
    const NodeId& src = p.host_of(vm);
    double add = dc.vm(vm).cpu_demand_mips;
    std::vector<NodeId> out;
    for (const auto& h : dc.managed_hosts) {
        if (h == src) continue;
        if (!can_place(dc, p, vm, h)) continue;
        double post = host_cpu_util(dc, p, h) + add / dc.topo.host(h).cpu_total_mips;
        if (post <= cfg.objective.band_high) out.push_back(h);
    }
    return out;
}

} // namespace

bool PolicyCandidates::empty() const {
    for (const auto& [vm, dsts] : dsts_per_vm)
        if (!dsts.empty()) return false;
    return true;
}

std::vector<CandidateMove> PolicyCandidates::all_moves(const Placement& p) const {
    std::vector<CandidateMove> out;
    for (const auto& src : sources) {
        auto it = vms_per_source.find(src);
        if (it == vms_per_source.end()) continue;
        for (const auto& vm : it->second) {
            auto dit = dsts_per_vm.find(vm);
            if (dit == dsts_per_vm.end()) continue;
            for (const auto& dst : dit->second)
                if (dst != p.host_of(vm)) out.push_back({vm, p.host_of(vm), dst});
        }
    }
    return out;
}

double volume(double cpu, double net, double mem, double clamp) {
    auto clamped = [&](double u) { return std::min(std::max(u, 0.0), clamp); };
    return 1.0 / ((1.0 - clamped(cpu)) * (1.0 - clamped(net)) * (1.0 - clamped(mem)));
}

double objective_score(const DataCenter& dc, const Placement& p, const PolicyObjective& obj) {
    if (obj.kind == ObjectiveKind::load_balance) return cpu_util_stddev(dc, p);
    return placement_host_power(dc, p, obj.energy);
}

bool objective_achieved(const DataCenter& dc, const Placement& p, const PolicyObjective& obj) {
    if (obj.kind != ObjectiveKind::load_balance) return false;
    for (const auto& h : dc.managed_hosts) {
        double u = host_cpu_util(dc, p, h);
        if (u < obj.band_low || u > obj.band_high) return false;
    }
    return true;
}

PolicyCandidates sandpiper_candidates(const DataCenter& dc, const Placement& p,
                                      const PolicyConfig& cfg) {
    PolicyCandidates out;
    out.sources = overloaded_hosts(dc, p, cfg);
    std::stable_sort(out.sources.begin(), out.sources.end(), [&](const NodeId& a, const NodeId& b) {
        double va = host_volume(dc, p, a, cfg), vb = host_volume(dc, p, b, cfg);
        return va != vb ? va > vb : a < b;
    });
    for (const auto& src : out.sources) {
        auto vms = vms_on(dc, p, src);
        std::stable_sort(vms.begin(), vms.end(), [&](const std::string& a, const std::string& b) {
            double ra = vm_volume_per_memory(dc, a, src, cfg);
            double rb = vm_volume_per_memory(dc, b, src, cfg);
            return ra != rb ? ra > rb : a < b;
        });
        out.vms_per_source[src] = vms;
        for (const auto& vm : vms) {
            auto dsts = absorbing_hosts(dc, p, vm, cfg);
            std::stable_sort(dsts.begin(), dsts.end(), [&](const NodeId& a, const NodeId& b) {
                double ua = host_cpu_util(dc, p, a), ub = host_cpu_util(dc, p, b);
                return ua != ub ? ua < ub : a < b;
            });
            out.dsts_per_vm[vm] = dsts;
        }
    }
    return out;
}

std::vector<CandidateMove> sandpiper_native_plan(const DataCenter& dc, Placement p,
                                                 const PolicyConfig& cfg) {
    std::vector<CandidateMove> plan;
    std::set<std::string> moved;
    for (size_t guard = 0; guard <= dc.vms.size(); ++guard) {
        PolicyCandidates cands = sandpiper_candidates(dc, p, cfg);
        bool progressed = false;
        for (const auto& src : cands.sources) {
            for (const auto& vm : cands.vms_per_source[src]) {
                if (moved.count(vm)) continue;
                const auto& dsts = cands.dsts_per_vm[vm];
                if (dsts.empty()) continue;
                plan.push_back({vm, src, dsts.front()});
                p = p.with_move(vm, dsts.front());
                moved.insert(vm);
                progressed = true;
                break;
            }
            if (progressed) break;
        }
        if (!progressed) break;
    }
    return plan;
}

PolicyCandidates ffd_candidate_view(const DataCenter& dc, const Placement& p,
                                    const PolicyConfig& cfg) {
    PolicyCandidates out;
    out.sources = overloaded_hosts(dc, p, cfg);
    std::stable_sort(out.sources.begin(), out.sources.end(), [&](const NodeId& a, const NodeId& b) {
        double ua = host_cpu_util(dc, p, a), ub = host_cpu_util(dc, p, b);
        return ua != ub ? ua > ub : a < b;
    });
    for (const auto& src : out.sources) {
        auto vms = vms_on(dc, p, src);
        std::stable_sort(vms.begin(), vms.end(), [&](const std::string& a, const std::string& b) {
            int64_t ma = dc.vm(a).memory_bytes, mb = dc.vm(b).memory_bytes;
            return ma != mb ? ma < mb : a < b;
        });
        out.vms_per_source[src] = vms;
        for (const auto& vm : vms) {
            std::vector<NodeId> dsts;
            for (const auto& h : dc.managed_hosts) {
                if (h == src || !can_place(dc, p, vm, h)) continue;
                double u = host_cpu_util(dc, p, h);
                double post = u + dc.vm(vm).cpu_demand_mips / dc.topo.host(h).cpu_total_mips;
                if (u < cfg.objective.band_low && post <= cfg.objective.band_high)
                    dsts.push_back(h);
            }
            // First-fit-decreasing over spare capacity.
            std::stable_sort(dsts.begin(), dsts.end(), [&](const NodeId& a, const NodeId& b) {
                double sa = 1.0 - host_cpu_util(dc, p, a), sb = 1.0 - host_cpu_util(dc, p, b);
                return sa != sb ? sa > sb : a < b;
            });
            out.dsts_per_vm[vm] = dsts;
        }
    }
    return out;
}

std::vector<CandidateMove> ffd_candidates(const DataCenter& dc, Placement p,
                                          const PolicyConfig& cfg) {
    std::vector<CandidateMove> plan;
    std::set<std::string> skipped;
    for (size_t guard = 0; guard <= dc.vms.size(); ++guard) {
        PolicyCandidates cands = ffd_candidate_view(dc, p, cfg);
        bool progressed = false;
        for (const auto& src : cands.sources) {
            for (const auto& vm : cands.vms_per_source[src]) {
                if (skipped.count(vm)) continue;
                const auto& dsts = cands.dsts_per_vm[vm];
                if (dsts.empty()) {
                    skipped.insert(vm); // no destination fits this VM
                    continue;
                }
                plan.push_back({vm, src, dsts.front()});
                p = p.with_move(vm, dsts.front());
                progressed = true;
                break;
            }
            if (progressed) break;
        }
        if (!progressed) break;
    }
    return plan;
}

PolicyCandidates iaware_candidate_view(const DataCenter& dc, const Placement& p,
                                       const PolicyConfig& cfg) {
    PolicyCandidates out;
    out.sources = overloaded_hosts(dc, p, cfg);
    std::sort(out.sources.begin(), out.sources.end());
    for (const auto& src : out.sources) {
        out.vms_per_source[src] = vms_on(dc, p, src);
        for (const auto& vm : out.vms_per_source[src])
            out.dsts_per_vm[vm] = absorbing_hosts(dc, p, vm, cfg);
    }
    return out;
}

std::vector<CandidateMove> iaware_candidates(const DataCenter& dc, Placement p,
                                             const PolicyConfig& cfg) {
    std::vector<CandidateMove> plan;
    std::set<std::string> moved;
    for (size_t guard = 0; guard <= dc.vms.size(); ++guard) {
        PolicyCandidates view = iaware_candidate_view(dc, p, cfg);
        std::vector<CandidateMove> moves = view.all_moves(p);
        moves.erase(std::remove_if(moves.begin(), moves.end(),
                                   [&](const CandidateMove& m) { return moved.count(m.vm) > 0; }),
                    moves.end());
        if (moves.empty()) break;

        double exec_lo = std::numeric_limits<double>::infinity(), exec_hi = 0;
        double coloc_lo = std::numeric_limits<double>::infinity(), coloc_hi = 0;
        std::vector<double> execs, colocs;
        for (const auto& m : moves) {
            double e = vm_exec_time(dc, m.vm, m.src, m.dst);
            double c = static_cast<double>(vms_on(dc, p, m.dst).size());
            execs.push_back(e);
            colocs.push_back(c);
            exec_lo = std::min(exec_lo, e);
            exec_hi = std::max(exec_hi, e);
            coloc_lo = std::min(coloc_lo, c);
            coloc_hi = std::max(coloc_hi, c);
        }
        int best = -1;
        double best_cost = 0;
        for (size_t i = 0; i < moves.size(); ++i) {
            double ne = exec_hi > exec_lo ? (execs[i] - exec_lo) / (exec_hi - exec_lo) : 0.0;
            double nc = coloc_hi > coloc_lo ? (colocs[i] - coloc_lo) / (coloc_hi - coloc_lo) : 0.0;
            double cost = cfg.iaware_w_exec * ne + cfg.iaware_w_coloc * nc;
            bool better = best < 0 || cost < best_cost ||
                          (cost == best_cost &&
                           std::tie(execs[i], moves[i].vm, moves[i].dst) <
                               std::tie(execs[best], moves[best].vm, moves[best].dst));
            if (better) {
                best = static_cast<int>(i);
                best_cost = cost;
            }
        }
        plan.push_back(moves[best]);
        p = p.with_move(moves[best].vm, moves[best].dst);
        moved.insert(moves[best].vm);
    }
    return plan;
}

bool lr_predict(const std::vector<double>& series, int window, double& predicted) {
    if (static_cast<int>(series.size()) < window || window < 2) return false;
    // Least squares over x = 0..w-1; the next interval sits at x = w.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int w = window;
    for (int i = 0; i < w; ++i) {
        double y = series[series.size() - w + i];
        sx += i;
        sy += y;
        sxx += static_cast<double>(i) * i;
        sxy += i * y;
    }
    double denom = w * sxx - sx * sx;
    double slope = denom != 0 ? (w * sxy - sx * sy) / denom : 0.0;
    double intercept = (sy - slope * sx) / w;
    predicted = intercept + slope * w;
    return true;
}

namespace {

struct LrState {
    std::vector<NodeId> overloaded;  // predicted
    std::vector<NodeId> underloaded; // current util below threshold
};

LrState lr_classify(const DataCenter& dc, const Placement& p, const UtilHistory& history,
                    const PolicyConfig& cfg) {
    LrState st;
    for (const auto& h : dc.managed_hosts) {
        auto it = history.find(h);
        double predicted = 0;
        bool has = it != history.end() && lr_predict(it->second, cfg.lr_window, predicted);
        if (has && predicted * cfg.lr_safety >= 1.0) {
            st.overloaded.push_back(h);
            continue;
        }
        double u = host_cpu_util(dc, p, h);
        if (u > 0 && u < cfg.underload_threshold) st.underloaded.push_back(h);
    }
    return st;
}

std::vector<std::string> mmt_order(const DataCenter& dc, const Placement& p, const NodeId& host) {
    auto vms = vms_on(dc, p, host);
    std::stable_sort(vms.begin(), vms.end(), [&](const std::string& a, const std::string& b) {
        // NIC-bound transfer time is the dominant term; memory decides.
        double ta = dc.vm(a).memory_bits(), tb = dc.vm(b).memory_bits();
        return ta != tb ? ta < tb : a < b;
    });
    return vms;
}

std::vector<NodeId> lr_destinations(const DataCenter& dc, const Placement& p,
                                    const std::string& vm, const LrState& st,
                                    const PolicyConfig& cfg) {
    std::vector<NodeId> out;
    for (const auto& h : dc.managed_hosts) {
        if (h == p.host_of(vm)) continue;
        if (std::find(st.overloaded.begin(), st.overloaded.end(), h) != st.overloaded.end())
            continue;
        if (std::find(st.underloaded.begin(), st.underloaded.end(), h) != st.underloaded.end())
            continue;
        if (!can_place(dc, p, vm, h)) continue;
        out.push_back(h);
    }
    // Energy-optimal order: smallest power increase first.
    std::stable_sort(out.begin(), out.end(), [&](const NodeId& a, const NodeId& b) {
        double pa = host_power_increase(dc, p, cfg.objective.energy, vm, a);
        double pb = host_power_increase(dc, p, cfg.objective.energy, vm, b);
        return pa != pb ? pa < pb : a < b;
    });
    return out;
}

} // namespace

PolicyCandidates lrmmt_candidate_view(const DataCenter& dc, const Placement& p,
                                      const UtilHistory& history, const PolicyConfig& cfg) {
    PolicyCandidates out;
    LrState st = lr_classify(dc, p, history, cfg);
    out.sources = st.overloaded;
    out.sources.insert(out.sources.end(), st.underloaded.begin(), st.underloaded.end());
    for (const auto& src : out.sources) {
        out.vms_per_source[src] = mmt_order(dc, p, src);
        for (const auto& vm : out.vms_per_source[src])
            out.dsts_per_vm[vm] = lr_destinations(dc, p, vm, st, cfg);
    }
    return out;
}

std::vector<CandidateMove> lrmmt_candidates(const DataCenter& dc, Placement p,
                                            const UtilHistory& history, const PolicyConfig& cfg) {
    std::vector<CandidateMove> plan;
    LrState st = lr_classify(dc, p, history, cfg);

    // Drain predicted-overloaded hosts with minimum-migration-time VMs.
    for (const auto& src : st.overloaded) {
        auto it = history.find(src);
        double predicted = 0;
        if (it == history.end() || !lr_predict(it->second, cfg.lr_window, predicted)) continue;
        double cap = dc.topo.host(src).cpu_total_mips;
        for (const auto& vm : mmt_order(dc, p, src)) {
            if (predicted * cfg.lr_safety < 1.0) break;
            auto dsts = lr_destinations(dc, p, vm, st, cfg);
            if (dsts.empty()) continue;
            plan.push_back({vm, src, dsts.front()});
            p = p.with_move(vm, dsts.front());
            predicted -= dc.vm(vm).cpu_demand_mips / cap;
        }
    }

    // Consolidate under-utilized hosts when every VM fits elsewhere.
    for (const auto& src : st.underloaded) {
        Placement trial = p;
        std::vector<CandidateMove> moves;
        bool ok = true;
        for (const auto& vm : mmt_order(dc, p, src)) {
            auto dsts = lr_destinations(dc, trial, vm, st, cfg);
            if (dsts.empty()) {
                ok = false;
                break;
            }
            moves.push_back({vm, src, dsts.front()});
            trial = trial.with_move(vm, dsts.front());
        }
        if (ok && !moves.empty()) {
            plan.insert(plan.end(), moves.begin(), moves.end());
            p = trial;
        }
    }
    return plan;
}

NodeId hosthits_select(const std::vector<NodeId>& equivalent_destinations,
                       std::map<NodeId, int>& hit_counts) {
    if (equivalent_destinations.empty())
        throw std::invalid_argument("hosthits_select needs at least one destination");
    NodeId best = equivalent_destinations.front();
    for (const auto& h : equivalent_destinations) {
        int ch = hit_counts[h], cb = hit_counts[best];
        if (ch < cb || (ch == cb && h < best)) best = h;
    }
    ++hit_counts[best];
    return best;
}

PolicyCandidates policy_candidates(const DataCenter& dc, const Placement& p,
                                   const UtilHistory& history, const PolicyConfig& cfg) {
    if (cfg.name == "sandpiper") return sandpiper_candidates(dc, p, cfg);
    if (cfg.name == "ffd") return ffd_candidate_view(dc, p, cfg);
    if (cfg.name == "iaware") return iaware_candidate_view(dc, p, cfg);
    if (cfg.name == "lrmmt") return lrmmt_candidate_view(dc, p, history, cfg);
    throw std::invalid_argument("unknown policy: " + cfg.name +
                                " (expected sandpiper|ffd|iaware|lrmmt)");
}

std::vector<CandidateMove> policy_native_plan(const DataCenter& dc, const Placement& p,
                                              const UtilHistory& history,
                                              const PolicyConfig& cfg) {
    if (cfg.name == "sandpiper") return sandpiper_native_plan(dc, p, cfg);
    if (cfg.name == "ffd") return ffd_candidates(dc, p, cfg);
    if (cfg.name == "iaware") return iaware_candidates(dc, p, cfg);
    if (cfg.name == "lrmmt") return lrmmt_candidates(dc, p, history, cfg);
    throw std::invalid_argument("unknown policy: " + cfg.name +
                                " (expected sandpiper|ffd|iaware|lrmmt)");
}

} // namespace migsim
