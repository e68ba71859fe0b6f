#include "migsim/mip_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace migsim {

double MipInstance::exec(const std::string& vm, const NodeId& dst) const {
    auto it = exec_time.find({vm, dst});
    if (it == exec_time.end())
        throw std::invalid_argument("exec_time missing for (" + vm + ", " + dst + ")");
    return it->second;
}

std::map<NodeId, double> MipInstance::loads(const Assignment& assignment) const {
    std::map<NodeId, double> loads = base_load;
    for (const auto& [h, cap] : host_capacity) {
        (void)cap;
        loads.emplace(h, 0.0);
    }
    for (const auto& vm : vms) loads[assignment.at(vm.id)] += vm.weight;
    return loads;
}

double band_score(const MipInstance& inst, const Assignment& a) {
    auto loads = inst.loads(a);
    if (inst.objective.form == MipObjective::Form::pairwise_band) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (const auto& [h, l] : loads) {
            (void)h;
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
        return loads.empty() ? 0.0 : hi - lo;
    }
    double mean = 0;
    for (const auto& [h, l] : loads) {
        (void)h;
        mean += l;
    }
    mean /= loads.empty() ? 1.0 : static_cast<double>(loads.size());
    double var = 0;
    for (const auto& [h, l] : loads) {
        (void)h;
        var += (l - mean) * (l - mean);
    }
    return std::sqrt(var / (loads.empty() ? 1.0 : static_cast<double>(loads.size())));
}

bool feasible(const MipInstance& inst, const Assignment& a) {
    for (const auto& vm : inst.vms) {
        auto it = a.find(vm.id);
        if (it == a.end()) return false;
        if (std::find(vm.allowed.begin(), vm.allowed.end(), it->second) == vm.allowed.end())
            return false;
    }
    auto loads = inst.loads(a);
    for (const auto& [h, l] : loads) {
        auto cap = inst.host_capacity.find(h);
        if (cap == inst.host_capacity.end() || l > cap->second + 1e-12) return false;
    }
    if (inst.objective.form == MipObjective::Form::pairwise_band)
        return band_score(inst, a) <= inst.objective.epsilon + 1e-12;
    return std::abs(band_score(inst, a) - inst.objective.target) <=
           inst.objective.epsilon + 1e-12;
}

double objective_value(const MipInstance& inst, const Assignment& a) {
    if (!feasible(inst, a)) throw std::invalid_argument("assignment is not feasible");
    double single = 0, multi = 0;
    std::vector<const MipVm*> moved;
    for (const auto& vm : inst.vms)
        if (a.at(vm.id) != vm.initial_host) {
            single += inst.exec(vm.id, a.at(vm.id));
            moved.push_back(&vm);
        }
    for (size_t i = 0; i < moved.size(); ++i)
        for (size_t j = i + 1; j < moved.size(); ++j) {
            std::pair<NodeId, NodeId> pi{moved[i]->initial_host, a.at(moved[i]->id)};
            std::pair<NodeId, NodeId> pj{moved[j]->initial_host, a.at(moved[j]->id)};
            if (inst.dependent && inst.dependent(pi, pj))
                multi += inst.exec(moved[i]->id, pi.second) + inst.exec(moved[j]->id, pj.second);
        }
    return single + multi;
}

int dependent_pair_count(const MipInstance& inst, const Assignment& a) {
    std::vector<const MipVm*> moved;
    for (const auto& vm : inst.vms)
        if (a.at(vm.id) != vm.initial_host) moved.push_back(&vm);
    int count = 0;
    for (size_t i = 0; i < moved.size(); ++i)
        for (size_t j = i + 1; j < moved.size(); ++j) {
            std::pair<NodeId, NodeId> pi{moved[i]->initial_host, a.at(moved[i]->id)};
            std::pair<NodeId, NodeId> pj{moved[j]->initial_host, a.at(moved[j]->id)};
            if (inst.dependent && inst.dependent(pi, pj)) ++count;
        }
    return count;
}

namespace {

struct SearchCtx {
    const MipInstance& inst;
    std::vector<std::vector<NodeId>> allowed; // sorted per vm
    Assignment current;
    std::map<NodeId, double> loads;
    double single = 0, multi = 0;
    MipSolution best;
};

void search(SearchCtx& ctx, size_t i) {
    if (i == ctx.inst.vms.size()) {
        double score = ctx.single + ctx.multi;
        if (!feasible(ctx.inst, ctx.current)) return;
        if (!ctx.best.found || score < ctx.best.value) {
            ctx.best.found = true;
            ctx.best.value = score;
            ctx.best.assignment = ctx.current;
        }
        return;
    }
    const MipVm& vm = ctx.inst.vms[i];
    for (const auto& dst : ctx.allowed[i]) {
        double cap = ctx.inst.host_capacity.at(dst);
        if (ctx.loads[dst] + vm.weight > cap + 1e-12) continue;
        bool moved = dst != vm.initial_host;
        double add_single = moved ? ctx.inst.exec(vm.id, dst) : 0.0;
        double add_multi = 0;
        if (moved && ctx.inst.dependent) {
            for (size_t j = 0; j < i; ++j) {
                const MipVm& other = ctx.inst.vms[j];
                const NodeId& odst = ctx.current.at(other.id);
                if (odst == other.initial_host) continue;
                std::pair<NodeId, NodeId> pi{vm.initial_host, dst};
                std::pair<NodeId, NodeId> pj{other.initial_host, odst};
                if (ctx.inst.dependent(pi, pj))
                    add_multi += ctx.inst.exec(vm.id, dst) + ctx.inst.exec(other.id, odst);
            }
        }
        // Bound: the partial objective only grows.
        if (ctx.best.found && ctx.single + ctx.multi + add_single + add_multi >= ctx.best.value)
            continue;
        ctx.current[vm.id] = dst;
        ctx.loads[dst] += vm.weight;
        ctx.single += add_single;
        ctx.multi += add_multi;
        search(ctx, i + 1);
        ctx.single -= add_single;
        ctx.multi -= add_multi;
        ctx.loads[dst] -= vm.weight;
        ctx.current.erase(vm.id);
    }
}

} // namespace

MipSolution solve_exhaustive(const MipInstance& inst) {
    double space = 1;
    for (const auto& vm : inst.vms) {
        if (vm.allowed.empty()) throw std::invalid_argument("vm with empty allowed set: " + vm.id);
        if (!inst.host_capacity.count(vm.initial_host))
            throw std::invalid_argument("initial host unknown: " + vm.initial_host);
        space *= static_cast<double>(vm.allowed.size());
        if (space > 1e7) throw std::invalid_argument("search space exceeds the exhaustive guard");
    }
    SearchCtx ctx{inst, {}, {}, inst.base_load, 0, 0, {}};
    for (const auto& [h, cap] : inst.host_capacity) {
        (void)cap;
        ctx.loads.emplace(h, 0.0);
    }
    for (const auto& [h, l] : inst.base_load) ctx.loads[h] = l;
    for (const auto& vm : inst.vms) {
        auto sorted = vm.allowed;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        ctx.allowed.push_back(std::move(sorted));
    }
    search(ctx, 0);
    return ctx.best;
}

nlohmann::json MipInstance::to_json() const {
    nlohmann::json j;
    j["vms"] = nlohmann::json::array();
    for (const auto& vm : vms)
        j["vms"].push_back({{"id", vm.id},
                            {"initial_host", vm.initial_host},
                            {"weight", vm.weight},
                            {"allowed", vm.allowed}});
    j["host_capacity"] = host_capacity;
    j["base_load"] = base_load;
    j["exec_time"] = nlohmann::json::array();
    for (const auto& [key, t] : exec_time)
        j["exec_time"].push_back({key.first, key.second, t});
    // Dependencies are serialized as the explicit pair-of-pairs list over the
    // (src, dst) combinations that actually occur.
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const auto& vm : vms)
        for (const auto& dst : vm.allowed)
            if (dst != vm.initial_host) pairs.insert({vm.initial_host, dst});
    j["dependent_pairs"] = nlohmann::json::array();
    if (dependent) {
        for (auto it = pairs.begin(); it != pairs.end(); ++it)
            for (auto jt = std::next(it); jt != pairs.end(); ++jt)
                if (dependent(*it, *jt))
                    j["dependent_pairs"].push_back(
                        {it->first, it->second, jt->first, jt->second});
    }
    j["objective"] = {{"form", objective.form == MipObjective::Form::pairwise_band
                                   ? "pairwise_band"
                                   : "score_band"},
                      {"target", objective.target},
                      {"epsilon", objective.epsilon}};
    return j;
}

MipInstance MipInstance::from_json(const nlohmann::json& j) {
    MipInstance inst;
    for (const auto& v : j.at("vms")) {
        MipVm vm;
        vm.id = v.at("id").get<std::string>();
        vm.initial_host = v.at("initial_host").get<NodeId>();
        vm.weight = v.at("weight").get<double>();
        vm.allowed = v.at("allowed").get<std::vector<NodeId>>();
        inst.vms.push_back(std::move(vm));
    }
    inst.host_capacity = j.at("host_capacity").get<std::map<NodeId, double>>();
    if (j.contains("base_load")) inst.base_load = j.at("base_load").get<std::map<NodeId, double>>();
    for (const auto& e : j.at("exec_time"))
        inst.exec_time[{e.at(0).get<std::string>(), e.at(1).get<NodeId>()}] =
            e.at(2).get<double>();
    auto dep_set = std::make_shared<std::set<std::pair<std::pair<NodeId, NodeId>,
                                                       std::pair<NodeId, NodeId>>>>();
    if (j.contains("dependent_pairs")) {
        for (const auto& d : j.at("dependent_pairs")) {
            std::pair<NodeId, NodeId> a{d.at(0).get<NodeId>(), d.at(1).get<NodeId>()};
            std::pair<NodeId, NodeId> b{d.at(2).get<NodeId>(), d.at(3).get<NodeId>()};
            dep_set->insert({std::min(a, b), std::max(a, b)});
        }
    }
    inst.dependent = [dep_set](const std::pair<NodeId, NodeId>& a,
                               const std::pair<NodeId, NodeId>& b) {
        if (a == b) return true;
        return dep_set->count({std::min(a, b), std::max(a, b)}) > 0;
    };
    const auto& obj = j.at("objective");
    inst.objective.form = obj.at("form").get<std::string>() == "score_band"
                              ? MipObjective::Form::score_band
                              : MipObjective::Form::pairwise_band;
    inst.objective.target = obj.at("target").get<double>();
    inst.objective.epsilon = obj.at("epsilon").get<double>();
    return inst;
}

} // namespace migsim
