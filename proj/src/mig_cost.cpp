#include "migsim/mig_cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace migsim {

void VmSpec::validate() const {
    if (memory_bytes <= 0) throw std::invalid_argument("vm memory must be positive");
    if (compression <= 0 || compression > 1.0)
        throw std::invalid_argument("compression must be in (0, 1]");
    if (dirty_rate_bps < 0 || dirty_rate_factor < 0)
        throw std::invalid_argument("dirty rate must be non-negative");
}

void MigrationConfig::validate() const {
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    if (downtime_threshold_s <= 0) throw std::invalid_argument("downtime threshold must be positive");
    if (pre_overhead_s < 0 || post_overhead_s < 0)
        throw std::invalid_argument("migration overheads must be non-negative");
}

double sigma(const VmSpec& vm, double bandwidth_bps) {
    vm.validate();
    if (bandwidth_bps <= 0) throw std::invalid_argument("bandwidth must be positive");
    return vm.compression * vm.dirty_rate() / bandwidth_bps;
}

int estimate_rounds(const VmSpec& vm, double bandwidth_bps, const MigrationConfig& cfg) {
    cfg.validate();
    double s = sigma(vm, bandwidth_bps);
    if (s == 0) return 0;
    if (s >= 1.0) return cfg.max_rounds;
    double v_thd = cfg.downtime_threshold_s * bandwidth_bps;
    double ratio = v_thd / vm.memory_bits();
    if (ratio >= 1.0) return 0; // whole memory fits inside the downtime budget
    int i = static_cast<int>(std::ceil(std::log(ratio) / std::log(s)));
    return std::clamp(i, 0, cfg.max_rounds);
}

MigrationEstimate estimate_memory_copy(const VmSpec& vm, double bandwidth_bps,
                                       const MigrationConfig& cfg) {
    double s = sigma(vm, bandwidth_bps);
    int i = estimate_rounds(vm, bandwidth_bps, cfg);
    double compressed = vm.compression * vm.memory_bits();

    MigrationEstimate est;
    est.rounds = i;
    if (s == 0) {
        est.transferred_bits = compressed;
        est.downtime_s = 0; // nothing re-dirtied after the single copy
    } else if (s == 1.0) {
        est.transferred_bits = compressed * (i + 1);
        est.downtime_s = compressed / bandwidth_bps;
    } else {
        est.transferred_bits = compressed * (1.0 - std::pow(s, i + 1)) / (1.0 - s);
        est.downtime_s = std::pow(s, i) * compressed / bandwidth_bps;
    }
    est.t_mem_s = est.transferred_bits / bandwidth_bps;
    est.t_total_s = est.t_mem_s;
    return est;
}

MigrationEstimate estimate_total(const VmSpec& vm, double bandwidth_bps,
                                 const MigrationConfig& cfg) {
    MigrationEstimate est = estimate_memory_copy(vm, bandwidth_bps, cfg);
    est.t_total_s = cfg.pre_overhead_s + est.t_mem_s + cfg.post_overhead_s;
    return est;
}

std::map<CandidateKey, double> normalize_exec_times(const std::map<CandidateKey, double>& times) {
    if (times.empty()) throw std::invalid_argument("cannot normalize an empty time map");
    double lo = times.begin()->second, hi = lo;
    for (const auto& [k, v] : times) {
        (void)k;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::map<CandidateKey, double> out;
    for (const auto& [k, v] : times) out[k] = (hi > lo) ? (v - lo) / (hi - lo) : 0.0;
    return out;
}

} // namespace migsim
