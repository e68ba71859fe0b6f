#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>

namespace migsim {

struct VmSpec {
    std::string id;
    int64_t memory_bytes = 0;
    double dirty_rate_bps = 0;        // used when dirty_rate_factor <= 0
    double dirty_rate_factor = 0;     // fraction of memory dirtied per second
    double compression = 1.0;         // rho in (0, 1]
    double cpu_demand_mips = 0;
    int vcpus = 1;
    int64_t virt_bandwidth_bps = 0;
    int64_t disk_bytes = 0;

    double memory_bits() const { return static_cast<double>(memory_bytes) * 8.0; }
    // Effective dirty page rate in bits/second.
    double dirty_rate() const {
        return dirty_rate_factor > 0 ? dirty_rate_factor * memory_bits() : dirty_rate_bps;
    }
    void validate() const;
};

struct MigrationConfig {
    int max_rounds = 30;              // Theta
    double downtime_threshold_s = 0.5;
    double pre_overhead_s = 0;
    double post_overhead_s = 0;

    void validate() const;
};

struct MigrationEstimate {
    double t_mem_s = 0;
    int rounds = 0;
    double t_total_s = 0;
    double downtime_s = 0;
    double transferred_bits = 0;
};

// sigma = rho * R / L, the per-round shrink factor of the dirty set.
double sigma(const VmSpec& vm, double bandwidth_bps);

// Iteration count i = min(ceil(log_sigma(V_thd / Mem)), Theta), clamped at 0.
// sigma == 0 copies once; sigma >= 1 never converges and runs Theta rounds.
int estimate_rounds(const VmSpec& vm, double bandwidth_bps, const MigrationConfig& cfg);

MigrationEstimate estimate_memory_copy(const VmSpec& vm, double bandwidth_bps,
                                       const MigrationConfig& cfg);

// Adds the pre/post computing overheads on top of the memory copy.
MigrationEstimate estimate_total(const VmSpec& vm, double bandwidth_bps,
                                 const MigrationConfig& cfg);

// (vm, src, dst) keys for per-candidate execution times.
using CandidateKey = std::tuple<std::string, std::string, std::string>;

// Min-max normalization onto [0,1]; a constant map collapses to all zeros.
std::map<CandidateKey, double> normalize_exec_times(const std::map<CandidateKey, double>& times);

} // namespace migsim
