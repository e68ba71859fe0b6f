#pragma once

// Independent reference implementations used only to check the library:
// subset-enumeration clique/MIS oracles and a round-by-round pre-copy
// simulation. These deliberately avoid the production code paths.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "migsim/dep_graph.hpp"
#include "migsim/mig_cost.hpp"
#include "migsim/rng.hpp"

namespace migsim::testing {

using AdjMatrix = std::vector<std::vector<char>>;

inline AdjMatrix random_graph(SplitMix64& rng, int n, double p) {
    AdjMatrix adj(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.next_double() < p) adj[i][j] = adj[j][i] = 1;
    return adj;
}

inline bool is_clique(const AdjMatrix& adj, unsigned mask) {
    int n = static_cast<int>(adj.size());
    for (int i = 0; i < n; ++i) {
        if (!(mask & (1u << i))) continue;
        for (int j = i + 1; j < n; ++j)
            if ((mask & (1u << j)) && !adj[i][j]) return false;
    }
    return true;
}

inline bool is_independent(const AdjMatrix& adj, unsigned mask) {
    int n = static_cast<int>(adj.size());
    for (int i = 0; i < n; ++i) {
        if (!(mask & (1u << i))) continue;
        for (int j = i + 1; j < n; ++j)
            if ((mask & (1u << j)) && adj[i][j]) return false;
    }
    return true;
}

inline std::vector<int> mask_to_set(unsigned mask, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

// All maximal cliques by checking every non-empty vertex subset (n <= ~20).
inline std::vector<std::vector<int>> brute_force_max_cliques(const AdjMatrix& adj) {
    int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (!is_clique(adj, mask)) continue;
        bool maximal = true;
        for (int v = 0; v < n && maximal; ++v) {
            if (mask & (1u << v)) continue;
            if (is_clique(adj, mask | (1u << v))) maximal = false;
        }
        if (maximal) out.push_back(mask_to_set(mask, n));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::vector<int>> brute_force_mis_containing(const AdjMatrix& adj, int v) {
    int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (!(mask & (1u << v))) continue;
        if (!is_independent(adj, mask)) continue;
        bool maximal = true;
        for (int u = 0; u < n && maximal; ++u) {
            if (mask & (1u << u)) continue;
            if (is_independent(adj, mask | (1u << u))) maximal = false;
        }
        if (maximal) out.push_back(mask_to_set(mask, n));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Degeneracy from the definition: the max over non-empty subgraphs of the
// subgraph's minimum degree.
inline int brute_force_degeneracy(const AdjMatrix& adj) {
    int n = static_cast<int>(adj.size());
    int best = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        int min_deg = n;
        for (int i = 0; i < n; ++i) {
            if (!(mask & (1u << i))) continue;
            int deg = 0;
            for (int j = 0; j < n; ++j)
                if ((mask & (1u << j)) && adj[i][j]) ++deg;
            min_deg = std::min(min_deg, deg);
        }
        best = std::max(best, min_deg);
    }
    return best;
}

// Abstract dependency graph whose node order matches the adjacency index.
inline DepGraph make_abstract_graph(const AdjMatrix& adj) {
    int n = static_cast<int>(adj.size());
    std::vector<MigrationCandidate> cands;
    for (int i = 0; i < n; ++i) {
        char s[8], d[8], id[8];
        std::snprintf(s, sizeof(s), "s%02d", i);
        std::snprintf(d, sizeof(d), "d%02d", i);
        std::snprintf(id, sizeof(id), "m%02d", i);
        cands.push_back({id, id, s, d});
    }
    return build_dep_graph(cands, [&](const SrcDstNode& a, const SrcDstNode& b) {
        int i = std::stoi(a.src.substr(1));
        int j = std::stoi(b.src.substr(1));
        return adj[i][j] != 0;
    });
}

// Round-by-round pre-copy: each round transmits the compressed dirty set at
// rate L while the VM re-dirties R bits per second; the final transmission
// is the stop-and-copy downtime.
struct PrecopyTrace {
    int rounds = 0;
    double t_mem_s = 0;
    double downtime_s = 0;
    double transferred_bits = 0;
};

inline PrecopyTrace simulate_precopy(const VmSpec& vm, double bandwidth, int max_rounds,
                                     double downtime_threshold_s) {
    PrecopyTrace tr;
    double remaining = vm.memory_bits();
    double v_thd = downtime_threshold_s * bandwidth;
    double rate = vm.dirty_rate();
    int i = 0;
    while (remaining > v_thd && i < max_rounds) {
        double send = vm.compression * remaining;
        double t = send / bandwidth;
        tr.t_mem_s += t;
        tr.transferred_bits += send;
        remaining = rate * t;
        ++i;
        if (remaining <= 0) break;
    }
    tr.rounds = i;
    double final_send = vm.compression * remaining;
    tr.downtime_s = final_send / bandwidth;
    tr.t_mem_s += tr.downtime_s;
    tr.transferred_bits += final_send;
    return tr;
}

} // namespace migsim::testing
