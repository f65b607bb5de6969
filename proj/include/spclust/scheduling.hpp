#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "spclust/errors.hpp"

namespace spclust {

/// Max-min scheduling (machine covering): items are group sizes, machines
/// are the k output groups. Item order is the caller's: in Algorithm 1 the
/// items are the alive single-linkage groups, so machine_of doubles as the
/// group -> output-group map.
struct ScheduleAssignment {
    std::vector<int> machine_of;   // item index -> machine in [0, k)
    std::vector<long long> loads;  // per-machine load sums
    long long min_load = 0;
};

namespace detail {

inline void check_schedule_args(const std::vector<long long>& sizes, int k) {
    if (k < 1) throw invalid_input_error("need at least one machine");
    if (sizes.empty()) throw invalid_input_error("no items to schedule");
    for (long long s : sizes) {
        if (s <= 0) throw invalid_input_error("item sizes must be positive");
    }
}

// Descending size, ties by original index.
inline std::vector<int> descending_order(const std::vector<long long>& sizes) {
    std::vector<int> order(sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        return a < b;
    });
    return order;
}

}  // namespace detail

/// Longest Processing Time rule: biggest item first, always onto the
/// least-loaded machine (lowest id on ties). 3/4-approximate for the
/// max-min objective.
inline ScheduleAssignment lpt_schedule(const std::vector<long long>& sizes, int k) {
    detail::check_schedule_args(sizes, k);
    ScheduleAssignment out;
    out.machine_of.assign(sizes.size(), -1);
    out.loads.assign(k, 0);
    for (int idx : detail::descending_order(sizes)) {
        const int m = static_cast<int>(
            std::min_element(out.loads.begin(), out.loads.end()) - out.loads.begin());
        out.machine_of[idx] = m;
        out.loads[m] += sizes[idx];
    }
    out.min_load = *std::min_element(out.loads.begin(), out.loads.end());
    return out;
}

/// Branch-and-bound exact optimum, seeded with the LPT incumbent.
/// Symmetry breaking: among machines with equal load only the lowest id is
/// tried. Pruning: a fractional "water fill" of the remaining total over
/// the current loads bounds the best reachable min load.
inline ScheduleAssignment exact_schedule(const std::vector<long long>& sizes, int k) {
    detail::check_schedule_args(sizes, k);
    const std::size_t n = sizes.size();
    if (!(n <= 20 || (k <= 4 && n <= 24))) {
        throw invalid_input_error("too large for exact solver");
    }

    const std::vector<int> order = detail::descending_order(sizes);
    std::vector<long long> sorted(n);
    for (std::size_t p = 0; p < n; ++p) sorted[p] = sizes[order[p]];

    const ScheduleAssignment lpt = lpt_schedule(sizes, k);
    long long best = lpt.min_load;
    std::vector<int> best_assign(n);  // machine per sorted position
    for (std::size_t p = 0; p < n; ++p) best_assign[p] = lpt.machine_of[order[p]];

    std::vector<long long> loads(k, 0);
    std::vector<int> assign(n, -1);
    std::vector<long long> fill(k);

    // Upper bound if the remaining total could be split arbitrarily:
    // raise the lowest loads to a common level.
    auto fluid_bound = [&](long long remaining) {
        fill.assign(loads.begin(), loads.end());
        std::sort(fill.begin(), fill.end());
        long long r = remaining;
        for (int i = 0; i + 1 < k; ++i) {
            const long long width = i + 1;
            const long long need = width * (fill[i + 1] - fill[i]);
            if (need > r) return fill[i] + r / width;
            r -= need;
        }
        return fill[k - 1] + r / k;
    };

    std::function<void(std::size_t, long long)> dfs = [&](std::size_t pos, long long remaining) {
        if (pos == n) {
            const long long mn = *std::min_element(loads.begin(), loads.end());
            if (mn > best) {
                best = mn;
                best_assign = assign;
            }
            return;
        }
        if (fluid_bound(remaining) <= best) return;
        for (int m = 0; m < k; ++m) {
            bool duplicate = false;
            for (int p = 0; p < m && !duplicate; ++p) duplicate = loads[p] == loads[m];
            if (duplicate) continue;
            loads[m] += sorted[pos];
            assign[pos] = m;
            dfs(pos + 1, remaining - sorted[pos]);
            loads[m] -= sorted[pos];
        }
        assign[pos] = -1;
    };
    dfs(0, std::accumulate(sorted.begin(), sorted.end(), 0LL));

    ScheduleAssignment out;
    out.machine_of.assign(n, -1);
    out.loads.assign(k, 0);
    for (std::size_t p = 0; p < n; ++p) {
        out.machine_of[order[p]] = best_assign[p];
        out.loads[best_assign[p]] += sorted[p];
    }
    out.min_load = *std::min_element(out.loads.begin(), out.loads.end());
    return out;
}

}  // namespace spclust
