#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spclust/constrained.hpp"
#include "spclust/dataset.hpp"
#include "spclust/errors.hpp"
#include "spclust/linkage.hpp"
#include "spclust/numfmt.hpp"
#include "spclust/spacing.hpp"

namespace spclust {

inline constexpr std::size_t kOracleCap = 12;

/// Calls fn once per partition of [0,n) into exactly k blocks of size at
/// least L, canonical (blocks numbered by smallest member), via
/// restricted-growth strings with size pruning.
inline void for_each_clustering(std::size_t n, int k, long long L,
                                const std::function<void(const Labels&)>& fn) {
    if (n > kOracleCap) throw invalid_input_error("n exceeds the enumeration cap");
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw invalid_input_error("k must be in [1, n]");
    }
    if (L < 1) throw invalid_input_error("L must be a positive integer");
    if (L * k > static_cast<long long>(n)) {
        throw infeasible_error("infeasible: k*L = " + std::to_string(L * k) + " exceeds n = " +
                               std::to_string(n));
    }

    Labels labels;
    labels.k = k;
    labels.assign.assign(n, 0);
    std::vector<long long> count(k, 0);

    // deficit(b) points still owed to opened block b, plus L for each
    // block not opened yet; prune whenever the remaining points cannot
    // cover it
    std::function<void(std::size_t, int, long long)> rec = [&](std::size_t i, int used,
                                                               long long deficit) {
        if (i == n) {
            if (used == k) fn(labels);
            return;
        }
        const long long remaining = static_cast<long long>(n - i);
        for (int b = 0; b < std::min(used + 1, k); ++b) {
            const bool opens = b == used;
            long long d = deficit;  // already includes L for each unopened block
            if (count[b] < L) d -= 1;
            if (d > remaining - 1) continue;
            labels.assign[i] = b;
            ++count[b];
            rec(i + 1, used + (opens ? 1 : 0), d);
            --count[b];
        }
    };
    rec(0, 0, static_cast<long long>(k) * L);
}

/// Ground truth for a tiny instance: the best achievable Min-Sp and
/// MST-Sp over every (k, L)-clustering, with witnesses.
struct OptimalProfile {
    double best_min_sp = 0.0;
    double best_mst_sp = 0.0;
    Labels argmax_min_sp;
    Labels argmax_mst_sp;
    std::vector<double> w_star;  // MST weights of the MST-Sp winner, ascending
    std::uint64_t enumerated = 0;
};

inline OptimalProfile optimal_profile(const DistanceModel& model, int k, long long L) {
    if (k < 2) throw invalid_input_error("need at least two groups");
    OptimalProfile best;
    bool first = true;
    for_each_clustering(model.size(), k, L, [&](const Labels& labels) {
        ++best.enumerated;
        const SpacingGraph g = spacing_graph(model, labels);
        const double ms = min_sp(g);
        const MstResult mst = mst_sp(g);
        if (first || ms > best.best_min_sp) {
            best.best_min_sp = ms;
            best.argmax_min_sp = labels;
        }
        if (first || mst.total > best.best_mst_sp) {
            best.best_mst_sp = mst.total;
            best.argmax_mst_sp = labels;
            best.w_star = mst.sorted_weights;
        }
        first = false;
    });
    return best;
}

struct GuaranteeCheck {
    std::string name;
    bool pass = true;
    std::string witness;  // filled on failure
};

struct Verdict {
    std::vector<GuaranteeCheck> checks;
    bool all_pass = true;

    void add(std::string name, bool pass, std::string witness = "") {
        all_pass = all_pass && pass;
        checks.push_back({std::move(name), pass, pass ? "" : std::move(witness)});
    }
};

/// Runs every algorithm on a tiny instance and checks each of its
/// guarantees against exhaustive enumeration. Failures are reported, not
/// thrown.
inline Verdict verify_guarantees(const DistanceModel& model, int k, const SizeConstraint& c,
                                 std::uint64_t seed) {
    const std::size_t n = model.size();
    Verdict v;
    const MergeSequence seq = single_linkage(model);

    // unconstrained optimality of the single-linkage cut
    {
        const Labels sl = cut(seq, n - static_cast<std::size_t>(k));
        const SpacingGraph g = spacing_graph(model, sl);
        const double sl_min = min_sp(g);
        const MstResult sl_mst = mst_sp(g);
        const OptimalProfile profile = optimal_profile(model, k, 1);
        v.add("single_linkage_min_sp_optimal", sl_min == profile.best_min_sp,
              fmt_double(sl_min) + " < " + fmt_double(profile.best_min_sp));
        v.add("single_linkage_mst_sp_optimal", sl_mst.total == profile.best_mst_sp,
              fmt_double(sl_mst.total) + " < " + fmt_double(profile.best_mst_sp));

        bool dominated = true;
        std::string witness;
        for_each_clustering(n, k, 1, [&](const Labels& labels) {
            if (!dominated) return;
            const MstResult other = mst_sp(spacing_graph(model, labels));
            for (std::size_t i = 0; i < other.sorted_weights.size(); ++i) {
                if (sl_mst.sorted_weights[i] < other.sorted_weights[i]) {
                    dominated = false;
                    witness = "weight " + std::to_string(i + 1) + ": " +
                              fmt_double(sl_mst.sorted_weights[i]) + " < " +
                              fmt_double(other.sorted_weights[i]);
                    return;
                }
            }
        });
        v.add("single_linkage_mst_weights_dominate", dominated, witness);
    }

    // size-constrained guarantees against the (k, L) profile
    const OptimalProfile profile = optimal_profile(model, k, c.L);
    {
        const MinSpResult r = algo_min_sp(model, seq, k, c, SchedulerKind::exact);
        const double got = min_sp(spacing_graph(model, r.labels));
        v.add("min_sp_at_least_optimum", got >= profile.best_min_sp,
              fmt_double(got) + " < " + fmt_double(profile.best_min_sp));
        bool sizes_ok = true;
        for (std::size_t s : r.labels.group_sizes()) {
            sizes_ok = sizes_ok && static_cast<long long>(s) >= c.ceil_tau();
        }
        v.add("min_sp_sizes_meet_threshold", sizes_ok, "a group fell below the size threshold");
    }

    for (EllSchedule schedule : {EllSchedule::full, EllSchedule::fast}) {
        const std::string tag = schedule == EllSchedule::full ? "full" : "fast";
        const MaxMstResult r =
            constrained_max_mst(model, seq, k, c, seed, schedule, SchedulerKind::exact);

        bool stage_ok = true, final_ok = true;
        std::string stage_witness;
        double final_mst = 0.0;
        for (const TraceEntry& e : r.trace.entries) {
            if (e.skipped) continue;
            const double w = profile.w_star[static_cast<std::size_t>(k - e.ell)];
            if (e.min_sp_prime < w) {
                stage_ok = false;
                stage_witness = "ell " + std::to_string(e.ell) + ": " +
                                fmt_double(e.min_sp_prime) + " < " + fmt_double(w);
            }
            if (e.mst_sp < (e.ell - 1) * w) {
                stage_ok = false;
                stage_witness = "ell " + std::to_string(e.ell) + " mst: " +
                                fmt_double(e.mst_sp) + " < " + fmt_double((e.ell - 1) * w);
            }
            if (e.ell == r.trace.chosen_ell) final_mst = e.mst_sp;
        }
        v.add("stage_bounds_" + tag, stage_ok, stage_witness);

        const double bound = profile.best_mst_sp * r.trace.bound_1_over_H;
        final_ok = final_mst >= bound;
        v.add("final_mst_sp_bound_" + tag, final_ok,
              fmt_double(final_mst) + " < " + fmt_double(bound));

        const long long floor_size = split_size_floor(c, r.trace.rho);
        bool sizes_ok = true;
        for (std::size_t s : r.labels.group_sizes()) {
            sizes_ok = sizes_ok && static_cast<long long>(s) >= floor_size;
        }
        v.add("split_sizes_" + tag, sizes_ok, "a group fell below the split floor");
    }

    return v;
}

}  // namespace spclust
