#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spclust/constraint.hpp"
#include "spclust/dataset.hpp"
#include "spclust/errors.hpp"
#include "spclust/linkage.hpp"
#include "spclust/rng.hpp"
#include "spclust/scheduling.hpp"
#include "spclust/spacing.hpp"

namespace spclust {

enum class SchedulerKind { lpt, exact };

/// How AlgoMinSp searches for the largest feasible merge prefix t.
/// binary is the default; with the exact scheduler feasibility is monotone
/// in t (merging items can only lower the optimal min load), so plain
/// bisection is sound. Under LPT it may not be, so after bisecting we scan
/// the prefixes above the found t and take the highest feasible one —
/// that is exactly what the descending linear scan would have returned.
/// linear runs the descending scan directly (reference implementation).
enum class TSearch { binary, linear };

struct MinSpResult {
    Labels labels;
    std::size_t t = 0;  // merge prefix that produced the grouping
};

namespace detail {

// Assignment of the alive groups at prefix t onto k machines, or nullopt
// when the scheduled min load misses the tau threshold.
inline std::optional<ScheduleAssignment> schedule_at(const MergeSequence& seq, std::size_t t,
                                                     int k, const SizeConstraint& c,
                                                     SchedulerKind sched) {
    const std::vector<int> alive = seq.alive_groups(t);
    std::vector<long long> sizes(alive.size());
    for (std::size_t i = 0; i < alive.size(); ++i) {
        sizes[i] = static_cast<long long>(seq.group_size(alive[i]));
    }
    const ScheduleAssignment a =
        sched == SchedulerKind::exact ? exact_schedule(sizes, k) : lpt_schedule(sizes, k);
    if (a.min_load < c.ceil_tau()) return std::nullopt;
    return a;
}

inline Labels combine(const MergeSequence& seq, std::size_t t, int k,
                      const ScheduleAssignment& a) {
    const std::vector<int> alive = seq.alive_groups(t);
    std::vector<int> machine_of_id(seq.n() + t, -1);
    for (std::size_t i = 0; i < alive.size(); ++i) machine_of_id[alive[i]] = a.machine_of[i];
    const std::vector<int> gop = seq.group_of_points(t);
    std::vector<int> raw(seq.n());
    for (std::size_t p = 0; p < seq.n(); ++p) raw[p] = machine_of_id[gop[p]];
    return canonical_labels(raw, k);
}

}  // namespace detail

/// Algorithm 1: cut the single-linkage run at the largest prefix t whose
/// groups can be scheduled onto k machines with every load >= (1-eps)L,
/// then merge each machine's groups into one output group.
inline MinSpResult algo_min_sp(const DistanceModel& model, const MergeSequence& seq, int k,
                               const SizeConstraint& c, SchedulerKind sched = SchedulerKind::lpt,
                               TSearch search = TSearch::binary) {
    const std::size_t n = seq.n();
    if (k < 2 || static_cast<std::size_t>(k) > n) {
        throw invalid_input_error("k must be in [2, n]");
    }
    if (c.L * k > static_cast<long long>(n)) {
        throw infeasible_error("infeasible: k*L = " + std::to_string(c.L * k) + " exceeds n = " +
                               std::to_string(n));
    }
    (void)model;

    const std::size_t t_max = n - static_cast<std::size_t>(k);
    auto feasible = [&](std::size_t t) { return detail::schedule_at(seq, t, k, c, sched); };

    std::optional<ScheduleAssignment> at_t;
    std::size_t t = 0;
    if (search == TSearch::linear) {
        for (std::size_t cand = t_max + 1; cand-- > 0;) {
            if ((at_t = feasible(cand))) {
                t = cand;
                break;
            }
        }
    } else {
        auto lo_sched = feasible(0);
        if (lo_sched) {
            if ((at_t = feasible(t_max))) {
                t = t_max;
            } else {
                std::size_t lo = 0;  // feasible
                std::size_t hi = t_max;  // infeasible
                while (hi - lo > 1) {
                    const std::size_t mid = lo + (hi - lo) / 2;
                    if (auto s = feasible(mid)) {
                        lo = mid;
                        lo_sched = std::move(s);
                    } else {
                        hi = mid;
                    }
                }
                t = lo;
                at_t = std::move(lo_sched);
                // Bisection assumed monotone feasibility. Under LPT that can
                // fail, so confirm nothing above t is feasible; if something
                // is, the descending scan would have stopped there first.
                if (sched == SchedulerKind::lpt) {
                    for (std::size_t cand = t_max; cand > t; --cand) {
                        if (auto s = feasible(cand)) {
                            t = cand;
                            at_t = std::move(s);
                            break;
                        }
                    }
                }
            }
        }
    }

    if (!at_t && sched == SchedulerKind::lpt) {
        // LPT found nothing anywhere; the exact scheduler might still cover
        // the all-singletons prefix.
        if ((at_t = detail::schedule_at(seq, 0, k, c, SchedulerKind::exact))) t = 0;
    }
    if (!at_t) {
        throw infeasible_error("no merge prefix satisfies the size threshold");
    }
    return {detail::combine(seq, t, k, *at_t), t};
}

/// Splits ids into m parts whose sizes differ by at most one, membership
/// randomized by rng.
inline std::vector<std::vector<int>> balanced_split(std::vector<int> ids, std::size_t m,
                                                    Rng& rng) {
    if (m < 1 || m > ids.size()) throw invalid_input_error("split count out of range");
    rng.shuffle(ids);
    std::vector<std::vector<int>> parts(m);
    const std::size_t base = ids.size() / m;
    const std::size_t extra = ids.size() % m;
    std::size_t at = 0;
    for (std::size_t p = 0; p < m; ++p) {
        const std::size_t len = base + (p < extra ? 1 : 0);
        parts[p].assign(ids.begin() + at, ids.begin() + at + len);
        at += len;
    }
    return parts;
}

/// The reduced ell schedule: distinct values of ceil(k / 2^t) that are
/// still >= 2, largest first.
inline std::vector<int> fast_schedule(int k) {
    std::vector<int> out;
    for (long long p = 1;; p *= 2) {
        const long long v = (k + p - 1) / p;
        if (v < 2) break;
        if (out.empty() || out.back() != static_cast<int>(v)) out.push_back(static_cast<int>(v));
    }
    return out;
}

inline double harmonic(int m) {
    double h = 0.0;
    for (int i = 1; i <= m; ++i) h += 1.0 / i;
    return h;
}

/// Every group surviving the split loop keeps at least this many points.
inline long long split_size_floor(const SizeConstraint& c, const Rational& rho) {
    return floor_rational(rho * c.tau() / Rational(2));
}

struct TraceEntry {
    int ell = 0;
    bool skipped = false;
    std::string reason;            // only when skipped
    double min_sp_prime = 0.0;     // Min-Sp of the ell-group stage
    double mst_sp = 0.0;           // MST-Sp after transforming to k groups
    bool split_clamped = false;    // a SplitNumber fell outside [1, |group|]
};

struct MaxMstTrace {
    std::vector<TraceEntry> entries;
    Rational rho{1};
    int chosen_ell = -1;
    double bound_1_over_H = 0.0;
};

struct MaxMstResult {
    Labels labels;
    MaxMstTrace trace;
};

enum class EllSchedule { full, fast };

namespace detail {

struct TransformOutcome {
    Labels labels;
    bool clamped = false;
};

// Algorithm 2's split loop: turn the ell-group clustering into exactly k
// groups by visiting groups from largest to smallest and splitting each
// into SplitNumber = floor(2|group| / (rho*(1-eps)L)) balanced parts,
// finishing early once exactly k groups are reachable.
inline TransformOutcome transform_to_k(const Labels& a_prime, int k, const SizeConstraint& c,
                                       const Rational& rho, Rng& rng) {
    std::vector<std::vector<int>> groups = a_prime.groups();
    std::vector<int> visit(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) visit[i] = static_cast<int>(i);
    // largest first; groups() lists members ascending, so front() is the
    // smallest member and serves as the tie-break
    std::sort(visit.begin(), visit.end(), [&](int a, int b) {
        if (groups[a].size() != groups[b].size()) return groups[a].size() > groups[b].size();
        return groups[a].front() < groups[b].front();
    });

    const Rational denom = rho * c.tau();
    TransformOutcome out;
    std::vector<std::vector<int>> accepted;
    accepted.reserve(k);
    std::size_t non_visited = groups.size();
    bool finished = false;
    std::size_t next = 0;
    for (; next < visit.size(); ++next) {
        auto& g = groups[visit[next]];
        --non_visited;
        long long split =
            floor_rational(Rational(2 * static_cast<long long>(g.size())) / denom);
        if (split < 1 || split > static_cast<long long>(g.size())) {
            out.clamped = true;
            split = std::clamp<long long>(split, 1, static_cast<long long>(g.size()));
        }
        if (accepted.size() + non_visited + static_cast<std::size_t>(split) >=
            static_cast<std::size_t>(k)) {
            const std::size_t needed =
                static_cast<std::size_t>(k) - accepted.size() - non_visited;
            auto parts = balanced_split(std::move(g), needed, rng);
            for (auto& p : parts) accepted.push_back(std::move(p));
            finished = true;
            ++next;
            break;
        }
        auto parts = balanced_split(std::move(g), static_cast<std::size_t>(split), rng);
        for (auto& p : parts) accepted.push_back(std::move(p));
    }
    if (!finished) {
        throw infeasible_error("split loop ended with fewer than k groups");
    }
    for (; next < visit.size(); ++next) accepted.push_back(std::move(groups[visit[next]]));

    std::vector<int> raw(a_prime.size());
    for (std::size_t gi = 0; gi < accepted.size(); ++gi) {
        for (int p : accepted[gi]) raw[p] = static_cast<int>(gi);
    }
    out.labels = canonical_labels(raw, k);
    return out;
}

}  // namespace detail

/// Algorithm 2: run AlgoMinSp for every ell in the schedule, reshape each
/// ell-group result into k groups via seeded balanced splits, and keep the
/// candidate with maximum MST-Sp (ties to the smaller ell).
inline MaxMstResult constrained_max_mst(const DistanceModel& model, const MergeSequence& seq,
                                        int k, const SizeConstraint& c, std::uint64_t seed,
                                        EllSchedule schedule = EllSchedule::full,
                                        SchedulerKind sched = SchedulerKind::lpt) {
    const std::size_t n = seq.n();
    if (k < 2 || static_cast<std::size_t>(k) > n) {
        throw invalid_input_error("k must be in [2, n]");
    }
    if (c.L * k > static_cast<long long>(n)) {
        throw infeasible_error("infeasible: k*L = " + std::to_string(c.L * k) + " exceeds n = " +
                               std::to_string(n));
    }

    std::vector<int> ells;
    if (schedule == EllSchedule::full) {
        for (int ell = 2; ell <= k; ++ell) ells.push_back(ell);
    } else {
        ells = fast_schedule(k);
    }

    MaxMstResult res;
    res.trace.rho = std::min(Rational(static_cast<long long>(n), c.L * k), Rational(2));
    res.trace.bound_1_over_H = 1.0 / harmonic(k - 1);

    double best_mst = 0.0;
    for (int ell : ells) {
        TraceEntry entry;
        entry.ell = ell;
        try {
            const MinSpResult stage = algo_min_sp(model, seq, ell, c, sched);
            entry.min_sp_prime = min_sp(spacing_graph(model, stage.labels));
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(ell)));
            auto outcome = detail::transform_to_k(stage.labels, k, c, res.trace.rho, rng);
            entry.split_clamped = outcome.clamped;
            entry.mst_sp = mst_sp(spacing_graph(model, outcome.labels)).total;
            const bool better =
                res.trace.chosen_ell < 0 || entry.mst_sp > best_mst ||
                (entry.mst_sp == best_mst && ell < res.trace.chosen_ell);
            if (better) {
                res.labels = std::move(outcome.labels);
                res.trace.chosen_ell = ell;
                best_mst = entry.mst_sp;
            }
        } catch (const infeasible_error& e) {
            entry.skipped = true;
            entry.reason = e.what();
        } catch (const invalid_input_error& e) {
            entry.skipped = true;
            entry.reason = e.what();
        }
        res.trace.entries.push_back(std::move(entry));
    }

    if (res.trace.chosen_ell < 0) {
        throw infeasible_error("every ell in the schedule failed");
    }
    return res;
}

}  // namespace spclust
