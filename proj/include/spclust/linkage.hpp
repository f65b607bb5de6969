#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "spclust/dataset.hpp"
#include "spclust/errors.hpp"
#include "spclust/numfmt.hpp"

namespace spclust {

/// One agglomeration step. Group ids follow the dendrogram convention:
/// original points are 0..n-1, the merge at step r creates group n+r.
struct MergeRecord {
    int left;       // group containing the smaller endpoint of the realizing pair
    int right;      // group containing the larger endpoint
    int into;       // n + step
    double weight;  // spacing of the merged pair at that step
};

/// The full single-linkage dendrogram: n-1 merges with non-decreasing
/// weights, cuttable after any prefix. Immutable once built.
class MergeSequence {
public:
    MergeSequence(std::size_t n, std::vector<MergeRecord> merges)
        : n_(n), merges_(std::move(merges)) {
        // size of every group id, original or merged
        sizes_.resize(n_ + merges_.size());
        std::fill(sizes_.begin(), sizes_.begin() + n_, 1);
        consumed_at_.assign(n_ + merges_.size(), std::numeric_limits<int>::max());
        for (std::size_t r = 0; r < merges_.size(); ++r) {
            const auto& m = merges_[r];
            sizes_[m.into] = sizes_[m.left] + sizes_[m.right];
            consumed_at_[m.left] = static_cast<int>(r);
            consumed_at_[m.right] = static_cast<int>(r);
        }
    }

    std::size_t n() const { return n_; }
    const std::vector<MergeRecord>& merges() const { return merges_; }

    std::size_t group_size(int group_id) const { return sizes_[group_id]; }

    /// Ids of the groups alive after t merges, ascending. O(n).
    std::vector<int> alive_groups(std::size_t t) const {
        check_t(t);
        std::vector<int> out;
        out.reserve(n_ - t);
        for (std::size_t id = 0; id < n_ + t; ++id) {
            if (consumed_at_[id] >= static_cast<int>(t)) out.push_back(static_cast<int>(id));
        }
        return out;
    }

    /// Maps every point to the alive group id containing it after t merges.
    std::vector<int> group_of_points(std::size_t t) const {
        check_t(t);
        // parent chain restricted to the first t merges, with memoization
        std::vector<int> root(n_ + t, -1);
        std::vector<int> out(n_);
        for (std::size_t p = 0; p < n_; ++p) {
            int id = static_cast<int>(p);
            std::vector<int> path;
            while (consumed_at_[id] < static_cast<int>(t) && root[id] < 0) {
                path.push_back(id);
                id = merges_[consumed_at_[id]].into;
            }
            if (root[id] >= 0) id = root[id];
            for (int q : path) root[q] = id;
            out[p] = id;
        }
        return out;
    }

private:
    void check_t(std::size_t t) const {
        if (t > merges_.size()) throw invalid_input_error("merge prefix t out of range");
    }

    std::size_t n_;
    std::vector<MergeRecord> merges_;
    std::vector<std::size_t> sizes_;
    std::vector<int> consumed_at_;  // step at which a group id was merged away
};

enum class LinkageStrategy {
    automatic,  // kruskal for small/matrix inputs, prim for large point sets
    kruskal,    // sort all n(n-1)/2 pairs; O(n^2 log n) time, O(n^2) memory
    prim,       // dense MST then replay its edges; O(n^2) time, O(n) memory
};

namespace detail {

struct WeightedPair {
    double d;
    std::int32_t i;
    std::int32_t j;
};

inline bool pair_less(const WeightedPair& a, const WeightedPair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
}

// Replays edges (already sorted by weight, then endpoints) through a
// union-find, recording every merge. Edges inside a component are skipped,
// so passing all pairs gives Kruskal and passing MST edges gives the same
// dendrogram whenever distances are distinct.
inline std::vector<MergeRecord> replay_merges(std::size_t n, const std::vector<WeightedPair>& edges) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int> group_id(n);
    std::iota(group_id.begin(), group_id.end(), 0);

    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    std::vector<MergeRecord> merges;
    merges.reserve(n - 1);
    for (const auto& e : edges) {
        const int ra = find(e.i);
        const int rb = find(e.j);
        if (ra == rb) continue;
        const int into = static_cast<int>(n + merges.size());
        merges.push_back({group_id[ra], group_id[rb], into, e.d});
        parent[ra] = rb;
        group_id[rb] = into;
        if (merges.size() == n - 1) break;
    }
    return merges;
}

inline std::vector<MergeRecord> kruskal_merges(const DistanceModel& model) {
    const std::size_t n = model.size();
    std::vector<WeightedPair> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pairs.push_back({model.dist(i, j), static_cast<std::int32_t>(i),
                             static_cast<std::int32_t>(j)});
        }
    }
    std::sort(pairs.begin(), pairs.end(), pair_less);
    return replay_merges(n, pairs);
}

inline std::vector<MergeRecord> prim_merges(const DistanceModel& model) {
    const std::size_t n = model.size();
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::int32_t> from(n, 0);
    std::vector<bool> in_tree(n, false);
    std::vector<WeightedPair> edges;
    edges.reserve(n - 1);

    std::size_t current = 0;
    in_tree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
        double min_d = std::numeric_limits<double>::infinity();
        std::size_t next = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const double d = model.dist(current, v);
            if (d < best[v]) {
                best[v] = d;
                from[v] = static_cast<std::int32_t>(current);
            }
            if (best[v] < min_d) {
                min_d = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        const std::int32_t a = std::min<std::int32_t>(from[next], static_cast<std::int32_t>(next));
        const std::int32_t b = std::max<std::int32_t>(from[next], static_cast<std::int32_t>(next));
        edges.push_back({min_d, a, b});
        current = next;
    }
    std::sort(edges.begin(), edges.end(), pair_less);
    return replay_merges(n, edges);
}

}  // namespace detail

/// Runs single-linkage agglomeration once and records the whole merge
/// sequence. Equal spacings are broken by the realizing point pair
/// (smaller index first, then larger), so results are reproducible.
inline MergeSequence single_linkage(const DistanceModel& model,
                                    LinkageStrategy strategy = LinkageStrategy::automatic) {
    if (strategy == LinkageStrategy::automatic) {
        strategy = (!model.is_matrix() && model.size() > 2048) ? LinkageStrategy::prim
                                                               : LinkageStrategy::kruskal;
    }
    auto merges = strategy == LinkageStrategy::kruskal ? detail::kruskal_merges(model)
                                                       : detail::prim_merges(model);
    return MergeSequence(model.size(), std::move(merges));
}

/// Clustering after t merges: exactly n-t groups.
inline Labels cut(const MergeSequence& seq, std::size_t t) {
    return canonical_labels(seq.group_of_points(t), static_cast<int>(seq.n() - t));
}

/// For each requested k, the fraction of singleton groups in the
/// single-linkage k-clustering.
inline std::vector<std::pair<int, double>> singleton_sweep(const DistanceModel& model,
                                                           const std::vector<int>& k_values) {
    const MergeSequence seq = single_linkage(model);
    const std::size_t n = seq.n();
    std::vector<std::pair<int, double>> out;
    out.reserve(k_values.size());
    for (int k : k_values) {
        if (k < 2 || static_cast<std::size_t>(k) > n) {
            throw invalid_input_error("singleton sweep: k must be in [2, n]");
        }
        std::size_t singletons = 0;
        for (int id : seq.alive_groups(n - k)) {
            if (seq.group_size(id) == 1) ++singletons;
        }
        out.emplace_back(k, static_cast<double>(singletons) / k);
    }
    return out;
}

/// Writes the dendrogram as CSV: step (1-based), the two merged group ids,
/// and the merge weight.
inline void write_dendrogram_csv(const MergeSequence& seq, std::ostream& os) {
    os << "step,left,right,weight\n";
    for (std::size_t r = 0; r < seq.merges().size(); ++r) {
        const auto& m = seq.merges()[r];
        os << (r + 1) << ',' << m.left << ',' << m.right << ',' << fmt_double(m.weight) << '\n';
    }
}

}  // namespace spclust
