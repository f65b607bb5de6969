#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "spclust/dataset.hpp"
#include "spclust/errors.hpp"
#include "spclust/threading.hpp"

namespace spclust {

/// Complete graph over the k groups; w(i,j) is the closest cross-group
/// point distance ("spacing"). Diagonal entries are unused.
struct SpacingGraph {
    int k = 0;
    std::vector<double> w;  // k*k row-major, symmetric

    double at(int i, int j) const { return w[static_cast<std::size_t>(i) * k + j]; }
};

struct MstEdge {
    int a;
    int b;
    double weight;
};

struct MstResult {
    std::vector<MstEdge> edges;          // k-1 edges of one minimum spanning tree
    double total = 0.0;                  // invariant across all MSTs
    std::vector<double> sorted_weights;  // ascending; also tie-invariant
};

/// One O(n^2) pass over point pairs. This is the only hot loop in the
/// library, so it is block-parallel; each worker fills a private matrix
/// and the merge is a min-reduction, which makes the result independent
/// of the schedule.
inline SpacingGraph spacing_graph(const DistanceModel& model, const Labels& labels) {
    if (labels.k < 2) throw invalid_input_error("need at least two groups");
    labels.validate(model.size());

    const std::size_t n = model.size();
    const int k = labels.k;
    const std::size_t cells = static_cast<std::size_t>(k) * k;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> local(static_cast<std::size_t>(max_threads()),
                                           std::vector<double>(cells, inf));
    parallel_blocks(n, [&](int block, std::size_t lo, std::size_t hi) {
        auto& w = local[static_cast<std::size_t>(block)];
        for (std::size_t i = lo; i < hi; ++i) {
            const int a = labels.assign[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                const int b = labels.assign[j];
                if (a == b) continue;
                const double d = model.dist(i, j);
                auto& cell = w[static_cast<std::size_t>(a) * k + b];
                if (d < cell) {
                    cell = d;
                    w[static_cast<std::size_t>(b) * k + a] = d;
                }
            }
        }
    });

    SpacingGraph g;
    g.k = k;
    g.w.assign(cells, inf);
    for (const auto& w : local) {
        for (std::size_t c = 0; c < cells; ++c) g.w[c] = std::min(g.w[c], w[c]);
    }
    for (int i = 0; i < k; ++i) g.w[static_cast<std::size_t>(i) * k + i] = 0.0;
    return g;
}

/// Smallest off-diagonal spacing.
inline double min_sp(const SpacingGraph& g) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.k; ++i) {
        for (int j = i + 1; j < g.k; ++j) best = std::min(best, g.at(i, j));
    }
    return best;
}

/// Dense Prim over G_C. Ties go to the lexicographically smaller edge,
/// though nothing downstream depends on which tied tree is picked.
inline MstResult mst_sp(const SpacingGraph& g) {
    if (g.k < 2) throw invalid_input_error("need at least two groups");
    const int k = g.k;
    std::vector<double> best(k, std::numeric_limits<double>::infinity());
    std::vector<int> from(k, 0);
    std::vector<bool> in_tree(k, false);
    in_tree[0] = true;

    MstResult res;
    res.edges.reserve(k - 1);
    int current = 0;
    for (int step = 1; step < k; ++step) {
        double min_d = std::numeric_limits<double>::infinity();
        int next = -1;
        for (int v = 0; v < k; ++v) {
            if (in_tree[v]) continue;
            const double d = g.at(current, v);
            if (d < best[v]) {
                best[v] = d;
                from[v] = current;
            }
            if (best[v] < min_d) {
                min_d = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        res.edges.push_back({std::min(from[next], next), std::max(from[next], next), min_d});
        current = next;
    }
    res.sorted_weights.resize(res.edges.size());
    std::transform(res.edges.begin(), res.edges.end(), res.sorted_weights.begin(),
                   [](const MstEdge& e) { return e.weight; });
    std::sort(res.sorted_weights.begin(), res.sorted_weights.end());
    // summing in sorted order keeps the total bitwise-stable under group
    // relabeling (any MST of the graph has the same weight multiset)
    for (double w : res.sorted_weights) res.total += w;
    return res;
}

/// Metric bundle for one clustering. quad_loss is the k-means objective
/// (sum of squared distances to group centroids) and only exists in
/// points mode.
struct ClusteringReport {
    double min_sp = 0.0;
    double mst_sp = 0.0;
    std::vector<std::size_t> sizes;  // ascending
    std::optional<double> quad_loss;
    std::optional<double> runtime_s;
};

inline ClusteringReport report(const DistanceModel& model, const Labels& labels,
                               std::optional<double> runtime_s = std::nullopt) {
    const SpacingGraph g = spacing_graph(model, labels);
    ClusteringReport rep;
    rep.min_sp = min_sp(g);
    rep.mst_sp = mst_sp(g).total;
    rep.sizes = labels.group_sizes();
    std::sort(rep.sizes.begin(), rep.sizes.end());
    rep.runtime_s = runtime_s;

    if (!model.is_matrix()) {
        const std::size_t dim = model.dim();
        std::vector<double> centroid(static_cast<std::size_t>(labels.k) * dim, 0.0);
        std::vector<std::size_t> count(labels.k, 0);
        for (std::size_t p = 0; p < model.size(); ++p) {
            const int gid = labels.assign[p];
            ++count[gid];
            const double* x = model.point(p);
            for (std::size_t d = 0; d < dim; ++d) centroid[gid * dim + d] += x[d];
        }
        for (int gid = 0; gid < labels.k; ++gid) {
            for (std::size_t d = 0; d < dim; ++d) centroid[gid * dim + d] /= count[gid];
        }
        double loss = 0.0;
        for (std::size_t p = 0; p < model.size(); ++p) {
            const int gid = labels.assign[p];
            const double* x = model.point(p);
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = x[d] - centroid[gid * dim + d];
                loss += diff * diff;
            }
        }
        rep.quad_loss = loss;
    }
    return rep;
}

}  // namespace spclust
