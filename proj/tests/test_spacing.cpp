#include <catch2/catch_amalgamated.hpp>

#include "spclust/linkage.hpp"
#include "spclust/spacing.hpp"
#include "support.hpp"

using namespace spclust;

namespace {

Labels make_labels(std::vector<int> assign, int k) {
    Labels l;
    l.assign = std::move(assign);
    l.k = k;
    return l;
}

// the worked instance: for k=3, D=100, points (D·i, j) for i,j in [k-1]
// plus (D, k)
const std::vector<std::array<double, 2>> kWorked = {
    {100, 1}, {100, 2}, {200, 1}, {200, 2}, {100, 3}};

}  // namespace

TEST_CASE("spacing graph on three singletons") {
    const DistanceModel m = support::model_1d({0, 5, 20});
    const SpacingGraph g = spacing_graph(m, make_labels({0, 1, 2}, 3));
    REQUIRE(g.at(0, 1) == 5.0);
    REQUIRE(g.at(0, 2) == 20.0);
    REQUIRE(g.at(1, 2) == 15.0);
    REQUIRE(g.at(2, 1) == 15.0);
    REQUIRE(min_sp(g) == 5.0);
    const MstResult mst = mst_sp(g);
    REQUIRE(mst.total == 20.0);
    REQUIRE(mst.sorted_weights == std::vector<double>{5.0, 15.0});
}

TEST_CASE("closest cross pair defines the spacing") {
    const DistanceModel m = support::model_1d({0, 1, 10, 11});
    const SpacingGraph g = spacing_graph(m, make_labels({0, 0, 1, 1}, 2));
    REQUIRE(g.at(0, 1) == 9.0);
}

TEST_CASE("spacing graph rejects bad label shapes") {
    const DistanceModel m = support::model_1d({0, 1, 10});
    REQUIRE_THROWS_WITH(spacing_graph(m, make_labels({0, 0, 0}, 1)),
                        Catch::Matchers::ContainsSubstring("two groups"));
    REQUIRE_THROWS_AS(spacing_graph(m, make_labels({0, 1}, 2)), invalid_input_error);
}

TEST_CASE("worked instance: single-linkage vs row grouping") {
    const DistanceModel m = support::model_2d(kWorked);
    const MergeSequence seq = single_linkage(m);

    const Labels sl = cut(seq, 2);  // k=3
    const SpacingGraph g_sl = spacing_graph(m, sl);
    // the left column plus both right points: spacings 100, 100 and 1
    REQUIRE(min_sp(g_sl) == 1.0);
    const MstResult mst_sl = mst_sp(g_sl);
    REQUIRE(mst_sl.total == 101.0);
    REQUIRE(mst_sl.sorted_weights == std::vector<double>{1.0, 100.0});

    const Labels rows = make_labels({0, 1, 0, 1, 2}, 3);
    const MstResult mst_rows = mst_sp(spacing_graph(m, rows));
    REQUIRE(mst_rows.total == 2.0);
}

TEST_CASE("min spacing matches a direct double loop") {
    Rng rng(51);
    for (int round = 0; round < 10; ++round) {
        const std::size_t n = 6 + rng.uniform_index(10);
        const DistanceModel m = support::random_distinct_model(rng, n, 2);
        const int k = 2 + static_cast<int>(rng.uniform_index(3));
        std::vector<int> raw(n);
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i)
                                                     : static_cast<int>(rng.uniform_index(k));
        }
        const Labels labels = canonical_labels(raw, k);
        double direct = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (labels.assign[i] != labels.assign[j]) direct = std::min(direct, m.dist(i, j));
            }
        }
        REQUIRE(min_sp(spacing_graph(m, labels)) == direct);
    }
}

TEST_CASE("mst properties on random spacing graphs") {
    Rng rng(52);
    for (int round = 0; round < 12; ++round) {
        const int k = 3 + static_cast<int>(rng.uniform_index(4));  // 3..6
        const std::size_t n = static_cast<std::size_t>(k) + 4 + rng.uniform_index(6);
        const DistanceModel m = support::random_distinct_model(rng, n, 2);
        std::vector<int> raw(n);
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i)
                                                     : static_cast<int>(rng.uniform_index(k));
        }
        const Labels labels = canonical_labels(raw, k);
        const SpacingGraph g = spacing_graph(m, labels);
        const MstResult mst = mst_sp(g);

        // exhaustive check of the total
        REQUIRE(mst.total == support::naive_mst_total(g.w, k));
        // cheapest tree edge is the minimum spacing
        REQUIRE(min_sp(g) == mst.sorted_weights.front());
        REQUIRE(std::is_sorted(mst.sorted_weights.begin(), mst.sorted_weights.end()));

        // every non-tree edge is at least as heavy as each edge on the
        // tree path between its endpoints
        std::vector<std::vector<std::pair<int, double>>> adj(k);
        for (const MstEdge& e : mst.edges) {
            adj[e.a].emplace_back(e.b, e.weight);
            adj[e.b].emplace_back(e.a, e.weight);
        }
        auto path_max = [&](int from, int to) {
            std::vector<double> best(k, -1.0);
            std::vector<int> stack{from};
            best[from] = 0.0;
            while (!stack.empty()) {
                const int at = stack.back();
                stack.pop_back();
                for (const auto& [nxt, w] : adj[at]) {
                    if (best[nxt] < 0) {
                        best[nxt] = std::max(best[at], w);
                        stack.push_back(nxt);
                    }
                }
            }
            return best[to];
        };
        for (int a = 0; a < k; ++a) {
            for (int b = a + 1; b < k; ++b) {
                REQUIRE(g.at(a, b) >= path_max(a, b));
            }
        }
    }
}

TEST_CASE("mst total is invariant under relabeling") {
    Rng rng(53);
    const DistanceModel m = support::random_distinct_model(rng, 12, 2);
    std::vector<int> raw = {0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3};
    const Labels a = canonical_labels(raw, 4);
    // rotate group ids
    std::vector<int> rotated(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) rotated[i] = (raw[i] + 1) % 4;
    Labels b;
    b.assign = rotated;
    b.k = 4;
    const MstResult ma = mst_sp(spacing_graph(m, a));
    const MstResult mb = mst_sp(spacing_graph(m, b));
    REQUIRE(ma.total == mb.total);
    REQUIRE(ma.sorted_weights == mb.sorted_weights);
}

TEST_CASE("report bundles the metrics") {
    const DistanceModel m = support::model_1d({0, 1, 10, 11});
    const ClusteringReport rep = report(m, canonical_labels({0, 0, 1, 1}, 2), 7.0);
    REQUIRE(rep.min_sp == 9.0);
    REQUIRE(rep.mst_sp == 9.0);
    REQUIRE(rep.sizes == std::vector<std::size_t>{2, 2});
    REQUIRE(rep.runtime_s == 7.0);
    // centroids 0.5 and 10.5, four squared deviations of 0.25
    REQUIRE(rep.quad_loss == 1.0);
}

TEST_CASE("quadratic loss only exists in points mode") {
    const DistanceModel m = DistanceModel::from_matrix({0, 1, 9, 1, 0, 8, 9, 8, 0}, 3);
    const ClusteringReport rep = report(m, canonical_labels({0, 0, 1}, 2));
    REQUIRE_FALSE(rep.quad_loss.has_value());
    REQUIRE_FALSE(rep.runtime_s.has_value());
    REQUIRE(rep.min_sp == 8.0);
}

TEST_CASE("report requires at least two groups") {
    const DistanceModel m = support::model_1d({0, 1, 2});
    REQUIRE_THROWS_AS(report(m, make_labels({0, 0, 0}, 1)), invalid_input_error);
}

TEST_CASE("quadratic loss matches the centroid formula in 2-D") {
    const DistanceModel m = support::model_2d({{0, 0}, {2, 0}, {10, 0}, {10, 4}});
    const ClusteringReport rep = report(m, canonical_labels({0, 0, 1, 1}, 2));
    // centroids (1,0) and (10,2): 1+1 + 4+4
    REQUIRE(rep.quad_loss == 10.0);
}
