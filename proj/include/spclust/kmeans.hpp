#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spclust/dataset.hpp"
#include "spclust/errors.hpp"
#include "spclust/rng.hpp"

namespace spclust {

struct KMeansResult {
    Labels labels;
    std::vector<double> centroids;  // k*dim row-major
    double inertia = 0.0;           // sum of squared point-to-centroid distances
    int iterations = 0;
    std::vector<double> inertia_by_iter;  // after each assignment pass
};

namespace detail {

inline double sq_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t t = 0; t < dim; ++t) {
        const double d = a[t] - b[t];
        s += d * d;
    }
    return s;
}

// D^2 sampling. Zero-weight points (already chosen or duplicates of a
// centroid) are skipped in the prefix walk, so centroids stay distinct
// while any distinct point remains.
inline std::vector<double> kmeanspp_init(const DistanceModel& model, int k, Rng& rng) {
    const std::size_t n = model.size();
    const std::size_t dim = model.dim();
    std::vector<double> centroids;
    centroids.reserve(static_cast<std::size_t>(k) * dim);

    auto push = [&](std::size_t p) {
        const double* x = model.point(p);
        centroids.insert(centroids.end(), x, x + dim);
    };
    push(rng.uniform_index(n));

    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            double best = std::numeric_limits<double>::infinity();
            for (int q = 0; q < c; ++q) {
                best = std::min(best, sq_dist(model.point(p), &centroids[q * dim], dim));
            }
            d2[p] = best;
            total += best;
        }
        if (total <= 0.0) {
            push(rng.uniform_index(n));
            continue;
        }
        const double r = rng.uniform_double() * total;
        double acc = 0.0;
        std::size_t chosen = n - 1;
        for (std::size_t p = 0; p < n; ++p) {
            if (d2[p] <= 0.0) continue;
            acc += d2[p];
            if (acc > r) {
                chosen = p;
                break;
            }
        }
        push(chosen);
    }
    return centroids;
}

}  // namespace detail

/// Lloyd iterations from a k-means++ start. Fully deterministic for a
/// given seed; nearest-centroid ties go to the lower centroid id, empty
/// clusters are reseeded with the point currently farthest from its
/// centroid.
inline KMeansResult kmeans(const DistanceModel& model, int k, std::uint64_t seed,
                           int max_iter = 300, double tol = 1e-6) {
    if (model.is_matrix()) throw invalid_input_error("k-means requires coordinates");
    const std::size_t n = model.size();
    const std::size_t dim = model.dim();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw invalid_input_error("k must be in [1, n]");
    }
    if (max_iter < 1) throw invalid_input_error("max_iter must be positive");

    double scale = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t t = 0; t < dim; ++t) scale = std::max(scale, std::abs(model.point(p)[t]));
    }

    Rng rng(seed);
    KMeansResult res;
    res.centroids = detail::kmeanspp_init(model, k, rng);
    res.labels.k = k;
    res.labels.assign.assign(n, 0);
    std::vector<double> d2(n);
    std::vector<std::size_t> count(k);
    std::vector<double> next(res.centroids.size());

    for (int iter = 1; iter <= max_iter; ++iter) {
        // assignment
        double inertia = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < k; ++c) {
                const double d = detail::sq_dist(model.point(p), &res.centroids[c * dim], dim);
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            res.labels.assign[p] = arg;
            d2[p] = best;
            inertia += best;
        }
        res.inertia_by_iter.push_back(inertia);

        // reseed empty clusters from the farthest points
        std::fill(count.begin(), count.end(), 0);
        for (int a : res.labels.assign) ++count[a];
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) continue;
            std::size_t far = n;
            for (std::size_t p = 0; p < n; ++p) {
                if (count[res.labels.assign[p]] <= 1) continue;  // keep donors nonempty
                if (far == n || d2[p] > d2[far]) far = p;
            }
            if (far == n) throw invalid_input_error("cannot repair empty cluster");
            --count[res.labels.assign[far]];
            res.labels.assign[far] = c;
            count[c] = 1;
            d2[far] = 0.0;
        }

        // centroid update
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            const double* x = model.point(p);
            double* c = &next[static_cast<std::size_t>(res.labels.assign[p]) * dim];
            for (std::size_t t = 0; t < dim; ++t) c[t] += x[t];
        }
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            for (std::size_t t = 0; t < dim; ++t) {
                double& v = next[c * dim + t];
                v /= count[c];
                shift = std::max(shift, std::abs(v - res.centroids[c * dim + t]));
            }
        }
        res.centroids.swap(next);
        res.iterations = iter;
        if (shift <= tol * scale) break;
    }

    res.inertia = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        res.inertia += detail::sq_dist(
            model.point(p), &res.centroids[static_cast<std::size_t>(res.labels.assign[p]) * dim],
            dim);
    }
    return res;
}

}  // namespace spclust
