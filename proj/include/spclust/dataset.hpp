#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spclust/errors.hpp"
#include "spclust/numfmt.hpp"

namespace spclust {

/// The instance: n points with a queryable distance. Either coordinates in
/// R^d with Euclidean distance, or an explicit symmetric distance matrix.
/// Immutable after construction; safe for concurrent reads.
class DistanceModel {
public:
    static DistanceModel from_points(std::vector<double> coords, std::size_t n, std::size_t dim) {
        DistanceModel m;
        m.n_ = n;
        m.dim_ = dim;
        m.data_ = std::move(coords);
        m.is_matrix_ = false;
        m.validate();
        return m;
    }

    static DistanceModel from_matrix(std::vector<double> matrix, std::size_t n) {
        DistanceModel m;
        m.n_ = n;
        m.dim_ = 0;
        m.data_ = std::move(matrix);
        m.is_matrix_ = true;
        m.validate();
        return m;
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    bool is_matrix() const { return is_matrix_; }

    double dist(std::size_t i, std::size_t j) const {
        if (is_matrix_) return data_[i * n_ + j];
        const double* a = &data_[i * dim_];
        const double* b = &data_[j * dim_];
        double s = 0.0;
        for (std::size_t t = 0; t < dim_; ++t) {
            const double d = a[t] - b[t];
            s += d * d;
        }
        return std::sqrt(s);
    }

    // Points mode only.
    const double* point(std::size_t i) const { return &data_[i * dim_]; }

private:
    void validate() const {
        if (n_ < 2) throw invalid_input_error("need at least 2 points");
        const std::size_t expect = is_matrix_ ? n_ * n_ : n_ * dim_;
        if (data_.size() != expect || (!is_matrix_ && dim_ == 0)) {
            throw invalid_input_error("model shape mismatch");
        }
        for (double v : data_) {
            if (!std::isfinite(v)) throw invalid_input_error("non-finite value in input");
        }
        if (is_matrix_) {
            double scale = 1.0;
            for (double v : data_) scale = std::max(scale, std::abs(v));
            const double tol = 1e-9 * scale;
            for (std::size_t i = 0; i < n_; ++i) {
                if (std::abs(data_[i * n_ + i]) > tol) {
                    throw invalid_input_error("matrix diagonal must be zero (row " +
                                              std::to_string(i) + ")");
                }
                for (std::size_t j = i + 1; j < n_; ++j) {
                    if (data_[i * n_ + j] < 0 || data_[j * n_ + i] < 0) {
                        throw invalid_input_error("negative distance at (" + std::to_string(i) +
                                                  "," + std::to_string(j) + ")");
                    }
                    if (std::abs(data_[i * n_ + j] - data_[j * n_ + i]) > tol) {
                        throw invalid_input_error("asymmetric matrix at (" + std::to_string(i) +
                                                  "," + std::to_string(j) + ")");
                    }
                }
            }
        }
    }

    friend DistanceModel load_matrix(const std::string&);

    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    bool is_matrix_ = false;
    std::vector<double> data_;
};

/// A partition of [0, n) into k nonempty groups, ids in [0, k).
struct Labels {
    std::vector<int> assign;
    int k = 0;

    std::size_t size() const { return assign.size(); }

    std::vector<std::size_t> group_sizes() const {
        std::vector<std::size_t> sizes(k, 0);
        for (int g : assign) ++sizes[g];
        return sizes;
    }

    std::vector<std::vector<int>> groups() const {
        std::vector<std::vector<int>> out(k);
        for (std::size_t i = 0; i < assign.size(); ++i) {
            out[assign[i]].push_back(static_cast<int>(i));
        }
        return out;
    }

    void validate(std::size_t expect_n = 0) const {
        if (expect_n > 0 && assign.size() != expect_n) {
            throw invalid_input_error("labels cover " + std::to_string(assign.size()) +
                                      " points, expected " + std::to_string(expect_n));
        }
        std::vector<bool> seen(k, false);
        for (int g : assign) {
            if (g < 0 || g >= k) throw invalid_input_error("label out of range");
            seen[g] = true;
        }
        for (bool s : seen) {
            if (!s) throw invalid_input_error("empty group in labels");
        }
    }
};

// Relabels so group ids follow first occurrence (equivalently: groups are
// ordered by their smallest member). All algorithms emit this form, which
// makes outputs reproducible regardless of internal group numbering.
// Raw ids may come from any range (e.g. dendrogram node ids), only the
// number of distinct values must equal k.
inline Labels canonical_labels(const std::vector<int>& raw, int k) {
    Labels out;
    out.k = k;
    out.assign.resize(raw.size());
    int max_id = -1;
    for (int v : raw) {
        if (v < 0) throw invalid_input_error("negative group id in labels");
        max_id = std::max(max_id, v);
    }
    std::vector<int> remap(static_cast<std::size_t>(max_id) + 1, -1);
    int next = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        int& slot = remap[static_cast<std::size_t>(raw[i])];
        if (slot < 0) slot = next++;
        out.assign[i] = slot;
    }
    if (next != k) throw invalid_input_error("empty group in labels");
    return out;
}

namespace detail {

inline std::vector<std::vector<std::string>> read_csv_cells(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Loads a numeric CSV of point coordinates, one point per row.
/// `label_col` (0-based) drops one column, typically a trailing class label;
/// -1 keeps everything.
inline DistanceModel load_csv(const std::string& path, bool has_header = false,
                              int label_col = -1) {
    auto rows = detail::read_csv_cells(path);
    std::size_t first = has_header ? 1 : 0;
    if (rows.size() < first + 2) throw invalid_input_error("need at least 2 points");
    const std::size_t ncols = rows[first].size();
    if (label_col >= static_cast<int>(ncols)) {
        throw invalid_input_error("label column out of range");
    }
    const std::size_t dim = label_col >= 0 ? ncols - 1 : ncols;
    if (dim == 0) throw invalid_input_error("no coordinate columns");
    std::vector<double> coords;
    coords.reserve((rows.size() - first) * dim);
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() != ncols) {
            throw invalid_input_error("row " + std::to_string(r + 1) + ": expected " +
                                      std::to_string(ncols) + " columns, got " +
                                      std::to_string(rows[r].size()));
        }
        for (std::size_t c = 0; c < ncols; ++c) {
            if (static_cast<int>(c) == label_col) continue;
            try {
                coords.push_back(parse_double(detail::trim(rows[r][c])));
            } catch (const invalid_input_error&) {
                throw invalid_input_error("row " + std::to_string(r + 1) + ", column " +
                                          std::to_string(c + 1) + ": not a number: '" +
                                          rows[r][c] + "'");
            }
        }
    }
    return DistanceModel::from_points(std::move(coords), rows.size() - first, dim);
}

/// Loads a square symmetric distance matrix from CSV. Entries within 1e-9
/// relative tolerance are symmetrized; real asymmetry is an error.
inline DistanceModel load_matrix(const std::string& path) {
    auto rows = detail::read_csv_cells(path);
    const std::size_t n = rows.size();
    if (n < 2) throw invalid_input_error("need at least 2 points");
    std::vector<double> m(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != n) {
            throw invalid_input_error("matrix not square: row " + std::to_string(r + 1) +
                                      " has " + std::to_string(rows[r].size()) + " of " +
                                      std::to_string(n) + " columns");
        }
        for (std::size_t c = 0; c < n; ++c) {
            try {
                m[r * n + c] = parse_double(detail::trim(rows[r][c]));
            } catch (const invalid_input_error&) {
                throw invalid_input_error("row " + std::to_string(r + 1) + ", column " +
                                          std::to_string(c + 1) + ": not a number: '" +
                                          rows[r][c] + "'");
            }
        }
    }
    DistanceModel model = DistanceModel::from_matrix(std::move(m), n);
    // Force exact symmetry and a zero diagonal after the tolerance check.
    for (std::size_t i = 0; i < n; ++i) {
        model.data_[i * n + i] = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = model.data_[i * n + j];
            model.data_[j * n + i] = v;
        }
    }
    return model;
}

}  // namespace spclust
