#pragma once

// Shared helpers for the unit and acceptance suites: independent
// re-implementations used as oracles, instance generators, a subprocess
// runner for the CLI, and a validator for the report schema. Everything
// here is deliberately naive — these are the slow, obviously-correct
// versions the library is checked against.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "spclust/dataset.hpp"
#include "spclust/rng.hpp"

namespace support {

using spclust::DistanceModel;
using spclust::Labels;
using spclust::Rng;

inline DistanceModel model_1d(const std::vector<double>& xs) {
    return DistanceModel::from_points(std::vector<double>(xs), xs.size(), 1);
}

inline DistanceModel model_2d(const std::vector<std::array<double, 2>>& pts) {
    std::vector<double> coords;
    coords.reserve(pts.size() * 2);
    for (const auto& p : pts) {
        coords.push_back(p[0]);
        coords.push_back(p[1]);
    }
    return DistanceModel::from_points(std::move(coords), pts.size(), 2);
}

inline bool all_pair_distances_distinct(const DistanceModel& m) {
    std::vector<double> ds;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) ds.push_back(m.dist(i, j));
    }
    std::sort(ds.begin(), ds.end());
    return std::adjacent_find(ds.begin(), ds.end()) == ds.end();
}

/// Random points with all pairwise distances distinct (resampled until so).
inline DistanceModel random_distinct_model(Rng& rng, std::size_t n, std::size_t dim) {
    for (;;) {
        std::vector<double> coords(n * dim);
        for (double& v : coords) v = rng.uniform_double(0.0, 100.0);
        DistanceModel m = DistanceModel::from_points(std::move(coords), n, dim);
        if (all_pair_distances_distinct(m)) return m;
    }
}

// ---- naive single linkage: scan all cross-group pairs each step ----

struct NaiveMerge {
    double weight;
    std::vector<std::vector<int>> groups_after;  // each ascending, ordered by least member
};

inline std::vector<NaiveMerge> naive_single_linkage(const DistanceModel& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<int>> groups;
    for (std::size_t i = 0; i < n; ++i) groups.push_back({static_cast<int>(i)});
    std::vector<NaiveMerge> steps;
    while (groups.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        int bi = -1, bj = -1;
        for (std::size_t a = 0; a < groups.size(); ++a) {
            for (std::size_t b = a + 1; b < groups.size(); ++b) {
                for (int x : groups[a]) {
                    for (int y : groups[b]) {
                        const int i = std::min(x, y), j = std::max(x, y);
                        const double d = m.dist(i, j);
                        const bool better =
                            d < best || (d == best && (i < bi || (i == bi && j < bj)));
                        if (better) {
                            best = d;
                            ba = a;
                            bb = b;
                            bi = i;
                            bj = j;
                        }
                    }
                }
            }
        }
        groups[ba].insert(groups[ba].end(), groups[bb].begin(), groups[bb].end());
        std::sort(groups[ba].begin(), groups[ba].end());
        groups.erase(groups.begin() + bb);
        std::sort(groups.begin(), groups.end());
        steps.push_back({best, groups});
    }
    return steps;
}

// ---- naive MST over a small complete graph: try every edge subset ----

inline double naive_mst_total(const std::vector<double>& w, int k) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) edges.emplace_back(i, j);
    }
    const std::size_t m = edges.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
        if (std::popcount(mask) != k - 1) continue;
        // connectivity via union-find over the chosen edges
        std::vector<int> parent(k);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        int components = k;
        std::vector<double> weights;
        for (std::size_t e = 0; e < m; ++e) {
            if (!(mask >> e & 1)) continue;
            weights.push_back(w[edges[e].first * k + edges[e].second]);
            const int ra = find(edges[e].first), rb = find(edges[e].second);
            if (ra != rb) {
                parent[ra] = rb;
                --components;
            }
        }
        if (components != 1) continue;
        // same summation order as the library: ascending weights
        std::sort(weights.begin(), weights.end());
        double total = 0.0;
        for (double x : weights) total += x;
        best = std::min(best, total);
    }
    return best;
}

// ---- partition counting: independent recurrence over block of element 0 ----

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    std::uint64_t out = 1;
    for (std::uint64_t i = 0; i < r; ++i) out = out * (n - i) / (i + 1);
    return out;
}

inline std::uint64_t count_partitions(std::uint64_t n, std::uint64_t k, std::uint64_t L) {
    if (k == 0) return n == 0 ? 1 : 0;
    if (n < k * L) return 0;
    std::uint64_t total = 0;
    for (std::uint64_t s = L; s + (k - 1) * L <= n; ++s) {
        total += binomial(n - 1, s - 1) * count_partitions(n - s, k - 1, L);
    }
    return total;
}

// ---- exhaustive max-min scheduling: all k^n assignments ----

inline long long brute_max_min_load(const std::vector<long long>& sizes, int k) {
    const std::size_t n = sizes.size();
    long long best = 0;
    std::vector<int> assign(n, 0);
    for (;;) {
        std::vector<long long> loads(k, 0);
        for (std::size_t i = 0; i < n; ++i) loads[assign[i]] += sizes[i];
        best = std::max(best, *std::min_element(loads.begin(), loads.end()));
        std::size_t p = 0;
        while (p < n && ++assign[p] == k) assign[p++] = 0;
        if (p == n) break;
    }
    return best;
}

// ---- files & subprocess ----

inline std::filesystem::path fresh_dir(const std::string& hint) {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path() /
                      ("spclust_tests_" + std::to_string(::getpid()));
    const auto dir = base / (hint + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir,
                                        const std::string& name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI binary (path from SPCLUST_BIN or --cli) inside dir.
inline CliResult run_cli(const std::string& bin, const std::filesystem::path& dir,
                         const std::string& args) {
    const auto out_path = dir / "_stdout";
    const auto err_path = dir / "_stderr";
    const std::string cmd = "cd '" + dir.string() + "' && '" + bin + "' " + args + " >'" +
                            out_path.string() + "' 2>'" + err_path.string() + "'";
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = read_file(out_path);
    res.err = read_file(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return res;
}

inline std::string cli_bin_from_env() {
    const char* env = std::getenv("SPCLUST_BIN");
    return env ? env : "";
}

// ---- report schema validation (the subset of JSON Schema the file uses) ----

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

inline bool validate_against(const nlohmann::json& schema, const nlohmann::json& value,
                             std::string& why) {
    if (schema.contains("enum")) {
        for (const auto& allowed : schema["enum"]) {
            if (value == allowed) return true;
        }
        why = "value not in enum: " + value.dump();
        return false;
    }
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(value, t.get<std::string>());
        } else {
            for (const auto& opt : t) ok = ok || type_matches(value, opt.get<std::string>());
        }
        if (!ok) {
            why = "type mismatch for " + value.dump() + ", want " + t.dump();
            return false;
        }
    }
    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
            why = "below minimum: " + value.dump();
            return false;
        }
        if (schema.contains("exclusiveMaximum") &&
            value.get<double>() >= schema["exclusiveMaximum"].get<double>()) {
            why = "not below exclusiveMaximum: " + value.dump();
            return false;
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
            why = "too few items";
            return false;
        }
        if (schema.contains("items")) {
            for (const auto& item : value) {
                if (!validate_against(schema["items"], item, why)) return false;
            }
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!value.contains(key.get<std::string>())) {
                    why = "missing required key: " + key.get<std::string>();
                    return false;
                }
            }
        }
        const auto& props = schema.contains("properties") ? schema["properties"]
                                                          : nlohmann::json::object();
        if (schema.value("additionalProperties", true) == false) {
            for (const auto& [key, v] : value.items()) {
                (void)v;
                if (!props.contains(key)) {
                    why = "unexpected key: " + key;
                    return false;
                }
            }
        }
        for (const auto& [key, sub] : props.items()) {
            if (value.contains(key) && !validate_against(sub, value[key], why)) {
                why = key + ": " + why;
                return false;
            }
        }
    }
    return true;
}

inline bool validate_report(const std::filesystem::path& schema_path,
                            const nlohmann::json& report, std::string& why) {
    std::ifstream in(schema_path);
    if (!in) {
        why = "cannot open schema: " + schema_path.string();
        return false;
    }
    nlohmann::json schema;
    in >> schema;
    return validate_against(schema, report, why);
}

}  // namespace support
