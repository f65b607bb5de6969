#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spclust/constrained.hpp"
#include "spclust/dataset.hpp"
#include "spclust/errors.hpp"
#include "spclust/kmeans.hpp"
#include "spclust/linkage.hpp"
#include "spclust/numfmt.hpp"
#include "spclust/oracle.hpp"
#include "spclust/spacing.hpp"

namespace spclust::cli {

using json = nlohmann::ordered_json;

namespace detail {

struct IoOptions {
    std::string input;
    std::string matrix;
    bool header = false;
    int label_col = -1;
};

inline void add_io_options(CLI::App* cmd, IoOptions& io) {
    auto* in = cmd->add_option("--input", io.input, "CSV of point coordinates, one row per point");
    auto* mx = cmd->add_option("--matrix", io.matrix, "CSV with a full symmetric distance matrix");
    in->excludes(mx);
    mx->excludes(in);
    cmd->add_flag("--header", io.header, "skip the first row of --input");
    cmd->add_option("--label-col", io.label_col,
                    "0-based column of --input to drop (e.g. a class label)");
}

inline DistanceModel load_model(const IoOptions& io) {
    if (io.input.empty() && io.matrix.empty()) {
        throw invalid_input_error("provide --input or --matrix");
    }
    if (!io.input.empty()) return load_csv(io.input, io.header, io.label_col);
    return load_matrix(io.matrix);
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input_error("cannot write file: " + path);
    out << content;
}

inline std::string labels_csv(const Labels& labels) {
    std::string s = "index,group\n";
    for (std::size_t i = 0; i < labels.assign.size(); ++i) {
        s += std::to_string(i) + ',' + std::to_string(labels.assign[i]) + '\n';
    }
    return s;
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& text,
                                                 const std::string& what) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw invalid_input_error("bad " + what + " entry: '" + item + "'");
        }
    }
    if (out.empty()) throw invalid_input_error("empty " + what + " list");
    return out;
}

inline long long elapsed_whole_seconds(std::chrono::steady_clock::time_point start) {
    const auto dt = std::chrono::steady_clock::now() - start;
    return std::chrono::duration_cast<std::chrono::seconds>(dt).count();
}

inline json report_to_json(const std::string& algo, int k, std::optional<long long> L,
                           const Rational& epsilon, std::uint64_t seed,
                           const ClusteringReport& rep) {
    json j;
    j["algo"] = algo;
    j["k"] = k;
    j["L"] = L ? json(*L) : json(nullptr);
    j["epsilon"] = boost::rational_cast<double>(epsilon);
    j["seed"] = seed;
    j["min_sp"] = rep.min_sp;
    j["mst_sp"] = rep.mst_sp;
    j["sizes"] = rep.sizes;
    if (rep.quad_loss) {
        j["quad_loss"] = *rep.quad_loss;
    } else {
        std::cerr << "note: quadratic loss unavailable in matrix mode; omitted from report\n";
    }
    j["runtime_s"] = rep.runtime_s ? static_cast<long long>(*rep.runtime_s) : 0;
    return j;
}

inline json trace_to_json(const MaxMstTrace& trace) {
    json j;
    j["rho"] = boost::rational_cast<double>(trace.rho);
    j["chosen_ell"] = trace.chosen_ell;
    j["bound_1_over_H"] = trace.bound_1_over_H;
    json entries = json::array();
    for (const TraceEntry& e : trace.entries) {
        json je;
        je["ell"] = e.ell;
        if (e.skipped) {
            je["skipped"] = true;
            je["reason"] = e.reason;
        } else {
            je["min_sp_prime"] = e.min_sp_prime;
            je["mst_sp"] = e.mst_sp;
            if (e.split_clamped) je["split_clamped"] = true;
        }
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j;
}

struct RunOptions {
    IoOptions io;
    std::string algo;
    int k = 0;
    long long L = -1;
    std::string epsilon = "0";
    std::uint64_t seed = 0;
    std::string scheduler = "lpt";
    bool fast = false;
    std::string out_labels = "labels.csv";
    std::string out_report = "report.json";
    std::string out_dendrogram;
    std::string out_trace;
    int max_iter = 300;
    double tol = 1e-6;
};

inline int do_run(const RunOptions& opt) {
    const DistanceModel model = load_model(opt.io);
    const std::size_t n = model.size();
    if (opt.k < 2 || static_cast<std::size_t>(opt.k) > n) {
        throw invalid_input_error("k must be in [2, n]");
    }

    std::string algo = opt.algo;
    const bool wants_L = algo == "minsp" || algo == "maxmst" || algo == "maxmst-fast";
    if (opt.fast) {
        if (algo != "maxmst" && algo != "maxmst-fast") {
            throw invalid_input_error("--fast only applies to --algo maxmst");
        }
        algo = "maxmst-fast";
    }
    if (wants_L && opt.L < 0) throw invalid_input_error("--L is required for --algo " + algo);
    if (!wants_L && opt.L >= 0) {
        throw invalid_input_error("--L does not apply to --algo " + algo);
    }
    if (!opt.out_trace.empty() && algo != "maxmst" && algo != "maxmst-fast") {
        throw invalid_input_error("--out-trace only applies to --algo maxmst");
    }
    if (!opt.out_dendrogram.empty() && algo == "kmeans") {
        throw invalid_input_error("--out-dendrogram does not apply to --algo kmeans");
    }
    const Rational eps = parse_rational_decimal(opt.epsilon);
    const SchedulerKind sched =
        opt.scheduler == "exact" ? SchedulerKind::exact : SchedulerKind::lpt;

    const auto start = std::chrono::steady_clock::now();
    Labels labels;
    std::optional<MaxMstTrace> trace;
    std::optional<std::string> dendrogram;
    if (algo == "kmeans") {
        const KMeansResult km = kmeans(model, opt.k, opt.seed, opt.max_iter, opt.tol);
        labels = canonical_labels(km.labels.assign, opt.k);
    } else {
        const MergeSequence seq = single_linkage(model);
        if (!opt.out_dendrogram.empty()) {
            std::ostringstream os;
            write_dendrogram_csv(seq, os);
            dendrogram = os.str();
        }
        if (algo == "single-linkage") {
            labels = cut(seq, n - static_cast<std::size_t>(opt.k));
        } else {
            const SizeConstraint c(opt.L, eps);
            if (algo == "minsp") {
                labels = algo_min_sp(model, seq, opt.k, c, sched).labels;
            } else {
                const EllSchedule schedule =
                    algo == "maxmst-fast" ? EllSchedule::fast : EllSchedule::full;
                MaxMstResult r =
                    constrained_max_mst(model, seq, opt.k, c, opt.seed, schedule, sched);
                labels = std::move(r.labels);
                trace = std::move(r.trace);
            }
        }
    }
    const long long secs = elapsed_whole_seconds(start);

    const ClusteringReport rep = report(model, labels, static_cast<double>(secs));
    write_text(opt.out_labels, labels_csv(labels));
    const json j = report_to_json(algo, opt.k, wants_L ? std::optional(opt.L) : std::nullopt,
                                  eps, opt.seed, rep);
    write_text(opt.out_report, j.dump(2) + "\n");
    if (dendrogram) write_text(opt.out_dendrogram, *dendrogram);
    if (!opt.out_trace.empty() && trace) {
        write_text(opt.out_trace, trace_to_json(*trace).dump(2) + "\n");
    }
    return 0;
}

struct CompareOptions {
    IoOptions io;
    int k = 0;
    std::string seeds = "0";
    std::string epsilon = "0";
    std::string scheduler = "lpt";
    std::string out = "compare.csv";
};

inline int do_compare(const CompareOptions& opt) {
    if (!opt.io.matrix.empty()) {
        throw invalid_input_error("compare requires point coordinates (k-means runs here)");
    }
    const DistanceModel model = load_model(opt.io);
    const std::size_t n = model.size();
    if (opt.k < 2 || static_cast<std::size_t>(opt.k) > n) {
        throw invalid_input_error("k must be in [2, n]");
    }
    const std::vector<std::uint64_t> seeds = parse_u64_list(opt.seeds, "seed");
    const Rational eps = parse_rational_decimal(opt.epsilon);
    const SchedulerKind sched =
        opt.scheduler == "exact" ? SchedulerKind::exact : SchedulerKind::lpt;

    const MergeSequence seq = single_linkage(model);
    std::string csv = "seed,algo,min_sp,mst_sp,smallest_size,quad_loss,runtime_s\n";
    auto add_row = [&](std::uint64_t seed, const std::string& algo, const Labels& labels,
                       long long secs) {
        const ClusteringReport rep = report(model, labels);
        csv += std::to_string(seed) + ',' + algo + ',' + fmt_double(rep.min_sp) + ',' +
               fmt_double(rep.mst_sp) + ',' + std::to_string(rep.sizes.front()) + ',' +
               fmt_double(*rep.quad_loss) + ',' + std::to_string(secs) + '\n';
    };

    for (std::uint64_t seed : seeds) {
        auto t0 = std::chrono::steady_clock::now();
        const KMeansResult km = kmeans(model, opt.k, seed);
        const Labels km_labels = canonical_labels(km.labels.assign, opt.k);
        add_row(seed, "kmeans", km_labels, elapsed_whole_seconds(t0));

        // derive the size floor from k-means' smallest group
        std::size_t smallest = n;
        for (std::size_t s : km_labels.group_sizes()) smallest = std::min(smallest, s);
        const long long L = (4 * static_cast<long long>(smallest) + 2) / 3;  // ceil(4s/3)
        const SizeConstraint c(L, eps);

        auto t1 = std::chrono::steady_clock::now();
        const Labels m1 = algo_min_sp(model, seq, opt.k, c, sched).labels;
        add_row(seed, "minsp", m1, elapsed_whole_seconds(t1));

        auto t2 = std::chrono::steady_clock::now();
        const Labels m2 =
            constrained_max_mst(model, seq, opt.k, c, seed, EllSchedule::full, sched).labels;
        add_row(seed, "maxmst", m2, elapsed_whole_seconds(t2));
    }
    write_text(opt.out, csv);
    return 0;
}

struct SingletonOptions {
    IoOptions io;
    int k_min = 0;
    int k_max = 0;
    std::string out = "singletons.csv";
};

inline int do_singletons(const SingletonOptions& opt) {
    const DistanceModel model = load_model(opt.io);
    if (opt.k_min < 2 || opt.k_max < opt.k_min ||
        static_cast<std::size_t>(opt.k_max) > model.size()) {
        throw invalid_input_error("need 2 <= k-min <= k-max <= n");
    }
    std::vector<int> ks;
    for (int k = opt.k_min; k <= opt.k_max; ++k) ks.push_back(k);
    std::string csv = "k,proportion\n";
    for (const auto& [k, prop] : singleton_sweep(model, ks)) {
        csv += std::to_string(k) + ',' + fmt_double(prop) + '\n';
    }
    write_text(opt.out, csv);
    return 0;
}

struct SchedOptions {
    std::string sizes;
    int k = 0;
    bool exact = false;
};

inline int do_oracle_sched(const SchedOptions& opt) {
    const std::vector<std::uint64_t> raw = parse_u64_list(opt.sizes, "size");
    std::vector<long long> sizes(raw.begin(), raw.end());
    const ScheduleAssignment a =
        opt.exact ? exact_schedule(sizes, opt.k) : lpt_schedule(sizes, opt.k);
    json j;
    j["scheduler"] = opt.exact ? "exact" : "lpt";
    j["k"] = opt.k;
    j["min_load"] = a.min_load;
    j["loads"] = a.loads;
    j["machine_of"] = a.machine_of;
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct VerifyOptions {
    int n = 8;
    int k = 0;
    long long L = 1;
    std::string epsilon = "0";
    int trials = 20;
    std::uint64_t seed = 0;
};

inline int do_oracle_verify(const VerifyOptions& opt) {
    if (opt.n < 3 || static_cast<std::size_t>(opt.n) > kOracleCap) {
        throw invalid_input_error("n must be in [3, " + std::to_string(kOracleCap) + "]");
    }
    if (opt.trials < 1) throw invalid_input_error("trials must be positive");
    const SizeConstraint c(opt.L, parse_rational_decimal(opt.epsilon));
    if (opt.k < 2 || opt.k > opt.n) throw invalid_input_error("k must be in [2, n]");
    if (c.L * opt.k > opt.n) {
        throw infeasible_error("infeasible: k*L exceeds n");
    }

    json failures = json::array();
    bool all_pass = true;
    for (int trial = 0; trial < opt.trials; ++trial) {
        Rng rng(mix_seed(opt.seed, static_cast<std::uint64_t>(trial)));
        std::vector<double> coords(static_cast<std::size_t>(opt.n) * 2);
        for (double& v : coords) v = rng.uniform_double(0.0, 100.0);
        const DistanceModel model =
            DistanceModel::from_points(std::move(coords), static_cast<std::size_t>(opt.n), 2);
        const Verdict v = verify_guarantees(model, opt.k, c, rng.next_u64());
        if (!v.all_pass) {
            all_pass = false;
            for (const GuaranteeCheck& chk : v.checks) {
                if (chk.pass) continue;
                json f;
                f["trial"] = trial;
                f["check"] = chk.name;
                f["witness"] = chk.witness;
                failures.push_back(std::move(f));
            }
        }
    }
    json j;
    j["trials"] = opt.trials;
    j["n"] = opt.n;
    j["k"] = opt.k;
    j["L"] = opt.L;
    j["epsilon"] = boost::rational_cast<double>(c.epsilon);
    j["all_pass"] = all_pass;
    j["failures"] = std::move(failures);
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace detail

/// Builds the argument parser, runs one command, maps exceptions to exit
/// codes: 2 bad input/config, 3 infeasible instance, 1 anything else.
inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"clustering by inter-group separation under minimum-size constraints"};
    app.require_subcommand(1);

    detail::RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "cluster one input file, write labels and report");
    detail::add_io_options(run, run_opt.io);
    run->add_option("--algo", run_opt.algo, "single-linkage | minsp | maxmst | maxmst-fast | kmeans")
        ->required()
        ->check(CLI::IsMember(
            {"single-linkage", "minsp", "maxmst", "maxmst-fast", "kmeans"}));
    run->add_option("--k", run_opt.k, "number of groups")->required();
    run->add_option("--L", run_opt.L, "minimum group size (minsp/maxmst)");
    run->add_option("--epsilon", run_opt.epsilon, "size-threshold relaxation in [0,1)");
    run->add_option("--seed", run_opt.seed, "random seed");
    run->add_option("--scheduler", run_opt.scheduler, "lpt | exact")
        ->check(CLI::IsMember({"lpt", "exact"}));
    run->add_flag("--fast", run_opt.fast, "use the reduced ell schedule for maxmst");
    run->add_option("--out-labels", run_opt.out_labels, "labels CSV path");
    run->add_option("--out-report", run_opt.out_report, "report JSON path");
    run->add_option("--out-dendrogram", run_opt.out_dendrogram, "merge sequence CSV path");
    run->add_option("--out-trace", run_opt.out_trace, "per-ell trace JSON path (maxmst)");
    run->add_option("--max-iter", run_opt.max_iter, "k-means iteration cap");
    run->add_option("--tol", run_opt.tol, "k-means convergence tolerance");

    detail::CompareOptions cmp_opt;
    CLI::App* cmp = app.add_subcommand(
        "compare", "per seed: k-means, then the constrained algorithms with L from its groups");
    detail::add_io_options(cmp, cmp_opt.io);
    cmp->add_option("--k", cmp_opt.k, "number of groups")->required();
    cmp->add_option("--seeds", cmp_opt.seeds, "comma-separated seed list");
    cmp->add_option("--epsilon", cmp_opt.epsilon, "size-threshold relaxation in [0,1)");
    cmp->add_option("--scheduler", cmp_opt.scheduler, "lpt | exact")
        ->check(CLI::IsMember({"lpt", "exact"}));
    cmp->add_option("--out", cmp_opt.out, "comparison CSV path");

    detail::SingletonOptions sg_opt;
    CLI::App* sg = app.add_subcommand("singletons",
                                      "fraction of singleton groups per k, for a k range");
    detail::add_io_options(sg, sg_opt.io);
    sg->add_option("--k-min", sg_opt.k_min, "first k")->required();
    sg->add_option("--k-max", sg_opt.k_max, "last k")->required();
    sg->add_option("--out", sg_opt.out, "output CSV path");

    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive ground-truth utilities");
    oracle->require_subcommand(1);

    detail::SchedOptions sched_opt;
    CLI::App* sched = oracle->add_subcommand("sched", "schedule a size list onto k machines");
    sched->add_option("--sizes", sched_opt.sizes, "comma-separated item sizes")->required();
    sched->add_option("--k", sched_opt.k, "machine count")->required();
    sched->add_flag("--exact", sched_opt.exact, "branch-and-bound optimum instead of LPT");

    detail::VerifyOptions ver_opt;
    CLI::App* ver = oracle->add_subcommand(
        "verify", "check every guarantee against enumeration on random tiny instances");
    ver->add_option("--n", ver_opt.n, "points per instance (<= 12)");
    ver->add_option("--k", ver_opt.k, "number of groups")->required();
    ver->add_option("--L", ver_opt.L, "minimum group size");
    ver->add_option("--epsilon", ver_opt.epsilon, "size-threshold relaxation in [0,1)");
    ver->add_option("--trials", ver_opt.trials, "number of random instances");
    ver->add_option("--seed", ver_opt.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) return detail::do_run(run_opt);
        if (*cmp) return detail::do_compare(cmp_opt);
        if (*sg) return detail::do_singletons(sg_opt);
        if (*sched) return detail::do_oracle_sched(sched_opt);
        if (*ver) return detail::do_oracle_verify(ver_opt);
    } catch (const invalid_input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace spclust::cli
