#include "riskbench/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <unistd.h>

#include "riskbench/checks.hpp"
#include "riskbench/complexity.hpp"
#include "riskbench/error.hpp"
#include "riskbench/format.hpp"
#include "riskbench/hard_instance.hpp"
#include "riskbench/harness.hpp"
#include "riskbench/io.hpp"
#include "riskbench/parallel.hpp"
#include "riskbench/version.hpp"

namespace riskbench {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Bad flags, config keys or values discovered after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char* kConfigSchema =
    "config file: one `key = value` per line, '#' starts a comment\n"
    "  dataset = synthetic | <path>        format = csv | libsvm      label_col = none | last\n"
    "  objective = center | subspace       z_grid, j_grid, k_grid, n_grid = a,b,c | lo:hi:xM\n"
    "  repeats, opt_restarts, seed, threads, with_replacement, opt_includes_trained\n"
    "  max_em_iters, rel_tol, gd_learning_rate, gd_iters, gd_patience, adam_weight_decay,\n"
    "  empty_cluster_policy = reseed_farthest | drop\n"
    "  synth_n, synth_d, synth_components, synth_spread, synth_center_radius, synth_seed\n";

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// What the manifest records about one invocation.
struct Invocation {
    std::string subcommand;
    std::vector<std::string> argv;
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    std::string manifest_flag;
    std::string started_at;
};

fs::path manifest_path(const Invocation& inv) {
    if (!inv.manifest_flag.empty()) return inv.manifest_flag;
    if (!inv.outputs.empty()) return inv.outputs.front() + ".manifest.jsonl";
    return "riskbench.manifest.jsonl";
}

void append_manifest(const Invocation& inv, int exit_code, std::ostream& err) {
    json m;
    m["subcommand"] = inv.subcommand;
    m["argv"] = inv.argv;
    m["config"] = inv.config ? json(*inv.config) : json(nullptr);
    m["seed"] = inv.seed ? json(*inv.seed) : json(nullptr);
    m["outputs"] = inv.outputs;
    m["version"] = kVersion;
    m["started_at"] = inv.started_at;
    m["finished_at"] = utc_now();
    m["exit_code"] = exit_code;
    const fs::path path = manifest_path(inv);
    std::ofstream f(path, std::ios::app | std::ios::binary);
    if (!f) {
        err << "warning: cannot append manifest " << path.string() << '\n';
        return;
    }
    f << m.dump() << '\n';
}

std::uint64_t parse_seed_text(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(what + " is not an unsigned integer: '" + text + "'");
    }
}

/// --seed if given, otherwise RISKBENCH_SEED, otherwise `fallback`.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value, std::uint64_t fallback) {
    if (flag->count() > 0) return flag_value;
    if (const char* env = std::getenv("RISKBENCH_SEED"); env && *env) return parse_seed_text(env, "RISKBENCH_SEED");
    return fallback;
}

/// Writes to the file if a path is given, otherwise to `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw Error(ErrorKind::IoError, "cannot write " + path);
        stream_ = &file_;
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + item + "'");
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (std::size_t v : parse_size_list(text)) out.push_back(static_cast<int>(v));
    return out;
}

std::vector<std::size_t> size_list_or_usage(const std::string& text) {
    try {
        return parse_size_list(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

// ---- run --------------------------------------------------------------------

struct RunArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    unsigned threads = 0;
    CLI::Option* threads_opt = nullptr;
    std::vector<std::string> sets;
};

int cmd_run(const RunArgs& a, Invocation& inv, std::ostream& out) {
    inv.outputs = {a.out, a.out + ".meta.json"};
    if (!a.config.empty()) inv.config = a.config;
    ExperimentConfig cfg;
    cfg.threads = default_threads();
    cfg.seed = resolve_seed(a.seed_opt, a.seed, 0);
    try {
        if (!a.config.empty()) {
            std::ifstream f(a.config, std::ios::binary);
            if (!f) throw UsageError("cannot read config " + a.config);
            cfg = parse_config(f, a.config, cfg);
        }
        for (const auto& s : a.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
            auto trim = [](std::string v) {
                const auto b = v.find_first_not_of(" \t");
                const auto e = v.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
            };
            set_config_value(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError) throw UsageError(e.what());
        throw;
    }
    if (a.seed_opt->count() > 0) cfg.seed = a.seed;
    if (a.threads_opt->count() > 0) cfg.threads = std::max(1u, a.threads);
    inv.seed = cfg.seed;

    const auto result = run_experiment(cfg, a.out);
    out << "wrote " << result.rows.size() << " rows to " << a.out << '\n';
    for (const auto& [key, rows] : mean_excess_by_group(result.rows)) {
        const auto& [dataset, objective, z, j] = key;
        out << dataset << ' ' << objective << " z=" << z << " j=" << j << ": ";
        std::set<double> ks;
        for (const auto& r : rows) ks.insert(r.k);
        FitOptions opts;
        if (ks.size() < 2) opts.fix_q1 = 0.0;
        try {
            const auto f = fit_power_law(rows, opts);
            out << "c=" << format_double(f.c) << " q1=" << format_double(f.q1) << " q2=" << format_double(f.q2)
                << '\n';
        } catch (const Error& e) {
            out << "no fit (" << e.what() << ")\n";
        }
    }
    return kExitOk;
}

// ---- hard -------------------------------------------------------------------

struct HardArgs {
    int k = 2, j = 1;
    std::string eps, eps_scale;
    std::string n_grid = "64:16384:x2";
    int repeats = 200;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    unsigned threads = 0;
    std::string out;
};

int cmd_hard(const HardArgs& a, Invocation& inv, std::ostream& out) {
    if (!a.out.empty()) inv.outputs = {a.out};
    HardScalingConfig cfg;
    cfg.k = a.k;
    cfg.j = a.j;
    for (double e : parse_double_list(a.eps)) cfg.eps.push_back(HardEps::absolute(e));
    for (double c : parse_double_list(a.eps_scale)) cfg.eps.push_back(HardEps::scaled(c));
    if (cfg.eps.empty()) throw UsageError("hard needs --eps or --eps-scale");
    cfg.n_grid = size_list_or_usage(a.n_grid);
    cfg.repeats = a.repeats;
    cfg.seed = resolve_seed(a.seed_opt, a.seed, 0);
    cfg.threads = a.threads == 0 ? default_threads() : a.threads;
    inv.seed = cfg.seed;

    std::vector<RiskRow> rows;
    for (const auto& h : hard_scaling_experiment(cfg)) {
        RiskRow r;
        r.dataset = h.dataset;
        r.objective = to_string(ObjectiveFamily::Subspace);
        r.z = 2;
        r.j = cfg.j;
        r.k = cfg.k;
        r.n = h.n;
        r.repeat = h.repeat;
        r.seed = h.seed;
        r.sample_cost = h.empirical_cost;
        r.full_cost = h.dist_cost;
        r.excess = h.excess;
        rows.push_back(std::move(r));
    }
    Sink sink(a.out, out);
    write_risk_csv(sink.get(), rows);
    return kExitOk;
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
    std::string csv;
    double fix_q1 = 0.0;
    CLI::Option* fix_q1_opt = nullptr;
    std::string out;
};

int cmd_fit(const FitArgs& a, Invocation& inv, std::ostream& out) {
    if (!a.out.empty()) inv.outputs = {a.out};
    std::ifstream f(a.csv, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot read " + a.csv);
    const auto rows = read_risk_csv(f, a.csv);

    json fits = json::array();
    for (const auto& [key, group] : mean_excess_by_group(rows)) {
        const auto& [dataset, objective, z, j] = key;
        std::set<double> ks;
        for (const auto& r : group) ks.insert(r.k);
        FitOptions opts;
        if (a.fix_q1_opt->count() > 0) {
            opts.fix_q1 = a.fix_q1;
        } else if (ks.size() < 2) {
            opts.fix_q1 = 0.0;  // a single k carries no information about q1
        }
        const auto fit = fit_power_law(group, opts);
        json g;
        g["c"] = fit.c;
        g["q1"] = fit.q1;
        g["q2"] = fit.q2;
        g["lse"] = fit.lse;
        g["rows"] = fit.rows;
        g["q1_fixed"] = opts.fix_q1.has_value();
        g["dataset"] = dataset;
        g["objective"] = objective;
        g["z"] = z;
        g["j"] = j;
        fits.push_back(std::move(g));
    }
    if (fits.empty()) throw Error(ErrorKind::EmptyInput, a.csv + " has no rows");
    Sink sink(a.out, out);
    sink.get() << (fits.size() == 1 ? fits[0] : fits).dump(2) << '\n';
    return kExitOk;
}

// ---- reduce -----------------------------------------------------------------

struct ReduceArgs {
    int trials = 200;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    unsigned threads = 0;
    std::string out;
};

int cmd_reduce(const ReduceArgs& a, Invocation& inv, std::ostream& out, std::ostream& err) {
    if (!a.out.empty()) inv.outputs = {a.out};
    if (a.trials < 1) throw UsageError("--trials must be >= 1");
    const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed, 0);
    inv.seed = seed;
    std::vector<ReductionTrial> trials(static_cast<std::size_t>(a.trials));
    parallel_for(trials.size(), a.threads == 0 ? default_threads() : a.threads, [&](std::size_t i) {
        SeededRng rng = reduction_trial_rng(seed, static_cast<int>(i));
        trials[i] = reduction_trial(rng);
    });
    Sink sink(a.out, out);
    int failing = 0;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& t = trials[i];
        if (!t.passed()) ++failing;
        json line;
        line["trial"] = i;
        line["n"] = t.n;
        line["d"] = t.d;
        line["j"] = t.j;
        line["eps"] = t.eps;
        line["m_size"] = t.m_size;
        line["size_bound"] = t.size_bound;
        line["rounds"] = t.rounds;
        line["final_potential"] = t.final_potential;
        line["max_ratio"] = t.max_ratio;
        line["guarantee_violations"] = t.guarantee_violations;
        line["potential_violations"] = t.potential_violations;
        line["t4_violations"] = t.t4_violations;
        line["t5_violations"] = t.t5_violations;
        line["passed"] = t.passed();
        sink.get() << line.dump() << '\n';
    }
    err << "reduce: " << trials.size() << " trials, " << failing << " failing\n";
    return failing == 0 ? kExitOk : kExitViolation;
}

// ---- complexity -------------------------------------------------------------

struct ComplexityArgs {
    std::string n_grid = "64,128,256";
    std::string j_grid = "1,2,3";
    int d = 8;
    int pool = 200;
    int trials = 2000;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::string out;
};

int cmd_complexity(const ComplexityArgs& a, Invocation& inv, std::ostream& out, std::ostream& err) {
    if (!a.out.empty()) inv.outputs = {a.out};
    const auto n_grid = size_list_or_usage(a.n_grid);
    std::vector<int> j_grid;
    try {
        j_grid = parse_int_list(a.j_grid);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (a.d < 1 || a.pool < 1 || a.trials < kMinTrials) {
        throw UsageError("need --d >= 1, --pool >= 1, --trials >= " + std::to_string(kMinTrials));
    }
    const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed, 0);
    inv.seed = seed;

    Sink sink(a.out, out);
    auto& csv = sink.get();
    csv << "n,j,kind,estimate,stderr,bound\n";
    int failing = 0;
    for (std::size_t n : n_grid) {
        SeededRng data_rng(seed, hash_combine(0xda7a, n));
        RowMat pts(static_cast<Eigen::Index>(n), a.d);
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            Vec v(a.d);
            for (Eigen::Index c = 0; c < a.d; ++c) v(c) = data_rng.gaussian();
            pts.row(i) = (v * (std::pow(data_rng.uniform(), 1.0 / a.d) / v.norm())).transpose();
        }
        const PointSet P(std::move(pts));
        for (int j : j_grid) {
            if (j < 1 || j > a.d) throw UsageError("j must lie in [1, d]");
            SeededRng rng(seed, hash_combine(hash_combine(0x7ade, n), static_cast<std::uint64_t>(j)));
            const auto pool = rank_j_pool(P, j, a.pool, rng);
            const auto paired = paired_complexity(pool, a.trials, rng);
            const double bound = std::sqrt(static_cast<double>(j) / static_cast<double>(n));
            const auto& rad = paired.rademacher;
            const auto& gau = paired.gaussian;
            csv << n << ',' << j << ",rademacher," << format_double(rad.value) << ',' << format_double(rad.std_error)
                << ',' << format_double(bound) << '\n';
            csv << n << ',' << j << ",gaussian," << format_double(gau.value) << ',' << format_double(gau.std_error)
                << ",\n";
            if (rad.value > bound + 3.0 * rad.std_error) ++failing;
            if (rad.value > std::sqrt(2.0 * std::numbers::pi) * gau.value + 5.0 * paired.difference_std_error) {
                ++failing;
            }
        }
    }
    err << "complexity: " << n_grid.size() * j_grid.size() << " cells, " << failing << " violated checks\n";
    return failing == 0 ? kExitOk : kExitViolation;
}

// ---- fetch ------------------------------------------------------------------

struct FetchArgs {
    std::string url, sha256, dest;
};

int cmd_fetch(const FetchArgs& a, Invocation& inv, std::ostream& out) {
    inv.outputs = {a.dest};
    const fs::path path = fetch(a.url, a.sha256, a.dest);
    out << path.string() << ' ' << sha256_file(path) << '\n';
    return kExitOk;
}

// ---- selftest ---------------------------------------------------------------

CheckResult io_selftest() {
    CheckResult r{"io", true, {}, 0.0};
    const bool digest = sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
    RawDataset raw;
    raw.matrix = RowMat(2, 2);
    raw.matrix << 0.25, -1.5, 3.0, 1e-7;
    const fs::path tmp = fs::temp_directory_path() / ("riskbench-selftest-" + std::to_string(::getpid()) + ".csv");
    write_csv(tmp, raw);
    std::ifstream in(tmp, std::ios::binary);
    const auto back = parse_csv(in, tmp.string(), LabelColumn::None);
    in.close();
    fs::remove(tmp);
    const bool round_trip = back.matrix == raw.matrix;
    r.passed = digest && round_trip;
    r.detail = std::string("sha256 vector ") + (digest ? "ok" : "WRONG") + ", csv round trip " +
               (round_trip ? "ok" : "WRONG");
    return r;
}

CheckResult harness_selftest(std::uint64_t seed, unsigned threads) {
    ExperimentConfig cfg;
    cfg.synth.n = 300;
    cfg.synth.d = 4;
    cfg.synth.components = 5;
    cfg.synth.seed = seed;
    cfg.k_grid = {3};
    cfg.n_grid = {32, 300};
    cfg.repeats = 2;
    cfg.opt_restarts = 3;
    cfg.seed = seed;
    const PointSet P = make_synthetic(cfg.synth);
    cfg.threads = 1;
    const auto serial = excess_risk_curve(P, cfg);
    cfg.threads = std::max(2u, threads);
    const auto threaded = excess_risk_curve(P, cfg);
    std::ostringstream a, b;
    write_risk_csv(a, serial.rows);
    write_risk_csv(b, threaded.rows);
    bool full_zero = true;
    for (const auto& r : serial.rows)
        if (r.n == 300 && std::abs(r.excess) > 1e-12) full_zero = false;
    CheckResult r{"harness", a.str() == b.str() && full_zero, {}, 0.0};
    r.detail = std::string("thread-count determinism ") + (a.str() == b.str() ? "ok" : "BROKEN") +
               ", full-sample excess " + (full_zero ? "0" : "NONZERO");
    return r;
}

int cmd_selftest(std::uint64_t seed, unsigned threads, std::ostream& out) {
    const std::pair<const char*, std::function<CheckResult()>> modules[] = {
        {"linalg", [&] { return check_decomposition(300, seed); }},
        {"objectives", [&] { return check_power_bounds(20000, seed); }},
        {"seeding+solvers", [&] { return check_oracle_equivalence(10, 20, seed); }},
        {"reduction", [&] { return check_adaptive_projection(60, seed); }},
        {"complexity", [&] { return check_rademacher({64, 128}, {1, 2}, 6, 50, 500, seed); }},
        {"hard_instance", [&] { return check_hard_accounting(300, seed); }},
        {"fit", [] { return check_fit_recovery(); }},
        {"io", [] { return io_selftest(); }},
        {"harness", [&] { return harness_selftest(seed, threads); }},
    };
    bool all = true;
    for (const auto& [module, run] : modules) {
        CheckResult r;
        try {
            r = run();
        } catch (const std::exception& e) {
            r = {module, false, e.what(), 0.0};
        }
        all = all && r.passed;
        out << (r.passed ? "PASS " : "FAIL ") << module << ": " << r.detail << '\n';
    }
    return all ? kExitOk : kExitViolation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"riskbench: generalization-risk lab for center and subspace clustering", "riskbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string manifest;
    auto add_manifest = [&](CLI::App* sub) {
        sub->add_option("--manifest", manifest, "Manifest file (default: <out>.manifest.jsonl or ./riskbench.manifest.jsonl)");
    };

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Excess-risk sweep from a config file");
    run_cmd->add_option("--config", run.config, "Config file (key = value lines)")->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.out, "Output CSV; metadata goes to <out>.meta.json")->required();
    run.seed_opt = run_cmd->add_option("--seed", run.seed, "Root seed (overrides the config)");
    run.threads_opt = run_cmd->add_option("--threads", run.threads, "Worker threads");
    run_cmd->add_option("--set", run.sets, "Config override key=value (repeatable)");
    add_manifest(run_cmd);

    HardArgs hard;
    auto* hard_cmd = app.add_subcommand("hard", "Hard-instance excess scaling");
    hard_cmd->add_option("--k", hard.k, "Number of subspaces")->check(CLI::PositiveNumber);
    hard_cmd->add_option("--j", hard.j, "Subspace rank")->check(CLI::PositiveNumber);
    hard_cmd->add_option("--eps", hard.eps, "Fixed eps values, comma separated");
    hard_cmd->add_option("--eps-scale", hard.eps_scale, "c values for eps = c sqrt(kj/n), comma separated");
    hard_cmd->add_option("--n-grid", hard.n_grid, "Sample sizes: a,b,c or lo:hi:xM");
    hard_cmd->add_option("--repeats", hard.repeats, "Repeats per n")->check(CLI::PositiveNumber);
    hard.seed_opt = hard_cmd->add_option("--seed", hard.seed, "Root seed");
    hard_cmd->add_option("--threads", hard.threads, "Worker threads");
    hard_cmd->add_option("--out", hard.out, "Output CSV (default stdout)");
    add_manifest(hard_cmd);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit y = c k^q1 / n^q2 to mean excess per (k, n)");
    fit_cmd->add_option("--csv", fit.csv, "Risk CSV")->required()->check(CLI::ExistingFile);
    fit.fix_q1_opt = fit_cmd->add_option("--fix-q1", fit.fix_q1, "Hold q1 fixed (default 0 when the CSV has one k)");
    fit_cmd->add_option("--out", fit.out, "Output JSON (default stdout)");
    add_manifest(fit_cmd);

    ReduceArgs reduce;
    auto* reduce_cmd = app.add_subcommand("reduce", "Adaptive projection property sweep (JSON lines)");
    reduce_cmd->add_option("--trials", reduce.trials, "Random trials");
    reduce.seed_opt = reduce_cmd->add_option("--seed", reduce.seed, "Root seed");
    reduce_cmd->add_option("--threads", reduce.threads, "Worker threads");
    reduce_cmd->add_option("--out", reduce.out, "Output JSONL (default stdout)");
    add_manifest(reduce_cmd);

    ComplexityArgs cx;
    auto* cx_cmd = app.add_subcommand("complexity", "Rank-j pool Rademacher/Gaussian estimates (CSV)");
    cx_cmd->add_option("--n-grid", cx.n_grid, "Sample sizes");
    cx_cmd->add_option("--j-grid", cx.j_grid, "Subspace ranks");
    cx_cmd->add_option("--d", cx.d, "Ambient dimension");
    cx_cmd->add_option("--pool", cx.pool, "Random bases per pool");
    cx_cmd->add_option("--trials", cx.trials, "Monte Carlo draws");
    cx.seed_opt = cx_cmd->add_option("--seed", cx.seed, "Root seed");
    cx_cmd->add_option("--out", cx.out, "Output CSV (default stdout)");
    add_manifest(cx_cmd);

    FetchArgs fe;
    auto* fetch_cmd = app.add_subcommand("fetch", "Download a dataset and verify its SHA-256");
    fetch_cmd->add_option("--url", fe.url, "Source URL")->required();
    fetch_cmd->add_option("--sha256", fe.sha256, "Expected hex digest (empty skips the check)");
    fetch_cmd->add_option("--dest", fe.dest, "Destination path")->required();
    add_manifest(fetch_cmd);

    std::uint64_t st_seed = 0;
    unsigned st_threads = 0;
    auto* st_cmd = app.add_subcommand("selftest", "Reduced invariant suite, one line per module");
    auto* st_seed_opt = st_cmd->add_option("--seed", st_seed, "Root seed");
    st_cmd->add_option("--threads", st_threads, "Worker threads");
    add_manifest(st_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Invocation inv;
    inv.started_at = utc_now();
    for (int i = 0; i < argc; ++i) inv.argv.emplace_back(argv[i]);
    CLI::App* sub = app.get_subcommands().front();
    inv.subcommand = sub->get_name();

    int code = kExitOk;
    try {
        if (sub == run_cmd) code = cmd_run(run, inv, out);
        else if (sub == hard_cmd) code = cmd_hard(hard, inv, out);
        else if (sub == fit_cmd) code = cmd_fit(fit, inv, out);
        else if (sub == reduce_cmd) code = cmd_reduce(reduce, inv, out, err);
        else if (sub == cx_cmd) code = cmd_complexity(cx, inv, out, err);
        else if (sub == fetch_cmd) code = cmd_fetch(fe, inv, out);
        else {
            inv.seed = resolve_seed(st_seed_opt, st_seed, 0);
            code = cmd_selftest(*inv.seed, st_threads == 0 ? default_threads() : st_threads, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << sub->help();
        if (sub == run_cmd) err << kConfigSchema;
        code = kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        code = kExitViolation;
    }
    inv.manifest_flag = manifest;
    append_manifest(inv, code, err);
    return code;
}

}  // namespace riskbench
