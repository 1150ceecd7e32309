#include "riskbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "riskbench/error.hpp"
#include "riskbench/format.hpp"
#include "riskbench/parallel.hpp"
#include "riskbench/seeding.hpp"

namespace riskbench {

namespace fs = std::filesystem;

const char* to_string(ObjectiveFamily f) {
    return f == ObjectiveFamily::Center ? "center" : "subspace";
}

const char* const kRiskCsvHeader = "dataset,objective,z,j,k,n,repeat,seed,sample_cost,full_cost,excess";

// ---------------------------------------------------------------- synthetic

PointSet make_synthetic(const SyntheticSpec& spec) {
    if (spec.n < 1 || spec.d < 1 || spec.components < 1) {
        throw Error(ErrorKind::DomainError, "synthetic mixture needs n, d, components >= 1");
    }
    SeededRng rng(spec.seed, 0x5e7);
    RowMat means(spec.components, spec.d);
    for (int c = 0; c < spec.components; ++c) {
        // uniform in the ball of radius center_radius
        Vec g(spec.d);
        for (Eigen::Index i = 0; i < spec.d; ++i) g(i) = rng.gaussian();
        const double r = spec.center_radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(spec.d));
        means.row(c) = (g / g.norm() * r).transpose();
    }
    RowMat pts(static_cast<Eigen::Index>(spec.n), spec.d);
    Vec x(spec.d);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const Eigen::Index c = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(spec.components)));
        do {
            for (Eigen::Index t = 0; t < spec.d; ++t) x(t) = means(c, t) + spec.spread * rng.gaussian();
        } while (x.squaredNorm() > 1.0);
        pts.row(i) = x.transpose();
    }
    return PointSet(std::move(pts), "synthetic");
}

// ---------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why = {}) {
    throw Error(ErrorKind::ParseError, "bad value '" + value + "' for " + key + (why.empty() ? "" : ": " + why));
}

long long to_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(trim(v), &pos);
    } catch (...) {
        bad_value(key, v);
    }
    if (pos != trim(v).size()) bad_value(key, v);
    return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    std::uint64_t x = 0;
    const std::string t = trim(v);
    if (t.empty() || t[0] == '-') bad_value(key, v);
    try {
        x = std::stoull(t, &pos, 0);
    } catch (...) {
        bad_value(key, v);
    }
    if (pos != t.size()) bad_value(key, v);
    return x;
}

double to_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(trim(v), &pos);
    } catch (...) {
        bad_value(key, v);
    }
    if (pos != trim(v).size() || !std::isfinite(x)) bad_value(key, v);
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    bad_value(key, v);
}

int positive_int(const std::string& key, const std::string& v) {
    const long long x = to_int(key, v);
    if (x < 1 || x > std::numeric_limits<int>::max()) bad_value(key, v, "must be a positive integer");
    return static_cast<int>(x);
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (std::size_t x : parse_size_list(v)) {
        if (x > static_cast<std::size_t>(std::numeric_limits<int>::max())) bad_value(key, v);
        out.push_back(static_cast<int>(x));
    }
    return out;
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& text) {
    const std::string t = trim(text);
    std::vector<std::size_t> out;
    auto as_size = [&](const std::string& s) {
        const long long x = to_int("list", s);
        if (x < 1) bad_value("list", text, "entries must be positive");
        return static_cast<std::size_t>(x);
    };
    if (t.find(':') != std::string::npos) {
        // lo:hi:xM
        const auto a = t.find(':');
        const auto b = t.find(':', a + 1);
        if (b == std::string::npos || t.size() <= b + 2 || t[b + 1] != 'x') bad_value("list", text, "expected lo:hi:xM");
        const std::size_t lo = as_size(t.substr(0, a));
        const std::size_t hi = as_size(t.substr(a + 1, b - a - 1));
        const std::size_t m = as_size(t.substr(b + 2));
        if (m < 2 || hi < lo) bad_value("list", text, "need hi >= lo and M >= 2");
        for (std::size_t x = lo; x <= hi; x *= m) out.push_back(x);
        return out;
    }
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(as_size(item));
    if (out.empty()) bad_value("list", text, "empty list");
    return out;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key_in, const std::string& value) {
    const std::string key = trim(key_in);
    const std::string v = trim(value);
    if (key == "dataset") cfg.dataset = v;
    else if (key == "format") {
        if (v == "csv") cfg.format = DataFormat::Csv;
        else if (v == "libsvm") cfg.format = DataFormat::Libsvm;
        else bad_value(key, v, "expected csv or libsvm");
    } else if (key == "label_col") {
        if (v == "none") cfg.label_col = LabelColumn::None;
        else if (v == "last") cfg.label_col = LabelColumn::Last;
        else bad_value(key, v, "expected none or last");
    } else if (key == "objective") {
        if (v == "center") cfg.objective = ObjectiveFamily::Center;
        else if (v == "subspace") cfg.objective = ObjectiveFamily::Subspace;
        else bad_value(key, v, "expected center or subspace");
    } else if (key == "z" || key == "z_grid") cfg.z_grid = to_int_list(key, v);
    else if (key == "j" || key == "j_grid") cfg.j_grid = to_int_list(key, v);
    else if (key == "k" || key == "k_grid") cfg.k_grid = to_int_list(key, v);
    else if (key == "n" || key == "n_grid") cfg.n_grid = parse_size_list(v);
    else if (key == "repeats") cfg.repeats = positive_int(key, v);
    else if (key == "opt_restarts") cfg.opt_restarts = positive_int(key, v);
    else if (key == "seed") cfg.seed = to_u64(key, v);
    else if (key == "threads") cfg.threads = static_cast<unsigned>(positive_int(key, v));
    else if (key == "with_replacement") cfg.with_replacement = to_bool(key, v);
    else if (key == "opt_includes_trained") cfg.opt_includes_trained = to_bool(key, v);
    else if (key == "max_em_iters") cfg.solver.max_em_iters = positive_int(key, v);
    else if (key == "rel_tol") cfg.solver.rel_tol = to_real(key, v);
    else if (key == "gd_learning_rate") cfg.solver.gd_learning_rate = to_real(key, v);
    else if (key == "gd_iters") cfg.solver.gd_iters = positive_int(key, v);
    else if (key == "gd_patience") {
        const long long p = to_int(key, v);
        if (p < 0) bad_value(key, v);
        cfg.solver.gd_patience = static_cast<int>(p);
    } else if (key == "adam_weight_decay") cfg.solver.adam_weight_decay = to_real(key, v);
    else if (key == "empty_cluster_policy") {
        if (v == "reseed_farthest") cfg.solver.empty_cluster_policy = EmptyClusterPolicy::ReseedFarthest;
        else if (v == "drop") cfg.solver.empty_cluster_policy = EmptyClusterPolicy::Drop;
        else bad_value(key, v, "expected reseed_farthest or drop");
    } else if (key == "synth_n") cfg.synth.n = static_cast<std::size_t>(positive_int(key, v));
    else if (key == "synth_d") cfg.synth.d = positive_int(key, v);
    else if (key == "synth_components") cfg.synth.components = positive_int(key, v);
    else if (key == "synth_spread") cfg.synth.spread = to_real(key, v);
    else if (key == "synth_center_radius") cfg.synth.center_radius = to_real(key, v);
    else if (key == "synth_seed") cfg.synth.seed = to_u64(key, v);
    else throw Error(ErrorKind::ParseError, "unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig cfg) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(lineno) + ": expected key = value");
        }
        try {
            set_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

// ---------------------------------------------------------------- solving

double solution_cost(const PointSet& P, const AnySolution& sol) {
    if (const auto* S = std::get_if<CenterSolution>(&sol)) return center_cost(P, *S).total;
    return subspace_cost(P, std::get<SubspaceSolution>(sol)).total;
}

std::pair<AnySolution, double> solve_once(const PointSet& P, const ProblemSpec& spec, SeededRng& rng,
                                          const SolverOptions& opts) {
    if (spec.family == ObjectiveFamily::Center) {
        const int k = std::min<int>(spec.k, static_cast<int>(P.n()));
        auto [S, trace] = em_center(P, k, spec.z, dz_seed(P, k, spec.z, rng), opts);
        return {AnySolution(std::move(S)), trace.costs.back()};
    }
    auto [U, trace] = em_subspace(P, spec.k, spec.j, spec.z, adaptive_subspace_seed(P, spec.k, spec.j, rng, spec.z), opts);
    return {AnySolution(std::move(U)), trace.costs.back()};
}

std::uint64_t init_stream(const ProblemSpec& spec, int restart) {
    std::uint64_t h = hash_combine(0x1417, static_cast<std::uint64_t>(spec.family));
    h = hash_combine(h, static_cast<std::uint64_t>(spec.z));
    h = hash_combine(h, static_cast<std::uint64_t>(spec.j));
    h = hash_combine(h, static_cast<std::uint64_t>(spec.k));
    return hash_combine(h, static_cast<std::uint64_t>(restart));
}

std::uint64_t sample_stream(const ProblemSpec& spec, std::size_t n, int repeat) {
    std::uint64_t h = hash_combine(0x5a3b, static_cast<std::uint64_t>(spec.family));
    h = hash_combine(h, static_cast<std::uint64_t>(spec.z));
    h = hash_combine(h, static_cast<std::uint64_t>(spec.j));
    h = hash_combine(h, static_cast<std::uint64_t>(spec.k));
    h = hash_combine(h, n);
    return hash_combine(h, static_cast<std::uint64_t>(repeat));
}

namespace {

/// Best of `restarts` runs on P, each seeded by init_stream. Ties keep the lowest restart.
std::pair<AnySolution, std::vector<double>> best_of(const PointSet& P, const ProblemSpec& spec, int restarts,
                                                    std::uint64_t seed, const SolverOptions& opts, unsigned threads,
                                                    std::size_t* best_index) {
    std::vector<std::pair<AnySolution, double>> runs(static_cast<std::size_t>(restarts));
    parallel_for(runs.size(), threads, [&](std::size_t r) {
        SeededRng rng(seed, init_stream(spec, static_cast<int>(r)));
        runs[r] = solve_once(P, spec, rng, opts);
    });
    std::size_t best = 0;
    std::vector<double> values;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        values.push_back(runs[r].second);
        if (runs[r].second < runs[best].second) best = r;
    }
    if (best_index) *best_index = best;
    return {std::move(runs[best].first), std::move(values)};
}

}  // namespace

OptEstimate estimate_opt_full(const PointSet& P, const ProblemSpec& spec, int restarts, std::uint64_t seed,
                              const SolverOptions& opts, unsigned threads) {
    if (restarts < 1) throw Error(ErrorKind::DomainError, "restarts must be >= 1");
    if (P.n() < 1) throw Error(ErrorKind::EmptyInput, "empty point set");
    std::size_t best = 0;
    auto [sol, totals] = best_of(P, spec, restarts, seed, opts, threads, &best);
    OptEstimate est{std::move(sol), totals[best] / static_cast<double>(P.n()), {}};
    for (double t : totals) est.restart_values.push_back(t / static_cast<double>(P.n()));
    return est;
}

// ---------------------------------------------------------------- sweep

namespace {

std::vector<ProblemSpec> problem_grid(const ExperimentConfig& cfg) {
    std::vector<ProblemSpec> specs;
    const std::vector<int> js = cfg.objective == ObjectiveFamily::Center ? std::vector<int>{0} : cfg.j_grid;
    for (int z : cfg.z_grid)
        for (int j : js)
            for (int k : cfg.k_grid) specs.push_back({cfg.objective, k, j, z});
    return specs;
}

void validate(const ExperimentConfig& cfg, const PointSet& P) {
    if (cfg.k_grid.empty() || cfg.n_grid.empty() || cfg.z_grid.empty() || cfg.j_grid.empty()) {
        throw Error(ErrorKind::DomainError, "grids must be nonempty");
    }
    for (int z : cfg.z_grid)
        if (z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");
    for (int k : cfg.k_grid)
        if (k < 1) throw Error(ErrorKind::DomainError, "k must be >= 1");
    if (cfg.objective == ObjectiveFamily::Subspace) {
        for (int j : cfg.j_grid)
            if (j < 1 || j > P.d()) throw Error(ErrorKind::DomainError, "j must lie in [1, d]");
    }
    for (std::size_t n : cfg.n_grid) {
        if (!cfg.with_replacement && n > static_cast<std::size_t>(P.n())) {
            throw Error(ErrorKind::SampleTooLarge, "n = " + std::to_string(n) + " exceeds |P| = " + std::to_string(P.n()));
        }
    }
    cfg.solver.validate();
}

}  // namespace

ExperimentResult excess_risk_curve(const PointSet& P, const ExperimentConfig& cfg) {
    validate(cfg, P);
    const auto specs = problem_grid(cfg);
    ExperimentResult res;
    res.n = P.n();
    res.d = P.d();
    res.dataset_id = P.name.empty() ? cfg.dataset : P.name;

    // OPT per problem, one task per (problem, restart)
    const std::size_t R = static_cast<std::size_t>(cfg.opt_restarts);
    std::vector<std::pair<AnySolution, double>> opt_runs(specs.size() * R);
    parallel_for(opt_runs.size(), cfg.threads, [&](std::size_t idx) {
        const ProblemSpec& spec = specs[idx / R];
        SeededRng rng(cfg.seed, init_stream(spec, static_cast<int>(idx % R)));
        opt_runs[idx] = solve_once(P, spec, rng, cfg.solver);
    });
    for (std::size_t s = 0; s < specs.size(); ++s) {
        GroupOpt g{specs[s], std::numeric_limits<double>::infinity(), {}};
        for (std::size_t r = 0; r < R; ++r) {
            const double v = opt_runs[s * R + r].second / static_cast<double>(P.n());
            g.restart_values.push_back(v);
            g.opt_value = std::min(g.opt_value, v);
        }
        res.opts.push_back(std::move(g));
    }

    // training cells
    const std::size_t reps = static_cast<std::size_t>(cfg.repeats);
    const std::size_t per_spec = cfg.n_grid.size() * reps;
    res.rows.resize(specs.size() * per_spec);
    parallel_for(res.rows.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t s = idx / per_spec;
        const std::size_t n = cfg.n_grid[(idx / reps) % cfg.n_grid.size()];
        const int rep = static_cast<int>(idx % reps);
        const ProblemSpec& spec = specs[s];
        RiskRow& row = res.rows[idx];
        row.dataset = res.dataset_id;
        row.objective = to_string(spec.family);
        row.z = spec.z;
        row.j = spec.j;
        row.k = spec.k;
        row.n = n;
        row.repeat = rep;
        row.seed = sample_stream(spec, n, rep);
        SeededRng sampler(cfg.seed, row.seed);
        const auto idxs = cfg.with_replacement ? sampler.sample_with_replacement(static_cast<std::size_t>(P.n()), n)
                                               : sampler.sample_without_replacement(static_cast<std::size_t>(P.n()), n);
        const PointSet S = P.subset(idxs);
        std::size_t best = 0;
        auto [sol, totals] = best_of(S, spec, cfg.opt_restarts, cfg.seed, cfg.solver, 1, &best);
        row.sample_cost = totals[best] / static_cast<double>(n);
        row.full_cost = solution_cost(P, sol) / static_cast<double>(P.n());
    });

    if (cfg.opt_includes_trained) {
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
            auto& g = res.opts[i / per_spec];
            g.opt_value = std::min(g.opt_value, res.rows[i].full_cost);
        }
    }
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        res.rows[i].excess = res.rows[i].full_cost - res.opts[i / per_spec].opt_value;
    }
    return res;
}

// ---------------------------------------------------------------- csv

void write_risk_csv(std::ostream& out, const std::vector<RiskRow>& rows) {
    out << kRiskCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.objective << ',' << r.z << ',' << r.j << ',' << r.k << ',' << r.n << ','
            << r.repeat << ',' << r.seed << ',' << format_double(r.sample_cost) << ',' << format_double(r.full_cost)
            << ',' << format_double(r.excess) << '\n';
    }
}

std::vector<RiskRow> read_risk_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || trim(line) != kRiskCsvHeader) {
        throw Error(ErrorKind::ParseError, source + ": line 1: expected header " + std::string(kRiskCsvHeader));
    }
    std::vector<RiskRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(trim(item));
        if (f.size() != 11) {
            throw Error(ErrorKind::InconsistentWidth, source + ": line " + std::to_string(lineno) + ": expected 11 fields");
        }
        try {
            RiskRow r;
            r.dataset = f[0];
            r.objective = f[1];
            r.z = static_cast<int>(to_int("z", f[2]));
            r.j = static_cast<int>(to_int("j", f[3]));
            r.k = static_cast<int>(to_int("k", f[4]));
            r.n = static_cast<std::size_t>(to_int("n", f[5]));
            r.repeat = static_cast<int>(to_int("repeat", f[6]));
            r.seed = to_u64("seed", f[7]);
            r.sample_cost = to_real("sample_cost", f[8]);
            r.full_cost = to_real("full_cost", f[9]);
            r.excess = to_real("excess", f[10]);
            rows.push_back(std::move(r));
        } catch (const Error& e) {
            throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

std::map<GroupKey, std::vector<FitRow>> mean_excess_by_group(const std::vector<RiskRow>& rows) {
    std::map<GroupKey, std::map<std::pair<int, std::size_t>, std::pair<CompensatedSum, int>>> acc;
    for (const auto& r : rows) {
        auto& cell = acc[{r.dataset, r.objective, r.z, r.j}][{r.k, r.n}];
        cell.first.add(r.excess);
        cell.second++;
    }
    std::map<GroupKey, std::vector<FitRow>> out;
    for (const auto& [key, cells] : acc) {
        auto& v = out[key];
        for (const auto& [kn, sum] : cells) {
            v.push_back({static_cast<double>(kn.first), static_cast<double>(kn.second), sum.first.value() / sum.second});
        }
    }
    return out;
}

// ---------------------------------------------------------------- orchestration

namespace {

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string git_style_hash(const std::string& bytes) {
    std::string blob = "blob " + std::to_string(bytes.size());
    blob.push_back('\0');
    return sha256_hex(blob + bytes);
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["dataset"] = cfg.dataset;
    j["format"] = cfg.format == DataFormat::Csv ? "csv" : "libsvm";
    j["label_col"] = cfg.label_col == LabelColumn::Last ? "last" : "none";
    if (cfg.dataset == "synthetic") {
        j["synthetic"] = {{"n", cfg.synth.n},           {"d", cfg.synth.d},
                          {"components", cfg.synth.components}, {"spread", cfg.synth.spread},
                          {"center_radius", cfg.synth.center_radius}, {"seed", cfg.synth.seed}};
    }
    j["objective"] = to_string(cfg.objective);
    j["z_grid"] = cfg.z_grid;
    j["j_grid"] = cfg.objective == ObjectiveFamily::Center ? std::vector<int>{0} : cfg.j_grid;
    j["k_grid"] = cfg.k_grid;
    j["n_grid"] = cfg.n_grid;
    j["repeats"] = cfg.repeats;
    j["opt_restarts"] = cfg.opt_restarts;
    j["seed"] = cfg.seed;
    j["sampling"] = cfg.with_replacement ? "uniform with replacement" : "uniform without replacement";
    j["opt_includes_trained"] = cfg.opt_includes_trained;
    const auto& s = cfg.solver;
    j["solver"] = {{"max_em_iters", s.max_em_iters},
                   {"rel_tol", s.rel_tol},
                   {"gd_learning_rate", s.gd_learning_rate},
                   {"gd_iters", s.gd_iters},
                   {"gd_patience", s.gd_patience},
                   {"adam_beta1", s.adam_beta1},
                   {"adam_beta2", s.adam_beta2},
                   {"adam_weight_decay", s.adam_weight_decay},
                   {"empty_cluster_policy",
                    s.empty_cluster_policy == EmptyClusterPolicy::Drop ? "drop" : "reseed_farthest"},
                   {"center_seeding", "D^z sampling"},
                   {"subspace_seeding", "adaptive squared-residual sampling (volume-sampling surrogate)"},
                   {"z2_center_update", "cluster mean"},
                   {"z2_subspace_update", "top-j singular subspace by power iteration"},
                   {"other_z_update", "Adam gradient steps with accept guard"}};
    return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const fs::path& out) {
    RawDataset raw;
    std::string bytes;
    if (cfg.dataset == "synthetic") {
        raw.matrix = make_synthetic(cfg.synth).points;
        raw.source = "synthetic";
        std::ostringstream text;
        for (Eigen::Index i = 0; i < raw.matrix.rows(); ++i) {
            for (Eigen::Index c = 0; c < raw.matrix.cols(); ++c) text << (c ? "," : "") << format_double(raw.matrix(i, c));
            text << '\n';
        }
        bytes = text.str();
    } else {
        bytes = read_bytes(cfg.dataset);
        std::istringstream text(bytes);
        raw = cfg.format == DataFormat::Csv ? parse_csv(text, cfg.dataset, cfg.label_col)
                                            : parse_libsvm(text, cfg.dataset);
    }
    Normalization norm;
    PointSet P = normalize_to_unit_ball(raw, &norm);
    P.name = cfg.dataset == "synthetic" ? "synthetic" : fs::path(cfg.dataset).filename().string();
    ExperimentResult res = excess_risk_curve(P, cfg);
    res.normalization = norm;
    res.input_hash = git_style_hash(bytes);
    if (out.empty()) return res;

    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    {
        std::ofstream csv(out, std::ios::binary);
        if (!csv) throw Error(ErrorKind::IoError, "cannot write " + out.string());
        write_risk_csv(csv, res.rows);
        if (!csv) throw Error(ErrorKind::IoError, "write failed for " + out.string());
    }
    nlohmann::ordered_json meta;
    meta["config"] = config_json(cfg);
    meta["input"] = {{"n", res.n}, {"d", res.d}, {"content_hash", "sha256:" + res.input_hash}};
    std::vector<double> shift(norm.shift.data(), norm.shift.data() + norm.shift.size());
    meta["normalization"] = {{"method", "bounding-box midpoint shift, then divide by max norm if above 1"},
                             {"shift", shift},
                             {"scale", norm.scale}};
    auto& opts = meta["opt"] = nlohmann::ordered_json::array();
    for (const auto& g : res.opts) {
        opts.push_back({{"objective", to_string(g.spec.family)},
                        {"z", g.spec.z},
                        {"j", g.spec.j},
                        {"k", g.spec.k},
                        {"opt_value", g.opt_value},
                        {"restart_values", g.restart_values}});
    }
    meta["rows"] = res.rows.size();
    const fs::path meta_path = out.string() + ".meta.json";
    std::ofstream mj(meta_path, std::ios::binary);
    if (!mj) throw Error(ErrorKind::IoError, "cannot write " + meta_path.string());
    mj << meta.dump(2) << '\n';
    return res;
}

}  // namespace riskbench
