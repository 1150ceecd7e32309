#ifndef RISKBENCH_HARNESS_HPP
#define RISKBENCH_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "riskbench/fit.hpp"
#include "riskbench/io.hpp"
#include "riskbench/objectives.hpp"
#include "riskbench/rng.hpp"
#include "riskbench/solvers.hpp"

namespace riskbench {

enum class ObjectiveFamily { Center, Subspace };

const char* to_string(ObjectiveFamily f);

/// Gaussian mixture truncated to the unit ball, used when dataset = "synthetic".
struct SyntheticSpec {
    std::size_t n = 20000;
    Eigen::Index d = 10;
    int components = 30;
    double spread = 0.15;       // per-coordinate standard deviation
    double center_radius = 0.7; // component means are uniform in this ball
    std::uint64_t seed = 1;
};

PointSet make_synthetic(const SyntheticSpec& spec);

struct ExperimentConfig {
    std::string dataset = "synthetic";  // "synthetic" or a file path
    DataFormat format = DataFormat::Csv;
    LabelColumn label_col = LabelColumn::None;
    SyntheticSpec synth;
    ObjectiveFamily objective = ObjectiveFamily::Center;
    std::vector<int> z_grid{2};
    std::vector<int> j_grid{1};
    std::vector<int> k_grid{10};
    std::vector<std::size_t> n_grid{64};
    int repeats = 5;
    int opt_restarts = 10;
    std::uint64_t seed = 0;
    SolverOptions solver;
    bool with_replacement = false;
    /// Also take trained solutions into the OPT minimum (evaluated on P).
    bool opt_includes_trained = false;
    unsigned threads = 1;
};

/// Parses `key = value` lines ('#' starts a comment). Integer lists are
/// `a,b,c` or geometric ranges `lo:hi:xM`. Throws ParseError with the line.
ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig base = {});
/// Applies one setting; throws ParseError on an unknown key or bad value.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::size_t> parse_size_list(const std::string& text);

/// One (k, j, z) clustering problem.
struct ProblemSpec {
    ObjectiveFamily family = ObjectiveFamily::Center;
    int k = 1;
    int j = 1;
    int z = 2;
};

using AnySolution = std::variant<CenterSolution, SubspaceSolution>;

double solution_cost(const PointSet& P, const AnySolution& sol);

/// Seeding followed by EM; one restart.
std::pair<AnySolution, double> solve_once(const PointSet& P, const ProblemSpec& spec, SeededRng& rng,
                                          const SolverOptions& opts);

struct OptEstimate {
    AnySolution solution;
    double opt_value = 0.0;              // best total / |P|
    std::vector<double> restart_values;  // per restart, total / |P|
};

/// Best of `restarts` seeded runs. Restart r draws from SeededRng(seed, stream(r))
/// so a larger budget only adds runs.
OptEstimate estimate_opt_full(const PointSet& P, const ProblemSpec& spec, int restarts, std::uint64_t seed,
                              const SolverOptions& opts, unsigned threads = 1);

/// Stream ids shared by the OPT runs and sample training, so training on
/// the full set repeats the OPT computation exactly.
std::uint64_t init_stream(const ProblemSpec& spec, int restart);
std::uint64_t sample_stream(const ProblemSpec& spec, std::size_t n, int repeat);

struct RiskRow {
    std::string dataset;
    std::string objective;
    int z = 2, j = 0, k = 1;
    std::size_t n = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    double sample_cost = 0.0;  // trained solution on its sample, per point
    double full_cost = 0.0;    // trained solution on P, per point
    double excess = 0.0;       // full_cost - opt
};

extern const char* const kRiskCsvHeader;

void write_risk_csv(std::ostream& out, const std::vector<RiskRow>& rows);
std::vector<RiskRow> read_risk_csv(std::istream& in, const std::string& source);

struct GroupOpt {
    ProblemSpec spec;
    double opt_value = 0.0;
    std::vector<double> restart_values;
};

struct ExperimentResult {
    std::vector<RiskRow> rows;
    std::vector<GroupOpt> opts;
    std::string dataset_id;
    std::string input_hash;
    Normalization normalization;
    Eigen::Index n = 0, d = 0;
};

/// Sweeps every (z, j, k, n, repeat) cell of the config on P: draw S_i, train
/// the best of opt_restarts runs on it, evaluate on P.
ExperimentResult excess_risk_curve(const PointSet& P, const ExperimentConfig& cfg);

/// Loads (or generates) the dataset, normalizes it and runs the sweep.
/// Writes the CSV to out and metadata to <out>.meta.json when out is nonempty.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Mean excess per (k, n) for each (dataset, objective, z, j) group.
using GroupKey = std::tuple<std::string, std::string, int, int>;
std::map<GroupKey, std::vector<FitRow>> mean_excess_by_group(const std::vector<RiskRow>& rows);

}  // namespace riskbench

#endif  // RISKBENCH_HARNESS_HPP
