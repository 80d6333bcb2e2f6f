#pragma once

#include "thors/baselines.hpp"
#include "thors/classifiers.hpp"
#include "thors/cost_matrix.hpp"
#include "thors/dataset.hpp"
#include "thors/synthetic.hpp"
#include "thors/threshold.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace thors {

using ConfigMap = std::map<std::string, std::string>;

/// Reads `key = value` lines; `#` starts a comment. Throws Error(Io) or
/// Error(InvalidArgument) on malformed lines.
ConfigMap read_config_file(const std::string& path);
ConfigMap parse_config_text(const std::string& text);

struct ExperimentConfig {
    std::string data_path;                  // CSV source; empty when synthetic
    std::optional<SyntheticSpec> synthetic; // generator source
    std::string label_col = "class";
    std::string positive_value = "1";
    double fn_cost = 1.0;
    double fp_cost = 1.0;
    std::vector<ScorerKind> scorers{ScorerKind::Logistic};
    std::vector<Method> methods{Method::Thors, Method::Null, Method::Theoretical,
                                Method::Empirical, Method::Metacost, Method::Crs};
    std::size_t rounds = 20;
    std::array<double, 3> split{2.0, 2.0, 1.0}; // train : valid : test
    std::size_t select_k = 10;
    std::uint64_t seed = 0;
    std::string output_dir = "thors_out";
    std::size_t threads = 1;
    std::size_t metacost_replicates = 50;
    std::size_t grid_steps = kDefaultGridSteps;
    bool record_timing = false;

    /// Keys: data, synthetic (preset name), synthetic.rows, synthetic.imbalance,
    /// synthetic.dim, synthetic.informative, synthetic.separation,
    /// synthetic.missing_rate, label_col, positive_value, fn_cost, fp_cost,
    /// scorers, methods, rounds, split, select_k, seed, output_dir, threads,
    /// metacost_m, grid_steps, record_timing. A synthetic preset supplies
    /// its costs unless fn_cost/fp_cost are given.
    static ExperimentConfig from_map(const ConfigMap& map);
    ConfigMap to_map() const;

    CostMatrix costs() const { return CostMatrix(fn_cost, fp_cost); }
    void validate() const;
};

struct DataSplit {
    Dataset train;
    Dataset valid;
    Dataset test;
};

/// Seeded permutation then contiguous cuts at the ratio boundaries. Retries
/// with fresh permutations (up to 100) until every part has both classes,
/// then throws Error(SplitFailed).
DataSplit split_dataset(const Dataset& ds, const std::array<double, 3>& ratios, std::uint64_t seed);

/// Imputation means and selected feature indices, fitted on training rows only.
struct Preprocessor {
    std::vector<double> impute_means;
    std::vector<std::size_t> selected;

    static Preprocessor fit(const Dataset& train, std::size_t select_k);
    Dataset apply(const Dataset& ds) const;
};

struct MethodOutcome {
    Method method = Method::Thors;
    double test_cost = 0.0;
    double threshold = 0.0; // NaN for meta-learners
    double seconds = 0.0;
    std::string error;      // non-empty when the method failed
    bool ok() const { return error.empty(); }
};

struct ScorerOutcome {
    ScorerKind scorer = ScorerKind::Logistic;
    double train_seconds = 0.0;
    std::string error;
    ThresholdSelection selection;
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::vector<MethodOutcome> methods;
};

struct RoundResult {
    std::size_t round = 0;
    std::uint64_t seed = 0;
    std::size_t n_train = 0;
    std::size_t n_valid = 0;
    std::size_t n_test = 0;
    std::optional<double> bayes_cost;
    std::vector<ScorerOutcome> scorers;
};

/// The data an experiment runs on, loaded or generated once.
struct ExperimentData {
    Dataset data;
    std::optional<SyntheticData> synthetic;
};

ExperimentData load_experiment_data(const ExperimentConfig& cfg);

RoundResult run_round(const ExperimentConfig& cfg, const ExperimentData& data, std::size_t round,
                      std::uint64_t round_seed);

struct SummaryRow {
    ScorerKind scorer = ScorerKind::Logistic;
    Method method = Method::Thors;
    std::size_t rounds_ok = 0;
    double mean_cost = 0.0;
    double std_cost = 0.0;
    double mean_seconds = 0.0;
    // THORS versus this method (unset on the THORS row).
    std::size_t wins = 0;
    std::size_t losses = 0;
    std::size_t ties = 0;
    std::size_t errors = 0;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
    std::optional<double> bayes_mean_cost;
    std::optional<double> bayes_std_cost;

    const SummaryRow* find(ScorerKind s, Method m) const;
};

SummaryTable summarize(const ExperimentConfig& cfg, const std::vector<RoundResult>& rounds);

struct ExperimentResult {
    std::vector<RoundResult> rounds; // ordered by round index
    SummaryTable summary;
};

/// Round r uses derive_seed(cfg.seed, r); output is independent of
/// cfg.threads.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentData& data);

/// Writes rounds.csv, summary.csv, manifest.json (and timing.csv when
/// cfg.record_timing) into cfg.output_dir.
void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result);

std::string rounds_csv(const ExperimentConfig& cfg, const ExperimentResult& result);
std::string summary_csv(const SummaryTable& table);
std::string timing_csv(const ExperimentResult& result);

struct BoundCurvePoint {
    double target_ratio = 0.0;
    std::optional<std::size_t> n_v; // empty when unachievable
    std::string status;              // "ok" or the reason it failed
};

struct BoundCurve {
    ScorerKind scorer = ScorerKind::Logistic;
    double q0 = 0.0;
    double q1 = 0.0;
    double pi0 = 0.0;
    double pi1 = 0.0;
    std::size_t n_te = 0;
    std::size_t current_n_v = 0;
    double target_confidence = 0.95;
    std::vector<BoundCurvePoint> points;

    /// R^2 of a least-squares line through (ratio, log n_v) over the
    /// achievable points; NaN with fewer than 3.
    double log_linear_r2() const;
    bool monotone_decreasing() const;
};

inline const std::vector<double> kDefaultRatioGrid{1.1, 1.3, 1.5, 2.0, 3.0};

/// Freezes q0, q1 from a reference round (round 0) with the first configured
/// scorer, then estimates the required validation size for each ratio.
/// n_te is the reference round's test size.
BoundCurve bound_curve(const ExperimentConfig& cfg, double target_confidence = 0.95,
                       const std::vector<double>& ratio_grid = kDefaultRatioGrid);
BoundCurve bound_curve(const ExperimentConfig& cfg, const ExperimentData& data,
                       double target_confidence, const std::vector<double>& ratio_grid);

} // namespace thors
