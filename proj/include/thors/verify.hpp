#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace thors {

/// Monte-Carlo setup: class-0 scores ~ N(0, 1), class-1 scores ~ N(mu, 1),
/// fixed class counts per validation set, costs (fn_cost, fp_cost).
struct VerifyConfig {
    std::size_t simulations = 2000;
    std::size_t n0 = 200;
    std::size_t n1 = 200;
    double mu = 1.5;
    double fn_cost = 1.0;
    double fp_cost = 0.3;
    std::size_t n_te = 1;
    double epsilon = 0.1;
    std::vector<double> t_values{1.0, 2.0, 3.0};
    std::size_t grid_points = 20;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    void validate() const;
};

struct CdfCheckRow {
    double x;
    double empirical;
    double lower;
    double upper;
    bool inside;
};

struct TailCheckRow {
    double t;
    double empirical; // fraction of simulations with C <= C* + t sigma
    double floor;     // mean of the per-simulation Bernstein floors
    double se;
    bool passed;
};

struct SpreadRow {
    std::size_t n_v;
    double mean;
    double sd;
};

struct VerifyReport {
    VerifyConfig config;

    // (a) realized FPR and FNR CDF against the binomial bracket, at fixed
    // ranks k0 / k1 (thresholds chosen between consecutive order statistics).
    std::size_t k0_fixed = 0;
    std::size_t k1_fixed = 0;
    std::vector<CdfCheckRow> fpr_rows;
    std::vector<CdfCheckRow> fnr_rows;
    bool cdf_passed = false;

    // (b) Bernstein floor with THORS-selected thresholds.
    std::vector<TailCheckRow> bernstein_rows;
    bool bernstein_passed = false;

    // (c) Hoeffding interval coverage.
    double interval_coverage = 0.0;
    double interval_floor = 0.0;
    double interval_se = 0.0;
    double upper_coverage = 0.0;
    double upper_floor = 0.0;
    std::size_t vacuous_count = 0;
    bool interval_passed = false;

    // (d) spread of k1 / (n1 + 1) at n_v and 2 n_v.
    std::vector<SpreadRow> spread_rows;
    bool spread_passed = false;

    bool all_passed() const {
        return cdf_passed && bernstein_passed && interval_passed && spread_passed;
    }
};

/// Simulation i uses derive_seed(config.seed, i); results do not depend on
/// config.threads.
VerifyReport verify_bounds(const VerifyConfig& config);

} // namespace thors
