#pragma once

#include "thors/cost_matrix.hpp"
#include "thors/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace thors {

/// Two spherical Gaussians: class 0 ~ N(0, I), class 1 ~ N(mu, I), where mu
/// is spread evenly over the first `informative` coordinates with
/// |mu| = separation.
struct SyntheticSpec {
    std::string name = "custom";
    std::size_t rows = 10000;
    double imbalance = 1.0; // majority : minority
    std::size_t dim = 10;
    std::size_t informative = 5;
    double separation = 2.0;
    double missing_rate = 0.0; // fraction of feature cells blanked to NaN
    double fn_cost = 1.0;      // preset costs
    double fp_cost = 1.0;
};

/// Named profiles matching the three case-study shapes: "trucks" (60000 rows,
/// 59:1, costs 500/1), "income" (32561 rows, 24720:7841, 100/10) and
/// "telescope" (19020 rows, 12332:6688, 100/20).
/// Throws Error(InvalidArgument) for other names.
SyntheticSpec synthetic_preset(std::string_view name);

struct SyntheticData {
    Dataset data;
    Eigen::VectorXd mean_shift;
    double prior1 = 0.0;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Score mu . x of the Bayes rule and its cost-optimal cut, assuming the
/// generator's class prior: predict 1 iff mu . x > |mu|^2 / 2 + log(beta pi0 / pi1).
double bayes_score(const SyntheticData& sd, const Eigen::RowVectorXd& row);
double bayes_threshold(const SyntheticData& sd, const CostMatrix& cm);

/// Realized cost of the Bayes rule on the given rows (raw, unimputed
/// columns in generator order; NaN cells contribute 0).
double bayes_test_cost(const SyntheticData& sd, const Dataset& test, const CostMatrix& cm);

} // namespace thors
