#include "thors/synthetic.hpp"

#include "thors/error.hpp"
#include "thors/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace thors {

SyntheticSpec synthetic_preset(std::string_view name) {
    SyntheticSpec s;
    s.name = std::string(name);
    if (name == "trucks") {
        s.rows = 60000;
        s.imbalance = 59.0;
        s.dim = 20;
        s.informative = 5;
        s.separation = 2.0;
        s.fn_cost = 500.0;
        s.fp_cost = 1.0;
    } else if (name == "income") {
        s.rows = 32561;
        s.imbalance = 24720.0 / 7841.0;
        s.dim = 14;
        s.informative = 6;
        s.separation = 1.5;
        s.fn_cost = 100.0;
        s.fp_cost = 10.0;
    } else if (name == "telescope") {
        s.rows = 19020;
        s.imbalance = 12332.0 / 6688.0;
        s.dim = 10;
        s.informative = 6;
        s.separation = 1.8;
        s.fn_cost = 100.0;
        s.fp_cost = 20.0;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown synthetic preset '" + s.name + "'");
    }
    return s;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.rows < 2) throw Error(ErrorCode::InvalidArgument, "synthetic rows must be >= 2");
    if (!(spec.imbalance > 0.0) || !std::isfinite(spec.imbalance))
        throw Error(ErrorCode::InvalidArgument, "synthetic imbalance must be positive");
    if (spec.dim == 0 || spec.informative == 0 || spec.informative > spec.dim)
        throw Error(ErrorCode::InvalidArgument, "need 1 <= informative <= dim");
    if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation))
        throw Error(ErrorCode::InvalidArgument, "separation must be finite and >= 0");
    if (!(spec.missing_rate >= 0.0 && spec.missing_rate < 1.0))
        throw Error(ErrorCode::InvalidArgument, "missing_rate must be in [0, 1)");

    const auto n = spec.rows;
    auto n1 = static_cast<std::size_t>(std::llround(double(n) / (1.0 + spec.imbalance)));
    n1 = std::clamp<std::size_t>(n1, 1, n - 1);

    SyntheticData sd;
    sd.prior1 = double(n1) / double(n);
    sd.mean_shift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dim));
    const double per = spec.separation / std::sqrt(double(spec.informative));
    for (std::size_t j = 0; j < spec.informative; ++j) sd.mean_shift(Eigen::Index(j)) = per;

    Rng rng(seed);
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < n1; ++i) labels[i] = 1;
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(labels[i - 1], labels[pick(rng)]);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Dataset& ds = sd.data;
    ds.labels = labels;
    ds.features.resize(Eigen::Index(n), Eigen::Index(spec.dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < spec.dim; ++j) {
            double v = normal(rng);
            if (labels[i] == 1) v += sd.mean_shift(Eigen::Index(j));
            if (spec.missing_rate > 0.0 && unif(rng) < spec.missing_rate)
                v = std::numeric_limits<double>::quiet_NaN();
            ds.features(Eigen::Index(i), Eigen::Index(j)) = v;
        }
    }
    for (std::size_t j = 0; j < spec.dim; ++j) ds.feature_names.push_back("x" + std::to_string(j));
    return sd;
}

double bayes_score(const SyntheticData& sd, const Eigen::RowVectorXd& row) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < sd.mean_shift.size(); ++j)
        if (!std::isnan(row(j))) s += sd.mean_shift(j) * row(j);
    return s;
}

double bayes_threshold(const SyntheticData& sd, const CostMatrix& cm) {
    const double pi1 = sd.prior1;
    const double pi0 = 1.0 - pi1;
    return 0.5 * sd.mean_shift.squaredNorm() + std::log(cm.beta() * pi0 / pi1);
}

double bayes_test_cost(const SyntheticData& sd, const Dataset& test, const CostMatrix& cm) {
    const double t = bayes_threshold(sd, cm);
    double cost = 0.0;
    for (std::size_t i = 0; i < test.rows(); ++i) {
        const int pred = bayes_score(sd, test.features.row(Eigen::Index(i))) > t ? 1 : 0;
        cost += cm.cost(test.labels[i], pred);
    }
    return cost;
}

} // namespace thors
