#include "thors/verify.hpp"

#include "thors/bounds.hpp"
#include "thors/error.hpp"
#include "thors/random.hpp"
#include "thors/threshold.hpp"
#include "thors/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace thors {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct SimDraw {
    std::vector<double> s0; // sorted
    std::vector<double> s1; // sorted
    std::vector<double> pooled;
};

SimDraw draw(std::size_t n0, std::size_t n1, double mu, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SimDraw d;
    d.s0.resize(n0);
    d.s1.resize(n1);
    for (auto& v : d.s0) v = normal(rng);
    for (auto& v : d.s1) v = mu + normal(rng);
    std::sort(d.s0.begin(), d.s0.end());
    std::sort(d.s1.begin(), d.s1.end());
    d.pooled.reserve(n0 + n1);
    std::merge(d.s0.begin(), d.s0.end(), d.s1.begin(), d.s1.end(), std::back_inserter(d.pooled));
    return d;
}

// Largest pooled score strictly below `bound`: an order statistic with the
// same number of same-class scores at or below it as the order statistic
// just before `bound`.
double largest_below(const std::vector<double>& pooled, double bound) {
    auto it = std::lower_bound(pooled.begin(), pooled.end(), bound);
    return *(it - 1);
}

struct SimOutcome {
    double fpr_fixed = 0.0;
    double fnr_fixed = 0.0;
    double cost = 0.0;
    double c_star = 0.0;
    double sigma = 0.0;
    std::vector<double> bernstein_floor;
    double c_lo = 0.0;
    double c_hi = 0.0;
    double prob_two_sided = 0.0;
    double prob_upper = 0.0;
    bool vacuous = false;
    double k1_ratio = 0.0;
};

std::vector<CdfCheckRow> cdf_rows(const std::vector<double>& realized, double mean, double var,
                                  std::size_t points, std::size_t n, std::size_t k, bool fpr) {
    const double sd = std::sqrt(var);
    const double lo = std::max(1e-3, mean - 3.0 * sd);
    const double hi = std::min(1.0 - 1e-3, mean + 3.0 * sd);
    const double s = double(realized.size());
    std::vector<CdfCheckRow> rows;
    for (std::size_t g = 0; g < points; ++g) {
        const double x = points == 1 ? mean : lo + (hi - lo) * double(g) / double(points - 1);
        const CdfBounds b = fpr ? fpr_cdf_bounds(x, n, k) : fnr_cdf_bounds(x, n, k);
        const double emp =
            double(std::count_if(realized.begin(), realized.end(), [&](double v) { return v <= x; })) / s;
        const double se_l = std::sqrt(b.lower * (1.0 - b.lower) / s);
        const double se_u = std::sqrt(b.upper * (1.0 - b.upper) / s);
        const bool inside = emp >= b.lower - 3.0 * se_l && emp <= b.upper + 3.0 * se_u;
        rows.push_back({x, emp, b.lower, b.upper, inside});
    }
    return rows;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return v.size() > 1 ? std::sqrt(ss / double(v.size() - 1)) : 0.0;
}

} // namespace

void VerifyConfig::validate() const {
    if (simulations < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 simulations");
    if (n0 < 2 || n1 < 2) throw Error(ErrorCode::InvalidArgument, "need n0, n1 >= 2");
    if (!std::isfinite(mu)) throw Error(ErrorCode::InvalidArgument, "mu must be finite");
    CostMatrix check(fn_cost, fp_cost);
    (void)check;
    if (n_te < 1) throw Error(ErrorCode::InvalidArgument, "n_te must be >= 1");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
    if (grid_points < 1) throw Error(ErrorCode::InvalidArgument, "grid_points must be >= 1");
    for (double t : t_values)
        if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t values must be >= 0");
}

VerifyReport verify_bounds(const VerifyConfig& config) {
    config.validate();
    VerifyReport rep;
    rep.config = config;
    const CostMatrix cm(config.fn_cost, config.fp_cost);
    const std::size_t n0 = config.n0;
    const std::size_t n1 = config.n1;
    const double mu = config.mu;
    const double pi0 = double(n0) / double(n0 + n1);
    const double pi1 = 1.0 - pi0;

    // Fixed ranks at the population cost-optimal cut.
    const double c_pop = mu / 2.0 + std::log(cm.beta() * pi0 / pi1) / mu;
    auto clamp_rank = [](double v, std::size_t n) {
        return std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(v)), 1, n - 1);
    };
    rep.k0_fixed = clamp_rank(double(n0) * normal_cdf(c_pop), n0);
    rep.k1_fixed = clamp_rank(double(n1) * normal_cdf(c_pop - mu), n1);

    const std::size_t S = config.simulations;
    std::vector<SimOutcome> sims(S);
    parallel_for(S, config.threads, [&](std::size_t i) {
        const SimDraw d = draw(n0, n1, mu, derive_seed(config.seed, i));
        SimOutcome& o = sims[i];
        o.fpr_fixed = 1.0 - normal_cdf(largest_below(d.pooled, d.s0[rep.k0_fixed]));
        o.fnr_fixed = normal_cdf(largest_below(d.pooled, d.s1[rep.k1_fixed]) - mu);

        std::vector<LabeledScore> ls;
        ls.reserve(n0 + n1);
        for (double v : d.s0) ls.emplace_back(v, 0);
        for (double v : d.s1) ls.emplace_back(v, 1);
        const ValidationScores vs = ValidationScores::build(ls);
        const ThresholdSelection sel = select_threshold(vs, cm);
        const double a0 = 1.0 - normal_cdf(sel.c_star);
        const double a1 = normal_cdf(sel.c_star - mu);
        o.cost = double(config.n_te) * cm.fn_cost() * (pi1 * a1 + cm.beta() * pi0 * a0);
        o.k1_ratio = double(sel.k1) / double(n1 + 1);

        const BoundContext ctx = BoundContext::from_selection(vs, sel, cm, config.n_te);
        const BernsteinBound bb = bernstein_params(ctx);
        o.c_star = bb.c_star_expected;
        o.sigma = bb.sigma;
        for (double t : config.t_values) o.bernstein_floor.push_back(bernstein_tail(bb, t));

        const CostInterval ci = cost_interval(ctx, config.epsilon);
        o.c_lo = ci.c1 - ci.c_eps;
        o.c_hi = ci.c2 + ci.c_eps;
        o.prob_two_sided = ci.prob_two_sided;
        o.prob_upper = ci.prob_upper;
        o.vacuous = ci.vacuous;
    });

    // (a)
    std::vector<double> fprs;
    std::vector<double> fnrs;
    for (const auto& o : sims) {
        fprs.push_back(o.fpr_fixed);
        fnrs.push_back(o.fnr_fixed);
    }
    const OrderStatMoments mom = order_stat_moments(n0, rep.k0_fixed, n1, rep.k1_fixed);
    rep.fpr_rows = cdf_rows(fprs, mom.mean_y0, mom.var_y0, config.grid_points, n0, rep.k0_fixed, true);
    rep.fnr_rows = cdf_rows(fnrs, mom.mean_y1, mom.var_y1, config.grid_points, n1, rep.k1_fixed, false);
    rep.cdf_passed = true;
    for (const auto& r : rep.fpr_rows) rep.cdf_passed = rep.cdf_passed && r.inside;
    for (const auto& r : rep.fnr_rows) rep.cdf_passed = rep.cdf_passed && r.inside;

    // (b)
    const double s = double(S);
    rep.bernstein_passed = true;
    for (std::size_t ti = 0; ti < config.t_values.size(); ++ti) {
        const double t = config.t_values[ti];
        std::size_t hits = 0;
        double floor = 0.0;
        for (const auto& o : sims) {
            if (o.cost <= o.c_star + t * o.sigma) ++hits;
            floor += o.bernstein_floor[ti];
        }
        TailCheckRow row;
        row.t = t;
        row.empirical = double(hits) / s;
        row.floor = floor / s;
        row.se = std::sqrt(row.empirical * (1.0 - row.empirical) / s);
        row.passed = row.empirical >= row.floor - 3.0 * row.se;
        rep.bernstein_passed = rep.bernstein_passed && row.passed;
        rep.bernstein_rows.push_back(row);
    }

    // (c)
    std::size_t inside = 0;
    std::size_t below = 0;
    double floor2 = 0.0;
    double floor1 = 0.0;
    for (const auto& o : sims) {
        if (o.cost >= o.c_lo && o.cost <= o.c_hi) ++inside;
        if (o.cost <= o.c_hi) ++below;
        floor2 += o.prob_two_sided;
        floor1 += o.prob_upper;
        if (o.vacuous) ++rep.vacuous_count;
    }
    rep.interval_coverage = double(inside) / s;
    rep.interval_floor = floor2 / s;
    rep.interval_se = std::sqrt(rep.interval_coverage * (1.0 - rep.interval_coverage) / s);
    rep.upper_coverage = double(below) / s;
    rep.upper_floor = floor1 / s;
    const double upper_se = std::sqrt(rep.upper_coverage * (1.0 - rep.upper_coverage) / s);
    rep.interval_passed = rep.interval_coverage >= rep.interval_floor - 3.0 * rep.interval_se &&
                          rep.upper_coverage >= rep.upper_floor - 3.0 * upper_se;

    // (d)
    std::vector<double> ratios_n;
    for (const auto& o : sims) ratios_n.push_back(o.k1_ratio);
    std::vector<double> ratios_2n(S);
    const std::uint64_t doubled_seed = derive_seed(config.seed, 0xD0B1EULL << 32);
    parallel_for(S, config.threads, [&](std::size_t i) {
        const SimDraw d = draw(2 * n0, 2 * n1, mu, derive_seed(doubled_seed, i));
        std::vector<LabeledScore> ls;
        for (double v : d.s0) ls.emplace_back(v, 0);
        for (double v : d.s1) ls.emplace_back(v, 1);
        const ThresholdSelection sel = select_threshold(ValidationScores::build(ls), cm);
        ratios_2n[i] = double(sel.k1) / double(2 * n1 + 1);
    });
    rep.spread_rows.push_back({n0 + n1, mean_of(ratios_n), sd_of(ratios_n)});
    rep.spread_rows.push_back({2 * (n0 + n1), mean_of(ratios_2n), sd_of(ratios_2n)});
    rep.spread_passed = rep.spread_rows[1].sd < rep.spread_rows[0].sd;
    return rep;
}

} // namespace thors
