#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's selection or bound code.

#include "thors/cost_matrix.hpp"
#include "thors/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

namespace oracle {

struct Counts {
    std::size_t fp = 0;
    std::size_t fn = 0;
};

inline Counts confusion(const std::vector<thors::LabeledScore>& s, double threshold) {
    Counts c;
    for (const auto& x : s) {
        const int pred = x.score > threshold ? 1 : 0;
        if (x.label == 0 && pred == 1) ++c.fp;
        if (x.label == 1 && pred == 0) ++c.fn;
    }
    return c;
}

inline double direct_cost(const std::vector<thors::LabeledScore>& s, double threshold,
                          const thors::CostMatrix& cm) {
    const Counts c = confusion(s, threshold);
    return double(c.fp) * cm.fp_cost() + double(c.fn) * cm.fn_cost();
}

struct BruteForce {
    double threshold;
    double cost;
};

// Minimum over every distinct score value, lowest threshold on ties.
inline BruteForce brute_force_min(const std::vector<thors::LabeledScore>& s, const thors::CostMatrix& cm,
                                  bool include_all_positive = false) {
    std::set<double> values;
    for (const auto& x : s) values.insert(x.score);
    BruteForce best{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
    if (include_all_positive) best = {-std::numeric_limits<double>::infinity(), direct_cost(s, -INFINITY, cm)};
    for (double t : values) {
        const double c = direct_cost(s, t, cm);
        if (c < best.cost) best = {t, c};
    }
    return best;
}

// P(Bin(n, x) >= j) by direct summation in long double.
inline double binomial_tail_direct(std::size_t n, std::size_t j, double x) {
    long double total = 0.0L;
    for (std::size_t i = j; i <= n; ++i) {
        const long double logc = std::lgamma((long double)n + 1) - std::lgamma((long double)i + 1) -
                                 std::lgamma((long double)(n - i) + 1);
        total += std::exp(logc + (long double)i * std::log((long double)x) +
                          (long double)(n - i) * std::log1p(-(long double)x));
    }
    return double(total);
}

// k-th smallest (1-based) of n uniforms.
inline double uniform_order_stat(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    std::nth_element(v.begin(), v.begin() + long(k - 1), v.end());
    return v[k - 1];
}

struct MeanVar {
    double mean;
    double var;
};

inline MeanVar mean_var(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, s / double(v.size() - 1)};
}

} // namespace oracle
