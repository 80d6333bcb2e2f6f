#pragma once

#include "thors/cost_matrix.hpp"
#include "thors/threshold.hpp"
#include "thors/validation.hpp"

#include <cstddef>

namespace thors {

struct CdfBounds {
    double lower;
    double upper;
};

/// Bracket on P(FPR <= x) for a threshold with k0 of n0 class-0 validation
/// scores at or below it:
///   sum_{j=n0-k0+1}^{n0} C(n0,j) x^j (1-x)^{n0-j}  <=  P  <=  same from j = n0-k0.
/// Throws Error(DomainError) unless 0 < x < 1.
CdfBounds fpr_cdf_bounds(double x, std::size_t n0, std::size_t k0);

/// Bracket on P(FNR <= x); binomial tails from k1+1 and from k1.
CdfBounds fnr_cdf_bounds(double x, std::size_t n1, std::size_t k1);

/// Everything the cost guarantees depend on.
struct BoundContext {
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::size_t k0 = 0;
    std::size_t k1 = 0;
    double pi0 = 0.5;
    double pi1 = 0.5;
    std::size_t n_te = 1;
    CostMatrix cm{1.0, 1.0};

    /// Priors default to the validation proportions.
    static BoundContext from_selection(const ValidationScores& vs, const ThresholdSelection& sel,
                                       const CostMatrix& cm, std::size_t n_te);

    /// Throws Error(InvalidArgument) on broken invariants.
    void validate() const;
};

/// Order-statistic error variables: y1 = F1(T1_(k1+1)) bounds the FNR from
/// above, y0 = 1 - F0(T0_(k0)) bounds the FPR from above. Both are Beta.
struct OrderStatMoments {
    double mean_y1;
    double var_y1;
    double mean_y0;
    double var_y0;
};

OrderStatMoments order_stat_moments(std::size_t n0, std::size_t k0, std::size_t n1, std::size_t k1);

struct BernsteinBound {
    double c_star_expected; // centre C*
    double m_const;         // deviation bound M
    double sigma;
};

BernsteinBound bernstein_params(const BoundContext& ctx);

/// Lower bound on P(C <= C* + t sigma):
///   1 - exp(-t^2 / (2 + 2 M t / (3 sigma))).
/// With sigma == 0 the cost sits at its centre and the result is 1 for any
/// t > 0. Throws Error(InvalidArgument) for negative or NaN t.
double bernstein_tail(const BernsteinBound& bb, double t);

struct CostInterval {
    double c1;
    double c2;
    double c_eps;
    double epsilon;
    double prob_two_sided;     // clamped to [0, 1]
    double prob_upper;         // clamped to [0, 1]
    double prob_two_sided_raw; // before clamping, may be negative
    double prob_upper_raw;
    bool vacuous;              // raw two-sided bound <= 0
};

/// Hoeffding interval [C1 - C_eps, C2 + C_eps] and its probability floors.
/// Throws Error(InvalidArgument) unless epsilon > 0.
CostInterval cost_interval(const BoundContext& ctx, double epsilon);

/// Smallest epsilon (bisection, absolute tolerance well under 1e-9) with
/// prob_upper >= target_confidence. Throws Error(Unachievable) when even
/// epsilon = 1 falls short.
double solve_epsilon(const BoundContext& ctx, double target_confidence);

struct SizeQuery {
    double q0 = 0.0; // (n0 - k0) / (n0 + 1), held fixed
    double q1 = 0.0; // k1 / (n1 + 1), held fixed
    double pi0 = 0.5;
    double pi1 = 0.5;
    CostMatrix cm{1.0, 1.0};
    std::size_t n_te = 1;
    double target_ratio = 2.0;      // upper bound expressed as a multiple of C2
    double target_confidence = 0.95;
};

inline constexpr std::size_t kMinValidationSize = 10;
inline constexpr std::size_t kMaxValidationSize = 1'000'000'000;

/// Conservative minimal validation size n_v such that
/// P(C <= target_ratio * C2) >= target_confidence, with n0 = pi0 n_v and
/// n1 = pi1 n_v. Throws Error(Unachievable) for target_ratio <= 1 or when
/// no n_v up to 1e9 suffices.
std::size_t estimate_validation_size(const SizeQuery& query);

/// Upper-bound probability for a size query at a given n_v (exposed for
/// diagnostics and tests).
double size_query_prob_upper(const SizeQuery& query, double n_v);

} // namespace thors
