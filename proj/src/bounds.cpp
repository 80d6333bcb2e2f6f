#include "thors/bounds.hpp"

#include "thors/binomial.hpp"
#include "thors/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thors {

namespace {

void check_unit_open(double x)
{
    if (!(x > 0.0 && x < 1.0)) {
        throw Error(ErrorCode::DomainError, "x must lie in (0, 1), got " + std::to_string(x));
    }
}

void check_counts(std::size_t n, std::size_t k, const char* what)
{
    if (n == 0 || k > n) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + ": need n >= 1 and k <= n (n=" + std::to_string(n) +
                        ", k=" + std::to_string(k) + ")");
    }
}

// exp(-2 (eps + a / (n (n + 1)))^2 n)
double hoeffding_term(double eps, double a, double n)
{
    const double shift = eps + a / (n * (n + 1.0));
    return std::exp(-2.0 * shift * shift * n);
}

} // namespace

CdfBounds fpr_cdf_bounds(double x, std::size_t n0, std::size_t k0)
{
    check_unit_open(x);
    check_counts(n0, k0, "fpr_cdf_bounds");
    return {binomial_upper_tail(n0, n0 - k0 + 1, x), binomial_upper_tail(n0, n0 - k0, x)};
}

CdfBounds fnr_cdf_bounds(double x, std::size_t n1, std::size_t k1)
{
    check_unit_open(x);
    check_counts(n1, k1, "fnr_cdf_bounds");
    return {binomial_upper_tail(n1, k1 + 1, x), binomial_upper_tail(n1, k1, x)};
}

BoundContext BoundContext::from_selection(const ValidationScores& vs, const ThresholdSelection& sel,
                                          const CostMatrix& cm, std::size_t n_te)
{
    BoundContext ctx;
    ctx.n0 = vs.n0();
    ctx.n1 = vs.n1();
    ctx.k0 = sel.k0;
    ctx.k1 = sel.k1;
    ctx.pi0 = vs.pi0_hat();
    ctx.pi1 = vs.pi1_hat();
    ctx.n_te = n_te;
    ctx.cm = cm;
    ctx.validate();
    return ctx;
}

void BoundContext::validate() const
{
    check_counts(n0, k0, "BoundContext class 0");
    check_counts(n1, k1, "BoundContext class 1");
    if (!(pi0 >= 0.0 && pi1 >= 0.0) || std::abs(pi0 + pi1 - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "priors must be nonnegative and sum to 1");
    }
    if (n_te < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_te must be >= 1");
    }
}

OrderStatMoments order_stat_moments(std::size_t n0, std::size_t k0, std::size_t n1, std::size_t k1)
{
    check_counts(n0, k0, "order_stat_moments class 0");
    check_counts(n1, k1, "order_stat_moments class 1");
    const double a0 = double(n0);
    const double b0 = double(k0);
    const double a1 = double(n1);
    const double b1 = double(k1);
    OrderStatMoments m;
    m.mean_y1 = (b1 + 1.0) / (a1 + 1.0);
    m.mean_y0 = (a0 - b0 + 1.0) / (a0 + 1.0);
    m.var_y1 = (b1 + 1.0) * (a1 - b1) / ((a1 + 1.0) * (a1 + 1.0) * (a1 + 2.0));
    m.var_y0 = b0 * (a0 - b0 + 1.0) / ((a0 + 1.0) * (a0 + 1.0) * (a0 + 2.0));
    return m;
}

BernsteinBound bernstein_params(const BoundContext& ctx)
{
    ctx.validate();
    const auto m = order_stat_moments(ctx.n0, ctx.k0, ctx.n1, ctx.k1);
    const double a = ctx.cm.fn_cost();
    const double beta = ctx.cm.beta();
    const double nte = double(ctx.n_te);

    BernsteinBound bb;
    bb.c_star_expected = nte * a * (beta * ctx.pi0 * m.mean_y0 + ctx.pi1 * m.mean_y1);
    bb.m_const = std::max(ctx.pi1 * a * std::max(m.mean_y1, 1.0 - m.mean_y1),
                          beta * ctx.pi0 * a * std::max(m.mean_y0, 1.0 - m.mean_y0));
    const double bp0 = beta * ctx.pi0;
    bb.sigma = std::sqrt(nte * a * a * (ctx.pi1 * ctx.pi1 * m.var_y1 + bp0 * bp0 * m.var_y0));
    return bb;
}

double bernstein_tail(const BernsteinBound& bb, double t)
{
    if (!(t >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
    }
    if (bb.sigma <= 0.0) {
        return t > 0.0 ? 1.0 : 0.0;
    }
    if (std::isinf(t)) {
        return 1.0;
    }
    const double denom = 2.0 + 2.0 * bb.m_const / (3.0 * bb.sigma) * t;
    return 1.0 - std::exp(-t * t / denom);
}

CostInterval cost_interval(const BoundContext& ctx, double epsilon)
{
    ctx.validate();
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and > 0");
    }
    const double a = ctx.cm.fn_cost();
    const double beta = ctx.cm.beta();
    const double nte = double(ctx.n_te);
    const double n0 = double(ctx.n0);
    const double n1 = double(ctx.n1);
    const double k0 = double(ctx.k0);
    const double k1 = double(ctx.k1);

    CostInterval ci;
    ci.epsilon = epsilon;
    ci.c1 = nte * a * (ctx.pi1 * k1 / (n1 + 1.0) + beta * ctx.pi0 * (n0 - k0) / (n0 + 1.0));
    ci.c2 = nte * a *
            (ctx.pi1 * (k1 + 1.0) / (n1 + 1.0) + beta * ctx.pi0 * (n0 - k0 + 1.0) / (n0 + 1.0));
    ci.c_eps = nte * a * (ctx.pi1 + beta * ctx.pi0) * epsilon;

    const double t_fn_low = hoeffding_term(epsilon, n1 - k1, n1);
    const double t_fn_high = hoeffding_term(epsilon, k1, n1);
    const double t_fp_low = hoeffding_term(epsilon, k0, n0);
    const double t_fp_high = hoeffding_term(epsilon, n0 - k0, n0);

    ci.prob_two_sided_raw = 1.0 - nte * (t_fn_low + t_fn_high + t_fp_low + t_fp_high);
    ci.prob_upper_raw = 1.0 - nte * (t_fn_high + t_fp_high);
    ci.prob_two_sided = std::clamp(ci.prob_two_sided_raw, 0.0, 1.0);
    ci.prob_upper = std::clamp(ci.prob_upper_raw, 0.0, 1.0);
    ci.vacuous = ci.prob_two_sided_raw <= 0.0;
    return ci;
}

double solve_epsilon(const BoundContext& ctx, double target_confidence)
{
    if (!(target_confidence >= 0.0 && target_confidence < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "target confidence must lie in [0, 1)");
    }
    constexpr double kFloor = 1e-12;
    constexpr double kCeiling = 1.0;
    auto meets = [&](double eps) { return cost_interval(ctx, eps).prob_upper >= target_confidence; };

    if (!meets(kCeiling)) {
        throw Error(ErrorCode::Unachievable,
                    "confidence " + std::to_string(target_confidence) +
                        " is out of reach even with epsilon = 1");
    }
    if (meets(kFloor)) {
        return kFloor;
    }
    double lo = kFloor;
    double hi = kCeiling;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (meets(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double size_query_prob_upper(const SizeQuery& q, double n_v)
{
    const double beta = q.cm.beta();
    const double n0 = q.pi0 * n_v;
    const double n1 = q.pi1 * n_v;
    const double nte = double(q.n_te);
    // C2 / (n_te A) and C_eps / (n_te A eps) with the ratio constants frozen.
    const double c2_unit = q.pi1 * (q.q1 + 1.0 / (n1 + 1.0)) + beta * q.pi0 * (q.q0 + 1.0 / (n0 + 1.0));
    const double eps = (q.target_ratio - 1.0) * c2_unit / (q.pi1 + beta * q.pi0);
    // k1 / (n1 (n1 + 1)) = q1 / n1 and (n0 - k0) / (n0 (n0 + 1)) = q0 / n0.
    const double s1 = eps + q.q1 / n1;
    const double s0 = eps + q.q0 / n0;
    return 1.0 - nte * (std::exp(-2.0 * s1 * s1 * n1) + std::exp(-2.0 * s0 * s0 * n0));
}

std::size_t estimate_validation_size(const SizeQuery& q)
{
    if (!(q.q0 >= 0.0 && q.q0 <= 1.0 && q.q1 >= 0.0 && q.q1 <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "ratio constants must lie in [0, 1]");
    }
    if (!(q.pi0 > 0.0 && q.pi1 > 0.0) || std::abs(q.pi0 + q.pi1 - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "priors must be positive and sum to 1");
    }
    if (!(q.target_confidence >= 0.0 && q.target_confidence < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "target confidence must lie in [0, 1)");
    }
    if (q.n_te < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_te must be >= 1");
    }
    if (!(q.target_ratio > 1.0)) {
        throw Error(ErrorCode::Unachievable,
                    "target ratio " + std::to_string(q.target_ratio) + " leaves no slack (epsilon <= 0)");
    }
    auto meets = [&](std::size_t n) { return size_query_prob_upper(q, double(n)) >= q.target_confidence; };

    std::size_t lo = kMinValidationSize;
    std::size_t hi = kMaxValidationSize;
    if (meets(lo)) {
        return lo;
    }
    if (!meets(hi)) {
        throw Error(ErrorCode::Unachievable, "no validation size up to 1e9 reaches the target");
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (meets(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

} // namespace thors
