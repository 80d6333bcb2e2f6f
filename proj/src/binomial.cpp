#include "thors/binomial.hpp"

#include <algorithm>
#include <cmath>

namespace thors {

double log_binomial_pmf(std::size_t n, std::size_t j, double x)
{
    const double nn = double(n);
    const double jj = double(j);
    return std::lgamma(nn + 1.0) - std::lgamma(jj + 1.0) - std::lgamma(nn - jj + 1.0) +
           jj * std::log(x) + (nn - jj) * std::log1p(-x);
}

namespace {

// log sum_{j=first}^{last} pmf(j), walking away from `start` (the end of the
// range closest to the mode) so terms only shrink. Stops once the remaining
// terms cannot move the sum.
double log_tail_sum(std::size_t n, double x, std::size_t first, std::size_t last, bool upward)
{
    const double log_ratio = std::log(x) - std::log1p(-x);
    std::size_t j = upward ? first : last;
    double log_term = log_binomial_pmf(n, j, x);
    const double log_max = log_term;
    double sum = 0.0; // in units of exp(log_max)
    while (true) {
        sum += std::exp(log_term - log_max);
        if (log_term - log_max < -45.0) {
            break;
        }
        if (upward) {
            if (j == last) {
                break;
            }
            // pmf(j+1) / pmf(j) = (n - j) / (j + 1) * x / (1 - x)
            log_term += std::log(double(n - j)) - std::log(double(j + 1)) + log_ratio;
            ++j;
        } else {
            if (j == first) {
                break;
            }
            // pmf(j-1) / pmf(j) = j / (n - j + 1) * (1 - x) / x
            log_term += std::log(double(j)) - std::log(double(n - j + 1)) - log_ratio;
            --j;
        }
    }
    return log_max + std::log(sum);
}

} // namespace

double binomial_upper_tail(std::size_t n, std::size_t j, double x)
{
    if (j == 0) {
        return 1.0;
    }
    if (j > n) {
        return 0.0;
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double mean = double(n) * x;
    if (double(j) > mean) {
        // Upper tail lies entirely above the mode; sum it directly.
        return std::clamp(std::exp(log_tail_sum(n, x, j, n, true)), 0.0, 1.0);
    }
    // Lower tail 0..j-1 lies below the mode; complement it.
    const double lower = std::exp(log_tail_sum(n, x, 0, j - 1, false));
    return std::clamp(1.0 - lower, 0.0, 1.0);
}

} // namespace thors
