#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>

namespace kxsim::stats {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1); zero for fewer than two values.
inline double sample_stdev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double standard_error(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    return sample_stdev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

/// One-sided sign test: P(X >= successes) for X ~ Binomial(trials, 1/2).
inline double sign_test_p(std::size_t successes, std::size_t trials) {
    double p = 0.0;
    for (std::size_t k = successes; k <= trials; ++k)
        p += std::exp(std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) -
                      static_cast<double>(trials) * std::log(2.0));
    return std::min(p, 1.0);
}

}  // namespace kxsim::stats
