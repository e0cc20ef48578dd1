#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "kxsim/bitstring.hpp"
#include "kxsim/error.hpp"

namespace kxsim {

/// Similarity kernel exp(-(1 - d) / alpha^2).
inline double phi(double d, double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive, got " + std::to_string(alpha));
    if (d < 0.0 || d > 1.0) throw ContractViolation("similarity must lie in [0, 1]");
    return std::exp(-(1.0 - d) / (alpha * alpha));
}

/// Shape of the fitness landscape, with phi tabulated by agreement count for
/// one feature length (d only takes the values k/L).
class Landscape {
public:
    Landscape(double alpha, std::size_t feature_count) : alpha_(alpha) {
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive, got " + std::to_string(alpha));
        if (feature_count == 0 || feature_count > BitString::max_length)
            throw ConfigError("feature_count must be in 1..64");
        table_.resize(feature_count + 1);
        for (std::size_t k = 0; k <= feature_count; ++k)
            table_[k] = phi(static_cast<double>(k) / static_cast<double>(feature_count), alpha);
    }

    double alpha() const noexcept { return alpha_; }
    std::size_t feature_count() const noexcept { return table_.size() - 1; }

    double operator()(const BitString& request, const BitString& service) const {
        if (request.size() != feature_count() || service.size() != feature_count())
            throw ConfigError("bitstring length does not match the landscape's feature_count");
        return table_[request.agreement(service)];
    }

private:
    double alpha_;
    std::vector<double> table_;
};

/// Snapshot of one round: requests, submissions and every derived quantity.
struct MarketState {
    std::size_t round = 0;
    std::vector<BitString> requests;     // n
    std::vector<BitString> submissions;  // m, indexed by SME
    std::vector<double> phi;             // n x m, row-major by request
    std::vector<double> rho;             // n
    std::vector<double> fitness;         // m
    std::vector<double> saturation;      // n
    double efficiency_sigma = 0.0;

    std::size_t request_count() const noexcept { return requests.size(); }
    std::size_t sme_count() const noexcept { return submissions.size(); }

    double phi_at(std::size_t request, std::size_t sme) const { return phi[request * sme_count() + sme]; }

    double mean_saturation() const {
        return std::accumulate(saturation.begin(), saturation.end(), 0.0) /
               static_cast<double>(saturation.size());
    }
};

namespace detail {

inline void require_uniform_length(std::span<const BitString> strings, std::size_t length) {
    for (const auto& s : strings)
        if (s.size() != length)
            throw ConfigError("all requests and submissions must share one length (" + std::to_string(length) +
                              "), found " + std::to_string(s.size()));
}

inline double discount(double saturation) { return std::min(1.0, 1.0 / saturation); }

// Population standard deviation.
inline double population_stdev(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / n);
}

}  // namespace detail

/// Evaluates one round of the market.
inline MarketState evaluate_market(std::span<const BitString> requests, std::span<const BitString> submissions,
                                   const Landscape& landscape, std::size_t round) {
    if (requests.empty()) throw ConfigError("market needs at least one request");
    if (submissions.empty()) throw ConfigError("market needs at least one submission");
    detail::require_uniform_length(requests, landscape.feature_count());
    detail::require_uniform_length(submissions, landscape.feature_count());

    const std::size_t n = requests.size();
    const std::size_t m = submissions.size();
    MarketState s;
    s.round = round;
    s.requests.assign(requests.begin(), requests.end());
    s.submissions.assign(submissions.begin(), submissions.end());
    s.phi.resize(n * m);
    s.rho.resize(n);
    s.saturation.resize(n);
    s.fitness.assign(m, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        double q = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double p = landscape(requests[i], submissions[j]);
            s.phi[i * m + j] = p;
            q += p;
        }
        s.saturation[i] = q;
        s.rho[i] = detail::discount(q);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) s.fitness[j] += s.phi[i * m + j] * s.rho[i];
    s.efficiency_sigma = detail::population_stdev(s.saturation);
    return s;
}

/// Fitness SME `sme` would have earned last round had it submitted
/// `candidate` instead, everything else held fixed.
inline double rate_candidate(const BitString& candidate, std::size_t sme, const MarketState& previous,
                             const Landscape& landscape) {
    if (sme >= previous.sme_count()) throw ContractViolation("SME index out of range");
    if (candidate == previous.submissions[sme]) return previous.fitness[sme];
    double u = 0.0;
    for (std::size_t i = 0; i < previous.request_count(); ++i) {
        const double p = landscape(previous.requests[i], candidate);
        const double q = previous.saturation[i] - previous.phi_at(i, sme) + p;
        u += p * detail::discount(q);
    }
    return u;
}

/// Rating before any market round exists: no competitors, so no discounting.
inline double rate_bootstrap(const BitString& candidate, std::span<const BitString> requests,
                             const Landscape& landscape) {
    double u = 0.0;
    for (const auto& r : requests) u += landscape(r, candidate);
    return u;
}

}  // namespace kxsim
