#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kxsim/classifier.hpp"
#include "kxsim/error.hpp"
#include "kxsim/rng.hpp"

namespace kxsim {

struct RankStrategy {
    enum class Kind { fitness, growth_rate, moving_average, static_id, churning_random };

    Kind kind = Kind::fitness;
    std::size_t window = 20;  // moving_average only

    /// Fitness rounds the strategy needs before it can rank.
    std::size_t required_history() const noexcept { return kind == Kind::growth_rate ? 2 : 1; }
};

inline constexpr std::string_view to_string(RankStrategy::Kind k) {
    switch (k) {
        case RankStrategy::Kind::fitness: return "fitness";
        case RankStrategy::Kind::growth_rate: return "growth_rate";
        case RankStrategy::Kind::moving_average: return "moving_average";
        case RankStrategy::Kind::static_id: return "static_id";
        case RankStrategy::Kind::churning_random: return "churning_random";
    }
    return "?";
}

inline RankStrategy::Kind parse_rank_kind(std::string_view s) {
    using K = RankStrategy::Kind;
    for (K k : {K::fitness, K::growth_rate, K::moving_average, K::static_id, K::churning_random})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown rank_strategy \"" + std::string(s) +
                      "\" (expected fitness, growth_rate, moving_average, static_id or churning_random)");
}

struct Ranking {
    std::vector<std::size_t> order;    // order[0] is rank 1
    std::vector<Cluster> cluster_of;   // by SME index
};

/// Sizes of the upper and lower clusters for m SMEs; the middle takes the rest.
struct ClusterSizes {
    std::size_t upper, middle, lower;
};

inline ClusterSizes cluster_sizes(std::size_t m) {
    const std::size_t upper = (m + 2) / 3;
    const std::size_t lower = m / 3;
    return {upper, m - upper - lower, lower};
}

/// Builds the cluster map from a best-first order.
inline Ranking make_ranking(std::vector<std::size_t> order) {
    const std::size_t m = order.size();
    const auto sizes = cluster_sizes(m);
    Ranking r{std::move(order), std::vector<Cluster>(m, Cluster::middle)};
    for (std::size_t pos = 0; pos < m; ++pos) {
        Cluster c = Cluster::middle;
        if (pos < sizes.upper)
            c = Cluster::upper;
        else if (pos >= m - sizes.lower)
            c = Cluster::lower;
        r.cluster_of[r.order[pos]] = c;
    }
    return r;
}

/// Orders SMEs by descending score, ties to the lower id.
inline Ranking rank_by_score(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return make_ranking(std::move(order));
}

/// Ranks the SMEs using `history[T][j]` = fitness of SME j in round T, the
/// last entry being the most recent round. `rng` is only drawn from by
/// churning_random.
inline Ranking rank(const RankStrategy& strategy, std::span<const std::vector<double>> history, Engine& rng) {
    using K = RankStrategy::Kind;
    if (history.size() < strategy.required_history())
        throw ConfigError(std::string("rank strategy ") + std::string(to_string(strategy.kind)) + " needs " +
                          std::to_string(strategy.required_history()) + " rounds of fitness history");
    const std::size_t t = history.size() - 1;
    const std::size_t m = history[t].size();

    switch (strategy.kind) {
        case K::fitness:
            return rank_by_score(history[t]);
        case K::growth_rate: {
            std::vector<double> growth(m);
            for (std::size_t j = 0; j < m; ++j) growth[j] = history[t][j] - history[t - 1][j];
            return rank_by_score(growth);
        }
        case K::moving_average: {
            if (strategy.window == 0) throw ConfigError("rank_window must be at least 1");
            // Sum over T = t-N .. t (N+1 terms) divided by N; before round N,
            // whatever is available divided by the count summed.
            const bool warm = t >= strategy.window;
            const std::size_t first = warm ? t - strategy.window : 0;
            const double divisor = warm ? static_cast<double>(strategy.window) : static_cast<double>(t + 1);
            std::vector<double> mean(m, 0.0);
            for (std::size_t T = first; T <= t; ++T)
                for (std::size_t j = 0; j < m; ++j) mean[j] += history[T][j];
            for (double& x : mean) x /= divisor;
            return rank_by_score(mean);
        }
        case K::static_id: {
            std::vector<std::size_t> order(m);
            std::iota(order.begin(), order.end(), std::size_t{0});
            return make_ranking(std::move(order));
        }
        case K::churning_random: {
            std::vector<std::size_t> order(m);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::shuffle(order.begin(), order.end(), rng);
            return make_ranking(std::move(order));
        }
    }
    throw ContractViolation("unhandled rank strategy");
}

}  // namespace kxsim
