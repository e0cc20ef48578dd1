#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "kxsim/classifier.hpp"
#include "kxsim/error.hpp"
#include "kxsim/portfolio.hpp"
#include "kxsim/rng.hpp"

namespace kxsim {

struct ExchangeIntent {
    std::size_t sme;
    Cluster own_cluster;
    std::optional<Cluster> target;  // empty: no_exchange
};

struct ExchangePair {
    std::size_t sme_a;
    std::size_t sme_b;
};

struct ExchangePlan {
    std::vector<ExchangePair> pairs;
    std::vector<std::size_t> unmatched;  // wanted a partner, found none
    std::vector<std::size_t> rank_set;   // 1-based portfolio ranks swapped in every pair
};

/// Pairs SMEs by mutual cluster consent. For each unordered cluster pair
/// {X, Y} the X-members targeting Y and the Y-members targeting X are
/// shuffled and zipped; X targeting X pairs within one shuffled queue.
inline ExchangePlan resolve(std::span<const ExchangeIntent> intents, Engine& rng, std::vector<std::size_t> rank_set) {
    ExchangePlan plan;
    plan.rank_set = std::move(rank_set);

    // queue[x][y]: SMEs in cluster x targeting cluster y, in intent order.
    std::vector<std::size_t> queue[3][3];
    for (const auto& in : intents)
        if (in.target) queue[static_cast<int>(in.own_cluster)][static_cast<int>(*in.target)].push_back(in.sme);

    for (int x = 0; x < 3; ++x) {
        for (int y = x; y < 3; ++y) {
            auto& forward = queue[x][y];
            std::shuffle(forward.begin(), forward.end(), rng);
            if (x == y) {
                std::size_t k = 0;
                for (; k + 1 < forward.size(); k += 2) plan.pairs.push_back({forward[k], forward[k + 1]});
                if (k < forward.size()) plan.unmatched.push_back(forward[k]);
                continue;
            }
            auto& backward = queue[y][x];
            std::shuffle(backward.begin(), backward.end(), rng);
            const std::size_t matched = std::min(forward.size(), backward.size());
            for (std::size_t k = 0; k < matched; ++k) plan.pairs.push_back({forward[k], backward[k]});
            for (std::size_t k = matched; k < forward.size(); ++k) plan.unmatched.push_back(forward[k]);
            for (std::size_t k = matched; k < backward.size(); ++k) plan.unmatched.push_back(backward[k]);
        }
    }
    std::sort(plan.unmatched.begin(), plan.unmatched.end());
    return plan;
}

/// Checks the rank set against the portfolio capacity (done once at startup).
inline void validate_rank_set(std::span<const std::size_t> rank_set, std::size_t capacity) {
    for (std::size_t r : rank_set)
        if (r == 0 || r > capacity)
            throw ConfigError("rank_set entry " + std::to_string(r) + " outside portfolio ranks 1.." +
                              std::to_string(capacity));
}

/// Swaps the genomes at every rank in the plan's rank set between the two
/// portfolios of each pair. `portfolios` is indexed by SME.
inline void execute(const ExchangePlan& plan, std::span<Portfolio> portfolios) {
    for (const auto& pair : plan.pairs) {
        Portfolio& a = portfolios[pair.sme_a];
        Portfolio& b = portfolios[pair.sme_b];
        validate_rank_set(plan.rank_set, std::min(a.capacity(), b.capacity()));
        for (std::size_t r : plan.rank_set) {
            BitString from_a = a.at_rank(r);
            a.set_at_rank(r, b.at_rank(r));
            b.set_at_rank(r, std::move(from_a));
        }
    }
}

}  // namespace kxsim
