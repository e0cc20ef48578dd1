#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "kxsim/error.hpp"
#include "kxsim/rng.hpp"

namespace kxsim {

enum class Cluster { lower = 0, middle = 1, upper = 2 };

enum class Action { exchange_with_lower = 0, exchange_with_middle = 1, exchange_with_upper = 2, no_exchange = 3 };

inline constexpr std::array<Cluster, 3> all_clusters{Cluster::lower, Cluster::middle, Cluster::upper};
inline constexpr std::array<Action, 4> all_actions{Action::exchange_with_lower, Action::exchange_with_middle,
                                                   Action::exchange_with_upper, Action::no_exchange};

inline constexpr std::string_view to_string(Cluster c) {
    switch (c) {
        case Cluster::lower: return "lower";
        case Cluster::middle: return "middle";
        case Cluster::upper: return "upper";
    }
    return "?";
}

inline constexpr std::string_view to_string(Action a) {
    switch (a) {
        case Action::exchange_with_lower: return "exchange_with_lower";
        case Action::exchange_with_middle: return "exchange_with_middle";
        case Action::exchange_with_upper: return "exchange_with_upper";
        case Action::no_exchange: return "no_exchange";
    }
    return "?";
}

inline Cluster parse_cluster(std::string_view s) {
    for (Cluster c : all_clusters)
        if (to_string(c) == s) return c;
    throw ConfigError("unknown cluster \"" + std::string(s) + "\" (expected lower, middle or upper)");
}

inline Action parse_action(std::string_view s) {
    for (Action a : all_actions)
        if (to_string(a) == s) return a;
    throw ConfigError("unknown action \"" + std::string(s) + "\"");
}

/// Cluster an exchange action targets; empty for no_exchange.
inline constexpr std::optional<Cluster> target_of(Action a) {
    switch (a) {
        case Action::exchange_with_lower: return Cluster::lower;
        case Action::exchange_with_middle: return Cluster::middle;
        case Action::exchange_with_upper: return Cluster::upper;
        case Action::no_exchange: break;
    }
    return std::nullopt;
}

/// Rules are numbered condition-major, so rule 0 is
/// (lower, exchange_with_lower) and rule 11 is (upper, no_exchange).
inline constexpr std::size_t rule_id(Cluster condition, Action action) {
    return static_cast<std::size_t>(condition) * all_actions.size() + static_cast<std::size_t>(action);
}
inline constexpr Cluster rule_condition(std::size_t id) { return all_clusters[id / all_actions.size()]; }
inline constexpr Action rule_action(std::size_t id) { return all_actions[id % all_actions.size()]; }

/// Fixed twelve-rule classifier with noisy-bid activation and exponentially
/// smoothed strengths.
class Classifier {
public:
    static constexpr std::size_t rule_count = all_clusters.size() * all_actions.size();

    Classifier(double learning_rate, double bid_noise_std)
        : learning_rate_(learning_rate), bid_noise_std_(bid_noise_std) {
        if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) throw ConfigError("learning_rate must lie in [0, 1]");
        if (!(bid_noise_std >= 0.0)) throw ConfigError("bid_noise_std must be non-negative");
    }

    double learning_rate() const noexcept { return learning_rate_; }
    double bid_noise_std() const noexcept { return bid_noise_std_; }

    const std::array<double, rule_count>& strengths() const noexcept { return strengths_; }
    double strength(Cluster condition, Action action) const { return strengths_[rule_id(condition, action)]; }
    void set_strength(std::size_t id, double s) { strengths_.at(id) = s; }

    std::optional<std::size_t> active_rule() const noexcept { return active_; }
    double payoff_basis() const noexcept { return payoff_basis_; }

    /// Picks the matching rule with the highest strength plus independent
    /// N(0, bid_noise_std) noise; ties go to the lower rule id. `basis` is the
    /// fitness against which the rule's payoff will later be measured.
    Action decide(Cluster own_cluster, Engine& rng, double basis = 0.0) {
        std::normal_distribution<double> noise(0.0, bid_noise_std_ > 0.0 ? bid_noise_std_ : 1.0);
        std::size_t best = rule_id(own_cluster, all_actions.front());
        double best_bid = 0.0;
        for (std::size_t a = 0; a < all_actions.size(); ++a) {
            const std::size_t id = rule_id(own_cluster, all_actions[a]);
            double bid = strengths_[id];
            if (bid_noise_std_ > 0.0) bid += noise(rng);
            if (a == 0 || bid > best_bid) {
                best = id;
                best_bid = bid;
            }
        }
        active_ = best;
        payoff_basis_ = basis;
        return rule_action(best);
    }

    /// s <- (1 - c) s + c * payoff on the active rule, then clears it.
    void update_strength(double payoff) {
        if (!active_) throw ContractViolation("update_strength called with no active rule");
        double& s = strengths_[*active_];
        s = s - learning_rate_ * s + learning_rate_ * payoff;
        active_.reset();
    }

    /// Credits the active rule with realized - basis.
    void credit(double realized_fitness) { update_strength(realized_fitness - payoff_basis_); }

private:
    std::array<double, rule_count> strengths_{};
    std::optional<std::size_t> active_;
    double learning_rate_;
    double bid_noise_std_;
    double payoff_basis_ = 0.0;
};

}  // namespace kxsim
