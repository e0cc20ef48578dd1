#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kxsim/bitstring.hpp"
#include "kxsim/classifier.hpp"
#include "kxsim/config.hpp"
#include "kxsim/exchange.hpp"
#include "kxsim/market.hpp"
#include "kxsim/portfolio.hpp"
#include "kxsim/ranking.hpp"
#include "kxsim/rng.hpp"

namespace kxsim {

/// Metrics of one round, appended after market evaluation.
struct RoundRecord {
    std::size_t t = 0;
    std::vector<double> fitness;     // U_j
    std::vector<double> saturation;  // Q_i
    double efficiency_sigma = 0.0;
    double mean_saturation = 0.0;
    std::vector<std::optional<std::size_t>> active_rules;  // per SME on exchange epochs, else empty
    std::vector<std::string> events;                        // churn, reset, exchange, forced_exchange
};

struct ExchangeEvent {
    std::size_t round;
    std::size_t sme_a;
    std::size_t sme_b;
    std::vector<std::size_t> ranks;
    bool forced;
};

/// Everything a run produces.
struct RunArtifact {
    RunConfig config;
    std::vector<RoundRecord> records;
    std::vector<Classifier> classifiers;
    std::vector<Portfolio> initial_portfolios;  // as rated in round 0
    std::vector<Portfolio> final_portfolios;
    std::vector<ExchangeEvent> exchanges;
};

/// The round loop. Construction performs the round-0 bootstrap; each step()
/// executes one further round in the order
///   events -> exchange -> rate -> evolve -> re-rate/submit -> evaluate -> learn -> record.
///
/// A rule activated on an exchange epoch at round t has basis U_j(t-1). Its
/// realized fitness is captured at the last round before the next exchange
/// epoch or portfolio reset, whichever comes first, and the strength update is
/// applied at the start of the next exchange epoch, so strengths only change
/// on exchange rounds. With exchange_interval 1 this is the one-round payoff
/// U_j(t) - U_j(t-1).
class Simulation {
public:
    explicit Simulation(RunConfig config)
        : config_(validated(std::move(config))),
          landscape_(config_.alpha, config_.feature_count),
          request_rng_(derive_stream(config_.master_seed, "requests")),
          matching_rng_(derive_stream(config_.master_seed, "matching")),
          ranking_rng_(derive_stream(config_.master_seed, "ranking")) {
        const std::size_t m = config_.sme_count;
        for (std::size_t j = 0; j < m; ++j) {
            ga_rng_.push_back(derive_stream(config_.master_seed, "ga", j));
            classifier_rng_.push_back(derive_stream(config_.master_seed, "classifier", j));
            classifiers_.emplace_back(config_.learning_rate, config_.bid_noise_std);
        }
        realized_.assign(m, std::nullopt);
        generate_requests();

        // Initial portfolios draw from a stream of their own so that they do
        // not depend on GA settings.
        for (std::size_t j = 0; j < m; ++j) {
            Engine init = derive_stream(config_.master_seed, "portfolio_init", j);
            portfolios_.push_back(Portfolio::random(j, config_.portfolio_size, config_.feature_count, init));
            portfolios_[j].rate_all([&](const BitString& s) { return rate_bootstrap(s, requests_, landscape_); });
        }
        initial_portfolios_ = portfolios_;

        submit_and_evaluate();
        record({});
    }

    const RunConfig& config() const noexcept { return config_; }
    std::size_t round() const noexcept { return market_.round; }
    const MarketState& market() const noexcept { return market_; }
    const std::vector<Portfolio>& portfolios() const noexcept { return portfolios_; }
    const std::vector<Classifier>& classifiers() const noexcept { return classifiers_; }
    const std::vector<RoundRecord>& records() const noexcept { return records_; }
    const std::vector<ExchangeEvent>& exchanges() const noexcept { return exchanges_; }
    const std::vector<Portfolio>& initial_portfolios() const noexcept { return initial_portfolios_; }

    void step() {
        const std::size_t t = market_.round + 1;
        std::vector<std::string> events;

        if (config_.is_churn_round(t)) {
            generate_requests();
            events.emplace_back("churn");
        }
        if (config_.is_reset_round(t)) {
            for (std::size_t j = 0; j < portfolios_.size(); ++j)
                portfolios_[j] = Portfolio(j, initial_portfolios_[j].genomes());
            events.emplace_back("reset");
        }

        std::vector<std::optional<std::size_t>> active;
        if (config_.is_forced_exchange_round(t)) {
            forced_exchange(t);
            events.emplace_back("forced_exchange");
        } else if (config_.is_exchange_epoch(t) && fitness_history_.size() >= config_.rank_strategy.required_history()) {
            active = exchange_epoch(t);
            last_epoch_ = t;
            events.emplace_back("exchange");
        }

        for (std::size_t j = 0; j < portfolios_.size(); ++j)
            portfolios_[j].rate_all([&](const BitString& s) { return rate_candidate(s, j, market_, landscape_); });
        for (std::size_t j = 0; j < portfolios_.size(); ++j) portfolios_[j].evolve(config_.ga, ga_rng_[j]);
        for (std::size_t j = 0; j < portfolios_.size(); ++j)
            portfolios_[j].rate_stale([&](const BitString& s) { return rate_candidate(s, j, market_, landscape_); });

        submit_and_evaluate(t);

        const bool window_closes = config_.is_exchange_epoch(t + 1) || config_.is_reset_round(t + 1) ||
                                   (config_.credit_horizon > 0 && t + 1 == last_epoch_ + config_.credit_horizon);
        if (window_closes)
            for (std::size_t j = 0; j < classifiers_.size(); ++j)
                if (classifiers_[j].active_rule() && !realized_[j]) realized_[j] = market_.fitness[j];

        record(std::move(events), std::move(active));
    }

    /// Runs the remaining rounds up to total_rounds.
    RunArtifact run() && {
        while (market_.round < config_.total_rounds) step();
        return RunArtifact{std::move(config_),       std::move(records_),    std::move(classifiers_),
                           std::move(initial_portfolios_), std::move(portfolios_), std::move(exchanges_)};
    }

private:
    static RunConfig validated(RunConfig c) {
        c.validate();
        return c;
    }

    void generate_requests() {
        requests_.clear();
        for (std::size_t i = 0; i < config_.request_count; ++i)
            requests_.push_back(random_bitstring(config_.feature_count, request_rng_));
    }

    void submit_and_evaluate(std::size_t t = 0) {
        std::vector<BitString> submissions;
        submissions.reserve(portfolios_.size());
        for (const auto& p : portfolios_) submissions.push_back(p.submission());
        market_ = evaluate_market(requests_, submissions, landscape_, t);
        fitness_history_.push_back(market_.fitness);
    }

    Ranking current_ranking() {
        // fitness_history_ ends at round t-1 here, so decisions use last round's scores.
        return rank(config_.rank_strategy, fitness_history_, ranking_rng_);
    }

    std::vector<std::optional<std::size_t>> exchange_epoch(std::size_t t) {
        for (std::size_t j = 0; j < classifiers_.size(); ++j) {
            if (!classifiers_[j].active_rule()) continue;
            classifiers_[j].credit(realized_[j].value_or(fitness_history_.back()[j]));
            realized_[j].reset();
        }

        const Ranking ranking = current_ranking();
        std::vector<ExchangeIntent> intents;
        std::vector<std::optional<std::size_t>> active;
        for (std::size_t j = 0; j < classifiers_.size(); ++j) {
            const Cluster own = ranking.cluster_of[j];
            const Action a = classifiers_[j].decide(own, classifier_rng_[j], fitness_history_.back()[j]);
            intents.push_back({j, own, target_of(a)});
            active.push_back(classifiers_[j].active_rule());
        }
        apply_plan(resolve(intents, matching_rng_, config_.rank_set), t, false);
        return active;
    }

    void forced_exchange(std::size_t t) {
        const Ranking ranking = current_ranking();
        std::vector<ExchangeIntent> intents;
        for (std::size_t j = 0; j < portfolios_.size(); ++j)
            if (ranking.cluster_of[j] == config_.forced_exchange_cluster)
                intents.push_back({j, config_.forced_exchange_cluster, config_.forced_exchange_cluster});
        apply_plan(resolve(intents, matching_rng_, config_.rank_set), t, true);
    }

    void apply_plan(const ExchangePlan& plan, std::size_t t, bool forced) {
        execute(plan, portfolios_);
        for (const auto& p : plan.pairs) exchanges_.push_back({t, p.sme_a, p.sme_b, plan.rank_set, forced});
    }

    void record(std::vector<std::string> events, std::vector<std::optional<std::size_t>> active = {}) {
        RoundRecord r;
        r.t = market_.round;
        r.fitness = market_.fitness;
        r.saturation = market_.saturation;
        r.efficiency_sigma = market_.efficiency_sigma;
        r.mean_saturation = market_.mean_saturation();
        r.active_rules = std::move(active);
        r.events = std::move(events);
        records_.push_back(std::move(r));
    }

    RunConfig config_;
    Landscape landscape_;
    Engine request_rng_;
    Engine matching_rng_;
    Engine ranking_rng_;
    std::vector<Engine> ga_rng_;
    std::vector<Engine> classifier_rng_;

    std::vector<BitString> requests_;
    std::vector<Portfolio> portfolios_;
    std::vector<Portfolio> initial_portfolios_;
    std::vector<Classifier> classifiers_;
    std::vector<std::optional<double>> realized_;
    std::size_t last_epoch_ = 0;
    MarketState market_;
    std::vector<std::vector<double>> fitness_history_;
    std::vector<RoundRecord> records_;
    std::vector<ExchangeEvent> exchanges_;
};

/// Executes a full run.
inline RunArtifact run(const RunConfig& config) { return Simulation(config).run(); }

}  // namespace kxsim
