#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kxsim/classifier.hpp"
#include "kxsim/error.hpp"
#include "kxsim/exchange.hpp"
#include "kxsim/format.hpp"
#include "kxsim/portfolio.hpp"
#include "kxsim/ranking.hpp"

namespace kxsim {

/// Every parameter of one simulation run. All fields have defaults; the
/// defaults reproduce the 21-SME, 4-request, 20-service, 10-feature market.
struct RunConfig {
    std::size_t sme_count = 21;
    std::size_t request_count = 4;
    std::size_t feature_count = 10;
    std::size_t portfolio_size = 20;
    double alpha = 0.2;
    GaParams ga;
    double learning_rate = 0.1;
    double bid_noise_std = 0.05;
    RankStrategy rank_strategy;
    bool exchange_enabled = true;
    std::size_t exchange_interval = 1;
    std::size_t exchange_offset = 0;       // epochs fall on t % interval == offset % interval
    std::vector<std::size_t> rank_set{2, 3, 4, 5, 6};
    std::size_t credit_horizon = 0;  // rounds from decision to realized payoff; 0 = up to the next epoch
    std::size_t total_rounds = 10000;
    std::size_t request_churn_interval = 0;    // 0 = never
    std::size_t portfolio_reset_interval = 0;  // 0 = never
    std::size_t forced_exchange_interval = 0;  // 0 = no forced exchanges
    Cluster forced_exchange_cluster = Cluster::lower;
    std::uint64_t master_seed = 1;
    std::size_t analysis_warmup = 0;  // rounds excluded from time-averaged statistics

    void validate() const {
        auto positive = [](std::size_t v, const char* name) {
            if (v == 0) throw ConfigError(std::string(name) + " must be positive");
        };
        positive(sme_count, "sme_count");
        positive(request_count, "request_count");
        positive(feature_count, "feature_count");
        positive(portfolio_size, "portfolio_size");
        if (feature_count > BitString::max_length) throw ConfigError("feature_count must be at most 64");
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
        ga.validate(portfolio_size);
        if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) throw ConfigError("learning_rate must lie in [0, 1]");
        if (!(bid_noise_std >= 0.0)) throw ConfigError("bid_noise_std must be non-negative");
        if (rank_strategy.kind == RankStrategy::Kind::moving_average && rank_strategy.window == 0)
            throw ConfigError("rank_window must be at least 1");
        if (exchange_enabled && exchange_interval == 0) throw ConfigError("exchange_interval must be positive");
        try {
            validate_rank_set(rank_set, portfolio_size);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("rank_set: ") + e.what());
        }
    }

    bool is_exchange_epoch(std::size_t t) const {
        return exchange_enabled && exchange_interval > 0 && t % exchange_interval == exchange_offset % exchange_interval;
    }
    bool is_churn_round(std::size_t t) const { return request_churn_interval > 0 && t > 0 && t % request_churn_interval == 0; }
    bool is_reset_round(std::size_t t) const {
        return portfolio_reset_interval > 0 && t > 0 && t % portfolio_reset_interval == 0;
    }
    bool is_forced_exchange_round(std::size_t t) const {
        return forced_exchange_interval > 0 && t > 0 && t % forced_exchange_interval == 0 && !is_churn_round(t);
    }

    /// Sets one field from its textual form.
    void set(std::string_view key, std::string_view value);

    nlohmann::ordered_json to_json() const;

    /// Applies every key of a flat JSON object on top of the current values.
    void apply_json(const nlohmann::json& object);

    static const std::vector<std::string>& keys();
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    Int v{};
    auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || end != t.data() + t.size() || t.empty())
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got \"" + std::string(text) + "\"");
    return v;
}

inline double parse_real(std::string_view key, std::string_view text) {
    try {
        return parse_double(trim(text));
    } catch (const ConfigError&) {
        throw ConfigError(std::string(key) + ": expected a number, got \"" + std::string(text) + "\"");
    }
}

inline bool parse_flag(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got \"" + std::string(text) + "\"");
}

// Accepts "2,3,4", "[2, 3, 4]", "2-6" or a mix such as "2-4,7"; "" or "[]" is empty.
inline std::vector<std::size_t> parse_rank_list(std::string_view key, std::string_view text) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[') t.erase(0, 1);
    if (!t.empty() && t.back() == ']') t.pop_back();
    std::vector<std::size_t> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        if (const auto dash = item.find('-'); dash != std::string::npos) {
            const auto lo = parse_integer<std::size_t>(key, item.substr(0, dash));
            const auto hi = parse_integer<std::size_t>(key, item.substr(dash + 1));
            if (lo > hi) throw ConfigError(std::string(key) + ": empty range \"" + item + "\"");
            for (std::size_t r = lo; r <= hi; ++r) out.push_back(r);
        } else {
            out.push_back(parse_integer<std::size_t>(key, item));
        }
    }
    return out;
}

struct ConfigField {
    const char* name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<nlohmann::ordered_json(const RunConfig&)> get;
};

#define KXSIM_SIZE_FIELD(member, path)                                                                       \
    ConfigField {                                                                                            \
        #member, [](RunConfig& c, std::string_view v) { c.path = parse_integer<std::size_t>(#member, v); }, \
            [](const RunConfig& c) { return nlohmann::ordered_json(c.path); }                                \
    }
#define KXSIM_REAL_FIELD(member, path)                                                          \
    ConfigField {                                                                               \
        #member, [](RunConfig& c, std::string_view v) { c.path = parse_real(#member, v); },    \
            [](const RunConfig& c) { return nlohmann::ordered_json(c.path); }                   \
    }

inline const std::vector<ConfigField>& config_fields() {
    static const std::vector<ConfigField> fields{
        KXSIM_SIZE_FIELD(sme_count, sme_count),
        KXSIM_SIZE_FIELD(request_count, request_count),
        KXSIM_SIZE_FIELD(feature_count, feature_count),
        KXSIM_SIZE_FIELD(portfolio_size, portfolio_size),
        KXSIM_REAL_FIELD(alpha, alpha),
        KXSIM_REAL_FIELD(crossover_rate, ga.crossover_rate),
        KXSIM_REAL_FIELD(mutation_rate, ga.mutation_rate),
        KXSIM_REAL_FIELD(replacement_fraction, ga.replacement_fraction),
        KXSIM_SIZE_FIELD(elitism_count, ga.elitism_count),
        KXSIM_REAL_FIELD(learning_rate, learning_rate),
        KXSIM_REAL_FIELD(bid_noise_std, bid_noise_std),
        ConfigField{"rank_strategy",
                    [](RunConfig& c, std::string_view v) { c.rank_strategy.kind = parse_rank_kind(trim(v)); },
                    [](const RunConfig& c) { return nlohmann::ordered_json(std::string(to_string(c.rank_strategy.kind))); }},
        KXSIM_SIZE_FIELD(rank_window, rank_strategy.window),
        ConfigField{"exchange_enabled",
                    [](RunConfig& c, std::string_view v) { c.exchange_enabled = parse_flag("exchange_enabled", v); },
                    [](const RunConfig& c) { return nlohmann::ordered_json(c.exchange_enabled); }},
        KXSIM_SIZE_FIELD(exchange_interval, exchange_interval),
        KXSIM_SIZE_FIELD(exchange_offset, exchange_offset),
        ConfigField{"rank_set", [](RunConfig& c, std::string_view v) { c.rank_set = parse_rank_list("rank_set", v); },
                    [](const RunConfig& c) { return nlohmann::ordered_json(c.rank_set); }},
        KXSIM_SIZE_FIELD(credit_horizon, credit_horizon),
        KXSIM_SIZE_FIELD(total_rounds, total_rounds),
        KXSIM_SIZE_FIELD(request_churn_interval, request_churn_interval),
        KXSIM_SIZE_FIELD(portfolio_reset_interval, portfolio_reset_interval),
        KXSIM_SIZE_FIELD(forced_exchange_interval, forced_exchange_interval),
        ConfigField{"forced_exchange_cluster",
                    [](RunConfig& c, std::string_view v) { c.forced_exchange_cluster = parse_cluster(trim(v)); },
                    [](const RunConfig& c) {
                        return nlohmann::ordered_json(std::string(to_string(c.forced_exchange_cluster)));
                    }},
        ConfigField{"master_seed",
                    [](RunConfig& c, std::string_view v) { c.master_seed = parse_integer<std::uint64_t>("master_seed", v); },
                    [](const RunConfig& c) { return nlohmann::ordered_json(c.master_seed); }},
        KXSIM_SIZE_FIELD(analysis_warmup, analysis_warmup),
    };
    return fields;
}

#undef KXSIM_SIZE_FIELD
#undef KXSIM_REAL_FIELD

inline std::string join_keys() {
    std::string out;
    for (const auto& f : config_fields()) {
        if (!out.empty()) out += ", ";
        out += f.name;
    }
    return out;
}

}  // namespace detail

inline const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& f : detail::config_fields()) v.emplace_back(f.name);
        return v;
    }();
    return names;
}

inline void RunConfig::set(std::string_view key, std::string_view value) {
    for (const auto& f : detail::config_fields())
        if (key == f.name) return f.set(*this, value);
    throw ConfigError("unknown config key \"" + std::string(key) + "\"; valid keys: " + detail::join_keys());
}

inline nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& f : detail::config_fields()) j[f.name] = f.get(*this);
    return j;
}

inline void RunConfig::apply_json(const nlohmann::json& object) {
    if (!object.is_object()) throw ConfigError("config document must be a flat key/value object");
    for (const auto& [key, value] : object.items()) {
        if (value.is_object()) throw ConfigError("config key \"" + key + "\" must hold a scalar or list");
        set(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
}

/// Reads a config file (a flat JSON object) on top of `base`.
inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    base.apply_json(doc);
    return base;
}

/// Applies a "key=value" override.
inline void apply_override(RunConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override must look like key=value: \"" + std::string(assignment) + "\"");
    config.set(detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

}  // namespace kxsim
