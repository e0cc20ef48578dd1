#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kxsim/classifier.hpp"
#include "kxsim/csv.hpp"
#include "kxsim/engine.hpp"
#include "kxsim/format.hpp"

namespace kxsim {

inline constexpr int artifact_schema_version = 1;

/// Where a run sits inside a preset: which preset, which arm of a paired
/// design, and its position in the sweep.
struct RunLabel {
    std::string preset = "run";
    std::string arm;
    std::size_t index = 0;
};

namespace files {
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* records = "records.csv";
inline constexpr const char* strengths = "strengths.csv";
inline constexpr const char* exchanges = "exchanges.csv";
inline constexpr const char* portfolios = "portfolios.txt";
inline constexpr const char* initial_portfolios = "initial_portfolios.txt";
}  // namespace files

inline std::vector<std::string> record_header(std::size_t sme_count, std::size_t request_count) {
    std::vector<std::string> h{"t"};
    for (std::size_t j = 1; j <= sme_count; ++j) h.push_back("U_" + std::to_string(j));
    for (std::size_t i = 1; i <= request_count; ++i) h.push_back("Q_" + std::to_string(i));
    for (const char* c : {"sigma", "mean_saturation", "events", "active_rules"}) h.emplace_back(c);
    return h;
}

inline nlohmann::ordered_json make_manifest(const RunConfig& config, const RunLabel& label) {
    nlohmann::ordered_json j;
    j["schema_version"] = artifact_schema_version;
    j["preset"] = label.preset;
    j["arm"] = label.arm;
    j["run_index"] = label.index;
    j["config"] = config.to_json();
    return j;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    return out;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += sep;
        out += parts[k];
    }
    return out;
}

}  // namespace detail

inline void write_records(std::ostream& os, const RunArtifact& a) {
    csv::write_row(os, record_header(a.config.sme_count, a.config.request_count));
    for (const auto& r : a.records) {
        std::vector<std::string> row{std::to_string(r.t)};
        for (double u : r.fitness) row.push_back(format_double(u));
        for (double q : r.saturation) row.push_back(format_double(q));
        row.push_back(format_double(r.efficiency_sigma));
        row.push_back(format_double(r.mean_saturation));
        row.push_back(detail::join(r.events, ';'));
        std::vector<std::string> rules;
        for (const auto& id : r.active_rules) rules.push_back(id ? std::to_string(*id + 1) : "-");
        row.push_back(detail::join(rules, ' '));
        csv::write_row(os, row);
    }
}

/// Final rule strengths, one row per (SME, rule).
inline void write_strengths(std::ostream& os, const std::vector<Classifier>& classifiers) {
    csv::write_row(os, {"sme_id", "condition", "action", "strength"});
    for (std::size_t j = 0; j < classifiers.size(); ++j)
        for (std::size_t id = 0; id < Classifier::rule_count; ++id)
            csv::write_row(os, {std::to_string(j), std::string(to_string(rule_condition(id))),
                                std::string(to_string(rule_action(id))), format_double(classifiers[j].strengths()[id])});
}

inline void write_exchanges(std::ostream& os, const std::vector<ExchangeEvent>& events) {
    csv::write_row(os, {"round", "sme_a", "sme_b", "ranks", "forced"});
    for (const auto& e : events) {
        std::vector<std::string> ranks;
        for (auto r : e.ranks) ranks.push_back(std::to_string(r));
        csv::write_row(os, {std::to_string(e.round), std::to_string(e.sme_a), std::to_string(e.sme_b),
                            detail::join(ranks, ' '), e.forced ? "true" : "false"});
    }
}

inline void write_portfolios(std::ostream& os, const std::vector<Portfolio>& portfolios) {
    for (const auto& p : portfolios) p.dump(os);
}

/// Persists a run into `dir` (created if needed).
inline void write_artifact(const std::filesystem::path& dir, const RunArtifact& a, const RunLabel& label) {
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / files::manifest);
        out << make_manifest(a.config, label).dump(2) << '\n';
    }
    {
        auto out = detail::open_out(dir / files::records);
        write_records(out, a);
    }
    {
        auto out = detail::open_out(dir / files::strengths);
        write_strengths(out, a.classifiers);
    }
    {
        auto out = detail::open_out(dir / files::exchanges);
        write_exchanges(out, a.exchanges);
    }
    {
        auto out = detail::open_out(dir / files::portfolios);
        write_portfolios(out, a.final_portfolios);
    }
    {
        auto out = detail::open_out(dir / files::initial_portfolios);
        write_portfolios(out, a.initial_portfolios);
    }
}

inline nlohmann::json read_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / files::manifest);
    if (!in) throw ConfigError("no manifest in " + dir.string());
    try {
        auto j = nlohmann::json::parse(in);
        if (j.value("schema_version", 0) != artifact_schema_version)
            throw ConfigError("unsupported artifact schema in " + dir.string());
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad manifest in " + dir.string() + ": " + e.what());
    }
}

inline RunConfig config_from_manifest(const nlohmann::json& manifest) {
    RunConfig c;
    c.apply_json(manifest.at("config"));
    return c;
}

struct StrengthRow {
    std::size_t sme;
    Cluster condition;
    Action action;
    double strength;
};

inline std::vector<StrengthRow> read_strengths(const std::filesystem::path& dir) {
    const auto table = csv::read_file((dir / files::strengths).string());
    table.require_columns({"sme_id", "condition", "action", "strength"}, files::strengths);
    const auto cs = table.column("sme_id"), cc = table.column("condition"), ca = table.column("action"),
               cv = table.column("strength");
    std::vector<StrengthRow> rows;
    for (const auto& r : table.rows)
        rows.push_back({std::stoul(r.at(cs)), parse_cluster(r.at(cc)), parse_action(r.at(ca)), parse_double(r.at(cv))});
    return rows;
}

}  // namespace kxsim
