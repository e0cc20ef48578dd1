#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "kxsim/artifact.hpp"
#include "kxsim/config.hpp"
#include "kxsim/csv.hpp"
#include "kxsim/engine.hpp"
#include "kxsim/stats.hpp"

namespace kxsim {

/// A run failed part-way through a preset.
class RunFailure : public std::runtime_error {
public:
    RunFailure(const std::string& what, std::filesystem::path manifest)
        : std::runtime_error(what), manifest_(std::move(manifest)) {}
    const std::filesystem::path& manifest() const noexcept { return manifest_; }

private:
    std::filesystem::path manifest_;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig2a", "fig2b", "fig2c_sweep", "fig2d", "fig2e",
                                                "fig2f", "fig2g", "fig3",        "fig4_paired"};
    return names;
}

/// Parameter grid cycled through by the 200-run sweep (seeds vary as well).
struct SweepGrid {
    std::vector<std::size_t> request_counts{3, 4, 5, 6};
    std::vector<std::size_t> portfolio_sizes{20, 30};
    std::vector<std::size_t> feature_counts{10, 12};
    std::vector<double> alphas{0.15, 0.2, 0.25};

    std::size_t size() const {
        return request_counts.size() * portfolio_sizes.size() * feature_counts.size() * alphas.size();
    }

    void apply(std::size_t k, RunConfig& c) const {
        k %= size();
        c.alpha = alphas[k % alphas.size()];
        k /= alphas.size();
        c.feature_count = feature_counts[k % feature_counts.size()];
        k /= feature_counts.size();
        c.portfolio_size = portfolio_sizes[k % portfolio_sizes.size()];
        k /= portfolio_sizes.size();
        c.request_count = request_counts[k % request_counts.size()];
    }
};

struct ScenarioPreset {
    std::string name;
    RunConfig base;
    std::size_t runs = 1;  // seeds, or sweep size
    bool sweep = false;
    bool paired = false;  // exchange / no_exchange arms per seed
};

/// Exchange cadence of the fig2 presets.
inline constexpr std::size_t fig2_exchange_interval = 20;

/// Fixed parameters of each named scenario.
inline ScenarioPreset make_preset(const std::string& name) {
    ScenarioPreset p;
    p.name = name;
    RunConfig& c = p.base;
    using K = RankStrategy::Kind;
    if (name == "fig2a") {
    } else if (name == "fig2b") {
        c.portfolio_size = 30;
        c.request_count = 5;
    } else if (name == "fig2c_sweep") {
        p.runs = 200;
        p.sweep = true;
    } else if (name == "fig2d") {
        c.rank_strategy.kind = K::growth_rate;
    } else if (name == "fig2e") {
        c.rank_strategy = {K::moving_average, 20};
    } else if (name == "fig2f") {
        c.rank_strategy.kind = K::static_id;
    } else if (name == "fig2g") {
        c.rank_strategy.kind = K::churning_random;
    } else if (name == "fig3") {
        c.sme_count = 6;
        c.request_count = 2;
        c.exchange_enabled = false;
        c.request_churn_interval = 400;
        c.forced_exchange_interval = 200;
        c.forced_exchange_cluster = Cluster::lower;
        c.total_rounds = 2000;
    } else if (name == "fig4_paired") {
        c.portfolio_reset_interval = 500;
        c.exchange_interval = 500;
        c.exchange_offset = 250;
        c.analysis_warmup = 10000;
        c.total_rounds = 15000;
        p.runs = 30;
        p.paired = true;
    } else {
        std::string valid;
        for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset \"" + name + "\"; valid presets: " + valid);
    }
    if (name.rfind("fig2", 0) == 0) c.exchange_interval = fig2_exchange_interval;
    return p;
}

/// Shrinks horizons and event intervals by `divisor` (>= 1) for quick runs.
inline void apply_fast(RunConfig& c, std::size_t divisor) {
    if (divisor <= 1) return;
    auto shrink = [divisor](std::size_t& v) {
        if (v > 0) v = std::max<std::size_t>(1, v / divisor);
    };
    shrink(c.total_rounds);
    c.analysis_warmup /= divisor;
    shrink(c.request_churn_interval);
    shrink(c.portfolio_reset_interval);
    shrink(c.forced_exchange_interval);
    if (c.exchange_interval > 1) {
        shrink(c.exchange_interval);
        c.exchange_offset /= divisor;
    }
    if (c.credit_horizon > 1) shrink(c.credit_horizon);
}

struct PlannedRun {
    std::string dir_name;
    RunConfig config;
    RunLabel label;
};

struct PresetOptions {
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;  // key=value
    std::optional<std::uint64_t> seed;   // base seed; run k uses seed + k
    std::optional<std::size_t> runs;     // number of seeds (sweep size for fig2c_sweep)
    std::size_t fast = 1;
    std::size_t jobs = 1;
};

namespace detail {

inline std::string padded(std::size_t k) {
    std::string s = std::to_string(k);
    return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

}  // namespace detail

/// Resolves a preset plus options into the full list of runs.
inline std::vector<PlannedRun> plan_preset(const std::string& name, const PresetOptions& options) {
    ScenarioPreset preset = make_preset(name);
    RunConfig base = preset.base;
    if (options.config_path) base = load_config(*options.config_path, base);
    for (const auto& o : options.overrides) apply_override(base, o);
    apply_fast(base, options.fast);
    const std::uint64_t seed0 = options.seed.value_or(base.master_seed);
    const std::size_t runs = options.runs.value_or(preset.runs);

    std::vector<PlannedRun> planned;
    const SweepGrid grid;
    for (std::size_t k = 0; k < runs; ++k) {
        RunConfig c = base;
        c.master_seed = seed0 + k;
        if (preset.sweep) grid.apply(k, c);
        if (preset.paired) {
            for (bool exchange : {true, false}) {
                RunConfig arm = c;
                arm.exchange_enabled = exchange;
                const std::string arm_name = exchange ? "exchange" : "no_exchange";
                planned.push_back({"seed_" + detail::padded(k) + "_" + arm_name, arm, {name, arm_name, k}});
            }
        } else {
            planned.push_back({"run_" + detail::padded(k), c, {name, "", k}});
        }
    }
    for (const auto& p : planned) p.config.validate();
    return planned;
}

/// Executes planned runs on `jobs` worker threads, one artifact directory
/// each. Results do not depend on `jobs`.
inline void execute_runs(const std::vector<PlannedRun>& runs, const std::filesystem::path& out, std::size_t jobs,
                         std::ostream* progress = nullptr) {
    std::filesystem::create_directories(out);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::optional<RunFailure> failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= runs.size() || failed.load()) return;
            const auto& r = runs[k];
            const auto dir = out / r.dir_name;
            try {
                std::filesystem::create_directories(dir);
                {
                    std::ofstream m(dir / files::manifest, std::ios::binary);
                    m << make_manifest(r.config, r.label).dump(2) << '\n';
                }
                write_artifact(dir, Simulation(r.config).run(), r.label);
                if (progress) {
                    std::lock_guard lock(mu);
                    *progress << "completed " << r.dir_name << '\n';
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                if (!failure) failure.emplace(r.dir_name + ": " + e.what(), dir / files::manifest);
                failed = true;
                return;
            }
        }
    };

    const std::size_t n = std::max<std::size_t>(1, std::min(jobs, runs.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) throw *failure;
}

// ---------------------------------------------------------------------------
// Aggregation

struct StrengthCell {
    Cluster cluster;
    Action action;
    double mean = 0.0;        // over every (run, SME) sample
    double stderr_ = 0.0;
    std::size_t samples = 0;
    std::size_t runs = 0;
    double run_stderr = 0.0;  // standard error of the per-run cluster means
};

/// Per-run cluster means of final strengths, indexed [run][rule id].
using RunStrengthMeans = std::vector<std::array<double, Classifier::rule_count>>;

struct EfficiencyPair {
    std::size_t seed_index;
    double sigma_exchange;
    double sigma_no_exchange;
    double reduction() const { return sigma_no_exchange - sigma_exchange; }
};

struct ExchangeOutcome {
    std::size_t run_index;
    std::size_t round;
    std::size_t sme;
    double mean_before;
    double mean_after;
};

struct AggregateReport {
    std::vector<StrengthCell> strengths;  // 12 cells, empty when no run has classifiers
    RunStrengthMeans run_means;
    std::vector<EfficiencyPair> efficiency;
    std::vector<ExchangeOutcome> forced_outcomes;
    std::size_t runs = 0;
};

namespace detail {

inline std::vector<std::filesystem::path> run_dirs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (std::filesystem::exists(dir / files::manifest)) return {dir};
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_directory() && std::filesystem::exists(e.path() / files::manifest)) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw ConfigError("no run artifacts under " + dir.string());
    return out;
}

inline csv::Table read_records(const std::filesystem::path& dir, const RunConfig& c) {
    auto table = csv::read_file((dir / files::records).string());
    table.require_columns(record_header(c.sme_count, c.request_count), files::records);
    return table;
}

}  // namespace detail

/// Rounds either side of a forced exchange compared by the report.
inline constexpr std::size_t forced_exchange_window = 50;

inline double time_averaged_sigma(const csv::Table& records, std::size_t warmup) {
    const auto ct = records.column("t"), cs = records.column("sigma");
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : records.rows) {
        if (std::stoul(row.at(ct)) < warmup) continue;
        sum += parse_double(row.at(cs));
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

/// Rebuilds the report from persisted artifacts only.
inline AggregateReport aggregate(const std::filesystem::path& dir) {
    AggregateReport report;
    std::map<std::size_t, std::map<std::string, double>> sigma_by_seed;
    std::vector<std::vector<double>> pooled(Classifier::rule_count);

    for (const auto& run_dir : detail::run_dirs(dir)) {
        const auto manifest = read_manifest(run_dir);
        const RunConfig config = config_from_manifest(manifest);
        const std::size_t index = manifest.value("run_index", std::size_t{0});
        const std::string arm = manifest.value("arm", std::string{});
        ++report.runs;

        if (config.exchange_enabled) {
            const auto rows = read_strengths(run_dir);
            std::array<double, Classifier::rule_count> sums{};
            std::array<std::size_t, Classifier::rule_count> counts{};
            for (const auto& r : rows) {
                const auto id = rule_id(r.condition, r.action);
                pooled[id].push_back(r.strength);
                sums[id] += r.strength;
                ++counts[id];
            }
            for (std::size_t id = 0; id < Classifier::rule_count; ++id)
                if (counts[id]) sums[id] /= static_cast<double>(counts[id]);
            report.run_means.push_back(sums);
        }

        if (!arm.empty() || config.forced_exchange_interval > 0) {
            const auto records = detail::read_records(run_dir, config);
            if (!arm.empty()) sigma_by_seed[index][arm] = time_averaged_sigma(records, config.analysis_warmup);

            if (config.forced_exchange_interval > 0) {
                const auto ex = csv::read_file((run_dir / files::exchanges).string());
                ex.require_columns({"round", "sme_a", "sme_b", "forced"}, files::exchanges);
                const std::size_t rounds = records.rows.size();
                const auto w = forced_exchange_window;
                for (const auto& e : ex.rows) {
                    if (e.at(ex.column("forced")) != "true") continue;
                    const std::size_t t = std::stoul(e.at(ex.column("round")));
                    if (t < w || t + w > rounds) continue;
                    for (const auto& side : {"sme_a", "sme_b"}) {
                        const std::size_t j = std::stoul(e.at(ex.column(side)));
                        const auto col = records.column("U_" + std::to_string(j + 1));
                        double before = 0.0, after = 0.0;
                        for (std::size_t k = t - w; k < t; ++k) before += parse_double(records.rows[k].at(col));
                        for (std::size_t k = t; k < t + w; ++k) after += parse_double(records.rows[k].at(col));
                        report.forced_outcomes.push_back({index, t, j, before / static_cast<double>(w),
                                                          after / static_cast<double>(w)});
                    }
                }
            }
        }
    }

    if (!report.run_means.empty()) {
        for (std::size_t id = 0; id < Classifier::rule_count; ++id) {
            std::vector<double> per_run;
            for (const auto& m : report.run_means) per_run.push_back(m[id]);
            report.strengths.push_back({rule_condition(id), rule_action(id), stats::mean(pooled[id]),
                                        stats::standard_error(pooled[id]), pooled[id].size(), per_run.size(),
                                        stats::standard_error(per_run)});
        }
    }
    for (const auto& [seed, arms] : sigma_by_seed) {
        auto ex = arms.find("exchange"), no = arms.find("no_exchange");
        if (ex != arms.end() && no != arms.end()) report.efficiency.push_back({seed, ex->second, no->second});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Pattern statistics

/// Cross-run mean strength of (condition, action).
inline double mean_strength(const RunStrengthMeans& runs, Cluster condition, Action action) {
    double s = 0.0;
    for (const auto& r : runs) s += r[rule_id(condition, action)];
    return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
}

/// Upper-ranked SMEs prefer not to exchange: no_exchange is the strongest upper rule.
inline bool upper_avoids_exchange(const std::array<double, Classifier::rule_count>& s) {
    const double keep = s[rule_id(Cluster::upper, Action::no_exchange)];
    for (Action a : {Action::exchange_with_lower, Action::exchange_with_middle, Action::exchange_with_upper})
        if (s[rule_id(Cluster::upper, a)] > keep) return false;
    return true;
}

/// Some lower-cluster exchange rule beats lower no_exchange.
inline bool lower_seeks_exchange(const std::array<double, Classifier::rule_count>& s) {
    const double keep = s[rule_id(Cluster::lower, Action::no_exchange)];
    for (Action a : {Action::exchange_with_lower, Action::exchange_with_middle, Action::exchange_with_upper})
        if (s[rule_id(Cluster::lower, a)] > keep) return true;
    return false;
}

/// In every cluster, exchange strengths are non-increasing from partner upper to middle to lower.
inline bool partner_preference_ordered(const std::array<double, Classifier::rule_count>& s) {
    for (Cluster c : all_clusters) {
        const double up = s[rule_id(c, Action::exchange_with_upper)];
        const double mid = s[rule_id(c, Action::exchange_with_middle)];
        const double low = s[rule_id(c, Action::exchange_with_lower)];
        if (!(up >= mid && mid >= low)) return false;
    }
    return true;
}

inline std::array<double, Classifier::rule_count> cross_run_means(const RunStrengthMeans& runs) {
    std::array<double, Classifier::rule_count> m{};
    for (std::size_t id = 0; id < Classifier::rule_count; ++id)
        m[id] = mean_strength(runs, rule_condition(id), rule_action(id));
    return m;
}

template <typename Pred>
double fraction_of_runs(const RunStrengthMeans& runs, Pred pred) {
    std::size_t hits = 0;
    for (const auto& r : runs) hits += pred(r) ? 1 : 0;
    return runs.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(runs.size());
}

/// Rules whose cross-run mean departs from their cluster's grand mean by more
/// than `k` cross-run standard errors.
inline std::vector<std::size_t> significant_rules(const RunStrengthMeans& runs, double k) {
    std::vector<std::size_t> out;
    for (Cluster c : all_clusters) {
        std::vector<double> grand;
        for (const auto& r : runs)
            for (Action a : all_actions) grand.push_back(r[rule_id(c, a)]);
        const double grand_mean = stats::mean(grand);
        for (Action a : all_actions) {
            std::vector<double> xs;
            for (const auto& r : runs) xs.push_back(r[rule_id(c, a)]);
            if (std::abs(stats::mean(xs) - grand_mean) > k * stats::standard_error(xs)) out.push_back(rule_id(c, a));
        }
    }
    return out;
}

struct EfficiencySummary {
    std::size_t pairs = 0;
    std::size_t exchange_lower = 0;
    double mean_reduction = 0.0;
    double sign_test_p = 1.0;
    double fraction_lower() const { return pairs ? static_cast<double>(exchange_lower) / static_cast<double>(pairs) : 0.0; }
};

inline EfficiencySummary summarize_efficiency(const std::vector<EfficiencyPair>& pairs) {
    EfficiencySummary s;
    s.pairs = pairs.size();
    std::size_t nonzero = 0;
    for (const auto& p : pairs) {
        s.mean_reduction += p.reduction();
        if (p.reduction() > 0) ++s.exchange_lower;
        if (p.reduction() != 0) ++nonzero;
    }
    if (!pairs.empty()) s.mean_reduction /= static_cast<double>(pairs.size());
    s.sign_test_p = stats::sign_test_p(s.exchange_lower, nonzero);
    return s;
}

inline double improved_fraction(const std::vector<ExchangeOutcome>& outcomes, std::size_t* events = nullptr) {
    // One event = one pair at one round; judged on the pair's mean fitness.
    std::map<std::tuple<std::size_t, std::size_t>, std::pair<double, double>> by_event;
    std::map<std::tuple<std::size_t, std::size_t>, std::size_t> members;
    for (const auto& o : outcomes) {
        auto& e = by_event[{o.run_index, o.round}];
        e.first += o.mean_before;
        e.second += o.mean_after;
        ++members[{o.run_index, o.round}];
    }
    std::size_t improved = 0;
    for (const auto& [key, e] : by_event)
        if (e.second > e.first) ++improved;
    if (events) *events = by_event.size();
    return by_event.empty() ? 0.0 : static_cast<double>(improved) / static_cast<double>(by_event.size());
}

// ---------------------------------------------------------------------------
// Report files

namespace report_files {
inline constexpr const char* strengths = "report_strengths.csv";
inline constexpr const char* efficiency = "report_efficiency.csv";
inline constexpr const char* forced = "report_forced_exchanges.csv";
inline constexpr const char* summary = "report_summary.csv";
}  // namespace report_files

inline void write_report(const std::filesystem::path& dir, const AggregateReport& r) {
    auto open = [&](const char* name) { return detail::open_out(dir / name); };
    std::vector<std::pair<std::string, std::string>> summary{{"runs", std::to_string(r.runs)}};

    if (!r.strengths.empty()) {
        auto out = open(report_files::strengths);
        csv::write_row(out, {"cluster", "action", "mean", "stderr", "samples", "runs", "run_stderr"});
        for (const auto& c : r.strengths)
            csv::write_row(out, {std::string(to_string(c.cluster)), std::string(to_string(c.action)), format_double(c.mean),
                                 format_double(c.stderr_), std::to_string(c.samples), std::to_string(c.runs),
                                 format_double(c.run_stderr)});
        const auto means = cross_run_means(r.run_means);
        summary.emplace_back("upper_avoids_exchange", upper_avoids_exchange(means) ? "true" : "false");
        summary.emplace_back("lower_seeks_exchange", lower_seeks_exchange(means) ? "true" : "false");
        summary.emplace_back("partner_preference_ordered", partner_preference_ordered(means) ? "true" : "false");
        summary.emplace_back("runs_upper_avoids_exchange", format_double(fraction_of_runs(r.run_means, upper_avoids_exchange)));
        summary.emplace_back("runs_lower_seeks_exchange", format_double(fraction_of_runs(r.run_means, lower_seeks_exchange)));
        summary.emplace_back("rules_beyond_2_stderr", std::to_string(significant_rules(r.run_means, 2.0).size()));
    }
    if (!r.efficiency.empty()) {
        auto out = open(report_files::efficiency);
        csv::write_row(out, {"seed", "sigma_exchange", "sigma_no_exchange", "reduction"});
        for (const auto& p : r.efficiency)
            csv::write_row(out, {std::to_string(p.seed_index), format_double(p.sigma_exchange),
                                 format_double(p.sigma_no_exchange), format_double(p.reduction())});
        const auto s = summarize_efficiency(r.efficiency);
        summary.emplace_back("pairs", std::to_string(s.pairs));
        summary.emplace_back("fraction_exchange_lower", format_double(s.fraction_lower()));
        summary.emplace_back("mean_sigma_reduction", format_double(s.mean_reduction));
        summary.emplace_back("sign_test_p", format_double(s.sign_test_p));
    }
    if (!r.forced_outcomes.empty()) {
        auto out = open(report_files::forced);
        csv::write_row(out, {"run", "round", "sme", "mean_before", "mean_after"});
        for (const auto& o : r.forced_outcomes)
            csv::write_row(out, {std::to_string(o.run_index), std::to_string(o.round), std::to_string(o.sme),
                                 format_double(o.mean_before), format_double(o.mean_after)});
        std::size_t events = 0;
        const double f = improved_fraction(r.forced_outcomes, &events);
        summary.emplace_back("forced_exchange_events", std::to_string(events));
        summary.emplace_back("forced_exchange_improved_fraction", format_double(f));
    }
    auto out = open(report_files::summary);
    csv::write_row(out, {"statistic", "value"});
    for (const auto& [k, v] : summary) csv::write_row(out, {k, v});
}

/// Runs a preset end to end: artifacts per run plus the aggregate report.
inline AggregateReport run_preset(const std::string& name, const PresetOptions& options, const std::filesystem::path& out,
                                  std::ostream* progress = nullptr) {
    const auto runs = plan_preset(name, options);
    execute_runs(runs, out, options.jobs, progress);
    auto report = aggregate(out);
    write_report(out, report);
    return report;
}

// ---------------------------------------------------------------------------
// Plot data

inline const std::vector<std::string>& plot_kinds() {
    static const std::vector<std::string> kinds{"strength_bars", "fitness_series", "sigma_series"};
    return kinds;
}

/// Long-format table for external plotting.
inline void emit_plot_data(const std::string& kind, const std::filesystem::path& input, std::ostream& os) {
    if (kind == "strength_bars") {
        const auto path = input / report_files::strengths;
        csv::Table table;
        if (std::filesystem::exists(path)) {
            table = csv::read_file(path.string());
        } else {
            std::ostringstream tmp;
            const auto report = aggregate(input);
            if (report.strengths.empty()) throw ConfigError("strength_bars: no classifier strengths under " + input.string());
            csv::write_row(tmp, {"cluster", "action", "mean", "stderr"});
            for (const auto& c : report.strengths)
                csv::write_row(tmp, {std::string(to_string(c.cluster)), std::string(to_string(c.action)),
                                     format_double(c.mean), format_double(c.stderr_)});
            std::istringstream in(tmp.str());
            table = csv::parse(in);
        }
        table.require_columns({"cluster", "action", "mean", "stderr"}, "strength_bars");
        csv::write_row(os, {"cluster", "action", "mean", "stderr"});
        for (const auto& r : table.rows)
            csv::write_row(os, {r.at(table.column("cluster")), r.at(table.column("action")), r.at(table.column("mean")),
                                r.at(table.column("stderr"))});
        return;
    }
    if (kind != "fitness_series" && kind != "sigma_series") {
        std::string valid;
        for (const auto& k : plot_kinds()) valid += (valid.empty() ? "" : ", ") + k;
        throw ConfigError("unknown plot kind \"" + kind + "\"; valid kinds: " + valid);
    }

    const auto dirs = detail::run_dirs(input);
    const bool single = dirs.size() == 1 && dirs.front() == input;
    if (kind == "fitness_series")
        csv::write_row(os, single ? std::vector<std::string>{"sme", "t", "U"} : std::vector<std::string>{"run", "sme", "t", "U"});
    else
        csv::write_row(os, {"seed", "arm", "t", "sigma"});

    for (const auto& d : dirs) {
        const auto manifest = read_manifest(d);
        const auto config = config_from_manifest(manifest);
        const auto records = detail::read_records(d, config);
        const auto ct = records.column("t");
        const std::string run = std::to_string(manifest.value("run_index", std::size_t{0}));
        if (kind == "fitness_series") {
            for (std::size_t j = 0; j < config.sme_count; ++j) {
                const auto col = records.column("U_" + std::to_string(j + 1));
                for (const auto& row : records.rows) {
                    std::vector<std::string> out{std::to_string(j + 1), row.at(ct), row.at(col)};
                    if (!single) out.insert(out.begin(), run);
                    csv::write_row(os, out);
                }
            }
        } else {
            std::string arm = manifest.value("arm", std::string{});
            if (arm.empty()) arm = config.exchange_enabled ? "exchange" : "no_exchange";
            const auto cs = records.column("sigma");
            for (const auto& row : records.rows) csv::write_row(os, {run, arm, row.at(ct), row.at(cs)});
        }
    }
}

}  // namespace kxsim
