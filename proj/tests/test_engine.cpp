#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "kxsim/artifact.hpp"
#include "kxsim/engine.hpp"

using namespace kxsim;

namespace {

RunConfig small(std::size_t rounds = 60) {
    RunConfig c;
    c.sme_count = 9;
    c.request_count = 3;
    c.portfolio_size = 12;
    c.total_rounds = rounds;
    c.master_seed = 17;
    return c;
}

std::string dump(const std::vector<Portfolio>& ps) {
    std::ostringstream os;
    for (const auto& p : ps) os << p.genomes().size() << ':' << [&] {
        std::string s;
        for (const auto& g : p.genomes()) s += g.to_string() + ' ';
        return s;
    }() << '\n';
    return os.str();
}

std::string records_csv(const RunArtifact& a) {
    std::ostringstream os;
    write_records(os, a);
    return os.str();
}

}  // namespace

TEST(Engine, ZeroRoundsHoldsBootstrapOnly) {
    auto a = run(small(0));
    ASSERT_EQ(a.records.size(), 1u);
    EXPECT_EQ(a.records[0].t, 0u);
    EXPECT_TRUE(a.exchanges.empty());
    EXPECT_EQ(dump(a.initial_portfolios), dump(a.final_portfolios));
}

TEST(Engine, OneRecordPerRound) {
    auto a = run(small(25));
    ASSERT_EQ(a.records.size(), 26u);
    for (std::size_t t = 0; t < a.records.size(); ++t) EXPECT_EQ(a.records[t].t, t);
}

TEST(Engine, Deterministic) {
    auto a = run(small()), b = run(small());
    EXPECT_EQ(records_csv(a), records_csv(b));
    EXPECT_EQ(dump(a.final_portfolios), dump(b.final_portfolios));
    for (std::size_t j = 0; j < a.classifiers.size(); ++j) EXPECT_EQ(a.classifiers[j].strengths(), b.classifiers[j].strengths());
}

TEST(Engine, PayoffCapIdentityEveryRound) {
    auto c = small(200);
    c.request_churn_interval = 50;
    for (const auto& r : run(c).records) {
        double u = 0.0, q = 0.0;
        for (double x : r.fitness) u += x;
        for (double x : r.saturation) q += std::min(x, 1.0);
        EXPECT_NEAR(u, q, 1e-9) << "round " << r.t;
    }
}

TEST(Engine, StrengthsChangeOnlyOnExchangeRounds) {
    auto c = small(120);
    c.exchange_interval = 10;
    c.exchange_offset = 3;
    Simulation sim(c);
    auto prev = sim.classifiers();
    for (std::size_t t = 1; t <= c.total_rounds; ++t) {
        sim.step();
        const bool epoch = c.is_exchange_epoch(t);
        bool changed = false;
        for (std::size_t j = 0; j < prev.size(); ++j) changed |= prev[j].strengths() != sim.classifiers()[j].strengths();
        if (!epoch) EXPECT_FALSE(changed) << "round " << t;
        const auto& ev = sim.records().back().events;
        EXPECT_EQ(std::count(ev.begin(), ev.end(), "exchange") == 1, epoch);
        prev = sim.classifiers();
    }
}

TEST(Engine, ResetRestoresRoundZeroGenomesAndKeepsStrengths) {
    // No GA variation, so only exchanges (rounds 5, 15, 25) move genomes and
    // only resets (10, 20, 30) can undo them.
    auto c = small(30);
    c.portfolio_reset_interval = 10;
    c.exchange_interval = 10;
    c.exchange_offset = 5;
    c.rank_set = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    c.ga.replacement_fraction = 0.0;
    c.ga.mutation_rate = 0.0;
    auto sorted = [](std::vector<BitString> g) {
        std::sort(g.begin(), g.end());
        return g;
    };
    Simulation sim(c);
    bool moved = false;
    for (std::size_t t = 1; t <= c.total_rounds; ++t) {
        sim.step();
        for (std::size_t j = 0; j < c.sme_count; ++j) {
            const bool same = sorted(sim.portfolios()[j].genomes()) == sorted(sim.initial_portfolios()[j].genomes());
            if (t % 10 == 0) EXPECT_TRUE(same) << "round " << t << " sme " << j;
            moved |= !same;
        }
    }
    EXPECT_TRUE(moved);
    std::size_t updated = 0;
    for (const auto& k : sim.classifiers())
        for (double x : k.strengths()) updated += x != 0.0;
    EXPECT_GT(updated, 0u);
}

TEST(Engine, ExchangeToggleLeavesOtherStreamsAlone) {
    auto c = small(80);
    c.request_churn_interval = 20;
    auto on = c, off = c;
    off.exchange_enabled = false;
    auto a = run(on), b = run(off);
    EXPECT_EQ(dump(a.initial_portfolios), dump(b.initial_portfolios));
    EXPECT_EQ(a.records[0].fitness, b.records[0].fitness);
    // Identical requests: a market of the same submissions gives identical Q.
    EXPECT_EQ(a.records[0].saturation, b.records[0].saturation);
    for (const auto& r : b.records) EXPECT_TRUE(std::none_of(r.events.begin(), r.events.end(), [](const std::string& e) { return e == "exchange"; }));
}

TEST(Engine, ForcedExchangeSkipsChurnRounds) {
    RunConfig c;
    c.sme_count = 6;
    c.request_count = 2;
    c.exchange_enabled = false;
    c.request_churn_interval = 40;
    c.forced_exchange_interval = 20;
    c.total_rounds = 200;
    auto a = run(c);
    std::set<std::size_t> rounds;
    for (const auto& e : a.exchanges) {
        EXPECT_TRUE(e.forced);
        rounds.insert(e.round);
    }
    for (std::size_t t : rounds) {
        EXPECT_EQ(t % 20, 0u);
        EXPECT_NE(t % 40, 0u);
    }
    EXPECT_FALSE(rounds.empty());
}

TEST(Engine, InvalidConfigNamesField) {
    auto c = small();
    c.portfolio_size = 4;
    try {
        Simulation sim(c);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("rank_set"), std::string::npos);
    }
    auto d = small();
    d.alpha = 0;
    EXPECT_THROW(Simulation{d}, ConfigError);
}
