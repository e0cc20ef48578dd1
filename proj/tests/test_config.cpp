#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kxsim/config.hpp"
#include "kxsim/csv.hpp"
#include "kxsim/format.hpp"

using namespace kxsim;

TEST(Config, SetAndOverride) {
    RunConfig c;
    c.set("alpha", "0.25");
    apply_override(c, "rank_strategy=moving_average");
    apply_override(c, "rank_window = 7");
    apply_override(c, "rank_set=2-4");
    apply_override(c, "exchange_enabled=false");
    EXPECT_EQ(c.alpha, 0.25);
    EXPECT_EQ(c.rank_strategy.kind, RankStrategy::Kind::moving_average);
    EXPECT_EQ(c.rank_strategy.window, 7u);
    EXPECT_EQ(c.rank_set, (std::vector<std::size_t>{2, 3, 4}));
    EXPECT_FALSE(c.exchange_enabled);
}

TEST(Config, UnknownKeyListsValidKeys) {
    RunConfig c;
    try {
        c.set("smes", "3");
        FAIL();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("smes"), std::string::npos);
        EXPECT_NE(msg.find("sme_count"), std::string::npos);
    }
    EXPECT_THROW(apply_override(c, "alpha"), ConfigError);
    EXPECT_THROW(apply_override(c, "alpha=abc"), ConfigError);
    EXPECT_THROW(apply_override(c, "sme_count=-1"), ConfigError);
}

TEST(Config, JsonRoundTripCoversEveryKey) {
    RunConfig c;
    c.alpha = 0.15;
    c.rank_set = {1, 5};
    c.master_seed = 0xfedcba9876543210ull;
    c.forced_exchange_cluster = Cluster::upper;
    const auto j = c.to_json();
    EXPECT_EQ(j.size(), RunConfig::keys().size());
    RunConfig d;
    d.apply_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(d.to_json().dump(), j.dump());
}

TEST(Config, LoadFileThenOverride) {
    const auto path = std::filesystem::temp_directory_path() / "kxsim_config_test.json";
    {
        std::ofstream out(path);
        out << R"({"sme_count": 6, "request_count": 2, "rank_set": [2, 3], "rank_strategy": "static_id"})";
    }
    auto c = load_config(path.string());
    apply_override(c, "sme_count=9");
    EXPECT_EQ(c.sme_count, 9u);
    EXPECT_EQ(c.request_count, 2u);
    EXPECT_EQ(c.rank_set, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(c.rank_strategy.kind, RankStrategy::Kind::static_id);
    {
        std::ofstream out(path);
        out << R"({"sme_count": {"nested": 1}})";
    }
    EXPECT_THROW(load_config(path.string()), ConfigError);
    {
        std::ofstream out(path);
        out << "not json";
    }
    EXPECT_THROW(load_config(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST(Config, ValidationNamesField) {
    auto expect_field = [](RunConfig c, const char* field) {
        try {
            c.validate();
            FAIL() << field;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
        }
    };
    RunConfig c;
    c.sme_count = 0;
    expect_field(c, "sme_count");
    c = {};
    c.ga.mutation_rate = 2;
    expect_field(c, "mutation_rate");
    c = {};
    c.rank_set = {21};
    expect_field(c, "rank_set");
    c = {};
    c.exchange_interval = 0;
    expect_field(c, "exchange_interval");
}

TEST(Config, EpochSchedule) {
    RunConfig c;
    c.exchange_interval = 500;
    c.exchange_offset = 250;
    EXPECT_TRUE(c.is_exchange_epoch(250));
    EXPECT_TRUE(c.is_exchange_epoch(750));
    EXPECT_FALSE(c.is_exchange_epoch(500));
    c.forced_exchange_interval = 200;
    c.request_churn_interval = 400;
    EXPECT_TRUE(c.is_forced_exchange_round(200));
    EXPECT_FALSE(c.is_forced_exchange_round(400));
    EXPECT_FALSE(c.is_churn_round(0));
}

TEST(Csv, QuotingFollowsRfc4180) {
    EXPECT_EQ(csv::quote("plain"), "plain");
    EXPECT_EQ(csv::quote("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv::quote("two\nlines"), "\"two\nlines\"");
    std::ostringstream os;
    csv::write_row(os, {"a", "b,c", ""});
    EXPECT_EQ(os.str(), "a,\"b,c\",\r\n");
}

TEST(Csv, ParseRoundTrip) {
    std::ostringstream os;
    csv::write_row(os, {"x", "y"});
    csv::write_row(os, {"1,2", "he said \"no\"\r\nthen left"});
    csv::write_row(os, {"", "3"});
    std::istringstream in(os.str());
    const auto t = csv::parse(in);
    EXPECT_EQ(t.header, (std::vector<std::string>{"x", "y"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][0], "1,2");
    EXPECT_EQ(t.rows[0][1], "he said \"no\"\r\nthen left");
    EXPECT_EQ(t.rows[1][0], "");
}

TEST(Csv, SchemaMismatchNamesColumns) {
    std::istringstream in("a,b\r\n1,2\r\n");
    const auto t = csv::parse(in);
    try {
        t.require_columns({"a", "c"}, "thing");
        FAIL();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("expected columns [a,c]"), std::string::npos) << msg;
        EXPECT_NE(msg.find("found [a,b]"), std::string::npos) << msg;
    }
}

TEST(Format, DoubleRoundTrip) {
    for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, 6.7379469990854670e-3, 1e-300, -2.5}) EXPECT_EQ(parse_double(format_double(x)), x);
    EXPECT_THROW(parse_double("1.0x"), ConfigError);
}
