#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "kxsim/market.hpp"
#include "kxsim/portfolio.hpp"

using kxsim::BitString;
using kxsim::Portfolio;

namespace {

Portfolio make(std::initializer_list<const char*> bits) {
    std::vector<BitString> s;
    for (auto b : bits) s.push_back(BitString::parse(b));
    return Portfolio(0, std::move(s));
}

double ones(const BitString& s) {
    double n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) n += s[i];
    return n;
}

}  // namespace

TEST(Portfolio, CrossoverAndMutationExamples) {
    const auto a = BitString::parse("101001"), b = BitString::parse("111111");
    EXPECT_EQ(BitString::splice(a, b, 2).to_string(), "101111");
    EXPECT_EQ(BitString::splice(b, a, 2).to_string(), "111001");
    EXPECT_EQ(BitString::parse("000101").flipped(0).to_string(), "100101");
}

TEST(Portfolio, RatingSortsDescendingWithStableTies) {
    auto p = make({"0001", "0111", "0011", "1111"});
    p.rate_all([](const BitString& s) { return ones(s); });
    EXPECT_EQ(p.submission().to_string(), "1111");
    EXPECT_EQ(p.at_rank(4).to_string(), "0001");

    auto same = make({"0001", "0111", "0011"});
    same.rate_all([](const BitString&) { return 0.5; });
    EXPECT_EQ(same.at_rank(1).to_string(), "0001");
    EXPECT_EQ(same.at_rank(3).to_string(), "0011");

    auto tie = make({"0011", "1100", "0000"});
    tie.rate_all([](const BitString& s) { return ones(s); });
    EXPECT_EQ(tie.submission().to_string(), "0011");
}

TEST(Portfolio, SoleMatchingCandidateRatesOne) {
    kxsim::Landscape land(0.2, 4);
    std::vector<BitString> req{BitString::parse("1001")};
    auto p = make({"1001"});
    p.rate_all([&](const BitString& s) { return kxsim::rate_bootstrap(s, req, land); });
    EXPECT_DOUBLE_EQ(p.candidates().front().rating, 1.0);
}

TEST(Portfolio, NoVariationCopiesParents) {
    kxsim::Engine rng(3);
    auto p = Portfolio::random(0, 20, 10, rng);
    p.rate_all([](const BitString& s) { return ones(s); });
    const auto before = p.genomes();
    const std::set<BitString> distinct_before(before.begin(), before.end());
    kxsim::GaParams ga{0.0, 0.0, 0.5, 1};
    for (int g = 0; g < 10; ++g) {
        p.evolve(ga, rng);
        p.rate_all([](const BitString& s) { return ones(s); });
        const auto now = p.genomes();
        for (const auto& s : now) EXPECT_TRUE(distinct_before.count(s));
        EXPECT_EQ(now.size(), 20u);
    }
}

TEST(Portfolio, ElitismKeepsBestAndMaxRatingMonotone) {
    kxsim::Engine rng(11), env(12);
    kxsim::Landscape land(0.2, 10);
    std::vector<BitString> req, sub;
    for (int i = 0; i < 4; ++i) req.push_back(kxsim::random_bitstring(10, env));
    for (int j = 0; j < 6; ++j) sub.push_back(kxsim::random_bitstring(10, env));
    const auto prev = kxsim::evaluate_market(req, sub, land, 0);
    auto rater = [&](const BitString& s) { return kxsim::rate_candidate(s, 0, prev, land); };

    auto p = Portfolio::random(0, 20, 10, rng);
    p.rate_all(rater);
    kxsim::GaParams ga{0.9, 0.2, 0.3, 1};
    for (int g = 0; g < 200; ++g) {
        const auto best = p.submission();
        const double best_rating = p.candidates().front().rating;
        p.evolve(ga, rng);
        EXPECT_EQ(p.at_rank(1), best);
        p.rate_stale(rater);
        EXPECT_GE(p.candidates().front().rating, best_rating);
        EXPECT_EQ(p.capacity(), 20u);
    }
}

TEST(Portfolio, EvolveIsReproducibleFromStream) {
    kxsim::Engine a(8), b(8);
    auto p = Portfolio::random(0, 12, 8, a);
    auto q = Portfolio::random(0, 12, 8, b);
    auto rater = [](const BitString& s) { return ones(s); };
    p.rate_all(rater);
    q.rate_all(rater);
    for (int g = 0; g < 20; ++g) {
        p.evolve({}, a);
        q.evolve({}, b);
        p.rate_all(rater);
        q.rate_all(rater);
    }
    EXPECT_EQ(p.genomes(), q.genomes());
}

TEST(Portfolio, DumpRoundTrips) {
    kxsim::Engine rng(4);
    auto p = Portfolio::random(7, 6, 9, rng);
    p.rate_all([](const BitString& s) { return ones(s) / 3.0; });
    std::stringstream ss;
    p.dump(ss);
    const auto q = Portfolio::load(ss);
    EXPECT_EQ(q.owner(), 7u);
    EXPECT_EQ(q.genomes(), p.genomes());
    for (std::size_t k = 0; k < p.capacity(); ++k) EXPECT_EQ(q.candidates()[k].rating, p.candidates()[k].rating);
}

TEST(Portfolio, GaParamErrors) {
    EXPECT_THROW((kxsim::GaParams{1.5, 0.0, 0.2, 1}.validate(20)), kxsim::ConfigError);
    EXPECT_THROW((kxsim::GaParams{0.7, 0.02, 0.2, 17}.validate(20)), kxsim::ConfigError);
    EXPECT_THROW((kxsim::GaParams{0.7, 0.02, 1.0, 0}.validate(20)), kxsim::ConfigError);
    EXPECT_NO_THROW(kxsim::GaParams{}.validate(20));
}
