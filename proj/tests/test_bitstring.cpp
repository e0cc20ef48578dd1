#include <gtest/gtest.h>

#include "kxsim/bitstring.hpp"

using kxsim::BitString;

namespace {

// Counts differing characters of the text forms.
std::size_t char_mismatches(const std::string& a, const std::string& b) {
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.size(); ++k) n += a[k] != b[k];
    return n;
}

std::string text_of(unsigned value, std::size_t len) {
    std::string s(len, '0');
    for (std::size_t k = 0; k < len; ++k)
        if (value >> k & 1u) s[k] = '1';
    return s;
}

}  // namespace

TEST(BitString, SimilarityExamples) {
    EXPECT_DOUBLE_EQ(similarity(BitString::parse("1010"), BitString::parse("1010")), 1.0);
    EXPECT_DOUBLE_EQ(similarity(BitString::parse("1010"), BitString::parse("0101")), 0.0);
    EXPECT_DOUBLE_EQ(similarity(BitString::parse("1010"), BitString::parse("1000")), 0.75);
}

TEST(BitString, LengthMismatchIsConfigError) {
    EXPECT_THROW(similarity(BitString::parse("101"), BitString::parse("1010")), kxsim::ConfigError);
}

TEST(BitString, ParseRejectsBadInput) {
    EXPECT_THROW(BitString::parse(""), kxsim::ConfigError);
    EXPECT_THROW(BitString::parse("10x1"), kxsim::ConfigError);
    EXPECT_THROW(BitString::parse(std::string(65, '1')), kxsim::ConfigError);
}

TEST(BitString, TextRoundTripAndIndexing) {
    const auto s = BitString::parse("1100101");
    EXPECT_EQ(s.to_string(), "1100101");
    EXPECT_TRUE(s[0]);
    EXPECT_FALSE(s[2]);
    EXPECT_EQ(s.flipped(2).to_string(), "1110101");
    EXPECT_EQ(s.complement().to_string(), "0011010");
}

TEST(BitString, ExhaustivePropertiesUpToSixBits) {
    for (std::size_t len = 1; len <= 6; ++len) {
        const unsigned count = 1u << len;
        for (unsigned x = 0; x < count; ++x) {
            const auto tx = text_of(x, len);
            const auto a = BitString::parse(tx);
            EXPECT_EQ(similarity(a, a), 1.0);
            EXPECT_EQ(similarity(a, a.complement()), 0.0);
            for (unsigned y = 0; y < count; ++y) {
                const auto ty = text_of(y, len);
                const auto b = BitString::parse(ty);
                const double oracle = 1.0 - static_cast<double>(char_mismatches(tx, ty)) / static_cast<double>(len);
                EXPECT_EQ(similarity(a, b), similarity(b, a));
                EXPECT_NEAR(similarity(a, b), oracle, 1e-12);
            }
        }
    }
}

TEST(BitString, RandomIsDeterministic) {
    kxsim::Engine r1(42), r2(42);
    EXPECT_EQ(kxsim::random_bitstring(4, r1), kxsim::random_bitstring(4, r2));
    kxsim::Engine r3(7);
    const auto one = kxsim::random_bitstring(1, r3).to_string();
    EXPECT_TRUE(one == "0" || one == "1");
}

TEST(BitString, RandomGoldenValue) {
    kxsim::Engine rng = kxsim::derive_stream(12345, "golden");
    EXPECT_EQ(kxsim::random_bitstring(10, rng).to_string(), "0111010001");
}

TEST(BitString, SpliceTakesHeadThenTail) {
    const auto a = BitString::parse("101001"), b = BitString::parse("111111");
    EXPECT_EQ(BitString::splice(a, b, 2).to_string(), "101111");
    EXPECT_EQ(BitString::splice(b, a, 2).to_string(), "111001");
}
