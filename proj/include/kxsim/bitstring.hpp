#pragma once

#include <bit>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "kxsim/error.hpp"
#include "kxsim/rng.hpp"

namespace kxsim {

/// Fixed-length binary feature vector (a service or a request). Feature 0 is
/// the first character of the textual form. Lengths are limited to 1..64 so
/// the whole vector packs into one word.
class BitString {
public:
    static constexpr std::size_t max_length = 64;

    BitString() = default;

    /// All-zero string of the given length.
    explicit BitString(std::size_t length) : length_(length) {
        if (length == 0 || length > max_length)
            throw ConfigError("bitstring length must be in 1..64, got " + std::to_string(length));
    }

    /// Parses a '0'/'1' string.
    static BitString parse(std::string_view text) {
        BitString b(text.size());
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '1')
                b.words_ |= bit_mask(i);
            else if (text[i] != '0')
                throw ConfigError("bitstring may contain only '0' and '1': \"" + std::string(text) + "\"");
        }
        return b;
    }

    std::size_t size() const noexcept { return length_; }

    bool operator[](std::size_t i) const noexcept { return (words_ & bit_mask(i)) != 0; }

    /// Returns a copy with feature `i` flipped.
    BitString flipped(std::size_t i) const {
        check_index(i);
        BitString b = *this;
        b.words_ ^= bit_mask(i);
        return b;
    }

    BitString complement() const noexcept {
        BitString b = *this;
        b.words_ = ~words_ & full_mask();
        return b;
    }

    /// Number of positions at which the two strings differ.
    std::size_t hamming_distance(const BitString& other) const {
        require_same_length(other);
        return static_cast<std::size_t>(std::popcount(words_ ^ other.words_));
    }

    std::size_t agreement(const BitString& other) const { return length_ - hamming_distance(other); }

    std::string to_string() const {
        std::string s(length_, '0');
        for (std::size_t i = 0; i < length_; ++i)
            if ((*this)[i]) s[i] = '1';
        return s;
    }

    /// Features [0, cut) from `head`, [cut, L) from `tail`.
    static BitString splice(const BitString& head, const BitString& tail, std::size_t cut) {
        head.require_same_length(tail);
        if (cut > head.length_)
            throw ContractViolation("crossover cut point beyond string length");
        std::uint64_t head_mask = 0;
        for (std::size_t i = 0; i < cut; ++i) head_mask |= bit_mask(i);
        BitString b(head.length_);
        b.words_ = (head.words_ & head_mask) | (tail.words_ & ~head_mask & tail.full_mask());
        return b;
    }

    friend bool operator==(const BitString&, const BitString&) = default;

    friend auto operator<=>(const BitString& a, const BitString& b) {
        if (auto c = a.length_ <=> b.length_; c != 0) return c;
        return a.to_string() <=> b.to_string();
    }

    friend std::ostream& operator<<(std::ostream& os, const BitString& b) { return os << b.to_string(); }

private:
    static constexpr std::uint64_t bit_mask(std::size_t i) noexcept { return std::uint64_t{1} << i; }

    std::uint64_t full_mask() const noexcept {
        return length_ == max_length ? ~std::uint64_t{0} : (std::uint64_t{1} << length_) - 1;
    }

    void check_index(std::size_t i) const {
        if (i >= length_) throw ContractViolation("bit index out of range");
    }

    void require_same_length(const BitString& other) const {
        if (length_ != other.length_)
            throw ConfigError("bitstring length mismatch: " + std::to_string(length_) + " vs " +
                              std::to_string(other.length_));
    }

    std::uint64_t words_ = 0;
    std::size_t length_ = 0;
};

/// Fraction of positions at which `a` and `b` agree.
inline double similarity(const BitString& a, const BitString& b) {
    return static_cast<double>(a.agreement(b)) / static_cast<double>(a.size());
}

/// Each feature an independent fair coin from `rng`.
inline BitString random_bitstring(std::size_t length, Engine& rng) {
    std::string text(length, '0');
    for (auto& c : text)
        if (draw_bit(rng)) c = '1';
    return BitString::parse(text);
}

}  // namespace kxsim
