#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kxsim/bitstring.hpp"
#include "kxsim/error.hpp"
#include "kxsim/format.hpp"
#include "kxsim/rng.hpp"

namespace kxsim {

struct GaParams {
    double crossover_rate = 0.7;
    double mutation_rate = 0.002;     // per bit
    double replacement_fraction = 0.2;
    std::size_t elitism_count = 1;

    std::size_t replaced_count(std::size_t capacity) const {
        return static_cast<std::size_t>(std::floor(replacement_fraction * static_cast<double>(capacity)));
    }

    void validate(std::size_t capacity) const {
        auto probability = [](double p, const char* name) {
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
        };
        probability(crossover_rate, "crossover_rate");
        probability(mutation_rate, "mutation_rate");
        probability(replacement_fraction, "replacement_fraction");
        const std::size_t replaced = replaced_count(capacity);
        if (elitism_count + replaced > capacity)
            throw ConfigError("elitism_count + replaced candidates exceeds portfolio_size");
        if (replaced > 0 && replaced == capacity)
            throw ConfigError("replacement_fraction must leave at least one survivor");
    }
};

struct Candidate {
    BitString service;
    double rating = -std::numeric_limits<double>::infinity();
    std::uint64_t sequence = 0;  // insertion order, breaks rating ties
};

/// One SME's R&D population. Kept sorted by rating (best first) whenever it
/// has been rated; rank 1 is the service the SME submits.
class Portfolio {
public:
    Portfolio(std::size_t owner, std::vector<BitString> services) : owner_(owner) {
        if (services.empty()) throw ConfigError("portfolio_size must be positive");
        for (auto& s : services) candidates_.push_back({std::move(s), -std::numeric_limits<double>::infinity(), next_sequence_++});
    }

    static Portfolio random(std::size_t owner, std::size_t capacity, std::size_t feature_count, Engine& rng) {
        std::vector<BitString> services;
        services.reserve(capacity);
        for (std::size_t k = 0; k < capacity; ++k) services.push_back(random_bitstring(feature_count, rng));
        return Portfolio(owner, std::move(services));
    }

    std::size_t owner() const noexcept { return owner_; }
    std::size_t capacity() const noexcept { return candidates_.size(); }
    const std::vector<Candidate>& candidates() const noexcept { return candidates_; }

    /// Service at 1-based `rank`.
    const BitString& at_rank(std::size_t rank) const { return candidates_.at(rank - 1).service; }

    /// Replaces the genome at 1-based `rank`; its rating is stale until the next rate_all.
    void set_at_rank(std::size_t rank, BitString service) {
        if (rank == 0 || rank > capacity()) throw ConfigError("portfolio rank out of range");
        candidates_[rank - 1].service = std::move(service);
    }

    std::vector<BitString> genomes() const {
        std::vector<BitString> out;
        out.reserve(candidates_.size());
        for (const auto& c : candidates_) out.push_back(c.service);
        return out;
    }

    /// Rates every candidate with `rate(service)` and re-sorts.
    template <typename Rater>
        requires std::invocable<Rater&, const BitString&>
    void rate_all(Rater&& rate) {
        for (auto& c : candidates_) c.rating = rate(c.service);
        sort();
    }

    /// Rates only candidates changed since the last rating, then re-sorts.
    template <typename Rater>
        requires std::invocable<Rater&, const BitString&>
    void rate_stale(Rater&& rate) {
        for (auto& c : candidates_)
            if (c.rating == -std::numeric_limits<double>::infinity()) c.rating = rate(c.service);
        sort();
    }

    const BitString& submission() const { return candidates_.front().service; }

    /// One generation: the worst floor(q*P) candidates are replaced by
    /// offspring of rank-selected survivors; survivors outside the elite are
    /// mutated in place. Ratings of changed candidates become stale.
    void evolve(const GaParams& params, Engine& rng) {
        const std::size_t total = capacity();
        const std::size_t replaced = params.replaced_count(total);
        const std::size_t survivors = total - replaced;

        std::vector<Candidate> offspring;
        offspring.reserve(replaced);
        for (std::size_t k = 0; k < replaced; ++k) {
            const BitString& first = candidates_[select_rank(survivors, rng)].service;
            BitString child = first;
            if (draw_unit(rng) < params.crossover_rate) {
                const BitString& second = candidates_[select_rank(survivors, rng)].service;
                if (first.size() > 1) {
                    const std::size_t cut = 1 + draw_index(rng, first.size() - 1);
                    child = BitString::splice(first, second, cut);
                }
            }
            offspring.push_back({mutate(std::move(child), params.mutation_rate, rng),
                                 -std::numeric_limits<double>::infinity(), next_sequence_++});
        }

        for (std::size_t r = std::min(params.elitism_count, survivors); r < survivors; ++r) {
            BitString mutated = mutate(candidates_[r].service, params.mutation_rate, rng);
            if (mutated != candidates_[r].service) {
                candidates_[r].service = std::move(mutated);
                candidates_[r].rating = -std::numeric_limits<double>::infinity();
            }
        }
        std::move(offspring.begin(), offspring.end(), candidates_.begin() + static_cast<std::ptrdiff_t>(survivors));
    }

    /// Tab-separated dump: "owner <j>" then one "rating<TAB>bits" line per rank.
    void dump(std::ostream& os) const;

    /// Reads back one block written by dump().
    static Portfolio load(std::istream& is);

private:
    void sort() {
        std::sort(candidates_.begin(), candidates_.end(), [](const Candidate& a, const Candidate& b) {
            if (a.rating != b.rating) return a.rating > b.rating;
            return a.sequence < b.sequence;
        });
    }

    // Linear ranking over the first `survivors` entries: rank r (0 = best)
    // has weight survivors - r.
    static std::size_t select_rank(std::size_t survivors, Engine& rng) {
        const std::size_t total_weight = survivors * (survivors + 1) / 2;
        std::size_t ticket = draw_index(rng, total_weight);
        for (std::size_t r = 0; r < survivors; ++r) {
            const std::size_t w = survivors - r;
            if (ticket < w) return r;
            ticket -= w;
        }
        return survivors - 1;
    }

    static BitString mutate(BitString s, double rate, Engine& rng) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (draw_unit(rng) < rate) s = s.flipped(i);
        return s;
    }

    std::size_t owner_;
    std::vector<Candidate> candidates_;
    std::uint64_t next_sequence_ = 0;
};

inline void Portfolio::dump(std::ostream& os) const {
    os << "owner " << owner_ << '\n';
    for (const auto& c : candidates_) os << format_double(c.rating) << '\t' << c.service << '\n';
}

inline Portfolio Portfolio::load(std::istream& is) {
    std::string line;
    std::size_t owner = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream head(line);
        std::string word;
        if (!(head >> word >> owner) || word != "owner") throw ConfigError("portfolio dump: expected 'owner <j>' line");
        break;
    }
    std::vector<Candidate> rows;
    while (is.peek() != EOF && is.peek() != 'o' && std::getline(is, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ConfigError("portfolio dump: expected 'rating<TAB>bits'");
        rows.push_back({BitString::parse(line.substr(tab + 1)), parse_double(line.substr(0, tab)), 0});
    }
    std::vector<BitString> services;
    for (const auto& r : rows) services.push_back(r.service);
    Portfolio p(owner, std::move(services));
    for (std::size_t k = 0; k < rows.size(); ++k) p.candidates_[k].rating = rows[k].rating;
    return p;
}

}  // namespace kxsim
