#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bbst {

using value_type = std::uint32_t;

// Inclusive, 0-based range [l, r].
struct Query {
    std::size_t l = 0;
    std::size_t r = 0;

    [[nodiscard]] std::size_t width() const { return r - l + 1; }
    friend bool operator==(const Query&, const Query&) = default;
};

struct Answer {
    std::size_t position = 0;
    friend bool operator==(const Answer&, const Answer&) = default;
};

// (position, value) pair of a span minimum; packed into 64 bits.
struct Entry {
    std::uint32_t position = 0;
    value_type value = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
};
static_assert(sizeof(Entry) == 8);

// Left operand wins ties.
[[nodiscard]] inline Entry min_entry(Entry left, Entry right) {
    return right.value < left.value ? right : left;
}

class InputArray {
public:
    InputArray() = default;
    explicit InputArray(std::vector<value_type> values) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("input array must not be empty");
        if (values_.size() > (std::size_t{1} << 32))
            throw std::invalid_argument("input array exceeds 2^32 elements");
    }

    [[nodiscard]] std::span<const value_type> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] value_type operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] const std::vector<value_type>& vector() const { return values_; }

private:
    std::vector<value_type> values_;
};

struct QueryBatch {
    std::vector<Query> queries;
    std::size_t max_width = 0;

    [[nodiscard]] std::size_t q() const { return queries.size(); }

    // mean of r - l + 1
    [[nodiscard]] double mean_width() const {
        if (queries.empty()) return 0.0;
        long double sum = 0;
        for (const auto& query : queries) sum += static_cast<long double>(query.width());
        return static_cast<double>(sum / queries.size());
    }
};

inline void check_query(const Query& query, std::size_t n) {
    if (query.l > query.r || query.r >= n)
        throw std::out_of_range("invalid range [" + std::to_string(query.l) + ", " +
                                std::to_string(query.r) + "] for n = " + std::to_string(n));
}

// Leftmost position of the minimum of values[begin..end] (inclusive), strict less-than scan.
[[nodiscard]] inline Entry scan_min(std::span<const value_type> values, std::size_t begin,
                                    std::size_t end) {
    Entry best{static_cast<std::uint32_t>(begin), values[begin]};
    for (std::size_t i = begin + 1; i <= end; ++i) {
        if (values[i] < best.value) best = {static_cast<std::uint32_t>(i), values[i]};
    }
    return best;
}

[[nodiscard]] inline Answer rmq_scan(std::span<const value_type> values, const Query& query) {
    check_query(query, values.size());
    return {scan_min(values, query.l, query.r).position};
}

[[nodiscard]] inline Answer rmq_scan(const InputArray& array, const Query& query) {
    return rmq_scan(array.values(), query);
}

// Value-level check: ties are accepted at any tying position.
[[nodiscard]] inline bool validate_answer(std::span<const value_type> values, const Query& query,
                                          std::size_t position) {
    if (query.l > query.r || query.r >= values.size()) return false;
    if (position < query.l || position > query.r) return false;
    return values[position] == scan_min(values, query.l, query.r).value;
}

[[nodiscard]] inline bool validate_answer(const InputArray& array, const Query& query,
                                          std::size_t position) {
    return validate_answer(array.values(), query, position);
}

// The generators use std::mt19937_64, whose output sequence is fixed by the standard.
// Bounded draws map a 64-bit output to [0, bound) with a 128-bit multiply-high, so
// results do not depend on the standard library's distribution implementations.
using Rng = std::mt19937_64;

[[nodiscard]] inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(rng()) * bound) >> 64);
}

[[nodiscard]] inline InputArray generate_array(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    Rng rng(seed);
    std::vector<value_type> values(n);
    for (auto& v : values) v = static_cast<value_type>(rng() >> 32);
    return InputArray(std::move(values));
}

// l uniform over [0, n-1], width uniform over [1, max_width], r = min(l + width - 1, n - 1).
[[nodiscard]] inline QueryBatch generate_queries(std::size_t n, std::size_t q,
                                                 std::size_t max_width, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    if (q == 0) throw std::invalid_argument("q must be at least 1");
    if (max_width == 0 || max_width > n)
        throw std::invalid_argument("max_width must lie in [1, n]");
    Rng rng(seed);
    QueryBatch batch;
    batch.max_width = max_width;
    batch.queries.reserve(q);
    for (std::size_t i = 0; i < q; ++i) {
        const std::size_t l = uniform_below(rng, n);
        const std::size_t width = 1 + uniform_below(rng, max_width);
        batch.queries.push_back({l, std::min(l + width - 1, n - 1)});
    }
    return batch;
}

// Every query has exactly `width` elements: l uniform over [0, n - width].
[[nodiscard]] inline QueryBatch generate_fixed_width_queries(std::size_t n, std::size_t q,
                                                             std::size_t width,
                                                             std::uint64_t seed) {
    if (n == 0 || q == 0) throw std::invalid_argument("n and q must be at least 1");
    if (width == 0 || width > n) throw std::invalid_argument("width must lie in [1, n]");
    Rng rng(seed);
    QueryBatch batch;
    batch.max_width = width;
    batch.queries.reserve(q);
    for (std::size_t i = 0; i < q; ++i) {
        const std::size_t l = uniform_below(rng, n - width + 1);
        batch.queries.push_back({l, l + width - 1});
    }
    return batch;
}

}  // namespace bbst
