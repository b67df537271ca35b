#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bbst.hpp"
#include "second_level.hpp"
#include "space.hpp"

namespace bbst {

struct TwoLevelParams {
    std::size_t k1 = 512;
    std::size_t k2 = 64;
};

namespace detail {

[[nodiscard]] inline std::size_t nearest_power_of_two(double x) {
    if (x <= 1.0) return 1;
    const double e = std::round(std::log2(x));
    return std::size_t{1} << static_cast<unsigned>(e);
}

}  // namespace detail

// k1 = sqrt(n log n), k2 = sqrt(n / log n), each rounded to the nearest power of two,
// then clamped so that k2 <= 256, k2 | k1 and k1 <= n.
[[nodiscard]] inline TwoLevelParams auto_two_level_params(std::size_t n) {
    if (n == 0) throw std::invalid_argument("auto params: n must be at least 1");
    if (n < 4) return {1, 1};
    const double lg = std::log2(static_cast<double>(n));
    const double nd = static_cast<double>(n);
    std::size_t k1 = detail::nearest_power_of_two(std::sqrt(nd * lg));
    std::size_t k2 = detail::nearest_power_of_two(std::sqrt(nd / lg));
    k1 = std::min(k1, std::bit_floor(n));
    k2 = std::min<std::size_t>({k2, 256, k1});
    return {k1, k2};
}

/*
 * Two-level block-based sparse table: a BbST over k1-blocks whose fallback scans are
 * sped up with the leftmost-minimum offsets of the k2-blocks (one byte each).
 */
class TwoLevelBlockSparseTable {
public:
    TwoLevelBlockSparseTable() = default;

    static TwoLevelBlockSparseTable build(std::span<const value_type> values, std::size_t k1,
                                          std::size_t k2, unsigned threads = 1) {
        if (values.empty()) throw std::invalid_argument("bbst2: empty input");
        if (k2 == 0 || k2 > 256) throw std::invalid_argument("bbst2: need 1 <= k2 <= 256");
        if (k1 == 0 || k1 % k2 != 0) throw std::invalid_argument("bbst2: k2 must divide k1");
        if (k1 > values.size()) throw std::invalid_argument("bbst2: need k1 <= n");
        TwoLevelBlockSparseTable index;
        index.second_ = SecondLevel::build(values, k2, ValueMode::none, threads);
        index.top_ = BlockSparseTable::from_block_minima(
            values.size(), k1, top_minima(values, index.second_, k1, threads), threads);
        return index;
    }

    static TwoLevelBlockSparseTable build_auto(std::span<const value_type> values,
                                               unsigned threads = 1) {
        const auto p = auto_two_level_params(values.size());
        return build(values, p.k1, p.k2, threads);
    }

    [[nodiscard]] Attempt try_query(const Query& query) const { return top_.try_query(query); }

    [[nodiscard]] Answer query(std::span<const value_type> values, const Query& query,
                               QueryTrace* trace = nullptr) const {
        check_query(query, top_.size());
        const Entry m = top_.covering_min(query.l, query.r);
        if (m.position >= query.l && m.position <= query.r) {
            if (trace) *trace = {QueryPath::speculative, 0};
            return {m.position};
        }
        std::size_t touched = 0;
        const Entry best = detail::block_fallback(
            query.l, query.r, top_.block_size(),
            [&](std::size_t a, std::size_t b) { return top_.blocks_min(a, b); },
            [&](std::size_t a, std::size_t b) { return second_.scan(values, a, b, touched); });
        if (trace) *trace = {QueryPath::fallback, touched};
        return {best.position};
    }

    [[nodiscard]] const BlockSparseTable& top() const { return top_; }
    [[nodiscard]] const SecondLevel& second_level() const { return second_; }
    [[nodiscard]] std::size_t size() const { return top_.size(); }
    [[nodiscard]] std::size_t k1() const { return top_.block_size(); }
    [[nodiscard]] std::size_t k2() const { return second_.block_size(); }

    [[nodiscard]] std::uint64_t stored_bits() const {
        return top_.stored_bits() + second_.offset_bits();
    }
    [[nodiscard]] SpaceReport space() const { return bbst2_space_bits(size(), k1(), k2()); }

    // k1-block minima folded from the k2-block minima; leftmost on ties.
    static std::vector<Entry> top_minima(std::span<const value_type> values,
                                         const SecondLevel& second, std::size_t k1,
                                         unsigned threads) {
        const std::size_t n = values.size();
        const std::size_t k2 = second.block_size();
        const std::size_t per = k1 / k2;
        const std::size_t blocks = (n + k1 - 1) / k1;
        std::vector<Entry> minima(blocks);
        parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t b = begin; b < end; ++b) {
                const std::size_t first = b * per;
                const std::size_t last = std::min(second.block_count(), first + per);
                std::size_t pos = second.position(first);
                Entry best{static_cast<std::uint32_t>(pos), values[pos]};
                for (std::size_t s = first + 1; s < last; ++s) {
                    pos = second.position(s);
                    if (values[pos] < best.value) best = {static_cast<std::uint32_t>(pos), values[pos]};
                }
                minima[b] = best;
            }
        });
        return minima;
    }

private:
    BlockSparseTable top_;
    SecondLevel second_;
};

}  // namespace bbst
