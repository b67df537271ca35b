#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bbst.hpp"
#include "second_level.hpp"
#include "space.hpp"

namespace bbst {

struct CompactOptions {
    DeltaMode mode = DeltaMode::byte;
    // k2 of an optional second level; must divide k and be <= 256
    std::optional<std::size_t> k2;
    ValueMode second_level_values = ValueMode::quantized;
};

/*
 * Compact block-based sparse table.
 *
 * Layers j with j % 9 == 0 are stored directly as (position, value) entries. In byte
 * mode, any other layer j stores for each start block i a byte m such that the span
 * minimum equals the direct entry of base layer j' = 9 * floor(j / 9) at block
 * i + m * 2^j'. In bit mode, layer j stores one bit telling whether the minimum comes
 * from the right half (i + 2^(j-1), j - 1) instead of the left half (i, j - 1).
 */
class CompactBlockSparseTable {
public:
    CompactBlockSparseTable() = default;

    static CompactBlockSparseTable build(std::span<const value_type> values, std::size_t k,
                                         const CompactOptions& options = {},
                                         unsigned threads = 1) {
        if (options.k2) {
            const std::size_t k2 = *options.k2;
            if (k2 == 0 || k2 > 256 || k == 0 || k % k2 != 0)
                throw std::invalid_argument("cbbst: need k2 | k and k2 <= 256");
        }
        const BlockSparseTable plain = BlockSparseTable::build(values, k, threads);
        CompactBlockSparseTable index = encode(plain, options.mode, threads);
        if (options.k2)
            index.second_ = SecondLevel::build(values, *options.k2, options.second_level_values, threads);
        return index;
    }

    static CompactBlockSparseTable encode(const BlockSparseTable& plain, DeltaMode mode,
                                          unsigned threads = 1) {
        CompactBlockSparseTable index;
        index.n_ = plain.size();
        index.k_ = plain.block_size();
        index.blocks_ = plain.block_count();
        index.layers_ = plain.layer_count();
        index.mode_ = mode;
        const std::size_t blocks = index.blocks_;

        index.direct_.resize((index.layers_ + direct_layer_period - 1) / direct_layer_period);
        for (std::size_t d = 0; d < index.direct_.size(); ++d) {
            const auto row = plain.table().layer(d * direct_layer_period);
            index.direct_[d].assign(row.begin(), row.end());
        }

        index.bytes_.resize(mode == DeltaMode::byte ? index.layers_ : 0);
        index.bits_.resize(mode == DeltaMode::bit ? index.layers_ : 0);
        for (std::size_t j = 1; j < index.layers_; ++j) {
            if (j % direct_layer_period == 0) continue;
            if (mode == DeltaMode::byte) {
                const std::size_t base = j - j % direct_layer_period;
                auto& row = index.bytes_[j];
                row.resize(blocks);
                parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                        const std::size_t block = plain.entry(j, i).position / index.k_;
                        row[i] = static_cast<std::uint8_t>((block - i) >> base);
                    }
                });
            } else {
                const std::size_t half = std::size_t{1} << (j - 1);
                auto& row = index.bits_[j];
                row.assign((blocks + 63) / 64, 0);
                // word-aligned chunks so that threads never share a word
                parallel_for(row.size(), threads, [&](std::size_t wbegin, std::size_t wend) {
                    for (std::size_t i = wbegin * 64; i < std::min(blocks, wend * 64); ++i) {
                        const bool right = i + half < blocks &&
                                           plain.entry(j - 1, i + half).value < plain.entry(j - 1, i).value;
                        if (right) row[i / 64] |= std::uint64_t{1} << (i % 64);
                    }
                });
            }
        }
        return index;
    }

    // Minimum over the 2^j-block span starting at block i, as a direct-layer entry.
    [[nodiscard]] Entry resolve(std::size_t i, std::size_t j) const {
        if (j >= layers_ || i >= blocks_) throw std::out_of_range("cbbst: resolve out of range");
        return resolve_unchecked(i, j);
    }

    // Number of delta indirections resolve(i, j) follows.
    [[nodiscard]] std::size_t indirections(std::size_t j) const {
        const std::size_t off = j % direct_layer_period;
        if (off == 0) return 0;
        return mode_ == DeltaMode::byte ? 1 : off;
    }

    [[nodiscard]] Entry blocks_min(std::size_t first, std::size_t last) const {
        const std::size_t len = last - first + 1;
        const std::size_t j = std::min<std::size_t>(std::bit_width(len) - 1, layers_ - 1);
        return min_entry(resolve_unchecked(first, j),
                         resolve_unchecked(last + 1 - (std::size_t{1} << j), j));
    }

    [[nodiscard]] Entry covering_min(std::size_t l, std::size_t r) const {
        return blocks_min(l / k_, r / k_);
    }

    // Speculative step on resolved entries; with a value-carrying second level, a miss
    // is retried from the stored k2-block minima. Never reads A.
    [[nodiscard]] Attempt try_query(const Query& query) const {
        check_query(query, n_);
        const Entry m = covering_min(query.l, query.r);
        if (m.position >= query.l && m.position <= query.r) return Attempt::hit(m.position);
        if (second_ && second_->value_mode() != ValueMode::none) {
            return second_->attempt(query.l, query.r, k_,
                                    [&](std::size_t a, std::size_t b) { return blocks_min(a, b); });
        }
        return Attempt::declined(Decline::out_of_range);
    }

    // Speculative step only, ignoring any second level.
    [[nodiscard]] Attempt try_speculative(const Query& query) const {
        check_query(query, n_);
        const Entry m = covering_min(query.l, query.r);
        if (m.position >= query.l && m.position <= query.r) return Attempt::hit(m.position);
        return Attempt::declined(Decline::out_of_range);
    }

    [[nodiscard]] Answer query(std::span<const value_type> values, const Query& query,
                               QueryTrace* trace = nullptr) const {
        check_query(query, n_);
        const Entry m = covering_min(query.l, query.r);
        if (m.position >= query.l && m.position <= query.r) {
            if (trace) *trace = {QueryPath::speculative, 0};
            return {m.position};
        }
        std::size_t touched = 0;
        const Entry best = detail::block_fallback(
            query.l, query.r, k_,
            [&](std::size_t a, std::size_t b) { return blocks_min(a, b); },
            [&](std::size_t a, std::size_t b) {
                if (second_) return second_->scan(values, a, b, touched);
                touched += b - a + 1;
                return scan_min(values, a, b);
            });
        if (trace) *trace = {QueryPath::fallback, touched};
        return {best.position};
    }

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t block_size() const { return k_; }
    [[nodiscard]] std::size_t block_count() const { return blocks_; }
    [[nodiscard]] std::size_t layer_count() const { return layers_; }
    [[nodiscard]] std::size_t direct_layer_count() const { return direct_.size(); }
    [[nodiscard]] DeltaMode mode() const { return mode_; }
    [[nodiscard]] const std::optional<SecondLevel>& second_level() const { return second_; }

    // Logical bits: 64 per direct entry, 8 or 1 per delta entry, plus the second level.
    [[nodiscard]] std::uint64_t stored_bits() const {
        std::uint64_t bits = 0;
        for (const auto& row : direct_) bits += row.size() * 64ull;
        for (const auto& row : bytes_) bits += row.size() * 8ull;
        for (const auto& row : bits_)
            if (!row.empty()) bits += blocks_;
        if (second_) bits += second_->offset_bits() + second_->value_bits();
        return bits;
    }

    [[nodiscard]] SpaceReport space() const {
        if (!second_) return cbbst_space_bits(n_, k_, mode_);
        return cbbst_space_bits(n_, k_, mode_, second_->block_size(), second_->value_mode());
    }

private:
    [[nodiscard]] Entry resolve_unchecked(std::size_t i, std::size_t j) const {
        if (mode_ == DeltaMode::byte) {
            const std::size_t off = j % direct_layer_period;
            const std::size_t base = j - off;
            if (off == 0) return direct_[base / direct_layer_period][i];
            return direct_[base / direct_layer_period][i + (std::size_t{bytes_[j][i]} << base)];
        }
        while (j % direct_layer_period != 0) {
            if ((bits_[j][i / 64] >> (i % 64)) & 1u) i += std::size_t{1} << (j - 1);
            --j;
        }
        return direct_[j / direct_layer_period][i];
    }

    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::size_t blocks_ = 0;
    std::size_t layers_ = 0;
    DeltaMode mode_ = DeltaMode::byte;
    std::vector<std::vector<Entry>> direct_;
    std::vector<std::vector<std::uint8_t>> bytes_;
    std::vector<std::vector<std::uint64_t>> bits_;
    std::optional<SecondLevel> second_;
};

}  // namespace bbst
