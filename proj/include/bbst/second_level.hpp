#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bbst.hpp"
#include "core.hpp"
#include "parallel.hpp"
#include "space.hpp"

namespace bbst {

inline constexpr unsigned max_quantized_code = 255;

// floor(max_q * (1 - (max_min - v)^8 / (max_min - min_min)^8)).
// Evaluated in long double on the ratio (max_min - v) / (max_min - min_min); every step
// is a correctly rounded monotone operation, so the code is monotone non-decreasing in v.
[[nodiscard]] inline std::uint8_t quantize(value_type v, value_type min_min, value_type max_min,
                                           unsigned max_q = max_quantized_code) {
    if (max_q > 255) throw std::invalid_argument("quantize: max_q must fit in 8 bits");
    if (min_min > max_min) throw std::invalid_argument("quantize: min_min > max_min");
    if (v < min_min || v > max_min) throw std::invalid_argument("quantize: v outside [min_min, max_min]");
    if (min_min == max_min) return 0;
    if (v == max_min) return static_cast<std::uint8_t>(max_q);
    if (v == min_min) return 0;
    const long double ratio = static_cast<long double>(max_min - v) /
                              static_cast<long double>(max_min - min_min);
    const long double sq = ratio * ratio;
    const long double quad = sq * sq;
    const long double oct = quad * quad;
    const long double code = std::floor(static_cast<long double>(max_q) * (1.0L - oct));
    return static_cast<std::uint8_t>(std::clamp<long double>(code, 0, max_q));
}

/*
 * Minima of the non-overlapping k2-blocks (k2 <= 256): a one-byte offset of each
 * block's leftmost minimum, optionally with the minimum value stored exactly (32 bits)
 * or as an 8-bit quantized code.
 */
class SecondLevel {
public:
    SecondLevel() = default;

    static SecondLevel build(std::span<const value_type> values, std::size_t k2,
                             ValueMode mode = ValueMode::none, unsigned threads = 1) {
        if (values.empty()) throw std::invalid_argument("second level: empty input");
        if (k2 == 0 || k2 > 256) throw std::invalid_argument("second level: need 1 <= k2 <= 256");
        SecondLevel level;
        level.n_ = values.size();
        level.k2_ = k2;
        level.mode_ = mode;
        const std::size_t blocks = (level.n_ + k2 - 1) / k2;
        level.offsets_.resize(blocks);
        std::vector<value_type> minima(blocks);
        parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t b = begin; b < end; ++b) {
                const Entry m = scan_min(values, b * k2, std::min(level.n_, (b + 1) * k2) - 1);
                level.offsets_[b] = static_cast<std::uint8_t>(m.position - b * k2);
                minima[b] = m.value;
            }
        });
        const auto [lo, hi] = std::minmax_element(minima.begin(), minima.end());
        level.min_min_ = *lo;
        level.max_min_ = *hi;
        if (mode == ValueMode::exact) {
            level.exact_ = std::move(minima);
        } else if (mode == ValueMode::quantized) {
            level.codes_.resize(blocks);
            parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
                for (std::size_t b = begin; b < end; ++b)
                    level.codes_[b] = quantize(minima[b], level.min_min_, level.max_min_);
            });
            level.build_code_intervals();
        }
        return level;
    }

    [[nodiscard]] std::size_t position(std::size_t block) const {
        return block * k2_ + offsets_[block];
    }

    // Leftmost minimum of values[a..b], reading whole k2-blocks through their offsets.
    // `touched` counts reads of A (one per whole block, one per raw cell).
    [[nodiscard]] Entry scan(std::span<const value_type> values, std::size_t a, std::size_t b,
                             std::size_t& touched) const {
        const std::size_t first_full = (a + k2_ - 1) / k2_;
        const std::size_t end_full = (b + 1) / k2_;
        if (first_full >= end_full) {
            touched += b - a + 1;
            return scan_min(values, a, b);
        }
        std::optional<Entry> best;
        const auto take = [&](Entry e) { best = best ? min_entry(*best, e) : e; };
        if (a < first_full * k2_) {
            touched += first_full * k2_ - a;
            take(scan_min(values, a, first_full * k2_ - 1));
        }
        for (std::size_t block = first_full; block < end_full; ++block) {
            const std::size_t pos = position(block);
            ++touched;
            take({static_cast<std::uint32_t>(pos), values[pos]});
        }
        if (end_full * k2_ <= b) {
            touched += b - end_full * k2_ + 1;
            take(scan_min(values, end_full * k2_, b));
        }
        return *best;
    }

    /*
     * A-free answer from the stored k2-block minima.
     *
     * [l, r] spans k1-blocks bl..br; `interior(a, b)` returns the exact minimum over whole
     * k1-blocks a..b. A boundary region whose k1-block minimum lies inside [l, r] is
     * represented by that exact minimum. Otherwise every k2-block touching the region
     * contributes its minimum as a candidate when it lies inside [l, r], and as a lower
     * bound for the uncovered part when it does not. The winner must be provably no
     * larger than every other item: codes against codes need strict inequality, exact
     * values against codes are compared with the value interval of the code.
     */
    template <typename Interior>
    [[nodiscard]] Attempt attempt(std::size_t l, std::size_t r, std::size_t k1,
                                  Interior&& interior) const {
        if (mode_ == ValueMode::none) return Attempt::declined(Decline::out_of_range);
        constexpr std::size_t no_position = std::numeric_limits<std::size_t>::max();

        struct Item {
            std::size_t position;  // no_position for a lower bound
            value_type lo;
            value_type hi;
            int code;  // -1 when the value is exact
        };
        const auto stored = [&](std::size_t block) -> Item {
            const std::size_t pos = position(block);
            const std::size_t at = pos >= l && pos <= r ? pos : no_position;
            if (mode_ == ValueMode::exact) return {at, exact_[block], exact_[block], -1};
            const std::uint8_t c = codes_[block];
            return {at, code_lo_[c], code_hi_[c], c};
        };
        const auto exact = [](const Entry& e) -> Item { return {e.position, e.value, e.value, -1}; };

        const std::size_t bl = l / k1;
        const std::size_t br = r / k1;
        const Entry left = interior(bl, bl);
        const bool left_exact = left.position >= l && left.position <= r;
        const std::size_t left_end = bl == br ? r : (bl + 1) * k1 - 1;
        std::optional<Entry> mid;
        if (br - bl >= 2) mid = interior(bl + 1, br - 1);
        std::optional<Entry> right;
        if (br > bl) right = interior(br, br);
        const bool right_exact = right && right->position <= r;

        const auto for_each_item = [&](auto&& visit) {
            if (left_exact) {
                visit(exact(left));
            } else {
                for (std::size_t block = l / k2_; block <= left_end / k2_; ++block) visit(stored(block));
            }
            if (mid) visit(exact(*mid));
            if (right_exact) {
                visit(exact(*right));
            } else if (right) {
                for (std::size_t block = br * k1 / k2_; block <= r / k2_; ++block) visit(stored(block));
            }
        };

        std::optional<Item> best;
        for_each_item([&](const Item& item) {
            if (item.position == no_position) return;
            if (!best || item.hi < best->hi || (item.hi == best->hi && item.lo < best->lo)) best = item;
        });
        if (!best) return Attempt::declined(Decline::out_of_range);

        bool smaller = false;
        bool undecided = false;
        for_each_item([&](const Item& item) {
            if (item.position == best->position && item.position != no_position) return;
            if (item.code >= 0 && best->code >= 0) {
                if (item.code < best->code) smaller = true;
                if (item.code == best->code) undecided = true;
            } else if (best->hi > item.lo) {
                (item.hi < best->lo ? smaller : undecided) = true;
            }
        });
        if (smaller) return Attempt::declined(Decline::out_of_range);
        if (undecided) return Attempt::declined(Decline::quantized_tie);
        return Attempt::hit(best->position);
    }

    [[nodiscard]] std::uint8_t code_of(value_type v) const {
        return quantize(std::clamp(v, min_min_, max_min_), min_min_, max_min_);
    }

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t block_size() const { return k2_; }
    [[nodiscard]] std::size_t block_count() const { return offsets_.size(); }
    [[nodiscard]] ValueMode value_mode() const { return mode_; }
    [[nodiscard]] std::span<const std::uint8_t> offsets() const { return offsets_; }
    [[nodiscard]] std::span<const std::uint8_t> codes() const { return codes_; }
    [[nodiscard]] std::span<const value_type> exact_values() const { return exact_; }
    [[nodiscard]] value_type min_min() const { return min_min_; }
    [[nodiscard]] value_type max_min() const { return max_min_; }

    [[nodiscard]] std::uint64_t offset_bits() const { return offsets_.size() * 8ull; }
    [[nodiscard]] std::uint64_t value_bits() const {
        return exact_.size() * 32ull + codes_.size() * 8ull;
    }

    // Values v in [min_min, max_min] with code_of(v) == c, as [lo, hi] (empty when lo > hi).
    [[nodiscard]] std::pair<value_type, value_type> code_interval(std::uint8_t c) const {
        return {code_lo_[c], code_hi_[c]};
    }

private:
    // Derived from min_min and max_min alone, so not counted as stored bits.
    void build_code_intervals() {
        const auto first_at_least = [&](unsigned c) {
            std::uint64_t lo = min_min_;
            std::uint64_t hi = std::uint64_t{max_min_} + 1;
            while (lo < hi) {
                const std::uint64_t mid = lo + (hi - lo) / 2;
                if (quantize(static_cast<value_type>(mid), min_min_, max_min_) >= c)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return lo;
        };
        std::uint64_t next = min_min_;
        for (unsigned c = 0; c <= max_quantized_code; ++c) {
            const std::uint64_t start = next;
            next = c == max_quantized_code ? std::uint64_t{max_min_} + 1 : first_at_least(c + 1);
            if (next == start) {
                code_lo_[c] = 1;
                code_hi_[c] = 0;
                continue;
            }
            code_lo_[c] = static_cast<value_type>(start);
            code_hi_[c] = static_cast<value_type>(next - 1);
        }
    }

    std::size_t n_ = 0;
    std::size_t k2_ = 0;
    ValueMode mode_ = ValueMode::none;
    std::vector<std::uint8_t> offsets_;
    std::vector<value_type> exact_;
    std::vector<std::uint8_t> codes_;
    value_type min_min_ = 0;
    value_type max_min_ = 0;
    std::array<value_type, max_quantized_code + 1> code_lo_{};
    std::array<value_type, max_quantized_code + 1> code_hi_{};
};

}  // namespace bbst
