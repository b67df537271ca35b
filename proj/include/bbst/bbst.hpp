#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"
#include "space.hpp"
#include "sparse_table.hpp"

namespace bbst {

enum class QueryPath : std::uint8_t { speculative, fallback };

struct QueryTrace {
    QueryPath path = QueryPath::speculative;
    // array cells (or stored sub-block offsets) read on the fallback path
    std::size_t touched = 0;
};

enum class Decline : std::uint8_t { none, out_of_range, quantized_tie };

// Result of an A-free attempt: an answer, or the reason the structure could not give one.
struct Attempt {
    std::optional<Answer> answer;
    Decline reason = Decline::none;

    [[nodiscard]] bool ok() const { return answer.has_value(); }
    static Attempt hit(std::size_t position) { return {Answer{position}, Decline::none}; }
    static Attempt declined(Decline why) { return {std::nullopt, why}; }
};

namespace detail {

// Correction step shared by the block-based variants once the speculative minimum
// fell outside [l, r]. `interior(a, b)` gives the minimum over whole blocks a..b;
// `scan(a, b)` the minimum over cells a..b. Candidates are combined left to right.
template <typename Interior, typename Scan>
[[nodiscard]] Entry block_fallback(std::size_t l, std::size_t r, std::size_t k,
                                   Interior&& interior, Scan&& scan) {
    const std::size_t bl = l / k;
    const std::size_t br = r / k;
    if (br - bl < 2) return scan(l, r);
    Entry best = scan(l, (bl + 1) * k - 1);
    best = min_entry(best, interior(bl + 1, br - 1));
    return min_entry(best, scan(br * k, r));
}

[[nodiscard]] inline std::vector<Entry> block_minima(std::span<const value_type> values,
                                                     std::size_t k, unsigned threads) {
    const std::size_t n = values.size();
    const std::size_t blocks = (n + k - 1) / k;
    std::vector<Entry> minima(blocks);
    parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b)
            minima[b] = scan_min(values, b * k, std::min(n, (b + 1) * k) - 1);
    });
    return minima;
}

}  // namespace detail

/*
 * Block-based sparse table.
 *
 * A is cut into blocks of k cells (the last one may be short). Layer 0 holds each
 * block's minimum as (absolute position, value); layer j the minimum over 2^j
 * consecutive blocks. A query first reads the minimum of the smallest block span
 * that contains it; if that position lies inside [l, r] it is the answer, otherwise
 * the interior blocks plus the two partial boundary blocks are examined.
 */
class BlockSparseTable {
public:
    BlockSparseTable() = default;

    static BlockSparseTable build(std::span<const value_type> values, std::size_t k,
                                  unsigned threads = 1) {
        if (values.empty()) throw std::invalid_argument("bbst: empty input");
        if (k == 0 || k > values.size()) throw std::invalid_argument("bbst: need 1 <= k <= n");
        return from_block_minima(values.size(), k, detail::block_minima(values, k, threads),
                                 threads);
    }

    // `minima[b]` must be the leftmost minimum of block b.
    static BlockSparseTable from_block_minima(std::size_t n, std::size_t k,
                                              std::vector<Entry> minima, unsigned threads = 1) {
        if (k == 0 || k > n) throw std::invalid_argument("bbst: need 1 <= k <= n");
        if (minima.size() != (n + k - 1) / k)
            throw std::invalid_argument("bbst: block minima count mismatch");
        BlockSparseTable index;
        index.n_ = n;
        index.k_ = k;
        index.table_ = SparseTable::from_entries(std::move(minima), 2, threads);
        return index;
    }

    // Minimum over the smallest block span containing [l, r] (no access to A).
    [[nodiscard]] Entry covering_min(std::size_t l, std::size_t r) const {
        return table_.range_min(l / k_, r / k_);
    }

    [[nodiscard]] Entry blocks_min(std::size_t first_block, std::size_t last_block) const {
        return table_.range_min(first_block, last_block);
    }

    [[nodiscard]] Attempt try_query(const Query& query) const {
        check_query(query, n_);
        const Entry m = covering_min(query.l, query.r);
        if (m.position < query.l || m.position > query.r) return Attempt::declined(Decline::out_of_range);
        return Attempt::hit(m.position);
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
            [&](std::size_t a, std::size_t b) { return table_.range_min(a, b); },
            [&](std::size_t a, std::size_t b) {
                touched += b - a + 1;
                return scan_min(values, a, b);
            });
        if (trace) *trace = {QueryPath::fallback, touched};
        return {best.position};
    }

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t block_size() const { return k_; }
    [[nodiscard]] std::size_t block_count() const { return table_.size(); }
    [[nodiscard]] std::size_t layer_count() const { return table_.layer_count(); }
    [[nodiscard]] const SparseTable& table() const { return table_; }
    [[nodiscard]] const Entry& entry(std::size_t layer, std::size_t block) const {
        return table_.entry(layer, block);
    }

    [[nodiscard]] std::uint64_t stored_bits() const { return table_.stored_bits(); }
    [[nodiscard]] SpaceReport space() const { return bbst_space_bits(n_, k_); }

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    SparseTable table_;
};

}  // namespace bbst
