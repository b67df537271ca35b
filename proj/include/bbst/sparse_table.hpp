#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"

namespace bbst {

// Number of layers for a table of `size` cells with the given arity: max(1, ceil(log_arity size)).
[[nodiscard]] inline std::size_t layer_count_for(std::size_t size, unsigned arity) {
    std::size_t layers = 0;
    std::uint64_t span = 1;
    while (span < size) {
        span *= arity;
        ++layers;
    }
    return std::max<std::size_t>(1, layers);
}

/*
 * Sparse table of arity l >= 2 over a row of (position, value) entries.
 *
 * Layer j holds, at every start index i, the minimum of the cells
 * i .. min(i + l^j - 1, size - 1). Rows are full length; spans are clipped at the
 * right edge. A range is answered from at most l overlapping spans of the largest
 * layer that fits in it.
 *
 * The cells are either array elements (classic sparse table) or block minima with
 * absolute positions (the block-based tables reuse this class for their layers).
 */
class SparseTable {
public:
    SparseTable() = default;

    // Layer 0 is `base`; higher layers are folded from the layer below.
    static SparseTable from_entries(std::vector<Entry> base, unsigned arity = 2,
                                    unsigned threads = 1) {
        if (arity < 2) throw std::invalid_argument("sparse table arity must be at least 2");
        if (base.empty()) throw std::invalid_argument("sparse table needs at least one cell");
        SparseTable st;
        st.arity_ = arity;
        st.size_ = base.size();
        st.layers_ = layer_count_for(st.size_, arity);
        st.spans_.resize(st.layers_);
        st.spans_[0] = 1;
        for (std::size_t j = 1; j < st.layers_; ++j) st.spans_[j] = st.spans_[j - 1] * arity;

        st.table_.resize(st.layers_ * st.size_);
        std::copy(base.begin(), base.end(), st.table_.begin());
        const std::size_t n = st.size_;
        for (std::size_t j = 1; j < st.layers_; ++j) {
            const Entry* prev = st.table_.data() + (j - 1) * n;
            Entry* cur = st.table_.data() + j * n;
            const std::size_t step = st.spans_[j - 1];
            parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
                for (std::size_t i = begin; i < end; ++i) {
                    Entry best = prev[i];
                    std::size_t next = i + step;
                    for (unsigned m = 1; m < arity && next < n; ++m, next += step)
                        best = min_entry(best, prev[next]);
                    cur[i] = best;
                }
            });
        }
        return st;
    }

    // Classic sparse table over an array: cell i is (i, values[i]).
    static SparseTable build(std::span<const value_type> values, unsigned arity = 2,
                             unsigned threads = 1) {
        if (arity < 2) throw std::invalid_argument("sparse table arity must be at least 2");
        if (values.empty()) throw std::invalid_argument("sparse table needs at least one cell");
        std::vector<Entry> base(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            base[i] = {static_cast<std::uint32_t>(i), values[i]};
        return from_entries(std::move(base), arity, threads);
    }

    // Minimum entry over cells [l, r]; the leftmost candidate span wins ties.
    [[nodiscard]] Entry range_min(std::size_t l, std::size_t r) const {
        const std::size_t len = r - l + 1;
        if (arity_ == 2) {
            const std::size_t j =
                std::min<std::size_t>(std::bit_width(len) - 1, layers_ - 1);
            const Entry* row = table_.data() + j * size_;
            return min_entry(row[l], row[r + 1 - (std::size_t{1} << j)]);
        }
        std::size_t j = 0;
        while (j + 1 < layers_ && spans_[j + 1] <= len) ++j;
        const std::size_t span = spans_[j];
        const Entry* row = table_.data() + j * size_;
        Entry best = row[l];
        const std::size_t pieces = (len + span - 1) / span;
        for (std::size_t m = 1; m + 1 < pieces; ++m) best = min_entry(best, row[l + m * span]);
        return min_entry(best, row[r + 1 - span]);
    }

    [[nodiscard]] Answer query(const Query& query) const {
        check_query(query, size_);
        return {range_min(query.l, query.r).position};
    }

    [[nodiscard]] const Entry& entry(std::size_t layer, std::size_t i) const {
        return table_[layer * size_ + i];
    }
    [[nodiscard]] std::span<const Entry> layer(std::size_t j) const {
        return {table_.data() + j * size_, size_};
    }

    [[nodiscard]] unsigned arity() const { return arity_; }
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] std::size_t layer_count() const { return layers_; }
    [[nodiscard]] std::uint64_t span(std::size_t layer) const { return spans_[layer]; }

    // Bits actually held by the layers (64 per entry).
    [[nodiscard]] std::uint64_t stored_bits() const {
        return static_cast<std::uint64_t>(table_.size()) * sizeof(Entry) * 8;
    }

private:
    unsigned arity_ = 2;
    std::size_t size_ = 0;
    std::size_t layers_ = 0;
    std::vector<std::uint64_t> spans_;
    std::vector<Entry> table_;
};

// Constant-worst-case backend for the hybrid: answers from stored entries, never from A.
class SparseTableBackend {
public:
    SparseTableBackend() = default;
    explicit SparseTableBackend(std::span<const value_type> values, unsigned threads = 1)
        : table_(SparseTable::build(values, 2, threads)) {}

    [[nodiscard]] Answer query(const Query& query) const { return table_.query(query); }
    [[nodiscard]] std::uint64_t stored_bits() const { return table_.stored_bits(); }
    [[nodiscard]] std::size_t size() const { return table_.size(); }

private:
    SparseTable table_;
};

}  // namespace bbst
