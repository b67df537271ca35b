#pragma once

#include <atomic>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>

#include "bbst.hpp"
#include "compact.hpp"
#include "second_level.hpp"
#include "sparse_table.hpp"

namespace bbst {

// Answers from stored data alone, or declines.
template <typename F>
concept TryFront = requires(const F& front, const Query& query) {
    { front.try_query(query) } -> std::same_as<Attempt>;
    { front.space() } -> std::same_as<SpaceReport>;
};

// Value-correct answers for every valid range, no access to A at query time, query
// cost independent of r - l.
template <typename B>
concept RmqBackend = requires(const B& backend, const Query& query) {
    { backend.query(query) } -> std::same_as<Answer>;
    { backend.stored_bits() } -> std::convertible_to<std::uint64_t>;
};

static_assert(RmqBackend<SparseTableBackend>);

/*
 * Non-compact top table plus k2-block minima carrying values (exact or quantized).
 * A speculative miss is retried from the second level before declining.
 */
class TwoLevelFront {
public:
    TwoLevelFront() = default;

    static TwoLevelFront build(std::span<const value_type> values, std::size_t k1, std::size_t k2,
                               ValueMode mode = ValueMode::exact, unsigned threads = 1) {
        if (mode == ValueMode::none) throw std::invalid_argument("two-level front needs stored values");
        if (k2 == 0 || k2 > 256 || k1 % k2 != 0)
            throw std::invalid_argument("two-level front: need k2 | k1 and k2 <= 256");
        TwoLevelFront front;
        front.top_ = BlockSparseTable::build(values, k1, threads);
        front.second_ = SecondLevel::build(values, k2, mode, threads);
        return front;
    }

    [[nodiscard]] Attempt try_query(const Query& query) const {
        const Attempt first = top_.try_query(query);
        if (first.ok()) return first;
        return second_.attempt(query.l, query.r, top_.block_size(),
                               [&](std::size_t a, std::size_t b) { return top_.blocks_min(a, b); });
    }

    [[nodiscard]] SpaceReport space() const {
        return bbst2_valued_space_bits(top_.size(), top_.block_size(), second_.block_size(),
                                       second_.value_mode());
    }
    [[nodiscard]] std::uint64_t stored_bits() const {
        return top_.stored_bits() + second_.offset_bits() + second_.value_bits();
    }
    [[nodiscard]] const BlockSparseTable& top() const { return top_; }
    [[nodiscard]] const SecondLevel& second_level() const { return second_; }

private:
    BlockSparseTable top_;
    SecondLevel second_;
};

static_assert(TryFront<BlockSparseTable>);
static_assert(TryFront<CompactBlockSparseTable>);
static_assert(TryFront<TwoLevelFront>);

struct PathCounts {
    std::uint64_t front_hits = 0;
    std::uint64_t quantized_tie_declines = 0;
    std::uint64_t out_of_range_declines = 0;

    [[nodiscard]] std::uint64_t total() const {
        return front_hits + quantized_tie_declines + out_of_range_declines;
    }
};

// Relaxed atomic totals; safe to bump from concurrent queries.
class PathCounters {
public:
    PathCounters() = default;
    PathCounters(const PathCounters& other) { *this = other; }
    PathCounters& operator=(const PathCounters& other) {
        const PathCounts c = other.snapshot();
        hits_.store(c.front_hits, std::memory_order_relaxed);
        ties_.store(c.quantized_tie_declines, std::memory_order_relaxed);
        misses_.store(c.out_of_range_declines, std::memory_order_relaxed);
        return *this;
    }

    void record(const Attempt& attempt) const {
        if (attempt.ok())
            hits_.fetch_add(1, std::memory_order_relaxed);
        else if (attempt.reason == Decline::quantized_tie)
            ties_.fetch_add(1, std::memory_order_relaxed);
        else
            misses_.fetch_add(1, std::memory_order_relaxed);
    }

    [[nodiscard]] PathCounts snapshot() const {
        return {hits_.load(std::memory_order_relaxed), ties_.load(std::memory_order_relaxed),
                misses_.load(std::memory_order_relaxed)};
    }

    void reset() const {
        hits_.store(0, std::memory_order_relaxed);
        ties_.store(0, std::memory_order_relaxed);
        misses_.store(0, std::memory_order_relaxed);
    }

private:
    mutable std::atomic<std::uint64_t> hits_{0};
    mutable std::atomic<std::uint64_t> ties_{0};
    mutable std::atomic<std::uint64_t> misses_{0};
};

/*
 * Block-based front end plus a constant-time backend. Neither component keeps a
 * reference to A, so A may be released once the hybrid is built.
 */
template <TryFront Front, RmqBackend Backend = SparseTableBackend>
class Hybrid {
public:
    Hybrid() = default;
    Hybrid(Front front, Backend backend) : front_(std::move(front)), backend_(std::move(backend)) {}

    [[nodiscard]] Answer query(const Query& query) const {
        const Attempt attempt = front_.try_query(query);
        counters_.record(attempt);
        if (attempt.ok()) return *attempt.answer;
        return backend_.query(query);
    }

    [[nodiscard]] PathCounts counts() const { return counters_.snapshot(); }
    void reset_counts() const { counters_.reset(); }

    [[nodiscard]] const Front& front() const { return front_; }
    [[nodiscard]] const Backend& backend() const { return backend_; }

    // Front components plus the backend in place of the input array.
    [[nodiscard]] SpaceReport space() const {
        return with_backend(front_.space(), backend_.stored_bits());
    }

private:
    Front front_;
    Backend backend_;
    PathCounters counters_;
};

template <typename FrontBuilder, typename BackendBuilder>
[[nodiscard]] auto make_hybrid(std::span<const value_type> values, FrontBuilder&& build_front,
                               BackendBuilder&& build_backend) {
    using Front = std::decay_t<decltype(build_front(values))>;
    using Backend = std::decay_t<decltype(build_backend(values))>;
    return Hybrid<Front, Backend>(build_front(values), build_backend(values));
}

// Fraction of the batch the front answers without A.
template <TryFront Front>
[[nodiscard]] double success_rate(const Front& front, std::span<const Query> queries) {
    if (queries.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& query : queries) hits += front.try_query(query).ok() ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(queries.size());
}

}  // namespace bbst
