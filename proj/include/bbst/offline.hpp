#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bbst.hpp"
#include "core.hpp"
#include "parallel.hpp"

namespace bbst {

enum class Side : std::uint8_t { left = 0, right = 1 };

// One query endpoint: position in A, index of the query, which end.
struct Endpoint {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    Side side = Side::left;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
    friend bool operator<(const Endpoint& a, const Endpoint& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.side < b.side;
    }
};

using EndpointList = std::vector<Endpoint>;

enum class SortAlgorithm { comparison, radix };

namespace detail {

// Stable LSD radix sort on x, 16 bits per pass.
inline void radix_sort_by_x(std::span<Endpoint> items) {
    std::vector<Endpoint> buffer(items.size());
    std::span<Endpoint> src = items;
    std::span<Endpoint> dst = buffer;
    for (unsigned shift = 0; shift < 32; shift += 16) {
        std::vector<std::size_t> count((1u << 16) + 1, 0);
        for (const auto& e : src) ++count[((e.x >> shift) & 0xFFFFu) + 1];
        for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
        for (const auto& e : src) dst[count[(e.x >> shift) & 0xFFFFu]++] = e;
        std::swap(src, dst);
    }
    // two passes: the sorted data is back in `items`
}

}  // namespace detail

// Endpoints ordered by (x, y, side). The records are generated in (y, side) order, so any
// stable sort on x alone yields the full order.
[[nodiscard]] inline EndpointList sort_endpoints(std::span<const Query> queries,
                                                 SortAlgorithm algorithm = SortAlgorithm::radix,
                                                 unsigned threads = 1) {
    if (queries.empty()) throw std::invalid_argument("sort_endpoints: empty batch");
    if (queries.size() >= (std::size_t{1} << 32))
        throw std::invalid_argument("sort_endpoints: too many queries");
    EndpointList list(2 * queries.size());
    for (std::size_t y = 0; y < queries.size(); ++y) {
        list[2 * y] = {static_cast<std::uint32_t>(queries[y].l), static_cast<std::uint32_t>(y), Side::left};
        list[2 * y + 1] = {static_cast<std::uint32_t>(queries[y].r), static_cast<std::uint32_t>(y), Side::right};
    }
    const auto by_x = [](const Endpoint& a, const Endpoint& b) { return a.x < b.x; };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, list.size());
    const std::size_t chunk = (list.size() + workers - 1) / workers;
    parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            const std::size_t lo = std::min(list.size(), w * chunk);
            const std::size_t hi = std::min(list.size(), lo + chunk);
            std::span<Endpoint> part(list.data() + lo, hi - lo);
            if (algorithm == SortAlgorithm::radix)
                detail::radix_sort_by_x(part);
            else
                std::stable_sort(part.begin(), part.end(), by_x);
        }
    });
    for (std::size_t width = chunk; width < list.size(); width *= 2) {
        for (std::size_t lo = 0; lo + width < list.size(); lo += 2 * width) {
            const std::size_t hi = std::min(list.size(), lo + 2 * width);
            std::inplace_merge(list.begin() + lo, list.begin() + lo + width, list.begin() + hi, by_x);
        }
    }
    return list;
}

/*
 * A contracted to the cells between consecutive distinct endpoint positions
 * e_0 < e_1 < ... : aq[i] = min A[e_i .. e_{i+1}] (both ends inclusive), and
 * map[i] its leftmost position in A.
 */
struct ContractedArray {
    std::vector<value_type> aq;
    std::vector<std::uint32_t> map;
    std::vector<std::uint32_t> endpoints;  // distinct, ascending
};

[[nodiscard]] inline ContractedArray contract(std::span<const value_type> values,
                                              const EndpointList& sorted, unsigned threads = 1) {
    ContractedArray out;
    out.endpoints.reserve(sorted.size());
    for (const auto& e : sorted) {
        if (e.x >= values.size()) throw std::out_of_range("contract: endpoint beyond array");
        if (out.endpoints.empty() || out.endpoints.back() != e.x) out.endpoints.push_back(e.x);
    }
    const std::size_t cells = out.endpoints.empty() ? 0 : out.endpoints.size() - 1;
    out.aq.resize(cells);
    out.map.resize(cells);
    parallel_for(cells, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Entry m = scan_min(values, out.endpoints[i], out.endpoints[i + 1]);
            out.aq[i] = m.value;
            out.map[i] = m.position;
        }
    });
    return out;
}

struct StageTimings {
    double sort_s = 0;
    double contract_s = 0;
    double build_s = 0;
    double answer_s = 0;
};

struct OfflineResult {
    std::vector<Answer> answers;
    std::size_t contracted_size = 0;
    std::size_t speculative_hits = 0;
    std::size_t fallbacks = 0;
    StageTimings timings;
};

namespace detail {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline void check_batch(std::span<const Query> queries, std::size_t n) {
    if (queries.empty()) throw std::invalid_argument("offline: empty batch");
    for (const auto& query : queries) {
        if (query.l > query.r || query.r >= n) throw std::invalid_argument("offline: invalid query in batch");
    }
}

}  // namespace detail

// Sort endpoints, contract A, build a block sparse table over the contracted array and
// answer every query on it.
[[nodiscard]] inline OfflineResult answer_batch_con(std::span<const value_type> values,
                                                    std::span<const Query> queries,
                                                    std::size_t k = 512, unsigned threads = 1,
                                                    SortAlgorithm algorithm = SortAlgorithm::radix) {
    if (k == 0) throw std::invalid_argument("offline: k must be at least 1");
    detail::check_batch(queries, values.size());
    OfflineResult result;
    detail::Stopwatch clock;

    const EndpointList sorted = sort_endpoints(queries, algorithm, threads);
    std::vector<std::uint32_t> left_rank(queries.size());
    std::vector<std::uint32_t> right_rank(queries.size());
    std::uint32_t rank = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i].x != sorted[i - 1].x) ++rank;
        (sorted[i].side == Side::left ? left_rank : right_rank)[sorted[i].y] = rank;
    }
    result.timings.sort_s = clock.lap();

    const ContractedArray contracted = contract(values, sorted, threads);
    result.contracted_size = contracted.aq.size();
    result.timings.contract_s = clock.lap();

    BlockSparseTable index;
    if (!contracted.aq.empty())
        index = BlockSparseTable::build(contracted.aq, std::min(k, contracted.aq.size()), threads);
    result.timings.build_s = clock.lap();

    result.answers.resize(queries.size());
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, queries.size());
    std::vector<std::size_t> hits(workers, 0);
    std::vector<std::size_t> misses(workers, 0);
    const std::size_t chunk = (queries.size() + workers - 1) / workers;
    parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t wb, std::size_t we) {
        for (std::size_t w = wb; w < we; ++w) {
            const std::size_t lo = std::min(queries.size(), w * chunk);
            const std::size_t hi = std::min(queries.size(), lo + chunk);
            for (std::size_t y = lo; y < hi; ++y) {
                const std::uint32_t a = left_rank[y];
                const std::uint32_t b = right_rank[y];
                if (a == b) {
                    result.answers[y] = {queries[y].l};
                    continue;
                }
                QueryTrace trace;
                const Answer cell = index.query(contracted.aq, {a, b - 1}, &trace);
                result.answers[y] = {contracted.map[cell.position]};
                (trace.path == QueryPath::speculative ? hits[w] : misses[w]) += 1;
            }
        }
    });
    for (std::size_t w = 0; w < workers; ++w) {
        result.speculative_hits += hits[w];
        result.fallbacks += misses[w];
    }
    result.timings.answer_s = clock.lap();
    return result;
}

// Power of two nearest to sqrt(n), at most n.
[[nodiscard]] inline std::size_t default_plain_block_size(std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    const double e = std::round(std::log2(std::sqrt(static_cast<double>(n))));
    std::size_t k = std::size_t{1} << static_cast<unsigned>(std::max(0.0, e));
    while (k > n) k >>= 1;
    return k;
}

// No contraction: a block sparse table over A itself, then one query at a time.
[[nodiscard]] inline OfflineResult answer_batch_plain(std::span<const value_type> values,
                                                      std::span<const Query> queries,
                                                      std::size_t k = 0, unsigned threads = 1) {
    detail::check_batch(queries, values.size());
    if (k == 0) k = default_plain_block_size(values.size());
    OfflineResult result;
    detail::Stopwatch clock;
    const BlockSparseTable index = BlockSparseTable::build(values, k, threads);
    result.timings.build_s = clock.lap();

    result.answers.resize(queries.size());
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, queries.size());
    std::vector<std::size_t> hits(workers, 0);
    const std::size_t chunk = (queries.size() + workers - 1) / workers;
    parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t wb, std::size_t we) {
        for (std::size_t w = wb; w < we; ++w) {
            const std::size_t lo = std::min(queries.size(), w * chunk);
            const std::size_t hi = std::min(queries.size(), lo + chunk);
            for (std::size_t y = lo; y < hi; ++y) {
                QueryTrace trace;
                result.answers[y] = index.query(values, queries[y], &trace);
                if (trace.path == QueryPath::speculative) ++hits[w];
            }
        }
    });
    for (const auto h : hits) result.speculative_hits += h;
    result.fallbacks = queries.size() - result.speculative_hits;
    result.timings.answer_s = clock.lap();
    return result;
}

}  // namespace bbst
