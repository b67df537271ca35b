#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbst.hpp"
#include "bbst2.hpp"
#include "compact.hpp"
#include "core.hpp"
#include "hybrid.hpp"
#include "offline.hpp"
#include "parallel.hpp"
#include "space.hpp"
#include "sparse_table.hpp"

// Runtime selection of the structures by name, for the command-line harness.
namespace bbst {

enum class Variant { st, bbst, bbst2, cbbst, cbbst2, hybrid, offline_con, offline_plain };

[[nodiscard]] inline Variant parse_variant(const std::string& name) {
    if (name == "st") return Variant::st;
    if (name == "bbst") return Variant::bbst;
    if (name == "bbst2") return Variant::bbst2;
    if (name == "cbbst") return Variant::cbbst;
    if (name == "cbbst2") return Variant::cbbst2;
    if (name == "hybrid") return Variant::hybrid;
    if (name == "offline-con") return Variant::offline_con;
    if (name == "offline-plain") return Variant::offline_plain;
    throw std::invalid_argument("unknown variant: " + name);
}

[[nodiscard]] inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::st: return "st";
        case Variant::bbst: return "bbst";
        case Variant::bbst2: return "bbst2";
        case Variant::cbbst: return "cbbst";
        case Variant::cbbst2: return "cbbst2";
        case Variant::hybrid: return "hybrid";
        case Variant::offline_con: return "offline-con";
        case Variant::offline_plain: return "offline-plain";
    }
    return "?";
}

[[nodiscard]] inline DeltaMode parse_mode(const std::string& name) {
    if (name == "byte") return DeltaMode::byte;
    if (name == "bit") return DeltaMode::bit;
    throw std::invalid_argument("unknown delta mode: " + name);
}

struct VariantConfig {
    Variant variant = Variant::bbst;
    std::size_t k = 512;   // bbst, cbbst, offline-con; 0 = default for offline-plain
    std::size_t k1 = 512;  // two-level variants
    std::size_t k2 = 64;
    bool auto_two_level = false;
    unsigned arity = 2;
    DeltaMode mode = DeltaMode::byte;
    Variant front = Variant::cbbst2;  // hybrid front: bbst | bbst2 | cbbst | cbbst2

    // Block sizes as reported in CSV output (0 when not applicable).
    [[nodiscard]] std::pair<std::size_t, std::size_t> reported_blocks(std::size_t n) const {
        const Variant v = variant == Variant::hybrid ? front : variant;
        switch (v) {
            case Variant::st: return {0, 0};
            case Variant::bbst:
            case Variant::cbbst:
            case Variant::offline_con: return {std::min(k, n), 0};
            case Variant::offline_plain: return {k ? k : default_plain_block_size(n), 0};
            case Variant::bbst2:
            case Variant::cbbst2: {
                const auto p = two_level(n);
                return {p.k1, p.k2};
            }
            default: return {0, 0};
        }
    }

    [[nodiscard]] TwoLevelParams two_level(std::size_t n) const {
        return auto_two_level ? auto_two_level_params(n) : TwoLevelParams{k1, k2};
    }
};

// Space of the configured variant at size n, by formula only. offline-con needs q.
[[nodiscard]] inline SpaceReport variant_space(const VariantConfig& config, std::uint64_t n,
                                               std::optional<std::uint64_t> q = std::nullopt,
                                               std::optional<double> backend_bits_per_element = std::nullopt) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    const auto p = config.two_level(n);
    switch (config.variant) {
        case Variant::st: {
            SpaceReport r;
            r.n = n;
            r.sparse_table_bits = st_space_bits(n, config.arity);
            return r;
        }
        case Variant::bbst: return bbst_space_bits(n, config.k);
        case Variant::bbst2: return bbst2_space_bits(n, p.k1, p.k2);
        case Variant::cbbst: return cbbst_space_bits(n, config.k, config.mode);
        case Variant::cbbst2: return cbbst_space_bits(n, p.k1, config.mode, p.k2, ValueMode::quantized);
        case Variant::offline_plain:
            return bbst_space_bits(n, config.k ? config.k : default_plain_block_size(n));
        case Variant::offline_con: {
            if (!q || *q == 0) throw std::invalid_argument("offline-con space needs q");
            // worst case: 2q - 1 cells, each with its value and its position in A
            const std::uint64_t cells = std::min<std::uint64_t>(2 * *q - 1, n);
            SpaceReport r = bbst_space_bits(cells, std::min<std::uint64_t>(config.k, cells));
            r.n = n;
            r.backend_bits = 32 * n;
            r.second_level_value_bits = cells * 64;
            return r;
        }
        case Variant::hybrid: {
            SpaceReport front;
            switch (config.front) {
                case Variant::bbst: front = bbst_space_bits(n, config.k); break;
                case Variant::bbst2: front = bbst2_valued_space_bits(n, p.k1, p.k2, ValueMode::exact); break;
                case Variant::cbbst: front = cbbst_space_bits(n, config.k, config.mode); break;
                case Variant::cbbst2:
                    front = cbbst_space_bits(n, p.k1, config.mode, p.k2, ValueMode::quantized);
                    break;
                default: throw std::invalid_argument("hybrid front must be bbst, bbst2, cbbst or cbbst2");
            }
            const std::uint64_t backend =
                backend_bits_per_element
                    ? static_cast<std::uint64_t>(*backend_bits_per_element * static_cast<double>(n) + 0.5)
                    : st_space_bits(n, 2);
            return with_backend(front, backend);
        }
    }
    throw std::invalid_argument("unknown variant");
}

struct BatchOutcome {
    std::vector<Answer> answers;
    std::uint64_t successes = 0;  // answered without touching A
    std::uint64_t fallbacks = 0;  // needed A (or the hybrid backend)
    std::size_t contracted_size = 0;
    std::optional<StageTimings> stages;
};

class Engine {
public:
    virtual ~Engine() = default;
    [[nodiscard]] virtual BatchOutcome run(std::span<const Query> queries, unsigned threads) const = 0;
    [[nodiscard]] virtual SpaceReport space() const = 0;
};

namespace detail {

// Per-query loop, statically chunked; per-chunk counts are summed in chunk order.
template <typename PerQuery>
BatchOutcome run_each(std::span<const Query> queries, unsigned threads, PerQuery&& per_query) {
    BatchOutcome out;
    out.answers.resize(queries.size());
    if (queries.empty()) return out;
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, queries.size());
    const std::size_t chunk = (queries.size() + workers - 1) / workers;
    std::vector<std::uint64_t> ok(workers, 0);
    std::vector<std::uint64_t> fb(workers, 0);
    parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t wb, std::size_t we) {
        for (std::size_t w = wb; w < we; ++w) {
            const std::size_t lo = std::min(queries.size(), w * chunk);
            const std::size_t hi = std::min(queries.size(), lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
                bool success = false;
                bool fallback = false;
                out.answers[i] = per_query(queries[i], success, fallback);
                ok[w] += success;
                fb[w] += fallback;
            }
        }
    });
    for (std::size_t w = 0; w < workers; ++w) {
        out.successes += ok[w];
        out.fallbacks += fb[w];
    }
    return out;
}

class StEngine final : public Engine {
public:
    StEngine(std::span<const value_type> values, unsigned arity, unsigned threads)
        : table_(SparseTable::build(values, arity, threads)) {}
    BatchOutcome run(std::span<const Query> queries, unsigned threads) const override {
        return run_each(queries, threads, [&](const Query& q, bool& ok, bool&) {
            ok = true;
            return table_.query(q);
        });
    }
    SpaceReport space() const override {
        SpaceReport r;
        r.n = table_.size();
        r.sparse_table_bits = table_.stored_bits();
        return r;
    }

private:
    SparseTable table_;
};

// Structures that keep A: query(values, q, trace) plus an A-free try_query.
template <typename Index>
class ArrayEngine final : public Engine {
public:
    ArrayEngine(std::span<const value_type> values, Index index)
        : values_(values), index_(std::move(index)) {}
    BatchOutcome run(std::span<const Query> queries, unsigned threads) const override {
        return run_each(queries, threads, [&](const Query& q, bool& ok, bool& fallback) {
            QueryTrace trace;
            const Answer a = index_.query(values_, q, &trace);
            fallback = trace.path == QueryPath::fallback;
            ok = !fallback || index_.try_query(q).ok();
            return a;
        });
    }
    SpaceReport space() const override { return index_.space(); }

private:
    std::span<const value_type> values_;
    Index index_;
};

template <typename Front>
class HybridEngine final : public Engine {
public:
    explicit HybridEngine(Hybrid<Front> hybrid) : hybrid_(std::move(hybrid)) {}
    BatchOutcome run(std::span<const Query> queries, unsigned threads) const override {
        return run_each(queries, threads, [&](const Query& q, bool& ok, bool& fallback) {
            const Attempt attempt = hybrid_.front().try_query(q);
            ok = attempt.ok();
            fallback = !ok;
            return ok ? *attempt.answer : hybrid_.backend().query(q);
        });
    }
    SpaceReport space() const override { return hybrid_.space(); }

private:
    Hybrid<Front> hybrid_;
};

class OfflineEngine final : public Engine {
public:
    OfflineEngine(std::span<const value_type> values, bool contract, std::size_t k)
        : values_(values), contract_(contract), k_(k) {}
    BatchOutcome run(std::span<const Query> queries, unsigned threads) const override {
        OfflineResult r = contract_ ? answer_batch_con(values_, queries, k_, threads)
                                    : answer_batch_plain(values_, queries, k_, threads);
        BatchOutcome out;
        out.answers = std::move(r.answers);
        out.fallbacks = r.fallbacks;
        out.successes = queries.size() - r.fallbacks;
        out.contracted_size = r.contracted_size;
        out.stages = r.timings;
        return out;
    }
    SpaceReport space() const override {
        if (contract_) {
            VariantConfig c;
            c.variant = Variant::offline_con;
            c.k = k_;
            return variant_space(c, values_.size(), values_.size());
        }
        return bbst_space_bits(values_.size(), k_ ? k_ : default_plain_block_size(values_.size()));
    }

private:
    std::span<const value_type> values_;
    bool contract_;
    std::size_t k_;
};

}  // namespace detail

// `values` must outlive the engine unless the variant is a hybrid.
[[nodiscard]] inline std::unique_ptr<Engine> make_engine(const VariantConfig& config,
                                                         std::span<const value_type> values,
                                                         unsigned threads = 1) {
    const std::size_t n = values.size();
    const auto p = config.two_level(n);
    switch (config.variant) {
        case Variant::st: return std::make_unique<detail::StEngine>(values, config.arity, threads);
        case Variant::bbst:
            return std::make_unique<detail::ArrayEngine<BlockSparseTable>>(
                values, BlockSparseTable::build(values, config.k, threads));
        case Variant::bbst2:
            return std::make_unique<detail::ArrayEngine<TwoLevelBlockSparseTable>>(
                values, TwoLevelBlockSparseTable::build(values, p.k1, p.k2, threads));
        case Variant::cbbst:
            return std::make_unique<detail::ArrayEngine<CompactBlockSparseTable>>(
                values, CompactBlockSparseTable::build(values, config.k, {config.mode, std::nullopt}, threads));
        case Variant::cbbst2:
            return std::make_unique<detail::ArrayEngine<CompactBlockSparseTable>>(
                values, CompactBlockSparseTable::build(values, p.k1, {config.mode, p.k2, ValueMode::quantized},
                                                       threads));
        case Variant::hybrid: {
            SparseTableBackend backend(values, threads);
            switch (config.front) {
                case Variant::bbst:
                    return std::make_unique<detail::HybridEngine<BlockSparseTable>>(
                        Hybrid<BlockSparseTable>(BlockSparseTable::build(values, config.k, threads),
                                                 std::move(backend)));
                case Variant::bbst2:
                    return std::make_unique<detail::HybridEngine<TwoLevelFront>>(Hybrid<TwoLevelFront>(
                        TwoLevelFront::build(values, p.k1, p.k2, ValueMode::exact, threads), std::move(backend)));
                case Variant::cbbst:
                    return std::make_unique<detail::HybridEngine<CompactBlockSparseTable>>(
                        Hybrid<CompactBlockSparseTable>(
                            CompactBlockSparseTable::build(values, config.k, {config.mode, std::nullopt}, threads),
                            std::move(backend)));
                case Variant::cbbst2:
                    return std::make_unique<detail::HybridEngine<CompactBlockSparseTable>>(
                        Hybrid<CompactBlockSparseTable>(
                            CompactBlockSparseTable::build(values, p.k1,
                                                           {config.mode, p.k2, ValueMode::quantized}, threads),
                            std::move(backend)));
                default: throw std::invalid_argument("hybrid front must be bbst, bbst2, cbbst or cbbst2");
            }
        }
        case Variant::offline_con:
            return std::make_unique<detail::OfflineEngine>(values, true, config.k);
        case Variant::offline_plain:
            return std::make_unique<detail::OfflineEngine>(values, false, config.k);
    }
    throw std::invalid_argument("unknown variant");
}

}  // namespace bbst
