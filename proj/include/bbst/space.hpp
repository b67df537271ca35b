#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "sparse_table.hpp"

namespace bbst {

enum class DeltaMode { byte, bit };

// How the second-level (k2-block) minima carry their values.
enum class ValueMode { none, exact, quantized };

inline constexpr std::size_t direct_layer_period = 9;

// Bit counts per component. `backend_bits` is the input array (32n) for variants that
// keep A, or the backend RMQ structure for hybrids.
struct SpaceReport {
    std::uint64_t n = 0;
    std::uint64_t backend_bits = 0;
    std::uint64_t sparse_table_bits = 0;
    std::uint64_t second_level_offset_bits = 0;
    std::uint64_t second_level_value_bits = 0;

    [[nodiscard]] std::uint64_t second_level_bits() const {
        return second_level_offset_bits + second_level_value_bits;
    }
    [[nodiscard]] std::uint64_t total_bits() const {
        return backend_bits + sparse_table_bits + second_level_bits();
    }
    [[nodiscard]] double per_element(std::uint64_t bits) const {
        return static_cast<double>(bits) / static_cast<double>(n);
    }
    [[nodiscard]] double bits_per_element() const { return per_element(total_bits()); }
};

[[nodiscard]] inline std::uint64_t block_count(std::uint64_t n, std::uint64_t k) {
    return (n + k - 1) / k;
}

[[nodiscard]] inline std::uint64_t st_space_bits(std::uint64_t n, unsigned arity,
                                                 unsigned entry_bits = 64) {
    if (n == 0 || arity < 2) throw std::invalid_argument("st_space_bits: n >= 1 and arity >= 2");
    return layer_count_for(n, arity) * n * entry_bits;
}

[[nodiscard]] inline SpaceReport bbst_space_bits(std::uint64_t n, std::uint64_t k) {
    if (n == 0 || k == 0 || k > n) throw std::invalid_argument("bbst_space_bits: need 1 <= k <= n");
    const std::uint64_t blocks = block_count(n, k);
    SpaceReport report;
    report.n = n;
    report.backend_bits = 32 * n;
    report.sparse_table_bits = layer_count_for(blocks, 2) * blocks * 64;
    return report;
}

[[nodiscard]] inline SpaceReport bbst2_space_bits(std::uint64_t n, std::uint64_t k1,
                                                  std::uint64_t k2) {
    if (k2 == 0 || k2 > 256 || k1 % k2 != 0)
        throw std::invalid_argument("bbst2_space_bits: need k2 | k1 and k2 <= 256");
    SpaceReport report = bbst_space_bits(n, k1);
    report.second_level_offset_bits = block_count(n, k2) * 8;
    return report;
}

[[nodiscard]] inline std::uint64_t value_bits_for(ValueMode mode) {
    switch (mode) {
        case ValueMode::none: return 0;
        case ValueMode::exact: return 32;
        case ValueMode::quantized: return 8;
    }
    return 0;
}

// Compact layered table: every 9th layer direct (64-bit entries), the rest deltas.
[[nodiscard]] inline std::uint64_t compact_layer_bits(std::uint64_t blocks, DeltaMode mode) {
    const std::uint64_t layers = layer_count_for(blocks, 2);
    const std::uint64_t direct = (layers + direct_layer_period - 1) / direct_layer_period;
    const std::uint64_t delta_bits = mode == DeltaMode::byte ? 8 : 1;
    return direct * blocks * 64 + (layers - direct) * blocks * delta_bits;
}

[[nodiscard]] inline SpaceReport cbbst_space_bits(std::uint64_t n, std::uint64_t k, DeltaMode mode,
                                                  std::optional<std::uint64_t> k2 = std::nullopt,
                                                  ValueMode value_mode = ValueMode::none) {
    if (n == 0 || k == 0 || k > n) throw std::invalid_argument("cbbst_space_bits: need 1 <= k <= n");
    SpaceReport report;
    report.n = n;
    report.backend_bits = 32 * n;
    report.sparse_table_bits = compact_layer_bits(block_count(n, k), mode);
    if (k2) {
        if (*k2 == 0 || *k2 > 256 || k % *k2 != 0)
            throw std::invalid_argument("cbbst_space_bits: need k2 | k and k2 <= 256");
        const std::uint64_t small_blocks = block_count(n, *k2);
        report.second_level_offset_bits = small_blocks * 8;
        report.second_level_value_bits = small_blocks * value_bits_for(value_mode);
    }
    return report;
}

// Plain (non-compact) top table with a value-carrying second level, as used by hybrids.
[[nodiscard]] inline SpaceReport bbst2_valued_space_bits(std::uint64_t n, std::uint64_t k1,
                                                         std::uint64_t k2, ValueMode value_mode) {
    SpaceReport report = bbst2_space_bits(n, k1, k2);
    report.second_level_value_bits = block_count(n, k2) * value_bits_for(value_mode);
    return report;
}

// A hybrid drops A: the backend column holds the backend structure instead.
[[nodiscard]] inline SpaceReport with_backend(SpaceReport front, std::uint64_t backend_bits) {
    front.backend_bits = backend_bits;
    return front;
}

}  // namespace bbst
