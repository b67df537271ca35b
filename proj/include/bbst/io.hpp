#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace bbst::io {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swapping");

// Raw little-endian uint32 values, no header.
inline void write_array(const std::filesystem::path& path, std::span<const value_type> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

[[nodiscard]] inline InputArray read_array(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % sizeof(value_type) != 0)
        throw std::runtime_error(path.string() + ": size is not a multiple of 4 bytes");
    std::vector<value_type> values(bytes / sizeof(value_type));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("read failed: " + path.string());
    return InputArray(std::move(values));
}

[[nodiscard]] inline bool is_binary_query_file(const std::filesystem::path& path) {
    return path.extension() == ".qbin";
}

// Text: one "l r" pair per line. ".qbin": little-endian uint64 pairs.
inline void write_queries(const std::filesystem::path& path, std::span<const Query> queries) {
    if (is_binary_query_file(path)) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        for (const auto& query : queries) {
            const std::uint64_t pair[2] = {query.l, query.r};
            out.write(reinterpret_cast<const char*>(pair), sizeof(pair));
        }
        if (!out) throw std::runtime_error("write failed: " + path.string());
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& query : queries) out << query.l << ' ' << query.r << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

[[nodiscard]] inline std::vector<Query> read_queries(const std::filesystem::path& path) {
    std::vector<Query> queries;
    if (is_binary_query_file(path)) {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        const auto bytes = static_cast<std::size_t>(in.tellg());
        if (bytes % 16 != 0) throw std::runtime_error(path.string() + ": truncated query pair");
        std::vector<std::uint64_t> raw(bytes / 8);
        in.seekg(0);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
        if (!in) throw std::runtime_error("read failed: " + path.string());
        queries.reserve(raw.size() / 2);
        for (std::size_t i = 0; i < raw.size(); i += 2) queries.push_back({raw[i], raw[i + 1]});
        return queries;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::uint64_t l = 0;
        std::uint64_t r = 0;
        if (!(fields >> l >> r))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected \"l r\"");
        queries.push_back({l, r});
    }
    return queries;
}

// One 0-based position per line, or little-endian uint64 when `binary`.
inline void write_answers(const std::filesystem::path& path, std::span<const Answer> answers,
                          bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& answer : answers) {
        if (binary) {
            const std::uint64_t p = answer.position;
            out.write(reinterpret_cast<const char*>(&p), sizeof(p));
        } else {
            out << answer.position << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace bbst::io
