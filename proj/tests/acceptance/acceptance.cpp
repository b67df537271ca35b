// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: bbst_acceptance --cli <path to bbst_cli>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "bbst/rmq.hpp"

namespace {

using namespace bbst;
namespace fs = std::filesystem;

unsigned hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (pass) detail.str("");
        const bool first = pass;
        pass = false;
        if (detail.tellp() > 1500) return;
        if (!first) detail << "; ";
        detail << why;
    }
};

std::vector<value_type> oracle_values(std::span<const value_type> a, std::span<const Query> qs) {
    std::vector<value_type> out(qs.size());
    parallel_for(qs.size(), hardware_threads(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = scan_min(a, qs[i].l, qs[i].r).value;
    });
    return out;
}

std::size_t count_mismatches(std::span<const value_type> a, std::span<const Query> qs,
                             std::span<const value_type> expected, const std::vector<Answer>& got) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const std::size_t p = got[i].position;
        if (p < qs[i].l || p > qs[i].r || a[p] != expected[i]) ++bad;
    }
    return bad;
}

std::string label(const VariantConfig& c) {
    std::ostringstream s;
    s << to_string(c.variant);
    if (c.variant == Variant::hybrid) s << '/' << to_string(c.front);
    switch (c.variant == Variant::hybrid ? c.front : c.variant) {
        case Variant::st: s << " arity=" << c.arity; break;
        case Variant::bbst:
        case Variant::offline_con:
        case Variant::offline_plain: s << " k=" << c.k; break;
        case Variant::cbbst: s << " k=" << c.k << (c.mode == DeltaMode::bit ? " bit" : " byte"); break;
        case Variant::bbst2:
        case Variant::cbbst2:
            if (c.auto_two_level)
                s << " auto";
            else
                s << " (" << c.k1 << "," << c.k2 << ")";
            if (c.variant == Variant::cbbst2 || (c.variant == Variant::hybrid && c.front == Variant::cbbst2))
                s << (c.mode == DeltaMode::bit ? " bit" : " byte");
            break;
        default: break;
    }
    return s.str();
}

VariantConfig config(Variant v) {
    VariantConfig c;
    c.variant = v;
    return c;
}

// ---- criterion 1 ----

std::vector<VariantConfig> large_configs() {
    std::vector<VariantConfig> out;
    for (unsigned arity : {2u, 4u, 16u}) {
        auto c = config(Variant::st);
        c.arity = arity;
        out.push_back(c);
    }
    for (std::size_t k : {4u, 16u, 512u}) {
        auto c = config(Variant::bbst);
        c.k = k;
        out.push_back(c);
    }
    for (auto [k1, k2] : {std::pair<std::size_t, std::size_t>{8, 4}, {512, 64}, {4096, 256}}) {
        auto c = config(Variant::bbst2);
        c.k1 = k1;
        c.k2 = k2;
        out.push_back(c);
    }
    for (auto mode : {DeltaMode::byte, DeltaMode::bit}) {
        auto c = config(Variant::cbbst);
        c.k = 512;
        c.mode = mode;
        out.push_back(c);
        auto c2 = config(Variant::cbbst2);
        c2.k1 = 4096;
        c2.k2 = 256;
        c2.mode = mode;
        out.push_back(c2);
    }
    for (auto front : {Variant::bbst, Variant::bbst2, Variant::cbbst, Variant::cbbst2}) {
        auto c = config(Variant::hybrid);
        c.front = front;
        c.k = 512;
        c.k1 = front == Variant::cbbst2 ? 16384 : 4096;
        c.k2 = 256;
        out.push_back(c);
    }
    auto con = config(Variant::offline_con);
    con.k = 512;
    out.push_back(con);
    auto plain = config(Variant::offline_plain);
    plain.k = 0;
    out.push_back(plain);
    return out;
}

Outcome criterion_oracle() {
    Outcome o;
    const auto array = generate_array(1'000'000, 101);
    const auto a = array.values();
    std::vector<Query> qs = generate_queries(a.size(), 100'000, 1u << 16, 102).queries;
    const auto wide = generate_queries(a.size(), 500, a.size(), 103).queries;
    qs.insert(qs.end(), wide.begin(), wide.end());
    qs.push_back({0, a.size() - 1});
    const auto expected = oracle_values(a, qs);
    std::size_t variants = 0;
    for (const auto& c : large_configs()) {
        const auto engine = make_engine(c, a, hardware_threads());
        const auto got = engine->run(qs, hardware_threads());
        const std::size_t bad = count_mismatches(a, qs, expected, got.answers);
        if (bad) o.fail(label(c) + ": " + std::to_string(bad) + " mismatches");
        ++variants;
    }
    if (o.pass) o.detail << variants << " configurations x " << qs.size() << " queries on n=10^6, 0 mismatches";
    return o;
}

// ---- criterion 2 ----

std::vector<VariantConfig> small_configs(std::size_t n) {
    std::vector<VariantConfig> out;
    const auto fits = [n](std::size_t k) { return k <= n; };
    for (unsigned arity : {2u, 3u, 4u, 16u}) {
        auto c = config(Variant::st);
        c.arity = arity;
        out.push_back(c);
    }
    for (std::size_t k : {1u, 2u, 3u, 4u, 16u, 64u}) {
        if (!fits(k)) continue;
        auto c = config(Variant::bbst);
        c.k = k;
        out.push_back(c);
        for (auto mode : {DeltaMode::byte, DeltaMode::bit}) {
            auto cc = config(Variant::cbbst);
            cc.k = k;
            cc.mode = mode;
            out.push_back(cc);
        }
        auto con = config(Variant::offline_con);
        con.k = k;
        out.push_back(con);
    }
    auto plain = config(Variant::offline_plain);
    plain.k = 0;
    out.push_back(plain);
    const std::pair<std::size_t, std::size_t> pairs[] = {{1, 1}, {2, 1}, {4, 2}, {8, 4}, {16, 4}, {64, 16}};
    for (auto [k1, k2] : pairs) {
        if (!fits(k1)) continue;
        auto c = config(Variant::bbst2);
        c.k1 = k1;
        c.k2 = k2;
        out.push_back(c);
        for (auto mode : {DeltaMode::byte, DeltaMode::bit}) {
            auto cc = config(Variant::cbbst2);
            cc.k1 = k1;
            cc.k2 = k2;
            cc.mode = mode;
            out.push_back(cc);
        }
        for (auto front : {Variant::bbst, Variant::bbst2, Variant::cbbst, Variant::cbbst2}) {
            auto h = config(Variant::hybrid);
            h.front = front;
            h.k = k1;
            h.k1 = k1;
            h.k2 = k2;
            out.push_back(h);
        }
    }
    auto automatic = config(Variant::bbst2);
    automatic.auto_two_level = true;
    out.push_back(automatic);
    return out;
}

Outcome criterion_exhaustive() {
    Outcome o;
    const std::size_t sizes[] = {1, 2, 3, 5, 8, 17, 31, 64, 100, 129, 200, 255, 256};
    const unsigned seeds = 20;
    std::size_t checked = 0;
    for (unsigned seed = 0; seed < seeds && o.pass; ++seed) {
        for (const std::size_t n : sizes) {
            for (const bool small_alphabet : {false, true}) {
                std::vector<value_type> a = generate_array(n, 1000 + seed).vector();
                if (small_alphabet)
                    for (auto& x : a) x %= 4;
                std::vector<Query> qs;
                std::vector<value_type> expected;
                for (std::size_t l = 0; l < n; ++l) {
                    value_type m = a[l];
                    for (std::size_t r = l; r < n; ++r) {
                        m = std::min(m, a[r]);
                        qs.push_back({l, r});
                        expected.push_back(m);
                    }
                }
                for (const auto& c : small_configs(n)) {
                    const auto got = make_engine(c, a)->run(qs, 1);
                    const std::size_t bad = count_mismatches(a, qs, expected, got.answers);
                    if (bad)
                        o.fail(label(c) + " n=" + std::to_string(n) + " seed=" + std::to_string(seed) + ": " +
                               std::to_string(bad) + " mismatches");
                    checked += qs.size();
                }
            }
        }
    }
    if (o.pass) o.detail << seeds << " seeds, n <= 256, " << checked << " (variant, l, r) checks, 0 mismatches";
    return o;
}

// ---- CLI helpers ----

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& command) {
    RunResult r;
    FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
    if (!pipe) return r;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) r.out.append(buffer, got);
    const int status = ::pclose(pipe);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

// ---- criterion 3 ----

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string field;
    while (std::getline(s, field, sep)) out.push_back(field);
    return out;
}

struct SpaceRow {
    double backend = 0, table = 0, second = 0, total = 0;
};

std::optional<SpaceRow> cli_space(const std::string& cli, const fs::path& dir, const std::string& args) {
    const fs::path csv = dir / "space.csv";
    const auto r = run(quote(cli) + " space --n 1073741824 " + args + " --out " + quote(csv.string()));
    if (r.status != 0) return std::nullopt;
    std::ifstream in(csv);
    std::string header;
    std::string line;
    std::getline(in, header);
    std::getline(in, line);
    const auto f = split(line, ',');
    if (f.size() != 12) return std::nullopt;
    return SpaceRow{std::stod(f[8]), std::stod(f[9]), std::stod(f[10]), std::stod(f[11])};
}

Outcome criterion_space(const std::string& cli, const fs::path& dir) {
    Outcome o;
    struct Check {
        std::string what;
        std::string args;
        double SpaceRow::*field;
        double expected;
    };
    const std::vector<Check> checks = {
        {"BbST k=512 sparse table", "--variant bbst --k 512", &SpaceRow::table, 2.63},
        {"BbST k=512 total", "--variant bbst --k 512", &SpaceRow::total, 34.63},
        {"BbST2 (4096,256) sparse table", "--variant bbst2 --k1 4096 --k2 256", &SpaceRow::table, 0.28},
        {"BbST2 (4096,256) second level", "--variant bbst2 --k1 4096 --k2 256", &SpaceRow::second, 0.03},
        {"BbST2 (512,64) second level", "--variant bbst2 --k1 512 --k2 64", &SpaceRow::second, 0.13},
        {"cBbST k=512 sparse table", "--variant cbbst --k 512", &SpaceRow::table, 0.66},
        {"cBbST2 (16384,256) sparse table", "--variant cbbst2 --k1 16384 --k2 256", &SpaceRow::table, 0.01},
        {"cBbST2 (16384,256) second level", "--variant cbbst2 --k1 16384 --k2 256", &SpaceRow::second, 0.06},
        {"cBbST2 (512,64) second level", "--variant cbbst2 --k1 512 --k2 64", &SpaceRow::second, 0.25},
        {"hybrid exact second level (512,64)", "--variant hybrid --front bbst2 --k1 512 --k2 64",
         &SpaceRow::second, 0.63},
        {"hybrid exact second level (4096,256)", "--variant hybrid --front bbst2 --k1 4096 --k2 256",
         &SpaceRow::second, 0.16},
    };
    for (const auto& c : checks) {
        const auto row = cli_space(cli, dir, c.args);
        if (!row) {
            o.fail(c.what + ": space command failed");
            continue;
        }
        const double got = (*row).*c.field;
        if (std::abs(got - c.expected) > 0.01 + 1e-9) {
            std::ostringstream s;
            s << c.what << " = " << got << ", expected " << c.expected;
            o.fail(s.str());
        }
    }
    if (o.pass) o.detail << checks.size() << " reference space values at n=2^30 within +-0.01 bits/element";
    return o;
}

// ---- criterion 4 ----

Outcome criterion_contraction() {
    Outcome o;
    const auto array = generate_array(1'000'000, 201);
    const auto a = array.values();
    Rng rng(202);
    std::size_t batches = 0;
    for (const std::size_t q : {1u, 2u, 3u, 10u, 100u, 1000u, 10'000u, 100'000u}) {
        for (const std::size_t w : {std::size_t{1}, std::size_t{16}, std::size_t{1} << 12, a.size()}) {
            const auto batch = generate_queries(a.size(), q, w, 300 + q + w);
            const auto r = answer_batch_con(a, batch.queries, 512, hardware_threads());
            if (r.contracted_size > 2 * q - 1)
                o.fail("q=" + std::to_string(q) + " w=" + std::to_string(w) + ": |aq|=" +
                       std::to_string(r.contracted_size));
            ++batches;
        }
        // all 2q endpoints distinct
        std::vector<std::size_t> points;
        while (points.size() < 2 * q) {
            points.push_back(uniform_below(rng, a.size()));
            if (points.size() == 2 * q) {
                std::sort(points.begin(), points.end());
                points.erase(std::unique(points.begin(), points.end()), points.end());
            }
        }
        std::shuffle(points.begin(), points.end(), rng);
        std::vector<Query> qs;
        for (std::size_t y = 0; y < q; ++y)
            qs.push_back({std::min(points[2 * y], points[2 * y + 1]), std::max(points[2 * y], points[2 * y + 1])});
        const auto r = answer_batch_con(a, qs, 512, hardware_threads());
        if (r.contracted_size != 2 * q - 1)
            o.fail("distinct endpoints q=" + std::to_string(q) + ": |aq|=" + std::to_string(r.contracted_size));
        ++batches;
    }
    if (o.pass) o.detail << batches << " batches: |aq| <= 2q-1, equality for distinct endpoints";
    return o;
}

// ---- criteria 5 and 6 ----

double sigma(double p, std::size_t q) { return std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(q)); }

Outcome criterion_fallback(std::span<const value_type> a) {
    Outcome o;
    const std::size_t k = 512;
    const std::size_t q = 100'000;
    const auto index = BlockSparseTable::build(a, k, hardware_threads());
    std::ostringstream summary;
    for (const std::size_t w : {std::size_t{1} << 13, std::size_t{1} << 16, std::size_t{1} << 20}) {
        const auto batch = generate_fixed_width_queries(a.size(), q, w, 500 + w);
        std::vector<std::size_t> misses(hardware_threads(), 0);
        const std::size_t chunk = (q + misses.size() - 1) / misses.size();
        parallel_for(misses.size(), hardware_threads(), [&](std::size_t wb, std::size_t we) {
            for (std::size_t t = wb; t < we; ++t) {
                for (std::size_t i = t * chunk; i < std::min(q, (t + 1) * chunk); ++i) {
                    QueryTrace trace;
                    (void)index.query(a, batch.queries[i], &trace);
                    misses[t] += trace.path == QueryPath::fallback;
                }
            }
        });
        const double rate = static_cast<double>(std::accumulate(misses.begin(), misses.end(), std::size_t{0})) / q;
        const double p = std::min(1.0, 4.0 * k / static_cast<double>(w));
        const double bound = p + 3 * sigma(p, q);
        summary << " w=2^" << std::bit_width(w) - 1 << ":" << rate << "<=" << bound;
        if (rate > bound) {
            std::ostringstream s;
            s << "w=" << w << ": fallback " << rate << " > " << bound;
            o.fail(s.str());
        }
    }
    if (o.pass) o.detail << "n=10^7 k=512 fallback fractions" << summary.str();
    return o;
}

template <typename Front>
std::vector<double> rate_curve(const Front& front, std::size_t n, const std::vector<std::size_t>& widths,
                               std::size_t q) {
    std::vector<double> rates;
    for (const std::size_t w : widths) {
        const auto batch = generate_queries(n, q, w, 700 + w);
        std::vector<std::size_t> hits(hardware_threads(), 0);
        const std::size_t chunk = (q + hits.size() - 1) / hits.size();
        parallel_for(hits.size(), hardware_threads(), [&](std::size_t wb, std::size_t we) {
            for (std::size_t t = wb; t < we; ++t)
                for (std::size_t i = t * chunk; i < std::min(q, (t + 1) * chunk); ++i)
                    hits[t] += front.try_query(batch.queries[i]).ok();
        });
        rates.push_back(static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::size_t{0})) / q);
    }
    return rates;
}

std::string format_curve(const std::vector<double>& rates) {
    std::ostringstream s;
    s.precision(4);
    for (std::size_t i = 0; i < rates.size(); ++i) s << (i ? "," : "") << rates[i];
    return s.str();
}

Outcome criterion_success_shape(std::span<const value_type> a) {
    Outcome o;
    const std::size_t q = 100'000;
    std::vector<std::size_t> widths;
    for (std::size_t w = std::size_t{1} << 8; w <= (std::size_t{1} << 22); w *= 4) widths.push_back(w);
    const unsigned t = hardware_threads();

    const auto check_shape = [&](const std::string& name, const std::vector<double>& r) {
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double slack = 3 * std::sqrt(sigma(r[i], q) * sigma(r[i], q) + sigma(r[i - 1], q) * sigma(r[i - 1], q));
            if (r[i] + slack + 1e-12 < r[i - 1]) o.fail(name + " drops at width " + std::to_string(widths[i]));
        }
    };
    const auto check_overlap = [&](const std::string& name, const std::vector<double>& x,
                                   const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - y[i]) > 0.01) o.fail(name + " differ by > 1 pp at width " + std::to_string(widths[i]));
    };

    const auto bbst = rate_curve(BlockSparseTable::build(a, 512, t), a.size(), widths, q);
    const auto cbbst = rate_curve(CompactBlockSparseTable::build(a, 512, {DeltaMode::byte, std::nullopt}, t),
                                  a.size(), widths, q);
    const auto bbst2 = rate_curve(TwoLevelFront::build(a, 4096, 256, ValueMode::exact, t), a.size(), widths, q);
    const auto cbbst2 = rate_curve(
        CompactBlockSparseTable::build(a, 4096, {DeltaMode::byte, 256, ValueMode::quantized}, t), a.size(), widths, q);
    const auto bbst2_small = rate_curve(TwoLevelFront::build(a, 512, 64, ValueMode::exact, t), a.size(), widths, q);
    const auto cbbst2_small = rate_curve(
        CompactBlockSparseTable::build(a, 512, {DeltaMode::bit, 64, ValueMode::quantized}, t), a.size(), widths, q);

    check_shape("BbSTx", bbst);
    check_shape("cBbSTx", cbbst);
    check_shape("BbST2x", bbst2);
    check_shape("cBbST2x", cbbst2);
    check_shape("BbST2x(512,64)", bbst2_small);
    check_shape("cBbST2x(512,64)", cbbst2_small);
    check_overlap("cBbSTx/BbSTx", cbbst, bbst);
    check_overlap("cBbST2x/BbST2x", cbbst2, bbst2);
    check_overlap("cBbST2x/BbST2x (512,64)", cbbst2_small, bbst2_small);
    if (o.pass)
        o.detail << "widths 2^8..2^22: BbSTx " << format_curve(bbst) << " | BbST2x " << format_curve(bbst2)
                 << " | cBbST2x " << format_curve(cbbst2);
    return o;
}

// ---- criterion 7 ----

Outcome criterion_quantization() {
    Outcome o;
    Rng rng(901);
    std::size_t grids = 0;
    const std::pair<value_type, value_type> ranges[] = {
        {0, 1}, {0, 255}, {0, 256}, {5, 1000}, {0, 0xFFFFFFFFu}, {1u << 31, 0xFFFFFFFFu}, {123456, 123457 + (1u << 20)}};
    for (const auto& [lo, hi] : ranges) {
        if (quantize(lo, lo, hi) != 0) o.fail("quantize(minMin) != 0");
        if (quantize(hi, lo, hi) != 255) o.fail("quantize(maxMin) != 255");
        const std::uint64_t span = std::uint64_t{hi} - lo;
        const std::uint64_t step = std::max<std::uint64_t>(1, span / 200'000);
        unsigned prev = 0;
        for (std::uint64_t v = lo; v <= hi; v += step) {
            const unsigned c = quantize(static_cast<value_type>(v), lo, hi);
            if (c < prev) o.fail("grid not monotone");
            prev = c;
        }
        ++grids;
    }
    for (int i = 0; i < 100; ++i) {
        value_type lo = static_cast<value_type>(rng() >> 32);
        value_type hi = static_cast<value_type>(rng() >> 32);
        if (lo > hi) std::swap(lo, hi);
        unsigned prev = 0;
        for (int s = 0; s <= 1000; ++s) {
            const value_type v = static_cast<value_type>(lo + (std::uint64_t{hi} - lo) * s / 1000);
            const unsigned c = quantize(v, lo, hi);
            if (c < prev) o.fail("random grid not monotone");
            prev = c;
        }
        ++grids;
    }
    std::size_t strict = 0;
    for (int i = 0; i < 1'000'000; ++i) {
        value_type lo = static_cast<value_type>(rng() >> 32);
        value_type hi = static_cast<value_type>(rng() >> 32);
        if (lo > hi) std::swap(lo, hi);
        if (i % 2) hi = lo + static_cast<value_type>(std::min<std::uint64_t>(0xFFFFFFFFu - lo, uniform_below(rng, 4096)));
        const std::uint64_t span = std::uint64_t{hi} - lo + 1;
        const auto x = static_cast<value_type>(lo + uniform_below(rng, span));
        const auto y = static_cast<value_type>(lo + uniform_below(rng, span));
        const auto cx = quantize(x, lo, hi);
        const auto cy = quantize(y, lo, hi);
        if (cx < cy) {
            ++strict;
            if (!(x < y)) o.fail("strict code inequality without strict value inequality");
        }
        if (cy < cx && !(y < x)) o.fail("strict code inequality without strict value inequality");
    }
    if (o.pass)
        o.detail << "endpoints 0/255, " << grids << " monotone grids, 10^6 pairs (" << strict
                 << " strictly ordered codes) imply strict value order";
    return o;
}

// ---- criterion 8 ----

std::string drop_column(const std::string& csv, std::size_t column) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        auto f = split(line, ',');
        if (f.size() > column) f.erase(f.begin() + static_cast<std::ptrdiff_t>(column));
        for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
        out << '\n';
    }
    return out.str();
}

Outcome criterion_determinism(const std::string& cli, const fs::path& dir) {
    Outcome o;
    const std::string c = quote(cli);
    struct Case {
        std::string name;
        std::string args;                // {T} and {D} are replaced by thread count and directory
        std::vector<std::string> files;  // outputs compared byte for byte ({T} replaced)
        bool drop_timing = false;
    };
    const std::vector<Case> cases = {
        {"gen-array", "gen-array --n 200000 --seed 7 --out {D}/a{T}.bin", {"a{T}.bin"}},
        {"gen-queries", "gen-queries --n 200000 --q 20000 --max-width 5000 --seed 8 --out {D}/q{T}.txt",
         {"q{T}.txt"}},
        {"gen-queries qbin", "gen-queries --n 200000 --q 20000 --max-width 5000 --seed 8 --out {D}/q{T}.qbin",
         {"q{T}.qbin"}},
        {"verify st", "verify --variant st --arity 4 --n 200000 --q 20000", {}},
        {"verify bbst", "verify --variant bbst --k 512 --n 200000 --q 20000", {}},
        {"verify bbst2", "verify --variant bbst2 --auto --n 200000 --q 20000", {}},
        {"verify cbbst", "verify --variant cbbst --mode bit --n 200000 --q 20000", {}},
        {"verify cbbst2", "verify --variant cbbst2 --k1 4096 --k2 256 --n 200000 --q 20000", {}},
        {"verify hybrid", "verify --variant hybrid --front cbbst2 --k1 4096 --k2 256 --n 200000 --q 20000", {}},
        {"verify offline-con", "verify --variant offline-con --n 200000 --q 20000", {}},
        {"verify offline-plain", "verify --variant offline-plain --k 0 --n 200000 --q 20000", {}},
        {"bench", "bench --variant cbbst2 --k1 4096 --k2 256 --n 200000 --q 5000 --reps 1 --max-width 64 4096 200000 --out {D}/b{T}.csv",
         {"b{T}.csv"}, true},
        {"bench hybrid", "bench --variant hybrid --front bbst --n 200000 --q 5000 --reps 3 --max-width 1024", {}, true},
        {"space", "space --variant cbbst2 --k1 16384 --k2 256 --n 1073741824 --out {D}/s{T}.csv", {"s{T}.csv"}},
        {"offline", "offline --array {D}/a1.bin --queries {D}/q1.txt --out {D}/o{T}.txt", {"o{T}.txt"}},
        {"offline plain", "offline --variant offline-plain --array {D}/a1.bin --queries {D}/q1.qbin --binary --out {D}/p{T}.bin",
         {"p{T}.bin"}},
    };
    const auto expand = [&](std::string s, unsigned threads) {
        for (std::size_t p; (p = s.find("{T}")) != std::string::npos;) s.replace(p, 3, std::to_string(threads));
        for (std::size_t p; (p = s.find("{D}")) != std::string::npos;) s.replace(p, 3, dir.string());
        return s;
    };
    for (const auto& cs : cases) {
        std::string outputs[2];
        std::string files[2];
        bool ok = true;
        for (int i = 0; i < 2; ++i) {
            const unsigned threads = i == 0 ? 1 : 4;
            const auto r = run(c + " " + expand(cs.args, threads) + " --threads " + std::to_string(threads));
            if (r.status != 0) {
                o.fail(cs.name + ": exit status " + std::to_string(r.status));
                ok = false;
                break;
            }
            // stdout mentions the output path, which differs by design
            outputs[i] = expand(r.out, 0);
            for (const char* t : {"1", "4"}) {
                for (const auto& f : cs.files) {
                    const std::string path = expand(f, std::stoi(t));
                    for (std::size_t p; (p = outputs[i].find(path)) != std::string::npos;)
                        outputs[i].replace(p, path.size(), "<out>");
                }
            }
            for (const auto& f : cs.files) files[i] += slurp(dir / expand(f, threads));
            if (cs.drop_timing) {
                outputs[i] = drop_column(outputs[i], 6);
                files[i] = drop_column(files[i], 6);
            }
        }
        if (ok && (outputs[0] != outputs[1] || files[0] != files[1])) o.fail(cs.name + ": output differs");
        if (ok && cs.files.empty() && outputs[0].empty()) o.fail(cs.name + ": no output");
    }
    if (o.pass) o.detail << cases.size() << " commands identical under --threads 1 and 4 (timing column excluded)";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    if (cli.empty() || !fs::exists(cli)) {
        std::cerr << "usage: bbst_acceptance --cli <path to bbst_cli>\n";
        return 2;
    }
    const fs::path dir = fs::temp_directory_path() / ("bbst_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    int failures = 0;
    const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& body) {
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += !o.pass;
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << name << " - "
                  << o.detail.str() << std::endl;
    };

    report(1, "oracle equivalence", criterion_oracle);
    report(2, "exhaustive small instances", criterion_exhaustive);
    report(3, "space arithmetic", [&] { return criterion_space(cli, dir); });
    report(4, "contraction bound", criterion_contraction);
    {
        const auto big = generate_array(10'000'000, 404);
        report(5, "fallback rate", [&] { return criterion_fallback(big.values()); });
        report(6, "success-rate shape", [&] { return criterion_success_shape(big.values()); });
    }
    report(7, "quantization", criterion_quantization);
    report(8, "determinism", [&] { return criterion_determinism(cli, dir); });

    std::error_code ec;
    fs::remove_all(dir, ec);
    std::cout << (failures ? "acceptance: FAIL (" + std::to_string(failures) + " criteria)" : "acceptance: PASS")
              << std::endl;
    return failures ? 1 : 0;
}
