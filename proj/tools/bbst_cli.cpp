// Command-line harness: data generation, oracle verification, space reports,
// success-rate / timing sweeps and offline batch answering.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbst/rmq.hpp"

namespace {

using namespace bbst;

struct Options {
    std::size_t n = 1'000'000;
    std::size_t k = 512;
    std::size_t k1 = 512;
    std::size_t k2 = 64;
    bool auto_two_level = false;
    std::string variant = "bbst";
    std::string front = "cbbst2";
    unsigned arity = 2;
    std::string mode = "byte";
    std::size_t q = 100'000;
    std::vector<std::size_t> max_widths;
    std::uint64_t seed = 1;
    unsigned reps = 7;
    unsigned threads = 1;
    std::string out;
    std::string array_path;
    std::string queries_path;
    std::size_t max_n = 10'000'000;
    std::optional<double> backend_bpe;
    bool binary = false;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_structure_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--variant", o.variant,
                    "st|bbst|bbst2|cbbst|cbbst2|hybrid|offline-con|offline-plain");
    cmd->add_option("--k", o.k, "block size (bbst, cbbst, offline; 0 = sqrt(n) for offline-plain)");
    cmd->add_option("--k1", o.k1, "top block size of two-level variants");
    cmd->add_option("--k2", o.k2, "second-level block size (<= 256, divides k1)");
    cmd->add_flag("--auto", o.auto_two_level, "k1 = sqrt(n log n), k2 = sqrt(n / log n)");
    cmd->add_option("--front", o.front, "hybrid front: bbst|bbst2|cbbst|cbbst2");
    cmd->add_option("--arity", o.arity, "sparse table arity (st)");
    cmd->add_option("--mode", o.mode, "compact delta mode: byte|bit");
}

VariantConfig make_config(const Options& o) {
    VariantConfig c;
    c.variant = parse_variant(o.variant);
    c.k = o.k;
    c.k1 = o.k1;
    c.k2 = o.k2;
    c.auto_two_level = o.auto_two_level;
    c.arity = o.arity;
    c.mode = parse_mode(o.mode);
    c.front = parse_variant(o.front);
    return c;
}

std::string fmt_double(double v, int precision = 6) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << v;
    return s.str();
}

InputArray load_or_generate_array(const Options& o) {
    if (!o.array_path.empty()) return io::read_array(o.array_path);
    return generate_array(o.n, o.seed);
}

// Query seeds: the array uses --seed, the batch --seed + 1 (+ sweep index).
std::vector<Query> load_or_generate_queries(const Options& o, std::size_t n, std::size_t max_width,
                                            std::uint64_t seed_offset = 1) {
    if (!o.queries_path.empty()) {
        auto queries = io::read_queries(o.queries_path);
        for (const auto& q : queries) check_query(q, n);
        return queries;
    }
    return generate_queries(n, o.q, std::min(max_width, n), o.seed + seed_offset).queries;
}

std::vector<Entry> oracle_answers(std::span<const value_type> values, std::span<const Query> queries,
                                  unsigned threads) {
    std::vector<Entry> expected(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) expected[i] = scan_min(values, queries[i].l, queries[i].r);
    });
    return expected;
}

int cmd_gen_array(const Options& o) {
    if (o.out.empty()) throw UsageError("gen-array needs --out");
    const InputArray a = generate_array(o.n, o.seed);
    io::write_array(o.out, a.values());
    std::cout << "wrote " << a.size() << " values to " << o.out << '\n';
    return 0;
}

int cmd_gen_queries(const Options& o) {
    if (o.out.empty()) throw UsageError("gen-queries needs --out");
    const std::size_t w = o.max_widths.empty() ? o.n : o.max_widths.front();
    const QueryBatch batch = generate_queries(o.n, o.q, w, o.seed);
    io::write_queries(o.out, batch.queries);
    std::cout << "wrote " << batch.q() << " queries to " << o.out << '\n';
    return 0;
}

int cmd_verify(const Options& o) {
    if (o.array_path.empty() && o.n > o.max_n)
        throw UsageError("n exceeds the verification cap (--max-n " + std::to_string(o.max_n) + ")");
    const VariantConfig config = make_config(o);
    const InputArray array = load_or_generate_array(o);
    if (array.size() > o.max_n) throw UsageError("array exceeds the verification cap");
    const std::size_t n = array.size();
    const std::size_t width = o.max_widths.empty() ? std::min<std::size_t>(n, 1u << 15) : o.max_widths.front();
    const auto queries = load_or_generate_queries(o, n, width);
    if (queries.empty()) throw UsageError("no queries");

    const auto engine = make_engine(config, array.values(), o.threads);
    const BatchOutcome got = engine->run(queries, o.threads);
    const auto expected = oracle_answers(array.values(), queries, o.threads);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const std::size_t p = got.answers[i].position;
        if (p < queries[i].l || p > queries[i].r || array[p] != expected[i].value) ++mismatches;
    }
    const auto [b1, b2] = config.reported_blocks(n);
    const double qd = static_cast<double>(queries.size());
    std::cout << "variant=" << o.variant;
    if (config.variant == Variant::hybrid) std::cout << " front=" << o.front;
    std::cout << " n=" << n << " q=" << queries.size() << " k1=" << b1 << " k2=" << b2
              << " mismatches=" << mismatches
              << " success_rate=" << fmt_double(static_cast<double>(got.successes) / qd)
              << " fallback_rate=" << fmt_double(static_cast<double>(got.fallbacks) / qd);
    if (config.variant == Variant::offline_con) std::cout << " aq_size=" << got.contracted_size;
    std::cout << " bits_per_element=" << fmt_double(engine->space().bits_per_element(), 4) << '\n';
    return mismatches == 0 ? 0 : 1;
}

std::vector<std::size_t> default_widths() {
    std::vector<std::size_t> w;
    for (std::size_t x = std::size_t{1} << 6; x <= (std::size_t{1} << 24); x *= 4) w.push_back(x);
    return w;
}

int cmd_bench(const Options& o) {
    if (o.reps == 0 || o.reps % 2 == 0) throw UsageError("--reps must be odd and >= 1");
    const VariantConfig config = make_config(o);
    const InputArray array = load_or_generate_array(o);
    const std::size_t n = array.size();
    const auto widths = o.max_widths.empty() ? default_widths() : o.max_widths;
    const auto engine = make_engine(config, array.values(), o.threads);
    const double bpe = engine->space().bits_per_element();
    const auto [b1, b2] = config.reported_blocks(n);

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) throw std::runtime_error("cannot open " + o.out);
    }
    std::ostream& csv = o.out.empty() ? std::cout : file;
    csv << "variant,n,k1,k2,max_width,q,median_ns_per_query,success_rate,fallback_rate,bits_per_element\n";
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const std::size_t w = std::min(widths[i], n);
        const auto queries = load_or_generate_queries(o, n, w, 1 + i);
        std::vector<double> ns;
        BatchOutcome last;
        for (unsigned rep = 0; rep < o.reps; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            last = engine->run(queries, o.threads);
            const auto stop = std::chrono::steady_clock::now();
            ns.push_back(std::chrono::duration<double, std::nano>(stop - start).count() /
                         static_cast<double>(queries.size()));
        }
        std::nth_element(ns.begin(), ns.begin() + ns.size() / 2, ns.end());
        const double qd = static_cast<double>(queries.size());
        csv << o.variant << ',' << n << ',' << b1 << ',' << b2 << ',' << w << ',' << queries.size() << ','
            << fmt_double(ns[ns.size() / 2], 2) << ','
            << fmt_double(static_cast<double>(last.successes) / qd) << ','
            << fmt_double(static_cast<double>(last.fallbacks) / qd) << ',' << fmt_double(bpe, 4) << '\n';
    }
    return 0;
}

int cmd_space(const Options& o) {
    const VariantConfig config = make_config(o);
    std::optional<std::uint64_t> q;
    if (config.variant == Variant::offline_con) q = o.q;
    const SpaceReport r = variant_space(config, o.n, q, o.backend_bpe);
    const auto [b1, b2] = config.reported_blocks(o.n);
    std::cout << "variant            " << o.variant
              << (config.variant == Variant::hybrid ? " (front " + o.front + ")" : std::string()) << '\n'
              << "n                  " << o.n << '\n'
              << "k1, k2             " << b1 << ", " << b2 << '\n'
              << "backend data       " << fmt_double(r.per_element(r.backend_bits), 4) << " bits/elem\n"
              << "sparse table       " << fmt_double(r.per_element(r.sparse_table_bits), 4) << " bits/elem\n"
              << "second level       " << fmt_double(r.per_element(r.second_level_bits()), 4) << " bits/elem\n"
              << "  offsets          " << fmt_double(r.per_element(r.second_level_offset_bits), 4) << '\n'
              << "  values           " << fmt_double(r.per_element(r.second_level_value_bits), 4) << '\n'
              << "total              " << fmt_double(r.bits_per_element(), 4) << " bits/elem\n";
    if (!o.out.empty()) {
        std::ofstream csv(o.out);
        if (!csv) throw std::runtime_error("cannot open " + o.out);
        csv << "variant,n,k1,k2,backend_bits,sparse_table_bits,second_level_bits,total_bits,"
               "backend_bpe,sparse_table_bpe,second_level_bpe,bits_per_element\n"
            << o.variant << ',' << o.n << ',' << b1 << ',' << b2 << ',' << r.backend_bits << ','
            << r.sparse_table_bits << ',' << r.second_level_bits() << ',' << r.total_bits() << ','
            << fmt_double(r.per_element(r.backend_bits)) << ','
            << fmt_double(r.per_element(r.sparse_table_bits)) << ','
            << fmt_double(r.per_element(r.second_level_bits())) << ',' << fmt_double(r.bits_per_element())
            << '\n';
    }
    return 0;
}

int cmd_offline(const Options& o) {
    VariantConfig config = make_config(o);
    if (config.variant != Variant::offline_con && config.variant != Variant::offline_plain)
        throw UsageError("offline needs --variant offline-con or offline-plain");
    const InputArray array = load_or_generate_array(o);
    const std::size_t n = array.size();
    const std::size_t width = o.max_widths.empty() ? n : o.max_widths.front();
    const auto queries = load_or_generate_queries(o, n, width);
    const OfflineResult r = config.variant == Variant::offline_con
                                ? answer_batch_con(array.values(), queries, o.k, o.threads)
                                : answer_batch_plain(array.values(), queries, o.k, o.threads);
    if (!o.out.empty()) io::write_answers(o.out, r.answers, o.binary);
    std::uint64_t checksum = 0;
    for (const auto& a : r.answers) checksum = checksum * 1000003u + a.position;
    std::cout << "variant=" << o.variant << " n=" << n << " q=" << queries.size();
    if (config.variant == Variant::offline_con) std::cout << " aq_size=" << r.contracted_size;
    std::cout << " fallbacks=" << r.fallbacks << " answer_checksum=" << checksum << '\n';
    std::cerr << "stage seconds: sort=" << fmt_double(r.timings.sort_s)
              << " contract=" << fmt_double(r.timings.contract_s) << " build=" << fmt_double(r.timings.build_s)
              << " answer=" << fmt_double(r.timings.answer_s) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-based sparse table RMQ harness"};
    app.require_subcommand(1);
    Options o;

    auto* gen_array = app.add_subcommand("gen-array", "write a random uint32 array (raw little-endian)");
    gen_array->add_option("--n", o.n, "element count");
    gen_array->add_option("--seed", o.seed, "PRNG seed");
    gen_array->add_option("--out", o.out, "output path")->required();

    auto* gen_queries = app.add_subcommand("gen-queries", "write a random query batch (text, or .qbin)");
    gen_queries->add_option("--n", o.n, "array length");
    gen_queries->add_option("--q", o.q, "query count");
    gen_queries->add_option("--max-width", o.max_widths, "width limit");
    gen_queries->add_option("--seed", o.seed, "PRNG seed");
    gen_queries->add_option("--out", o.out, "output path")->required();
    for (auto* cmd : {gen_array, gen_queries})
        cmd->add_option("--threads", o.threads, "accepted for uniformity; generation is sequential")
            ->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "compare a variant against the brute-force scan");
    auto* bench = app.add_subcommand("bench", "median-of-runs timing and success-rate sweep (CSV)");
    auto* space = app.add_subcommand("space", "space accounting in bits per element");
    auto* offline = app.add_subcommand("offline", "answer a batch offline");

    for (auto* cmd : {verify, bench, space, offline}) {
        add_structure_flags(cmd, o);
        cmd->add_option("--n", o.n, "array length (ignored with --array)");
        cmd->add_option("--q", o.q, "queries per batch");
        cmd->add_option("--seed", o.seed, "PRNG seed (array: seed, queries: seed + 1)");
        cmd->add_option("--threads", o.threads, "parallel executors")->check(CLI::PositiveNumber);
        cmd->add_option("--out", o.out, "output path");
    }
    for (auto* cmd : {verify, bench, offline}) {
        cmd->add_option("--max-width", o.max_widths, "query width limit (bench: sweep list)");
        cmd->add_option("--array", o.array_path, "array file (raw little-endian uint32)");
        cmd->add_option("--queries", o.queries_path, "query file (\"l r\" lines, or .qbin)");
    }
    verify->add_option("--max-n", o.max_n, "verification size cap");
    bench->add_option("--reps", o.reps, "repetitions per width (odd)");
    space->add_option("--backend-bpe", o.backend_bpe, "hybrid backend bits/elem (default: reference sparse table)");
    offline->add_flag("--binary", o.binary, "write answers as little-endian uint64");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (offline->parsed() && offline->get_option("--variant")->count() == 0) o.variant = "offline-con";
        if (gen_array->parsed()) return cmd_gen_array(o);
        if (gen_queries->parsed()) return cmd_gen_queries(o);
        if (verify->parsed()) return cmd_verify(o);
        if (bench->parsed()) return cmd_bench(o);
        if (space->parsed()) return cmd_space(o);
        if (offline->parsed()) return cmd_offline(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
