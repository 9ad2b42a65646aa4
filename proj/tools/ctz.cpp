// Command line for block compression, statistics, signature training,
// classification, ancestor testing, and hard-instance generation.
//
// Exit codes: 0 success, 2 I/O failure, 3 infeasible parameters or malformed
// symbols, 4 corrupt stream.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ctz/adversarial.hpp"
#include "ctz/classifier.hpp"
#include "ctz/codec.hpp"
#include "ctz/threading.hpp"

using namespace ctz;

namespace {

bool g_report = false;

void kv(const char* key, const std::string& val) {
    if (g_report)
        std::printf("%s=%s\n", key, val.c_str());
}
void kv(const char* key, double val) {
    if (g_report)
        std::printf("%s=%.10g\n", key, val);
}
void kv(const char* key, uint64_t val) {
    if (g_report)
        std::printf("%s=%llu\n", key, (unsigned long long)val);
}

int run_compress(const std::string& in, const std::string& out, CodecParams p) {
    Sequence x = read_symbol_file(in, p.alphabet);
    if (x.size() < p.block_len) {
        std::fprintf(stderr, "input shorter than one block\n");
        return 3;
    }
    EncodedStream s;
    s.params = p;
    s.block_count = uint32_t(x.size() / p.block_len);
    s.blocks.resize(s.block_count);
    parallel_for(s.block_count, [&](size_t i) {
        TreeWorkspace ws;
        s.blocks[i] = encode_block(x.window(i * p.block_len, p.block_len), p, &ws);
    });
    s.tail.assign(x.symbols().begin() + size_t(s.block_count) * p.block_len,
                  x.symbols().end());
    auto bytes = s.serialize();
    write_binary_file(out, bytes);

    uint64_t total_bits = 0;
    double hu_sum = 0;
    for (uint32_t i = 0; i < s.block_count; ++i) {
        const auto& b = s.blocks[i];
        total_bits += b.total_bits();
        hu_sum += b.h_u;
        if (!g_report)
            std::printf("block %u: L1=%llu L2=%llu L3=%llu bits  H_u=%.4f  %.4f bits/letter\n",
                        i, (unsigned long long)b.l1_bits, (unsigned long long)b.l2_bits,
                        (unsigned long long)b.l3_bits, b.h_u,
                        double(b.total_bits()) / p.block_len);
    }
    double bpl = double(total_bits) / (double(p.block_len) * s.block_count);
    kv("blocks", uint64_t(s.block_count));
    kv("t", uint64_t(p.t()));
    kv("n_prime", uint64_t(p.n_prime()));
    kv("payload_bits", total_bits);
    kv("stream_bytes", uint64_t(bytes.size()));
    kv("bits_per_letter", bpl);
    kv("mean_block_hu", s.block_count ? hu_sum / s.block_count : 0.0);
    if (!g_report)
        std::printf("%u blocks, %.4f bits/letter (mean block H_u %.4f), %zu bytes\n",
                    s.block_count, bpl, s.block_count ? hu_sum / s.block_count : 0.0,
                    bytes.size());
    return 0;
}

int run_decompress(const std::string& in, const std::string& out) {
    EncodedStream s = EncodedStream::parse(read_binary_file(in));
    std::vector<std::vector<Symbol>> parts(s.block_count);
    parallel_for(s.block_count,
                 [&](size_t i) { parts[i] = decode_block(s.blocks[i], s.params); });
    std::vector<Symbol> syms;
    syms.reserve(size_t(s.block_count) * s.params.block_len + s.tail.size());
    for (auto& p : parts)
        syms.insert(syms.end(), p.begin(), p.end());
    syms.insert(syms.end(), s.tail.begin(), s.tail.end());
    write_symbol_file(out, SymbolSpan(syms.data(), syms.size()));
    kv("symbols", uint64_t(syms.size()));
    if (!g_report)
        std::printf("%zu symbols\n", syms.size());
    return 0;
}

int run_stats(const std::string& in, uint16_t a, uint32_t n, uint32_t m_arg,
              uint32_t depth_override) {
    Sequence x = read_symbol_file(in, a);
    uint32_t m = m_arg ? m_arg : uint32_t(x.size() / n);
    if (m < 2 || x.size() < size_t(n) * m) {
        std::fprintf(stderr, "need at least two N-blocks\n");
        return 3;
    }
    Sequence prefix(x.alphabet(), std::vector<Symbol>(x.symbols().begin(),
                                                      x.symbols().begin() + size_t(n) * m));
    uint32_t depth = depth_override ? depth_override : std::min(log2_squared(n), n - 1);
    EmpiricalModel model(prefix, n, std::min(depth, n - 1));
    for (uint32_t l = 1; l <= std::min<uint32_t>(8, model.depth() + 1); ++l) {
        double h = model.block_entropy(l);
        kv(("h_l" + std::to_string(l)).c_str(), h);
        if (!g_report)
            std::printf("H(%u, N) = %.6f bits/letter\n", l, h);
    }
    double hn = model.nblock_entropy();
    double hu = h_u_value(prefix, n, n, m);
    kv("h_n", hn);
    kv("h_u", hu);
    if (!g_report) {
        std::printf("H(N)   = %.6f bits/letter (N-block entropy)\n", hn);
        std::printf("H_u(N, K=N, M) = %.6f bits/letter\n", hu);
    }
    CodecParams p;
    p.alphabet = a;
    p.block_len = n;
    if (depth_override)
        p.depth_override = depth_override;
    CodecLength L(p);
    RhoMargin r = check_entropy_floor(prefix, n, m, L);
    kv("rho", r.rho_value);
    kv("prop1_margin", r.margin);
    if (!g_report)
        std::printf("rho = %.6f, margin over H(N): %.6f %s\n", r.rho_value, r.margin,
                    r.margin >= 0 ? "(ok)" : "(violated!)");
    return r.margin >= 0 ? 0 : 1;
}

int run_train(const std::string& in, const std::string& out, uint16_t a, uint32_t n,
              double eps) {
    Sequence train = read_symbol_file(in, a);
    Signature sig = build_signature(train, n, eps);
    sig.save(out);
    kv("contexts", uint64_t(sig.contexts.size()));
    kv("h_min", sig.h_min);
    kv("eps_prime", sig.eps_prime);
    kv("t", uint64_t(sig.t));
    if (!g_report)
        std::printf("signature: %zu contexts (depth <= %u), H_min=%.4f, eps'=%.4f\n",
                    sig.contexts.size(), sig.max_context_depth(), sig.h_min, sig.eps_prime);
    return 0;
}

int run_classify(const std::string& sig_path, const std::string& tests, uint32_t mu) {
    Signature sig = Signature::load(sig_path);
    Sequence z = read_symbol_file(tests, sig.alphabet);
    if (z.size() < sig.block_len || z.size() % sig.block_len != 0) {
        std::fprintf(stderr, "test file must hold whole N-vectors\n");
        return 3;
    }
    size_t count = z.size() / sig.block_len;
    std::vector<ClassificationResult> res(count);
    parallel_for(count, [&](size_t i) {
        TreeWorkspace ws;
        res[i] = classify(z.window(i * sig.block_len, sig.block_len), sig, mu, &ws);
    });
    uint64_t accepted = 0;
    for (size_t i = 0; i < count; ++i) {
        const auto& r = res[i];
        accepted += r.accept;
        if (g_report)
            std::printf("test%zu=%s delta%zu=%.6f\n", i, r.accept ? "accept" : "reject", i,
                        r.delta);
        else
            std::printf("test %zu: delta=%.6f h_u=%.6f H_u=%.6f -> %s%s\n", i, r.delta, r.h_u,
                        r.self_hu, r.accept ? "accept" : "reject",
                        r.escape ? " (escape rule)" : "");
    }
    kv("accepted", accepted);
    kv("tests", uint64_t(count));
    return 0;
}

int run_ancestor(const std::string& ypath, const std::string& zpath, uint16_t a, double eps,
                 uint64_t support) {
    Sequence y = read_symbol_file(ypath, a);
    Sequence z = read_symbol_file(zpath, a);
    AncestorOptions o = AncestorOptions::with_default_support(eps, a);
    if (support != uint64_t(-1))
        o.min_support = support;
    AncestorReport r = common_ancestor_test(y, z, o);
    kv("accept", std::string(r.accept ? "yes" : "no"));
    kv("contexts", uint64_t(r.contexts.size()));
    if (!g_report) {
        std::printf("%zu contexts examined\n", r.contexts.size());
        if (r.accept)
            std::printf("feasible: a common conditional law exists within eps=%.4g\n", eps);
    }
    if (!r.accept) {
        const auto& c = r.contexts[r.first_infeasible];
        std::string ctx;
        for (Symbol s : c.context)
            ctx += std::to_string(int(s)) + ",";
        if (!ctx.empty())
            ctx.pop_back();
        kv("witness_context", ctx);
        kv("witness_divergence", c.divergence);
        if (!g_report)
            std::printf("infeasible at context [%s]: min-max divergence %.4f > %.4g\n",
                        ctx.c_str(), c.divergence, eps);
    }
    return 0;
}

int run_genadv(uint16_t a, uint32_t ell, uint32_t hnum, uint32_t hden, uint32_t m,
               uint64_t seed, const std::string& out) {
    AdversarialParams p;
    p.alphabet = a;
    p.segment_len = ell;
    p.rate_num = hnum;
    p.rate_den = hden;
    p.repetitions = m;
    p.seed = seed;
    Sequence x = generate(p);
    write_symbol_file(out, x.span());
    EntropyBoundsReport r = verify_entropy_bounds(x, p);
    kv("n", uint64_t(p.block_len()));
    kv("segments", uint64_t(p.segment_count()));
    kv("h_u", r.h_u);
    kv("h_seg", r.h_seg);
    kv("log_bound", r.log_bound);
    kv("two_h", r.two_h);
    kv("chain_ok", std::string(r.chain_ok ? "yes" : "no"));
    if (!g_report)
        std::printf("N=%u, %u segments of length %u; H_u=%.4f <= H(l)=%.4f <= log2(N)/l=%.4f "
                    "<= 2h=%.4f %s\n",
                    p.block_len(), p.segment_count(), ell, r.h_u, r.h_seg, r.log_bound,
                    r.two_h, r.chain_ok ? "(chain ok)" : "(chain VIOLATED)");
    return r.chain_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-tree block compression and classification"};
    app.require_subcommand(1);

    uint16_t alphabet = 2;
    uint32_t block = 1024;
    double delta = 0.25;
    double epsilon = 0.1;
    uint32_t depth = 0;
    uint64_t seed = 1;
    app.add_option("--alphabet,-a", alphabet, "alphabet size (2..256)")->capture_default_str();
    app.add_option("--block,-b", block, "block length N")->capture_default_str();
    app.add_option("--delta", delta, "codec exponent (N' = N^(1-delta))")
        ->capture_default_str();
    app.add_option("--epsilon,-e", epsilon, "classifier tolerance")->capture_default_str();
    app.add_option("--depth", depth, "context horizon override (0 = ceil(log2(N)^2))");
    app.add_option("--seed", seed, "generator seed")->capture_default_str();
    app.add_flag("--report", g_report, "line-oriented key=value output");

    std::string in, out, second;
    uint32_t m_blocks = 0;
    uint32_t mu = 0;
    uint32_t ell = 8, hnum = 1, hden = 2, reps = 16;
    uint64_t support = uint64_t(-1);

    auto* c_comp = app.add_subcommand("compress", "encode a symbol file in N-blocks");
    c_comp->add_option("input", in)->required();
    c_comp->add_option("output", out)->required();

    auto* c_dec = app.add_subcommand("decompress", "decode a stream");
    c_dec->add_option("input", in)->required();
    c_dec->add_option("output", out)->required();

    auto* c_stats = app.add_subcommand("stats", "empirical entropies and the rho margin");
    c_stats->add_option("input", in)->required();
    c_stats->add_option("--blocks,-m", m_blocks, "number of N-blocks (0 = all)");

    auto* c_train = app.add_subcommand("train", "build a classifier signature");
    c_train->add_option("training", in)->required();
    c_train->add_option("output", out)->required();

    auto* c_cls = app.add_subcommand("classify", "score concatenated N-vectors");
    c_cls->add_option("signature", in)->required();
    c_cls->add_option("tests", out)->required();
    c_cls->add_option("--mu", mu, "Hamming distortion radius (N <= 20)");

    auto* c_anc = app.add_subcommand("ancestor", "common-ancestor feasibility of two files");
    c_anc->add_option("y", in)->required();
    c_anc->add_option("z", second)->required();
    c_anc->add_option("--support", support,
                      "occurrence floor per context (default ceil(4(A-1)/eps))");

    auto* c_gen = app.add_subcommand("genadv", "generate a repeated-block hard instance");
    c_gen->add_option("output", out)->required();
    c_gen->add_option("--ell,-l", ell, "segment length")->capture_default_str();
    c_gen->add_option("--h-num", hnum, "rate numerator")->capture_default_str();
    c_gen->add_option("--h-den", hden, "rate denominator")->capture_default_str();
    c_gen->add_option("--reps,-m", reps, "block repetitions")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_comp->parsed()) {
            CodecParams p;
            p.alphabet = alphabet;
            p.block_len = block;
            p.delta = delta;
            p.depth_override = depth;
            p.validate();
            return run_compress(in, out, p);
        }
        if (c_dec->parsed())
            return run_decompress(in, out);
        if (c_stats->parsed())
            return run_stats(in, alphabet, block, m_blocks, depth);
        if (c_train->parsed())
            return run_train(in, out, alphabet, block, epsilon);
        if (c_cls->parsed())
            return run_classify(in, out, mu);
        if (c_anc->parsed())
            return run_ancestor(in, second, alphabet, epsilon, support);
        if (c_gen->parsed())
            return run_genadv(alphabet, ell, hnum, hden, reps, seed, out);
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return 4;
    } catch (const DecodeError& e) {
        std::fprintf(stderr, "decode error: %s\n", e.what());
        return 4;
    } catch (const ParamError& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
