#include "ctz/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ctz/arith.hpp"
#include "ctz/bitio.hpp"
#include "ctz/kt.hpp"

namespace ctz {

namespace {

uint32_t ceil_log2(uint32_t v) {
    uint32_t b = 0;
    while ((uint64_t(1) << b) < v)
        ++b;
    return b;
}

uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}
uint16_t be16(const uint8_t* p) { return uint16_t((uint16_t(p[0]) << 8) | p[1]); }

std::vector<uint8_t> pack_symbols(SymbolSpan syms, uint32_t bits, uint64_t& bit_len) {
    BitWriter w;
    for (Symbol s : syms)
        w.put_bits(s, bits);
    bit_len = w.bit_count();
    return w.take();
}

std::vector<Symbol> unpack_symbols(const uint8_t* data, uint64_t bit_len, size_t count,
                                   uint32_t bits, uint16_t a) {
    BitReader r(data, bit_len);
    std::vector<Symbol> out(count);
    for (size_t i = 0; i < count; ++i) {
        uint64_t v = r.get_bits(bits);
        if (v >= a)
            throw DecodeError("symbol value out of range", r.position());
        out[i] = Symbol(v);
    }
    return out;
}

} // namespace

uint32_t CodecParams::t() const {
    uint32_t t = depth_override ? depth_override : log2_squared(block_len);
    return std::max<uint32_t>(1, std::min(t, block_len / 2));
}

uint32_t CodecParams::n_prime() const {
    double np = std::pow(double(block_len), 1.0 - delta);
    return std::max<uint32_t>(1, uint32_t(np + 1e-9));
}

uint32_t CodecParams::symbol_bits() const { return Alphabet(alphabet).bits_per_symbol(); }

void CodecParams::validate() const {
    if (alphabet < 2 || alphabet > 256)
        throw ParamError("alphabet out of range");
    if (block_len < 2)
        throw ParamError("block length must be at least 2");
    if (delta <= 0.0 || delta >= 1.0)
        throw ParamError("delta must lie in (0,1)");
}

uint64_t tree_bits_bound(uint32_t leaves, uint32_t t, uint16_t a) {
    uint64_t per = uint64_t(t) * Alphabet(a).bits_per_symbol() + ceil_log2(t) + 2;
    return per * leaves + 32;
}

std::vector<uint8_t> serialize_tree(const std::vector<ChosenContext>& contexts, uint32_t t,
                                    uint16_t a, uint64_t& bit_len) {
    uint32_t len_bits = ceil_log2(t + 1);
    uint32_t sym_bits = Alphabet(a).bits_per_symbol();
    BitWriter w;
    w.put_bits(uint32_t(contexts.size()), 32);
    for (const auto& c : contexts) {
        w.put_bits(uint32_t(c.context.size()), len_bits);
        for (Symbol s : c.context)
            w.put_bits(s, sym_bits);
    }
    bit_len = w.bit_count();
    return w.take();
}

std::vector<std::vector<Symbol>> deserialize_tree(const uint8_t* data, uint64_t bit_len,
                                                  uint32_t t, uint16_t a) {
    uint32_t len_bits = ceil_log2(t + 1);
    uint32_t sym_bits = Alphabet(a).bits_per_symbol();
    BitReader r(data, bit_len);
    uint32_t count = uint32_t(r.get_bits(32));
    if (uint64_t(count) * len_bits + 32 > bit_len + 7)
        throw DecodeError("context count implausible", r.position());
    std::vector<std::vector<Symbol>> out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t len = uint32_t(r.get_bits(len_bits));
        if (len > t)
            throw DecodeError("context longer than the horizon", r.position());
        std::vector<Symbol> ctx(len);
        for (uint32_t j = 0; j < len; ++j) {
            uint64_t v = r.get_bits(sym_bits);
            if (v >= a)
                throw DecodeError("context symbol out of range", r.position());
            ctx[j] = Symbol(v);
        }
        out.push_back(std::move(ctx));
        if (r.overrun())
            throw DecodeError("tree part truncated", r.position());
    }
    return out;
}

EncodedBlock encode_block(SymbolSpan block, const CodecParams& p, TreeWorkspace* ws) {
    p.validate();
    const uint32_t n = p.block_len;
    if (block.size() != n)
        throw ParamError("block length mismatch");
    const uint32_t t = p.t();
    const uint16_t A = p.alphabet;

    Sequence bs(Alphabet(A), std::vector<Symbol>(block.begin(), block.end()));
    EmpiricalModel model(std::move(bs), t, t - 1);
    TreeOptions opt;
    opt.k_num = p.n_prime();
    opt.max_depth = t - 1;
    opt.early_stop = true;
    TreeAnalysis an = analyze_contexts(model, opt, ws);

    EncodedBlock out;
    out.h_u = an.h_u;
    out.leaf_count = uint32_t(an.chosen.size());
    out.m1 = serialize_tree(an.chosen, t, A, out.l1_bits);
    out.m2 = pack_symbols(block.subspan(0, t), p.symbol_bits(), out.l2_bits);

    std::vector<std::vector<Symbol>> ctxs;
    ctxs.reserve(an.chosen.size());
    for (auto& c : an.chosen)
        ctxs.push_back(c.context);
    ContextResolver res(A, ctxs);
    std::vector<KTState> kt(res.state_count(), KTState(A));

    BitWriter w;
    ArithmeticEncoder enc(w);
    for (uint32_t i = t; i < n; ++i) {
        uint32_t st = res.resolve(block.data(), i);
        KTState& k = kt[st];
        uint32_t lo = k.cum(block[i]);
        enc.encode(lo, lo + k.freq(block[i]), k.total());
        k.update(block[i]);
    }
    enc.finish();
    out.l3_bits = w.bit_count();
    out.m3 = w.take();
    return out;
}

std::vector<Symbol> decode_block(const EncodedBlock& b, const CodecParams& p) {
    const uint32_t n = p.block_len;
    const uint32_t t = p.t();
    const uint16_t A = p.alphabet;

    auto ctxs = deserialize_tree(b.m1.data(), b.l1_bits, t, A);
    std::vector<Symbol> out = unpack_symbols(b.m2.data(), b.l2_bits, t, p.symbol_bits(), A);
    out.reserve(n);

    ContextResolver res(A, ctxs);
    std::vector<KTState> kt(res.state_count(), KTState(A));

    BitReader r(b.m3.data(), b.l3_bits);
    ArithmeticDecoder dec(r);
    for (uint32_t i = t; i < n; ++i) {
        uint32_t st = res.resolve(out.data(), out.size());
        KTState& k = kt[st];
        uint32_t lo, hi;
        uint16_t sym = k.locate(dec.target(k.total()), lo, hi);
        dec.consume(lo, hi, k.total());
        k.update(sym);
        out.push_back(Symbol(sym));
    }
    // the decoder may read its 32 lookahead bits past the payload, never more
    if (r.position() > b.l3_bits + 32)
        throw DecodeError("payload truncated", r.position());
    return out;
}

std::vector<uint8_t> EncodedStream::serialize() const {
    std::vector<uint8_t> v;
    v.push_back('Z');
    v.push_back('C');
    v.push_back('T');
    v.push_back('C');
    v.push_back(1);
    put_u16_be(v, params.alphabet);
    put_u32_be(v, params.block_len);
    put_u32_be(v, params.t());
    put_u32_be(v, block_count);
    for (const auto& b : blocks) {
        put_u32_be(v, uint32_t(b.l1_bits));
        put_u32_be(v, uint32_t(b.l3_bits));
        v.insert(v.end(), b.m1.begin(), b.m1.end());
        v.insert(v.end(), b.m2.begin(), b.m2.end());
        v.insert(v.end(), b.m3.begin(), b.m3.end());
    }
    put_u32_be(v, uint32_t(tail.size()));
    if (!tail.empty()) {
        uint64_t bits = 0;
        auto packed =
            pack_symbols(SymbolSpan(tail.data(), tail.size()), params.symbol_bits(), bits);
        v.insert(v.end(), packed.begin(), packed.end());
    }
    return v;
}

EncodedStream EncodedStream::parse(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 19)
        throw FormatError("stream too short for a header");
    if (std::memcmp(bytes.data(), "ZCTC", 4) != 0)
        throw FormatError("bad magic");
    if (bytes[4] != 1)
        throw FormatError("unsupported version");
    EncodedStream s;
    s.params.alphabet = be16(bytes.data() + 5);
    s.params.block_len = be32(bytes.data() + 7);
    uint32_t t = be32(bytes.data() + 11);
    s.block_count = be32(bytes.data() + 15);
    s.params.validate();
    if (t != s.params.t())
        s.params.depth_override = t;
    if (s.params.t() != t)
        throw FormatError("inconsistent context horizon");

    uint64_t l2_bits = uint64_t(t) * s.params.symbol_bits();
    size_t pos = 19;
    auto need = [&](size_t k) {
        if (pos + k > bytes.size())
            throw DecodeError("stream truncated", pos * 8);
    };
    for (uint32_t i = 0; i < s.block_count; ++i) {
        need(8);
        EncodedBlock b;
        b.l1_bits = be32(bytes.data() + pos);
        b.l3_bits = be32(bytes.data() + pos + 4);
        b.l2_bits = l2_bits;
        pos += 8;
        size_t n1 = size_t((b.l1_bits + 7) / 8), n2 = size_t((l2_bits + 7) / 8),
               n3 = size_t((b.l3_bits + 7) / 8);
        need(n1 + n2 + n3);
        b.m1.assign(bytes.begin() + pos, bytes.begin() + pos + n1);
        pos += n1;
        b.m2.assign(bytes.begin() + pos, bytes.begin() + pos + n2);
        pos += n2;
        b.m3.assign(bytes.begin() + pos, bytes.begin() + pos + n3);
        pos += n3;
        s.blocks.push_back(std::move(b));
    }
    need(4);
    uint32_t tail_len = be32(bytes.data() + pos);
    pos += 4;
    if (tail_len) {
        if (tail_len >= s.params.block_len)
            throw DecodeError("tail not shorter than a block", pos * 8);
        size_t tb = (size_t(tail_len) * s.params.symbol_bits() + 7) / 8;
        need(tb);
        s.tail = unpack_symbols(bytes.data() + pos,
                                uint64_t(tail_len) * s.params.symbol_bits(), tail_len,
                                s.params.symbol_bits(), s.params.alphabet);
        pos += tb;
    }
    return s;
}

EncodedStream compress(const Sequence& x, const CodecParams& p) {
    p.validate();
    if (x.alpha_size() != p.alphabet)
        throw ParamError("alphabet mismatch");
    if (x.size() < p.block_len)
        throw ParamError("input shorter than one block");
    EncodedStream s;
    s.params = p;
    s.block_count = uint32_t(x.size() / p.block_len);
    TreeWorkspace ws;
    for (uint32_t i = 0; i < s.block_count; ++i)
        s.blocks.push_back(
            encode_block(x.window(size_t(i) * p.block_len, p.block_len), p, &ws));
    s.tail.assign(x.symbols().begin() + size_t(s.block_count) * p.block_len,
                  x.symbols().end());
    return s;
}

Sequence decompress(const EncodedStream& s) {
    std::vector<Symbol> out;
    out.reserve(size_t(s.block_count) * s.params.block_len + s.tail.size());
    for (const auto& b : s.blocks) {
        auto block = decode_block(b, s.params);
        out.insert(out.end(), block.begin(), block.end());
    }
    out.insert(out.end(), s.tail.begin(), s.tail.end());
    return Sequence(Alphabet(s.params.alphabet), std::move(out));
}

Sequence decompress(const std::vector<uint8_t>& bytes) {
    return decompress(EncodedStream::parse(bytes));
}

uint64_t RawLength::length_bits(SymbolSpan block) const {
    return block.size() * Alphabet(a_).bits_per_symbol() + 1;
}

uint64_t CodecLength::length_bits(SymbolSpan block) const {
    EncodedBlock b = encode_block(block, p_, ws_.get());
    return container_bits + b.total_bits();
}

double rho(const Sequence& x, uint32_t n, uint32_t m, const LengthFunction& L) {
    if (x.size() < size_t(n) * m)
        throw ParamError("sequence shorter than N*M");
    if (n < 2 || m < 2)
        throw ParamError("need N >= 2 and M >= 2");
    RawLength raw(x.alpha_size());
    double denom = double(n) * m;
    double worst = 0;
    for (uint32_t i = 1; i <= n - 1; ++i) {
        uint64_t bits = 0;
        for (uint32_t j = 0; j + 2 <= m; ++j)
            bits += L.length_bits(x.window(i + size_t(j) * n, n));
        bits += raw.length_bits(x.window(0, i));                         // X_1^i
        bits += raw.length_bits(x.window(i + size_t(m - 1) * n, n - i)); // tail piece
        worst = std::max(worst, double(bits) / denom);
    }
    return worst;
}

RhoMargin check_entropy_floor(const Sequence& x, uint32_t n, uint32_t m,
                               const LengthFunction& L) {
    if (!L.kraft_ok())
        throw ParamError("length function violates the Kraft inequality");
    RhoMargin r;
    Sequence prefix(
        x.alphabet(),
        std::vector<Symbol>(x.symbols().begin(), x.symbols().begin() + size_t(n) * m));
    EmpiricalModel model(std::move(prefix), n, 1);
    r.h_mn = model.nblock_entropy();
    r.rho_value = rho(x, n, m, L);
    r.margin = r.rho_value - r.h_mn;
    return r;
}

} // namespace ctz
