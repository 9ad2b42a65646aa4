#ifndef CTZ_CODEC_HPP
#define CTZ_CODEC_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "ctz/context_tree.hpp"
#include "ctz/sequence.hpp"

namespace ctz {

// Per-stream coding parameters. N' = floor(N^(1-delta)) sets the candidate
// tree's probability floor; t is the context horizon, clamped so a block
// always splits into at least two sub-blocks.
struct CodecParams {
    uint16_t alphabet = 2;
    uint32_t block_len = 1024;     // N
    double delta = 0.25;
    uint32_t depth_override = 0;   // 0 = ceil((log2 N)^2)

    uint32_t t() const;            // effective context horizon
    uint32_t n_prime() const;      // floor(N^(1-delta)), at least 1
    uint32_t symbol_bits() const;  // ceil(log2 A)
    void validate() const;
};

// One encoded block: m1 = serialized context set, m2 = raw t-symbol prefix,
// m3 = KT-mixture arithmetic payload.
struct EncodedBlock {
    std::vector<uint8_t> m1, m2, m3;
    uint64_t l1_bits = 0, l2_bits = 0, l3_bits = 0;
    uint64_t total_bits() const { return l1_bits + l2_bits + l3_bits; }

    // encoder-side diagnostics (not on the wire)
    double h_u = 0;
    uint32_t leaf_count = 0;
};

// explicit serialization bound for the accounting tests:
// (t ceil(log2 A) + ceil(log2 t) + 2) * leaves + 32-bit header
uint64_t tree_bits_bound(uint32_t leaves, uint32_t t, uint16_t a);

std::vector<uint8_t> serialize_tree(const std::vector<ChosenContext>& contexts, uint32_t t,
                                    uint16_t a, uint64_t& bit_len);
std::vector<std::vector<Symbol>> deserialize_tree(const uint8_t* data, uint64_t bit_len,
                                                  uint32_t t, uint16_t a);

EncodedBlock encode_block(SymbolSpan block, const CodecParams& p, TreeWorkspace* ws = nullptr);
std::vector<Symbol> decode_block(const EncodedBlock& b, const CodecParams& p);

// Stream container: header, M blocks, raw tail for lengths not divisible by N.
struct EncodedStream {
    CodecParams params;
    uint32_t block_count = 0;
    std::vector<EncodedBlock> blocks;
    std::vector<Symbol> tail;

    std::vector<uint8_t> serialize() const;
    static EncodedStream parse(const std::vector<uint8_t>& bytes);
};

EncodedStream compress(const Sequence& x, const CodecParams& p);
Sequence decompress(const std::vector<uint8_t>& bytes);
Sequence decompress(const EncodedStream& s);

// A length function: bit length of a one-to-one code on N-blocks.
class LengthFunction {
public:
    virtual ~LengthFunction() = default;
    virtual uint64_t length_bits(SymbolSpan block) const = 0;
    virtual bool kraft_ok() const = 0;
};

// fixed-rate raw code, |v| ceil(log2 A) + 1 bits
class RawLength : public LengthFunction {
public:
    explicit RawLength(uint16_t a) : a_(a) {}
    uint64_t length_bits(SymbolSpan block) const override;
    bool kraft_ok() const override { return true; }

private:
    uint16_t a_;
};

// the codec's own length function: container header + block bits
class CodecLength : public LengthFunction {
public:
    explicit CodecLength(CodecParams p) : p_(p), ws_(std::make_unique<TreeWorkspace>()) {}
    uint64_t length_bits(SymbolSpan block) const override;
    bool kraft_ok() const override { return true; } // prefix-free container
    static constexpr uint64_t container_bits = 64;  // two 32-bit length fields

private:
    CodecParams p_;
    std::unique_ptr<TreeWorkspace> ws_;
};

// worst-phase per-letter compression of X_1^{NM} under L; boundary pieces
// are raw coded
double rho(const Sequence& x, uint32_t n, uint32_t m, const LengthFunction& L);

// the worst-phase compression can never undercut the N-block entropy
struct RhoMargin {
    double rho_value = 0;
    double h_mn = 0;       // H over N-blocks, bits per letter
    double margin = 0;     // rho - h_mn, must be >= 0
};

RhoMargin check_entropy_floor(const Sequence& x, uint32_t n, uint32_t m,
                               const LengthFunction& L);

} // namespace ctz

#endif
