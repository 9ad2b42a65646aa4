#include "ctz/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ctz/context_tree.hpp"
#include "ctz/empirical_model.hpp"

namespace ctz {

uint32_t AdversarialParams::rate_bits() const {
    return (segment_len * rate_num) / rate_den;
}

uint32_t AdversarialParams::segment_count() const { return 1u << rate_bits(); }

uint32_t AdversarialParams::block_len() const { return segment_len * segment_count(); }

void AdversarialParams::validate() const {
    Alphabet a(alphabet);
    if (segment_len < 1)
        throw ParamError("segment length must be positive");
    if (rate_den == 0 || rate_num == 0 || (segment_len * rate_num) % rate_den != 0)
        throw ParamError("h*l must be a positive integer");
    if (repetitions < 2)
        throw ParamError("need at least two block repetitions");
    uint32_t bits = rate_bits();
    if (bits == 0 || bits > 24)
        throw ParamError("segment count out of the enumerable range");
    double space = double(segment_len) * std::log2(double(alphabet));
    if (space > 24.0)
        throw ParamError("alphabet^l too large to enumerate");
    if (double(bits) > space + 1e-9)
        throw ParamError("not enough distinct l-vectors for 2^(h*l) segments");
}

Sequence generate(const AdversarialParams& p) {
    p.validate();
    const uint32_t l = p.segment_len;
    const uint32_t tprime = p.segment_count();
    uint64_t space = 1;
    for (uint32_t i = 0; i < l; ++i)
        space *= p.alphabet;

    std::mt19937_64 rng(p.seed);
    // partial Fisher-Yates over the enumeration of all l-vectors
    std::vector<uint32_t> ids(space);
    for (uint64_t i = 0; i < space; ++i)
        ids[i] = uint32_t(i);
    for (uint32_t i = 0; i < tprime; ++i) {
        uint64_t j = i + rng() % (space - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(tprime);
    std::shuffle(ids.begin(), ids.end(), rng); // concatenation order

    std::vector<Symbol> block;
    block.reserve(size_t(l) * tprime);
    for (uint32_t id : ids) {
        // big-endian base-A digits
        for (uint32_t k = l; k-- > 0;) {
            uint64_t div = 1;
            for (uint32_t q = 0; q < k; ++q)
                div *= p.alphabet;
            block.push_back(Symbol((id / div) % p.alphabet));
        }
    }
    std::vector<Symbol> x;
    x.reserve(block.size() * p.repetitions);
    for (uint32_t r = 0; r < p.repetitions; ++r)
        x.insert(x.end(), block.begin(), block.end());
    return Sequence(Alphabet(p.alphabet), std::move(x));
}

EntropyBoundsReport verify_entropy_bounds(const Sequence& x, const AdversarialParams& p) {
    p.validate();
    const uint32_t n = p.block_len();
    const uint32_t m = p.repetitions;
    if (x.size() != size_t(n) * m)
        throw ParamError("sequence does not match the parameters");

    EntropyBoundsReport r;
    r.two_h = 2.0 * p.rate();
    r.log_bound = std::log2(double(n)) / double(p.segment_len);

    uint32_t depth = std::min(log2_squared(n), n - 1);
    EmpiricalModel model(x, n, depth);
    r.h_seg = model.block_entropy(p.segment_len);
    r.h1 = model.block_entropy(1);

    // K_hat = N*M/(M-1) as an exact rational
    r.h_u = h_u_value(x, n, uint64_t(n) * m, m - 1, m);

    r.min_segment_prob = 1.0;
    r.segment_prob_ok = true;
    Ratio floor_ratio(m - 1, uint64_t(m) * n);
    r.segment_prob_floor = floor_ratio.value();
    for (uint32_t s = 0; s < p.segment_count(); ++s) {
        Ratio prob = model.probability(x.window(size_t(s) * p.segment_len, p.segment_len));
        r.min_segment_prob = std::min(r.min_segment_prob, prob.value());
        if (prob < floor_ratio)
            r.segment_prob_ok = false;
    }

    r.chain_ok = r.h_u <= r.h_seg + 1e-9 && r.h_seg <= r.log_bound + 1e-9 &&
                 r.log_bound <= r.two_h + 1e-9;
    return r;
}

} // namespace ctz
