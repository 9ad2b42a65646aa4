#ifndef CTZ_ADVERSARIAL_HPP
#define CTZ_ADVERSARIAL_HPP

#include <cstdint>

#include "ctz/sequence.hpp"

namespace ctz {

// Parameters of the hard-instance family: one N-block made of 2^{h*l}
// distinct l-segments, repeated M times. h is a rational so 2^{h*l} is
// integral by construction.
struct AdversarialParams {
    uint16_t alphabet = 2;
    uint32_t segment_len = 8; // l
    uint32_t rate_num = 1;    // h = rate_num / rate_den bits per letter
    uint32_t rate_den = 2;
    uint32_t repetitions = 16; // M
    uint64_t seed = 1;

    uint32_t rate_bits() const;     // h*l, an integer
    uint32_t segment_count() const; // T' = 2^{h*l}
    uint32_t block_len() const;     // N = l * T'
    double rate() const { return double(rate_num) / double(rate_den); }
    void validate() const;
};

// Seeded construction: choose T' distinct l-vectors uniformly without
// replacement, concatenate them in one random order, repeat the block M
// times. Deterministic for a fixed seed.
Sequence generate(const AdversarialParams& p);

struct EntropyBoundsReport {
    double h_u = 0;        // H_u(N, K_hat, M), K_hat = N*M/(M-1)
    double h_seg = 0;      // H over l-windows, bits/letter
    double log_bound = 0;  // log2(N) / l
    double two_h = 0;      // 2h
    double h1 = 0;         // single-letter entropy H(1, N)
    double min_segment_prob = 0;
    double segment_prob_floor = 0; // (M-1)/(M*N)
    bool chain_ok = false;         // h_u <= h_seg <= log_bound <= 2h
    bool segment_prob_ok = false;  // every used segment above the floor
};

EntropyBoundsReport verify_entropy_bounds(const Sequence& x, const AdversarialParams& p);

} // namespace ctz

#endif
