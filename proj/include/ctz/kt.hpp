#ifndef CTZ_KT_HPP
#define CTZ_KT_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace ctz {

// Krichevsky-Trofimov sequential estimator over an A-ary alphabet.
// P(a | n_0..n_{A-1}) = (n_a + 1/2) / (n + A/2); doubling gives the exact
// integer frequencies 2 n_a + 1 out of 2 n + A for the arithmetic coder.
class KTState {
public:
    explicit KTState(uint16_t a) : counts_(a, 0) {}

    uint32_t freq(uint16_t sym) const { return 2 * counts_[sym] + 1; }
    uint32_t total() const { return 2 * n_ + uint32_t(counts_.size()); }
    uint32_t cum(uint16_t sym) const {
        uint32_t c = 0;
        for (uint16_t s = 0; s < sym; ++s)
            c += freq(s);
        return c;
    }
    // symbol whose cumulative interval contains `target`, with its bounds
    uint16_t locate(uint32_t target, uint32_t& lo, uint32_t& hi) const {
        uint32_t c = 0;
        uint16_t s = 0;
        for (;; ++s) {
            uint32_t f = 2 * counts_[s] + 1;
            if (target < c + f) {
                lo = c;
                hi = c + f;
                return s;
            }
            c += f;
        }
    }
    void update(uint16_t sym) {
        ++counts_[sym];
        ++n_;
    }

    double prob(uint16_t sym) const { return double(freq(sym)) / double(total()); }
    double code_bits(uint16_t sym) const { return -std::log2(prob(sym)); }

private:
    std::vector<uint32_t> counts_;
    uint32_t n_ = 0;
};

} // namespace ctz

#endif
